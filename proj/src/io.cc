// Copyright 2026 The zraudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "zraudit/io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace zraudit {
namespace {

absl::Status CsvError(size_t line, absl::string_view message) {
  return absl::InvalidArgumentError(
      absl::StrCat("line ", line, ": ", message));
}

absl::StatusOr<int> ParseSign(std::string_view text, bool allow_zero) {
  if (text == "1" || text == "+1") return 1;
  if (text == "-1") return -1;
  if (allow_zero && text == "0") return 0;
  return absl::InvalidArgumentError(
      absl::StrCat("expected ", allow_zero ? "-1, 0 or +1" : "-1 or +1",
                   ", got '", std::string(text), "'"));
}

}  // namespace

std::string FormatDouble(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

absl::StatusOr<double> ParseDouble(std::string_view text) {
  if (text == "inf" || text == "+inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  double value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) {
    return absl::InvalidArgumentError(
        absl::StrCat("not a number: '", std::string(text), "'"));
  }
  return value;
}

void WriteRecordsCsv(std::ostream& out, std::span<const AuditRecord> records) {
  bool any_score = false;
  bool any_guess = false;
  bool any_pi = false;
  size_t dims = 0;
  for (const AuditRecord& rec : records) {
    any_score |= rec.score.has_value();
    any_guess |= rec.guess != 0;
    any_pi |= rec.pi_hat.has_value();
    dims = std::max(dims, rec.features.size());
  }
  out << "id,membership";
  if (any_score) out << ",score";
  if (any_guess) out << ",guess";
  if (any_pi) out << ",pi_hat";
  for (size_t j = 0; j < dims; ++j) out << ",f" << j;
  out << '\n';
  for (const AuditRecord& rec : records) {
    out << rec.id << ',' << rec.membership;
    if (any_score) {
      out << ',';
      if (rec.score.has_value()) out << FormatDouble(*rec.score);
    }
    if (any_guess) out << ',' << rec.guess;
    if (any_pi) {
      out << ',';
      if (rec.pi_hat.has_value()) out << FormatDouble(*rec.pi_hat);
    }
    for (size_t j = 0; j < dims; ++j) {
      out << ',';
      if (j < rec.features.size()) out << FormatDouble(rec.features[j]);
    }
    out << '\n';
  }
}

absl::StatusOr<std::vector<AuditRecord>> ReadRecordsCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    return absl::InvalidArgumentError("missing header row");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = absl::StrSplit(line, ',');

  enum class Column { kId, kMembership, kScore, kGuess, kPiHat, kFeature };
  std::vector<Column> kinds;
  std::vector<size_t> feature_index;
  std::map<std::string, int> seen;
  size_t dims = 0;
  bool has_membership = false;
  bool has_score = false;
  for (const std::string& raw : header) {
    const std::string name(absl::StripAsciiWhitespace(raw));
    if (seen[name]++ > 0) {
      return CsvError(1, absl::StrCat("duplicate column '", name, "'"));
    }
    size_t index = 0;
    if (name == "id") {
      kinds.push_back(Column::kId);
    } else if (name == "membership") {
      kinds.push_back(Column::kMembership);
      has_membership = true;
    } else if (name == "score") {
      kinds.push_back(Column::kScore);
      has_score = true;
    } else if (name == "guess") {
      kinds.push_back(Column::kGuess);
    } else if (name == "pi_hat") {
      kinds.push_back(Column::kPiHat);
    } else if (name.size() > 1 && name[0] == 'f' &&
               std::from_chars(name.data() + 1, name.data() + name.size(),
                               index)
                       .ptr == name.data() + name.size()) {
      kinds.push_back(Column::kFeature);
      dims = std::max(dims, index + 1);
    } else {
      return CsvError(1, absl::StrCat("unknown column '", name, "'"));
    }
    feature_index.push_back(index);
  }
  if (!has_membership) return CsvError(1, "missing 'membership' column");
  const size_t feature_columns = static_cast<size_t>(
      std::count(kinds.begin(), kinds.end(), Column::kFeature));
  if (feature_columns != dims) {
    return CsvError(1, "feature columns must be f0..f{d-1} without gaps");
  }
  if (!has_score && dims == 0) {
    return CsvError(1, "need a 'score' column or feature columns");
  }

  std::vector<AuditRecord> records;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<absl::string_view> cells = absl::StrSplit(line, ',');
    if (cells.size() != kinds.size()) {
      return CsvError(line_no, absl::StrCat("expected ", kinds.size(),
                                            " fields, got ", cells.size()));
    }
    AuditRecord rec;
    rec.id = absl::StrCat(records.size());
    rec.features.assign(dims, 0.0);
    for (size_t j = 0; j < cells.size(); ++j) {
      const absl::string_view stripped = absl::StripAsciiWhitespace(cells[j]);
      const std::string_view cell(stripped.data(), stripped.size());
      switch (kinds[j]) {
        case Column::kId:
          rec.id = std::string(cell);
          break;
        case Column::kMembership: {
          absl::StatusOr<int> s = ParseSign(cell, false);
          if (!s.ok()) return CsvError(line_no, s.status().message());
          rec.membership = *s;
          break;
        }
        case Column::kGuess: {
          if (cell.empty()) break;
          absl::StatusOr<int> g = ParseSign(cell, true);
          if (!g.ok()) return CsvError(line_no, g.status().message());
          rec.guess = *g;
          break;
        }
        case Column::kScore:
        case Column::kPiHat:
        case Column::kFeature: {
          if (cell.empty()) {
            if (kinds[j] == Column::kFeature) {
              return CsvError(line_no, "empty feature value");
            }
            break;
          }
          absl::StatusOr<double> v = ParseDouble(cell);
          if (!v.ok()) return CsvError(line_no, v.status().message());
          if (!std::isfinite(*v)) {
            return CsvError(line_no, "non-finite value");
          }
          if (kinds[j] == Column::kScore) {
            rec.score = *v;
          } else if (kinds[j] == Column::kPiHat) {
            if (*v < 0 || *v > 1) {
              return CsvError(line_no, "pi_hat outside [0, 1]");
            }
            rec.pi_hat = *v;
          } else {
            rec.features[feature_index[j]] = *v;
          }
          break;
        }
      }
    }
    records.push_back(std::move(rec));
  }
  if (records.empty()) return absl::InvalidArgumentError("no data rows");
  return records;
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

absl::Status WriteFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  }
  out << contents;
  out.close();
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

Json ToJson(const TradeoffCurve& curve) {
  Json j;
  j["family"] = std::string(CurveFamilyName(curve.family()));
  switch (curve.family()) {
    case CurveFamily::kEpsDelta:
      j["eps"] = curve.eps();
      j["delta"] = curve.delta();
      break;
    case CurveFamily::kGaussian:
      j["mu"] = curve.mu();
      break;
    case CurveFamily::kGPrime:
      j["mu"] = curve.mu();
      j["delta_ds"] = curve.delta();
      break;
  }
  return j;
}

absl::StatusOr<TradeoffCurve> CurveFromJson(const Json& json) {
  if (!json.is_object() || !json.contains("family") ||
      !json["family"].is_string()) {
    return absl::InvalidArgumentError("curve needs a string 'family'");
  }
  auto number = [&](const char* key) -> absl::StatusOr<double> {
    if (!json.contains(key) || !json[key].is_number()) {
      return absl::InvalidArgumentError(
          absl::StrCat("curve needs a numeric '", key, "'"));
    }
    return json[key].get<double>();
  };
  const std::string family = json["family"].get<std::string>();
  if (family == "eps_delta") {
    absl::StatusOr<double> eps = number("eps");
    absl::StatusOr<double> delta = number("delta");
    if (!eps.ok()) return eps.status();
    if (!delta.ok()) return delta.status();
    return TradeoffCurve::EpsDelta(*eps, *delta);
  }
  if (family == "gdp") {
    absl::StatusOr<double> mu = number("mu");
    if (!mu.ok()) return mu.status();
    return TradeoffCurve::Gaussian(*mu);
  }
  if (family == "gprime") {
    absl::StatusOr<double> mu = number("mu");
    absl::StatusOr<double> delta_ds = number("delta_ds");
    if (!mu.ok()) return mu.status();
    if (!delta_ds.ok()) return delta_ds.status();
    return TradeoffCurve::GPrime(*mu, *delta_ds);
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown curve family '", family, "'"));
}

Json ToJson(const PrivacyHypothesis& hypothesis) {
  Json j;
  if (hypothesis.kind == PrivacyHypothesis::Kind::kEpsDelta) {
    j["family"] = "eps_delta";
    j["eps"] = hypothesis.eps;
    j["delta"] = hypothesis.delta;
  } else {
    j["family"] = "gdp";
    j["mu"] = hypothesis.mu;
  }
  return j;
}

Json ToJson(const AuditReport& report) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["mode"] = std::string(AuditModeName(report.mode));
  j["hypothesis"] = ToJson(report.hypothesis);
  j["decision"] = std::string(DecisionName(report.decision));
  j["m"] = report.m;
  j["r"] = report.r;
  j["active_count"] = report.active_count;
  j["c"] = report.c;
  j["threshold"] = report.threshold;
  j["statistic"] = report.statistic;
  j["p"] = report.p;
  j["validity_level"] = report.validity_level;
  j["seed"] = report.seed;
  if (report.tamper_seed.has_value()) j["tamper_seed"] = *report.tamper_seed;
  if (report.eta.has_value()) j["eta"] = *report.eta;
  if (report.delta_ds.has_value()) j["delta_ds"] = *report.delta_ds;
  if (report.empirical_bound.has_value()) {
    j["empirical_bound"] = *report.empirical_bound;
  }
  if (!report.retained.empty()) {
    std::string bits;
    bits.reserve(report.retained.size());
    for (const uint8_t b : report.retained) bits.push_back(b ? '1' : '0');
    j["tampering_draw"] = bits;
  }
  return j;
}

Json ToJson(const Vector& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

Json ToJson(const Matrix& m) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    j.push_back(ToJson(Vector(m.row(i).transpose())));
  }
  return j;
}

Json ToJson(const PropensityModel& model) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["intercept"] = model.weights(0);
  j["weights"] = ToJson(Vector(model.weights.tail(model.weights.size() - 1)));
  j["standardizer"] = {{"mean", ToJson(model.standardizer.mean)},
                       {"stddev", ToJson(model.standardizer.stddev)}};
  j["platt"] = {{"a", model.platt.a},
                {"b", model.platt.b},
                {"calibrated", model.calibrated}};
  j["projection"] =
      model.reducer.has_value() ? ToJson(*model.reducer) : Json(nullptr);
  j["iterations"] = model.iterations;
  j["gradient_norm"] = model.gradient_norm;
  return j;
}

Json ToJson(const BootstrapSummary& summary) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["k"] = summary.k;
  j["direction"] =
      summary.direction == QuantileDirection::kLower ? "lower" : "upper";
  j["quantile_level"] = summary.quantile_level;
  j["center"] = summary.center;
  j["result"] = summary.result;
  j["p"] = summary.p;
  j["p_prime"] = summary.p_prime;
  j["confidence"] = summary.confidence;
  j["crossfit"] = summary.crossfit;
  j["warnings"] = summary.warnings;
  j["raw"] = summary.raw;
  j["values"] = summary.values;
  return j;
}

Json ToJson(const SynthConfig& config) {
  Json j;
  j["n"] = config.n;
  j["d"] = config.d;
  j["gamma_base"] = config.gamma_base;
  j["rho"] = config.rho;
  j["sigma"] = config.sigma;
  j["seed"] = config.seed;
  j["mu_true"] = config.mu_true();
  return j;
}

absl::StatusOr<Matrix> FeatureMatrix(std::span<const AuditRecord> records) {
  if (records.empty()) return absl::InvalidArgumentError("no records");
  const size_t d = records.front().features.size();
  if (d == 0) return absl::InvalidArgumentError("records carry no features");
  Matrix x(static_cast<Eigen::Index>(records.size()),
           static_cast<Eigen::Index>(d));
  for (size_t i = 0; i < records.size(); ++i) {
    if (records[i].features.size() != d) {
      return absl::InvalidArgumentError(
          absl::StrCat("record ", records[i].id, " has ",
                       records[i].features.size(), " features, expected ", d));
    }
    for (size_t k = 0; k < d; ++k) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          records[i].features[k];
    }
  }
  return x;
}

std::vector<int> Memberships(std::span<const AuditRecord> records) {
  std::vector<int> y;
  y.reserve(records.size());
  for (const AuditRecord& rec : records) y.push_back(rec.membership);
  return y;
}

}  // namespace zraudit

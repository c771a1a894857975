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

// Command-line front end: synthetic data, propensity fitting, audits,
// bootstrap bounds and Monte Carlo experiments.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "zraudit/audit.h"
#include "zraudit/bootstrap.h"
#include "zraudit/harness.h"
#include "zraudit/io.h"
#include "zraudit/mia.h"
#include "zraudit/propensity.h"
#include "zraudit/synth.h"

namespace zraudit {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitFlags = 2;
constexpr int kExitSchema = 3;
constexpr int kExitMismatch = 4;

// An error paired with the exit code it maps to.
struct CliError {
  int code;
  std::string message;
};

int Report(const CliError& e) {
  std::cerr << "zraudit: " << e.message << "\n";
  return e.code;
}

CliError FromStatus(const absl::Status& s, int code) {
  return {code, std::string(s.message())};
}

// ZRAUDIT_SEED, when set, wins over --seed.
absl::StatusOr<uint64_t> ResolveSeed(uint64_t flag_seed) {
  const char* env = std::getenv("ZRAUDIT_SEED");
  if (env == nullptr || *env == '\0') return flag_seed;
  try {
    size_t used = 0;
    const unsigned long long v = std::stoull(env, &used, 10);
    if (used != std::string(env).size()) throw std::invalid_argument(env);
    return static_cast<uint64_t>(v);
  } catch (const std::exception&) {
    return absl::InvalidArgumentError(
        absl::StrCat("ZRAUDIT_SEED is not an unsigned integer: ", env));
  }
}

std::string Dump(const Json& j) { return j.dump(2) + "\n"; }

std::optional<CliError> WriteOut(const std::string& path,
                                 std::string_view contents) {
  if (absl::Status s = WriteFile(path, contents); !s.ok()) {
    return FromStatus(s, kExitFailure);
  }
  return std::nullopt;
}

absl::StatusOr<std::vector<AuditRecord>> LoadRecords(const std::string& path) {
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return text.status();
  std::istringstream in(*text);
  absl::StatusOr<std::vector<AuditRecord>> records = ReadRecordsCsv(in);
  if (!records.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": ", records.status().message()));
  }
  return records;
}

absl::StatusOr<Vector> LoadTheta(const std::string& path) {
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return text.status();
  try {
    const Json j = Json::parse(*text);
    const Json& arr = j.is_array() ? j : j.at("theta");
    const std::vector<double> v = arr.get<std::vector<double>>();
    return Vector(Eigen::Map<const Vector>(v.data(),
                                           static_cast<Eigen::Index>(v.size())));
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": malformed theta: ", e.what()));
  }
}

bool AllHavePropensity(const std::vector<AuditRecord>& records) {
  for (const AuditRecord& rec : records) {
    if (!rec.pi_hat.has_value()) return false;
  }
  return true;
}

// ---------------------------------------------------------------- synth

struct SynthFlags {
  SynthConfig config;
  std::string out_dir = ".";
};

int RunSynth(const SynthFlags& flags) {
  SynthConfig config = flags.config;
  absl::StatusOr<uint64_t> seed = ResolveSeed(config.seed);
  if (!seed.ok()) return Report(FromStatus(seed.status(), kExitFlags));
  config.seed = *seed;
  if (absl::Status s = ValidateSynthConfig(config); !s.ok()) {
    return Report(FromStatus(s, kExitFlags));
  }
  absl::StatusOr<SynthDataset> data = Generate(config);
  if (!data.ok()) return Report(FromStatus(data.status(), kExitFailure));

  std::error_code ec;
  std::filesystem::create_directories(flags.out_dir, ec);
  const std::vector<AuditRecord> records = ToRecords(*data);
  std::ostringstream csv;
  WriteRecordsCsv(csv, records);
  const std::string records_path = flags.out_dir + "/records.csv";
  if (auto e = WriteOut(records_path, csv.str())) return Report(*e);

  Json theta;
  theta["schema_version"] = kSchemaVersion;
  theta["config"] = ToJson(config);
  theta["theta"] = ToJson(data->theta);
  theta["direction"] = ToJson(data->direction);
  const std::string theta_path = flags.out_dir + "/theta.json";
  if (auto e = WriteOut(theta_path, Dump(theta))) return Report(*e);

  std::cout << "wrote " << records.size() << " records to " << records_path
            << "\nmu_true = " << config.mu_true() << "\n";
  return kExitOk;
}

// ------------------------------------------------------- fit-propensity

struct FitFlags {
  std::string records;
  std::string train;
  std::string out = "records_pi.csv";
  std::string model_out;
  double l2_lambda = 1e-3;
  int reduce_to = 0;
  bool no_calibration = false;
  uint64_t seed = 0;
};

int RunFit(const FitFlags& flags) {
  absl::StatusOr<uint64_t> seed = ResolveSeed(flags.seed);
  if (!seed.ok()) return Report(FromStatus(seed.status(), kExitFlags));
  absl::StatusOr<std::vector<AuditRecord>> records = LoadRecords(flags.records);
  if (!records.ok()) return Report(FromStatus(records.status(), kExitSchema));
  absl::StatusOr<Matrix> x = FeatureMatrix(*records);
  if (!x.ok()) return Report(FromStatus(x.status(), kExitMismatch));

  FitOptions options;
  options.l2_lambda = flags.l2_lambda;
  options.reduce_to = flags.reduce_to;
  options.calibrate = !flags.no_calibration;
  options.seed = *seed;

  std::vector<double> pi;
  Json resolved;
  resolved["records"] = flags.records;
  resolved["l2_lambda"] = flags.l2_lambda;
  resolved["reduce_to"] = flags.reduce_to;
  resolved["calibrate"] = options.calibrate;
  resolved["seed"] = *seed;
  if (flags.train.empty()) {
    resolved["method"] = "crossfit";
    absl::StatusOr<std::vector<double>> fitted =
        Crossfit(*x, Memberships(*records), options, *seed);
    if (!fitted.ok()) return Report(FromStatus(fitted.status(), kExitFailure));
    pi = *std::move(fitted);
  } else {
    resolved["method"] = "separate_train";
    resolved["train"] = flags.train;
    absl::StatusOr<std::vector<AuditRecord>> train = LoadRecords(flags.train);
    if (!train.ok()) return Report(FromStatus(train.status(), kExitSchema));
    absl::StatusOr<Matrix> tx = FeatureMatrix(*train);
    if (!tx.ok()) return Report(FromStatus(tx.status(), kExitMismatch));
    if (tx->cols() != x->cols()) {
      return Report({kExitMismatch, "training and audit features differ in dimension"});
    }
    absl::StatusOr<PropensityModel> model =
        FitPropensity(*tx, Memberships(*train), options);
    if (!model.ok()) return Report(FromStatus(model.status(), kExitFailure));
    pi = model->Predict(*x);
    if (!flags.model_out.empty()) {
      Json j = ToJson(*model);
      j["config"] = resolved;
      if (auto e = WriteOut(flags.model_out, Dump(j))) return Report(*e);
    }
  }
  for (size_t i = 0; i < pi.size(); ++i) (*records)[i].pi_hat = pi[i];
  std::ostringstream csv;
  WriteRecordsCsv(csv, *records);
  if (auto e = WriteOut(flags.out, csv.str())) return Report(*e);
  std::cout << "wrote pi_hat for " << pi.size() << " records to " << flags.out
            << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- audit

struct AuditFlags {
  std::string records;
  std::string theta;
  std::string mode;
  std::optional<double> mu;
  std::optional<double> eps;
  double delta = 0.0;
  double p = 0.05;
  std::optional<int64_t> r;
  uint64_t seed = 0;
  std::optional<double> eta;
  double delta_ds = 0.0;
  std::optional<double> threshold;
  std::string adversary = "plain";
  bool search = false;
  std::string out;
};

struct PreparedAudit {
  AuditInput input;
  AuditMode mode;
  EmpiricalOptions options;
  Json resolved;
};

// Loads records and produces guesses, checking that the mode's fields are
// present.
std::variant<PreparedAudit, CliError> PrepareAudit(const AuditFlags& flags) {
  absl::StatusOr<AuditMode> mode = ParseAuditMode(flags.mode);
  if (!mode.ok()) return FromStatus(mode.status(), kExitFlags);
  absl::StatusOr<uint64_t> seed = ResolveSeed(flags.seed);
  if (!seed.ok()) return FromStatus(seed.status(), kExitFlags);
  absl::StatusOr<GuessMode> adversary =
      flags.adversary == "plain"              ? GuessMode::kPlain
      : flags.adversary == "propensity_aware" ? absl::StatusOr<GuessMode>(
                                                    GuessMode::kPropensityAware)
                                              : absl::InvalidArgumentError(
                                                    "adversary must be plain "
                                                    "or propensity_aware");
  if (!adversary.ok()) return FromStatus(adversary.status(), kExitFlags);

  absl::StatusOr<std::vector<AuditRecord>> records = LoadRecords(flags.records);
  if (!records.ok()) return FromStatus(records.status(), kExitSchema);
  const bool has_pi = AllHavePropensity(*records);
  if (ModeNeedsPropensity(*mode) && !has_pi) {
    return CliError{kExitMismatch,
                    absl::StrCat("mode ", std::string(AuditModeName(*mode)),
                                 " needs a pi_hat column for every record")};
  }
  if (*adversary == GuessMode::kPropensityAware && !has_pi) {
    return CliError{kExitMismatch,
                    "the propensity-aware adversary needs pi_hat"};
  }

  PreparedAudit prepared;
  prepared.mode = *mode;
  const auto m = static_cast<int64_t>(records->size());
  bool has_guesses = false;
  int64_t active = 0;
  for (const AuditRecord& rec : *records) {
    has_guesses |= rec.guess != 0;
    active += rec.guess != 0;
  }
  if (!has_guesses) {
    std::vector<double> scores;
    bool all_scores = true;
    for (const AuditRecord& rec : *records) all_scores &= rec.score.has_value();
    if (all_scores) {
      for (const AuditRecord& rec : *records) scores.push_back(*rec.score);
    } else if (!flags.theta.empty()) {
      absl::StatusOr<Vector> theta = LoadTheta(flags.theta);
      if (!theta.ok()) return FromStatus(theta.status(), kExitSchema);
      absl::StatusOr<Matrix> x = FeatureMatrix(*records);
      if (!x.ok()) return FromStatus(x.status(), kExitMismatch);
      absl::StatusOr<std::vector<double>> s = ScoreInnerProduct(*theta, *x);
      if (!s.ok()) return FromStatus(s.status(), kExitMismatch);
      scores = *std::move(s);
      for (size_t i = 0; i < scores.size(); ++i) (*records)[i].score = scores[i];
    } else {
      return CliError{kExitMismatch,
                      "records carry no guesses and no scores; add a score "
                      "column or pass --theta"};
    }
    const int64_t r = flags.r.value_or(m);
    std::vector<double> weights(records->size(), 1.0);
    if (has_pi) {
      for (size_t i = 0; i < weights.size(); ++i) {
        const double pi = *(*records)[i].pi_hat;
        weights[i] = (pi <= 0 || pi >= 1)
                         ? 0.0
                         : std::min(pi, 1 - pi) / std::max(pi, 1 - pi);
      }
    }
    const double threshold = flags.threshold.value_or(DefaultThreshold(scores));
    absl::StatusOr<GuessVector> guesses =
        MakeGuesses(scores, threshold, r, *adversary, weights);
    if (!guesses.ok()) return FromStatus(guesses.status(), kExitFlags);
    for (size_t i = 0; i < records->size(); ++i) {
      (*records)[i].guess = guesses->guesses[i];
    }
    prepared.resolved["threshold"] = threshold;
    prepared.resolved["guess_source"] = "scores";
    prepared.input.r = r;
  } else {
    prepared.resolved["guess_source"] = "file";
    prepared.input.r = flags.r.value_or(active);
  }

  const bool compositional = *mode == AuditMode::kCompEpsDelta ||
                             *mode == AuditMode::kCompGdpStrict ||
                             *mode == AuditMode::kCompGdpRelaxed;
  prepared.options.delta = flags.delta;
  prepared.options.delta_ds = flags.delta_ds;
  if (compositional) {
    if (flags.eta.has_value()) {
      prepared.options.eta = *flags.eta;
    } else if (has_pi) {
      std::vector<double> pi;
      for (const AuditRecord& rec : *records) pi.push_back(*rec.pi_hat);
      absl::StatusOr<OverlapEstimate> overlap =
          EstimateOverlap(pi, Memberships(*records), flags.delta_ds);
      if (!overlap.ok()) return FromStatus(overlap.status(), kExitFlags);
      prepared.options.eta = overlap->eta;
    } else {
      return CliError{kExitMismatch,
                      "compositional modes need --eta or a pi_hat column"};
    }
  }
  prepared.input.records = *std::move(records);
  prepared.input.p = flags.p;
  prepared.input.seed = *seed;

  Json& cfg = prepared.resolved;
  cfg["records"] = flags.records;
  cfg["mode"] = flags.mode;
  cfg["adversary"] = flags.adversary;
  cfg["p"] = flags.p;
  cfg["r"] = prepared.input.r;
  cfg["seed"] = *seed;
  cfg["delta"] = flags.delta;
  cfg["delta_ds"] = flags.delta_ds;
  if (compositional) cfg["eta"] = prepared.options.eta;
  cfg["search"] = flags.search;
  if (flags.mu.has_value()) cfg["mu"] = *flags.mu;
  if (flags.eps.has_value()) cfg["eps"] = *flags.eps;
  return prepared;
}

int RunAuditCommand(const AuditFlags& flags) {
  auto prepared_or = PrepareAudit(flags);
  if (auto* e = std::get_if<CliError>(&prepared_or)) return Report(*e);
  PreparedAudit& prepared = std::get<PreparedAudit>(prepared_or);

  absl::StatusOr<AuditReport> report;
  if (flags.search) {
    report = EmpiricalBound(prepared.input, prepared.mode, prepared.options);
  } else {
    PrivacyHypothesis hypothesis;
    if (ModeIsGaussian(prepared.mode)) {
      if (!flags.mu.has_value()) {
        return Report({kExitFlags, "this mode needs --mu (or --search)"});
      }
      hypothesis = PrivacyHypothesis::Gdp(*flags.mu);
    } else {
      const bool falsify = prepared.mode == AuditMode::kPropensityFalsify;
      if (!flags.eps.has_value() && !falsify) {
        return Report({kExitFlags, "this mode needs --eps (or --search)"});
      }
      hypothesis =
          PrivacyHypothesis::EpsDelta(flags.eps.value_or(0.0), flags.delta);
    }
    report = RunAudit(prepared.input, prepared.mode, hypothesis,
                      prepared.options);
  }
  if (!report.ok()) {
    const int code = report.status().code() ==
                             absl::StatusCode::kFailedPrecondition
                         ? kExitMismatch
                         : kExitFailure;
    return Report(FromStatus(report.status(), code));
  }
  Json j = ToJson(*report);
  j["config"] = prepared.resolved;
  const std::string text = Dump(j);
  if (flags.out.empty()) {
    std::cout << text;
  } else {
    if (auto e = WriteOut(flags.out, text)) return Report(*e);
    std::cout << AuditModeName(report->mode) << ": "
              << DecisionName(report->decision) << " (c = " << report->c
              << ", r = " << report->r << ")";
    if (report->empirical_bound.has_value()) {
      std::cout << ", empirical bound " << *report->empirical_bound;
    }
    std::cout << "\n";
  }
  return kExitOk;
}

// ------------------------------------------------------------ bootstrap

struct BootstrapFlags {
  AuditFlags audit;
  std::string train;
  int k = 600;
  double p_prime = 0.025;
  std::string direction = "lower";
  double l2_lambda = 1e-3;
  int reduce_to = 0;
};

int RunBootstrapCommand(BootstrapFlags flags) {
  if (flags.direction != "lower" && flags.direction != "upper") {
    return Report({kExitFlags, "--direction must be lower or upper"});
  }
  // Replicates supply their own propensities; the file's column, if any,
  // only seeds the guesses.
  auto prepared_or = PrepareAudit(flags.audit);
  if (auto* e = std::get_if<CliError>(&prepared_or)) return Report(*e);
  PreparedAudit& prepared = std::get<PreparedAudit>(prepared_or);
  if (prepared.mode == AuditMode::kOneRunEpsDelta ||
      prepared.mode == AuditMode::kOneRunFdp ||
      prepared.mode == AuditMode::kPropensityFalsify) {
    return Report({kExitMismatch,
                   "bootstrap needs a mode whose bound depends on pi_hat"});
  }
  absl::StatusOr<Matrix> audit_x = FeatureMatrix(prepared.input.records);
  if (!audit_x.ok()) return Report(FromStatus(audit_x.status(), kExitMismatch));
  const std::vector<int> audit_y = Memberships(prepared.input.records);

  FitOptions fit;
  fit.l2_lambda = flags.l2_lambda;
  fit.reduce_to = flags.reduce_to;
  BootstrapOptions options;
  options.k = flags.k;
  options.p = flags.audit.p;
  options.p_prime = flags.p_prime;
  options.direction = flags.direction == "lower" ? QuantileDirection::kLower
                                                 : QuantileDirection::kUpper;
  options.seed = prepared.input.seed;

  const bool explicit_eta = flags.audit.eta.has_value();
  BoundFunction bound = [&](std::span<const double> pi,
                            uint64_t seed) -> absl::StatusOr<double> {
    AuditInput input = prepared.input;
    input.seed = seed;
    for (size_t i = 0; i < pi.size(); ++i) input.records[i].pi_hat = pi[i];
    EmpiricalOptions eo = prepared.options;
    if (!explicit_eta) {
      absl::StatusOr<OverlapEstimate> overlap =
          EstimateOverlap(pi, audit_y, eo.delta_ds);
      if (!overlap.ok()) return overlap.status();
      eo.eta = overlap->eta;
    }
    absl::StatusOr<AuditReport> report =
        EmpiricalBound(input, prepared.mode, eo);
    if (!report.ok()) return report.status();
    return *report->empirical_bound;
  };

  absl::StatusOr<BootstrapSummary> summary;
  const PropensityFitter fitter = LogisticFitter(fit);
  if (flags.train.empty()) {
    summary = BootstrapBoundCrossfit(*audit_x, audit_y, fitter, bound, options);
  } else {
    absl::StatusOr<std::vector<AuditRecord>> train = LoadRecords(flags.train);
    if (!train.ok()) return Report(FromStatus(train.status(), kExitSchema));
    absl::StatusOr<Matrix> tx = FeatureMatrix(*train);
    if (!tx.ok()) return Report(FromStatus(tx.status(), kExitMismatch));
    summary = BootstrapBound(*tx, Memberships(*train), *audit_x, fitter, bound,
                             options);
  }
  if (!summary.ok()) return Report(FromStatus(summary.status(), kExitFailure));

  Json j = ToJson(*summary);
  Json cfg = prepared.resolved;
  cfg["train"] = flags.train.empty() ? Json(nullptr) : Json(flags.train);
  cfg["k"] = flags.k;
  cfg["p_prime"] = flags.p_prime;
  cfg["direction"] = flags.direction;
  cfg["l2_lambda"] = flags.l2_lambda;
  cfg["reduce_to"] = flags.reduce_to;
  j["config"] = cfg;
  const std::string text = Dump(j);
  if (flags.audit.out.empty()) {
    std::cout << text;
  } else {
    if (auto e = WriteOut(flags.audit.out, text)) return Report(*e);
    std::cout << "bootstrap bound " << summary->result << " at confidence "
              << summary->confidence << "\n";
  }
  return kExitOk;
}

// ----------------------------------------------------------- experiment

struct ExperimentFlags {
  std::string plan;
  std::string out_dir = "results";
  std::optional<int> threads;
};

int RunExperimentCommand(const ExperimentFlags& flags) {
  absl::StatusOr<std::string> text = ReadFile(flags.plan);
  if (!text.ok()) return Report(FromStatus(text.status(), kExitSchema));
  Json json;
  try {
    json = Json::parse(*text);
  } catch (const nlohmann::json::exception& e) {
    return Report({kExitSchema, absl::StrCat(flags.plan, ": ", e.what())});
  }
  absl::StatusOr<ExperimentPlan> plan = PlanFromJson(json);
  if (!plan.ok()) {
    return Report({kExitSchema, absl::StrCat(flags.plan, ": ",
                                             plan.status().message())});
  }
  absl::StatusOr<uint64_t> seed = ResolveSeed(plan->master_seed);
  if (!seed.ok()) return Report(FromStatus(seed.status(), kExitFlags));
  plan->master_seed = *seed;
  if (flags.threads.has_value()) plan->threads = std::max(1, *flags.threads);

  absl::StatusOr<ExperimentResult> result = RunExperiment(*plan);
  if (!result.ok()) return Report(FromStatus(result.status(), kExitFailure));

  std::error_code ec;
  std::filesystem::create_directories(flags.out_dir, ec);
  Json j = ToJson(*result);
  // Thread count never changes results; keep it out of the output so that
  // reruns compare byte-for-byte.
  j["plan"].erase("threads");
  if (auto e = WriteOut(flags.out_dir + "/result.json", Dump(j))) {
    return Report(*e);
  }
  if (auto e = WriteOut(flags.out_dir + "/trials.csv", TrialsCsv(*result))) {
    return Report(*e);
  }
  for (const ModeResult& mode : result->modes) {
    for (const CellResult& cell : mode.cells) {
      std::cout << AuditModeName(mode.spec.mode) << " r=" << cell.r;
      if (!cell.rejected.empty()) {
        std::cout << " rejection rate " << cell.rejection_rate.rate << " ["
                  << cell.rejection_rate.lo << ", " << cell.rejection_rate.hi
                  << "]";
      } else {
        std::cout << " median bound " << Median(cell.bounds);
      }
      std::cout << "\n";
    }
  }
  return kExitOk;
}

// --------------------------------------------------------------- report

int RunReportCommand(const std::string& path) {
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return Report(FromStatus(text.status(), kExitSchema));
  Json j;
  try {
    j = Json::parse(*text);
  } catch (const nlohmann::json::exception& e) {
    return Report({kExitSchema, absl::StrCat(path, ": ", e.what())});
  }
  if (!j.is_object()) return Report({kExitSchema, "expected a JSON object"});
  if (j.contains("decision")) {
    std::cout << "mode      " << j.value("mode", "?") << "\n"
              << "decision  " << j.value("decision", "?") << "\n"
              << "c / r / m " << j.value("c", 0) << " / " << j.value("r", 0)
              << " / " << j.value("m", 0) << "\n";
    if (j.contains("empirical_bound")) {
      std::cout << "bound     " << j["empirical_bound"].dump() << "\n";
    }
  } else if (j.contains("values") && j.contains("result")) {
    std::cout << "bootstrap K=" << j.value("k", 0) << " result "
              << j["result"].dump() << " confidence "
              << j["confidence"].dump() << "\n";
  } else if (j.contains("modes") && j.contains("plan")) {
    for (const Json& mode : j["modes"]) {
      for (const Json& cell : mode["cells"]) {
        std::cout << mode.value("mode", "?") << " (" << mode.value("adversary", "?")
                  << ") r=" << cell.value("r", 0);
        if (cell.contains("rejection_rate")) {
          const Json& rate = cell["rejection_rate"];
          std::cout << " rejection rate " << rate["rate"].dump() << " ["
                    << rate["wilson_lo"].dump() << ", "
                    << rate["wilson_hi"].dump() << "]";
        } else {
          std::cout << " median bound " << cell["median_bound"].dump();
        }
        std::cout << "\n";
      }
    }
  } else {
    return Report({kExitSchema, "unrecognized JSON document"});
  }
  return kExitOk;
}

void AddAuditFlags(CLI::App* cmd, AuditFlags& f, bool require_mode) {
  cmd->add_option("--records", f.records, "Record CSV")->required();
  cmd->add_option("--theta", f.theta,
                  "Released vector JSON, used to score features");
  auto* mode = cmd->add_option("--mode", f.mode, "Audit mode");
  if (require_mode) mode->required();
  cmd->add_option("--mu", f.mu, "GDP parameter under test");
  cmd->add_option("--eps", f.eps, "Epsilon under test");
  cmd->add_option("--delta", f.delta, "Delta of the hypothesis")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--p", f.p, "Audit error budget")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--r", f.r, "Number of active guesses");
  cmd->add_option("--seed", f.seed, "Seed for tampering draws");
  cmd->add_option("--eta", f.eta, "Overlap level for compositional modes")
      ->check(CLI::Range(0.0, 0.5));
  cmd->add_option("--delta-ds", f.delta_ds, "Overlap slack")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--threshold", f.threshold, "Score threshold");
  cmd->add_option("--adversary", f.adversary, "plain or propensity_aware");
  cmd->add_option("--out", f.out, "Output JSON path (stdout if empty)");
}

int Main(int argc, char** argv) {
  CLI::App app{"Post-hoc privacy auditing under member/non-member shift"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "Worker threads (results unaffected)")
      ->check(CLI::PositiveNumber);

  SynthFlags synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic records");
  synth_cmd->add_option("--n", synth.config.n, "Total records (even)");
  synth_cmd->add_option("--d", synth.config.d, "Dimension");
  synth_cmd->add_option("--gamma", synth.config.gamma_base, "Member bias");
  synth_cmd->add_option("--rho", synth.config.rho, "Non-member bias ratio");
  synth_cmd->add_option("--sigma", synth.config.sigma, "Noise scale");
  synth_cmd->add_option("--seed", synth.config.seed, "Seed");
  synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory");

  FitFlags fit;
  auto* fit_cmd =
      app.add_subcommand("fit-propensity", "Estimate propensity scores");
  fit_cmd->add_option("--records", fit.records, "Record CSV with features")
      ->required();
  fit_cmd->add_option("--train", fit.train,
                      "Separate training CSV (cross-fitting if omitted)");
  fit_cmd->add_option("--out", fit.out, "Output record CSV with pi_hat");
  fit_cmd->add_option("--model-out", fit.model_out, "Model JSON path");
  fit_cmd->add_option("--lambda", fit.l2_lambda, "L2 penalty")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--reduce-to", fit.reduce_to, "PCA dimensions (0 = off)");
  fit_cmd->add_flag("--no-calibration", fit.no_calibration,
                    "Skip Platt calibration");
  fit_cmd->add_option("--seed", fit.seed, "Seed");

  AuditFlags audit;
  auto* audit_cmd = app.add_subcommand("audit", "Run one audit");
  AddAuditFlags(audit_cmd, audit, /*require_mode=*/true);
  audit_cmd->add_flag("--search", audit.search,
                      "Report the empirical lower bound instead of a decision");

  BootstrapFlags boot;
  boot.audit.mode = "zr_cond_fdp";
  boot.audit.p = 0.025;
  auto* boot_cmd =
      app.add_subcommand("bootstrap", "Bootstrap the empirical bound");
  AddAuditFlags(boot_cmd, boot.audit, /*require_mode=*/false);
  boot_cmd->add_option("--train", boot.train,
                       "Propensity training CSV (cross-fitting if omitted)");
  boot_cmd->add_option("--k", boot.k, "Replicates")->check(CLI::Range(2, 1000000));
  boot_cmd->add_option("--p-prime", boot.p_prime, "Bootstrap error budget")
      ->check(CLI::Range(0.0, 1.0));
  boot_cmd->add_option("--direction", boot.direction, "lower or upper");
  boot_cmd->add_option("--lambda", boot.l2_lambda, "L2 penalty")
      ->check(CLI::PositiveNumber);
  boot_cmd->add_option("--reduce-to", boot.reduce_to, "PCA dimensions");

  ExperimentFlags experiment;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a Monte Carlo plan");
  exp_cmd->add_option("--plan", experiment.plan, "Plan JSON")->required();
  exp_cmd->add_option("--out-dir", experiment.out_dir, "Output directory");

  std::string report_path;
  auto* report_cmd = app.add_subcommand("report", "Summarize an output JSON");
  report_cmd->add_option("input", report_path, "Report, summary or result JSON")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitFlags;
  }

  if (*synth_cmd) return RunSynth(synth);
  if (*fit_cmd) return RunFit(fit);
  if (*audit_cmd) return RunAuditCommand(audit);
  if (*boot_cmd) {
    boot.audit.search = true;
    return RunBootstrapCommand(boot);
  }
  if (*exp_cmd) {
    if (app.get_option("--threads")->count() > 0) experiment.threads = threads;
    return RunExperimentCommand(experiment);
  }
  if (*report_cmd) return RunReportCommand(report_path);
  return kExitFailure;
}

}  // namespace
}  // namespace zraudit

int main(int argc, char** argv) { return zraudit::Main(argc, argv); }

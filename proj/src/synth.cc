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

#include "zraudit/synth.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "zraudit/normal.h"
#include "zraudit/rng.h"

namespace zraudit {
namespace {

Vector DrawNormalVector(int d, Rng& rng) {
  Vector v(d);
  for (int j = 0; j < d; ++j) v(j) = rng.Normal();
  return v;
}

// Rows of g(gamma): N(gamma * u, I) projected to the unit sphere.
Matrix DrawSphereRows(int64_t rows, const Vector& direction, double gamma,
                      Rng& rng) {
  const auto d = static_cast<int>(direction.size());
  Matrix out(rows, d);
  for (int64_t i = 0; i < rows; ++i) {
    Vector x = gamma * direction + DrawNormalVector(d, rng);
    double norm = x.norm();
    while (!(norm > 0)) {
      x = gamma * direction + DrawNormalVector(d, rng);
      norm = x.norm();
    }
    out.row(i) = (x / norm).transpose();
  }
  return out;
}

// log of the direction density of N(gamma * u, I) at a unit vector with
// <x, u> = t, up to a constant shared by every gamma:
//   -gamma^2 / 2 + log int_0^inf s^(d-1) exp(-s^2 / 2 + s gamma t) ds.
double LogDirectionalDensity(int d, double gamma, double t) {
  const double b = gamma * t;
  const double peak = 0.5 * (b + std::sqrt(b * b + 4.0 * (d - 1)));
  const double lo = std::max(0.0, peak - 14.0);
  const double hi = peak + 14.0;
  constexpr int kIntervals = 560;  // even, for Simpson's rule
  const double h = (hi - lo) / kIntervals;
  auto log_integrand = [&](double s) {
    if (s <= 0) return -std::numeric_limits<double>::infinity();
    return (d - 1) * std::log(s) - 0.5 * s * s + b * s;
  };
  const double ref = log_integrand(peak);
  double sum = 0;
  for (int k = 0; k <= kIntervals; ++k) {
    const double w = (k == 0 || k == kIntervals) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    sum += w * std::exp(log_integrand(lo + k * h) - ref);
  }
  return -0.5 * gamma * gamma + ref + std::log(sum * h / 3.0);
}

}  // namespace

absl::Status ValidateSynthConfig(const SynthConfig& config) {
  if (config.n < 2 || config.n % 2 != 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("n must be even and >= 2, got ", config.n));
  }
  if (config.d < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("d must be >= 1, got ", config.d));
  }
  if (!(config.gamma_base >= 0) || !std::isfinite(config.gamma_base)) {
    return absl::InvalidArgumentError("gamma_base must be finite and >= 0");
  }
  if (!(config.rho > 0 && config.rho <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("rho must lie in (0, 1], got ", config.rho));
  }
  if (!(config.sigma > 0) || !std::isfinite(config.sigma)) {
    return absl::InvalidArgumentError("sigma must be finite and > 0");
  }
  return absl::OkStatus();
}

absl::StatusOr<SynthDataset> GenerateSample(const SynthConfig& config,
                                            const Vector& direction,
                                            uint64_t seed) {
  if (absl::Status s = ValidateSynthConfig(config); !s.ok()) return s;
  if (direction.size() != config.d) {
    return absl::InvalidArgumentError("direction dimension differs from d");
  }
  SynthDataset data;
  data.direction = direction;
  const int64_t half = config.n / 2;
  Rng member_rng(DeriveSeed(seed, "members"));
  data.members = DrawSphereRows(half, direction, config.gamma_base, member_rng);
  Rng nonmember_rng(DeriveSeed(seed, "nonmembers"));
  data.nonmembers = DrawSphereRows(
      half, direction, config.rho * config.gamma_base, nonmember_rng);
  return data;
}

absl::StatusOr<SynthDataset> GenerateData(const SynthConfig& config) {
  if (absl::Status s = ValidateSynthConfig(config); !s.ok()) return s;
  Rng direction_rng(DeriveSeed(config.seed, "direction"));
  Vector v = DrawNormalVector(config.d, direction_rng);
  while (!(v.norm() > 0)) v = DrawNormalVector(config.d, direction_rng);
  return GenerateSample(config, v / v.norm(), config.seed);
}

absl::StatusOr<SynthDataset> Generate(const SynthConfig& config) {
  absl::StatusOr<SynthDataset> data = GenerateData(config);
  if (!data.ok()) return data.status();
  absl::StatusOr<Vector> theta =
      Release(data->members, config.sigma, NoiseSeed(config));
  if (!theta.ok()) return theta.status();
  data->theta = *std::move(theta);
  return data;
}

uint64_t NoiseSeed(const SynthConfig& config) {
  return DeriveSeed(config.seed, "noise");
}

absl::StatusOr<Vector> Release(const Matrix& members, double sigma,
                               uint64_t seed) {
  if (!(sigma > 0)) return absl::InvalidArgumentError("sigma must be > 0");
  Vector theta = members.colwise().sum().transpose();
  Rng rng(seed);
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    theta(j) += sigma * rng.Normal();
  }
  return theta;
}

double Deconvolve(double mu_tot, double mu_ds) {
  return std::sqrt(std::max(0.0, mu_tot * mu_tot - mu_ds * mu_ds));
}

Matrix StackedFeatures(const SynthDataset& data) {
  Matrix x(data.members.rows() + data.nonmembers.rows(), data.members.cols());
  x << data.members, data.nonmembers;
  return x;
}

std::vector<int> StackedLabels(const SynthDataset& data) {
  std::vector<int> y(static_cast<size_t>(data.members.rows()), 1);
  y.resize(y.size() + static_cast<size_t>(data.nonmembers.rows()), -1);
  return y;
}

std::vector<AuditRecord> ToRecords(const SynthDataset& data) {
  std::vector<AuditRecord> records;
  records.reserve(
      static_cast<size_t>(data.members.rows() + data.nonmembers.rows()));
  auto append = [&](const Matrix& rows, int label, const char* prefix) {
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      AuditRecord rec;
      rec.id = absl::StrCat(prefix, i);
      rec.membership = label;
      rec.features.resize(static_cast<size_t>(rows.cols()));
      for (Eigen::Index j = 0; j < rows.cols(); ++j) {
        rec.features[j] = rows(i, j);
      }
      records.push_back(std::move(rec));
    }
  };
  append(data.members, 1, "m");
  append(data.nonmembers, -1, "n");
  return records;
}

std::vector<double> OraclePropensity(const SynthConfig& config,
                                     const Vector& direction,
                                     const Matrix& features) {
  std::vector<double> pi(static_cast<size_t>(features.rows()));
  const double g1 = config.gamma_base;
  const double g0 = config.rho * config.gamma_base;
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    const double t = features.row(i).dot(direction);
    const double log_odds = LogDirectionalDensity(config.d, g1, t) -
                            LogDirectionalDensity(config.d, g0, t);
    pi[i] = Sigmoid(log_odds);
  }
  return pi;
}

}  // namespace zraudit

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

#include "zraudit/bootstrap.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "zraudit/mia.h"
#include "zraudit/rng.h"

namespace zraudit {
namespace {

// level * K can land a hair above an integer (0.025 * 600), which must not
// bump the rank.
constexpr double kRankSlack = 1e-9;

absl::Status ValidateOptions(const BootstrapOptions& options) {
  if (options.k < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("K must be >= 2, got ", options.k));
  }
  if (!(options.p_prime > 0 && options.p_prime < 1)) {
    return absl::InvalidArgumentError("p_prime must lie in (0, 1)");
  }
  if (!(options.p >= 0 && options.p + options.p_prime < 1)) {
    return absl::InvalidArgumentError("need p >= 0 and p + p_prime < 1");
  }
  return absl::OkStatus();
}

struct Resample {
  Matrix x;
  std::vector<int> y;
};

// Draws rows of `rows` with replacement until both classes appear.
absl::StatusOr<Resample> DrawResample(const Matrix& x, std::span<const int> y,
                                      std::span<const size_t> rows,
                                      int max_redraws, Rng& rng) {
  for (int attempt = 0; attempt < max_redraws; ++attempt) {
    Resample out;
    out.x.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
    out.y.resize(rows.size());
    bool has_pos = false;
    bool has_neg = false;
    for (size_t i = 0; i < rows.size(); ++i) {
      const size_t src = rows[rng.UniformInt(rows.size())];
      out.x.row(static_cast<Eigen::Index>(i)) =
          x.row(static_cast<Eigen::Index>(src));
      out.y[i] = y[src];
      (y[src] == 1 ? has_pos : has_neg) = true;
    }
    if (has_pos && has_neg) return out;
  }
  return absl::FailedPreconditionError(absl::StrCat(
      "resample stayed single-class after ", max_redraws, " attempts"));
}

Matrix Rows(const Matrix& x, std::span<const size_t> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) =
        x.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

std::vector<int> Labels(std::span<const int> y, std::span<const size_t> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (const size_t r : rows) out.push_back(y[r]);
  return out;
}

// Shared replicate loop. `propensities(k, seed)` returns pi_hat for the
// audit rows, with k = -1 meaning the full-data fit.
absl::StatusOr<BootstrapSummary> RunReplicates(
    const std::function<absl::StatusOr<std::vector<double>>(int, uint64_t)>&
        propensities,
    const BoundFunction& bound, const BootstrapOptions& options) {
  BootstrapSummary summary;
  summary.k = options.k;
  summary.direction = options.direction;
  summary.quantile_level = options.direction == QuantileDirection::kLower
                               ? options.p_prime
                               : 1.0 - options.p_prime;
  summary.p = options.p;
  summary.p_prime = options.p_prime;
  summary.confidence = 1.0 - options.p - options.p_prime;
  if (options.k < 50) {
    summary.warnings.push_back(absl::StrCat(
        "K = ", options.k, " is below 50; quantiles will be coarse"));
  }

  absl::StatusOr<std::vector<double>> full =
      propensities(-1, DeriveSeed(options.seed, "full"));
  if (!full.ok()) return full.status();
  absl::StatusOr<double> center = bound(*full, options.seed);
  if (!center.ok()) return center.status();
  summary.center = *center;

  summary.raw.resize(static_cast<size_t>(options.k));
  for (int k = 0; k < options.k; ++k) {
    const uint64_t replicate_seed =
        DeriveSeed(options.seed, static_cast<uint64_t>(k));
    absl::StatusOr<std::vector<double>> pi = propensities(k, replicate_seed);
    if (!pi.ok()) return pi.status();
    absl::StatusOr<double> value =
        bound(*pi, DeriveSeed(replicate_seed, "audit"));
    if (!value.ok()) return value.status();
    summary.raw[k] = *value;
  }
  const double median = Median(summary.raw);
  summary.values.resize(summary.raw.size());
  for (size_t k = 0; k < summary.raw.size(); ++k) {
    summary.values[k] = summary.raw[k] + summary.center - median;
  }
  // The lower direction reads the p_prime-th smallest value; the upper
  // direction the p_prime-th largest, i.e. the (1 - p_prime) quantile.
  absl::StatusOr<double> result =
      EmpiricalQuantile(summary.values, options.p_prime, options.direction);
  if (!result.ok()) return result.status();
  summary.result = *result;
  return summary;
}

}  // namespace

absl::StatusOr<double> EmpiricalQuantile(std::span<const double> values,
                                         double level,
                                         QuantileDirection direction) {
  if (values.empty()) return absl::InvalidArgumentError("no values");
  if (!(level > 0 && level < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("level must lie in (0, 1), got ", level));
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto k = static_cast<int64_t>(sorted.size());
  auto rank = static_cast<int64_t>(
      std::ceil(level * static_cast<double>(k) - kRankSlack));
  rank = std::clamp<int64_t>(rank, 1, k);
  return direction == QuantileDirection::kLower ? sorted[rank - 1]
                                                : sorted[k - rank];
}

PropensityFitter LogisticFitter(const FitOptions& options) {
  return [options](const Matrix& train_x, std::span<const int> train_y,
                   const Matrix& score_x,
                   uint64_t seed) -> absl::StatusOr<std::vector<double>> {
    FitOptions fit = options;
    fit.seed = seed;
    absl::StatusOr<PropensityModel> model =
        FitPropensity(train_x, train_y, fit);
    if (!model.ok()) return model.status();
    return model->Predict(score_x);
  };
}

absl::StatusOr<BootstrapSummary> BootstrapBound(
    const Matrix& train_x, std::span<const int> train_y, const Matrix& audit_x,
    const PropensityFitter& fitter, const BoundFunction& bound,
    const BootstrapOptions& options) {
  if (absl::Status s = ValidateOptions(options); !s.ok()) return s;
  if (static_cast<Eigen::Index>(train_y.size()) != train_x.rows()) {
    return absl::InvalidArgumentError("train labels and rows differ");
  }
  if (train_x.cols() != audit_x.cols()) {
    return absl::InvalidArgumentError(
        "training and audit features differ in dimension");
  }
  std::vector<size_t> all(train_y.size());
  for (size_t i = 0; i < all.size(); ++i) all[i] = i;

  auto propensities = [&](int k, uint64_t seed)
      -> absl::StatusOr<std::vector<double>> {
    if (k < 0) return fitter(train_x, train_y, audit_x, seed);
    Rng rng(DeriveSeed(seed, "resample"));
    absl::StatusOr<Resample> sample =
        DrawResample(train_x, train_y, all, options.max_redraws, rng);
    if (!sample.ok()) return sample.status();
    return fitter(sample->x, sample->y, audit_x, DeriveSeed(seed, "fit"));
  };
  return RunReplicates(propensities, bound, options);
}

absl::StatusOr<BootstrapSummary> BootstrapBoundCrossfit(
    const Matrix& audit_x, std::span<const int> audit_y,
    const PropensityFitter& fitter, const BoundFunction& bound,
    const BootstrapOptions& options) {
  if (absl::Status s = ValidateOptions(options); !s.ok()) return s;
  if (static_cast<Eigen::Index>(audit_y.size()) != audit_x.rows()) {
    return absl::InvalidArgumentError("audit labels and rows differ");
  }
  const std::array<std::vector<size_t>, 2> folds =
      CrossfitSplit(audit_y.size(), DeriveSeed(options.seed, "folds"));
  const Matrix fold_x[2] = {Rows(audit_x, folds[0]), Rows(audit_x, folds[1])};
  const std::vector<int> fold_y[2] = {Labels(audit_y, folds[0]),
                                      Labels(audit_y, folds[1])};
  std::vector<size_t> fold_rows[2];
  for (int f = 0; f < 2; ++f) {
    fold_rows[f].resize(folds[f].size());
    for (size_t i = 0; i < folds[f].size(); ++i) fold_rows[f][i] = i;
  }

  auto propensities = [&](int k, uint64_t seed)
      -> absl::StatusOr<std::vector<double>> {
    std::vector<double> pi(audit_y.size(), 0.5);
    for (int f = 0; f < 2; ++f) {
      const int other = 1 - f;
      const uint64_t fold_seed = DeriveSeed(seed, static_cast<uint64_t>(f));
      absl::StatusOr<std::vector<double>> scored;
      if (k < 0) {
        scored = fitter(fold_x[f], fold_y[f], fold_x[other], fold_seed);
      } else {
        Rng rng(DeriveSeed(fold_seed, "resample"));
        absl::StatusOr<Resample> sample = DrawResample(
            fold_x[f], fold_y[f], fold_rows[f], options.max_redraws, rng);
        if (!sample.ok()) return sample.status();
        scored = fitter(sample->x, sample->y, fold_x[other],
                        DeriveSeed(fold_seed, "fit"));
      }
      if (!scored.ok()) return scored.status();
      for (size_t i = 0; i < folds[other].size(); ++i) {
        pi[folds[other][i]] = (*scored)[i];
      }
    }
    return pi;
  };
  absl::StatusOr<BootstrapSummary> summary =
      RunReplicates(propensities, bound, options);
  if (summary.ok()) summary->crossfit = true;
  return summary;
}

}  // namespace zraudit

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

#ifndef ZRAUDIT_BOOTSTRAP_H_
#define ZRAUDIT_BOOTSTRAP_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "zraudit/propensity.h"

namespace zraudit {

enum class QuantileDirection { kLower, kUpper };

// Lower: the ceil(level * K)-th smallest value. Upper: the
// ceil(level * K)-th largest. The rank is clamped to [1, K].
absl::StatusOr<double> EmpiricalQuantile(std::span<const double> values,
                                         double level,
                                         QuantileDirection direction);

// Fits a propensity model on (train_x, train_y) and scores score_x.
using PropensityFitter = std::function<absl::StatusOr<std::vector<double>>(
    const Matrix& train_x, std::span<const int> train_y, const Matrix& score_x,
    uint64_t seed)>;

// The logistic model of FitPropensity with the given options; the seed
// overrides options.seed.
PropensityFitter LogisticFitter(const FitOptions& options);

// Empirical privacy bound computed from propensities for the audit rows,
// with everything else held fixed. The seed drives any tampering draw.
using BoundFunction = std::function<absl::StatusOr<double>(
    std::span<const double> pi_hat, uint64_t seed)>;

struct BootstrapOptions {
  int k = 600;
  double p = 0.025;        // audit error budget, for reporting
  double p_prime = 0.025;  // bootstrap error budget
  QuantileDirection direction = QuantileDirection::kLower;
  uint64_t seed = 0;
  int max_redraws = 10;
};

struct BootstrapSummary {
  std::vector<double> values;  // centered replicate bounds
  std::vector<double> raw;     // replicate bounds before centering
  double center = 0.0;         // bound from the full-data model
  int k = 0;
  double quantile_level = 0.0;
  QuantileDirection direction = QuantileDirection::kLower;
  double result = 0.0;
  double p = 0.0;
  double p_prime = 0.0;
  double confidence = 0.0;  // 1 - p - p_prime
  bool crossfit = false;
  std::vector<std::string> warnings;
};

// Resamples the propensity-training set with replacement K times, refits,
// rescores the audit rows, and recomputes the bound. Replicate k uses
// seeds derived from (seed, k) only. Replicates are recentered by
// center - median(raw) and the summary reports the p_prime quantile in
// the requested direction.
absl::StatusOr<BootstrapSummary> BootstrapBound(
    const Matrix& train_x, std::span<const int> train_y, const Matrix& audit_x,
    const PropensityFitter& fitter, const BoundFunction& bound,
    const BootstrapOptions& options);

// Variant without a separate training set: each replicate resamples both
// cross-fitting folds of the audit rows and scores each fold with the
// model fit on the other fold's resample.
absl::StatusOr<BootstrapSummary> BootstrapBoundCrossfit(
    const Matrix& audit_x, std::span<const int> audit_y,
    const PropensityFitter& fitter, const BoundFunction& bound,
    const BootstrapOptions& options);

}  // namespace zraudit

#endif  // ZRAUDIT_BOOTSTRAP_H_

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

#ifndef ZRAUDIT_PROPENSITY_H_
#define ZRAUDIT_PROPENSITY_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"

namespace zraudit {

// Rows are records, columns are features.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Per-feature centering and scaling. Constant features keep stddev 1 so
// they map to 0 and carry no weight.
struct Standardizer {
  Vector mean;
  Vector stddev;

  static Standardizer Fit(const Matrix& features);
  Matrix Apply(const Matrix& features) const;
};

// Principal-component projection of standardized features.
struct PcaProjection {
  Standardizer standardizer;
  Matrix components;  // d x k, orthonormal columns, descending variance
  Vector explained_variance;
  double explained_variance_ratio = 0.0;

  Matrix Apply(const Matrix& features) const;
};

// Requires 1 <= k <= min(m, d). Each component's largest-magnitude
// coordinate is made positive.
absl::StatusOr<PcaProjection> FitPca(const Matrix& features, int k);

// FitPca followed by Apply on the same rows.
absl::StatusOr<Matrix> ReduceDims(const Matrix& features, int k);

// Maps a raw logit s to sigmoid(a * s + b).
struct PlattCalibration {
  double a = 1.0;
  double b = 0.0;
};

struct FitOptions {
  double l2_lambda = 1e-3;
  // Platt calibration on a stratified held-out split of the input.
  bool calibrate = true;
  double calibration_fraction = 0.2;
  // Optional PCA reduction to this many dimensions (0 disables).
  int reduce_to = 0;
  int max_iterations = 5000;
  double gradient_tolerance = 1e-6;
  uint64_t seed = 0;
};

// L2-regularized linear-logistic propensity model P(S = 1 | X = x).
struct PropensityModel {
  Vector weights;  // weights[0] is the unpenalized intercept
  Standardizer standardizer;
  std::optional<Matrix> reducer;  // d x k projection after standardizing
  PlattCalibration platt;
  bool calibrated = false;
  int iterations = 0;
  double gradient_norm = 0.0;

  // Standardized (and optionally projected) design rows, no intercept.
  Matrix Transform(const Matrix& features) const;
  // Linear logit w0 + <w, z> for every row.
  Vector RawScores(const Matrix& features) const;
  std::vector<double> PredictUncalibrated(const Matrix& features) const;
  std::vector<double> Predict(const Matrix& features) const;
};

// Mean logistic loss plus lambda * |w|^2 / 2 over the non-intercept
// weights. `design` excludes the intercept column; labels are +-1.
// Writes the gradient when `gradient` is non-null.
double RegularizedLogisticLoss(const Matrix& design, std::span<const int> labels,
                               const Vector& weights, double l2_lambda,
                               Vector* gradient);

// Full-batch gradient descent with Armijo backtracking. Requires at least
// 10 rows, both classes, and finite features.
absl::StatusOr<PropensityModel> FitPropensity(const Matrix& features,
                                              std::span<const int> labels,
                                              const FitOptions& options);

// Label-independent split of [0, m) into two sorted halves of sizes
// floor(m/2) and ceil(m/2).
std::array<std::vector<size_t>, 2> CrossfitSplit(size_t m, uint64_t seed);

// Two-fold cross-fitting: a seeded permutation splits the rows into two
// halves; each half is scored by the model fit on the other. The split
// does not look at labels, so a record's own label never influences its
// score. Requires at least 20 rows.
absl::StatusOr<std::vector<double>> Crossfit(const Matrix& features,
                                             std::span<const int> labels,
                                             const FitOptions& options,
                                             uint64_t seed);

// |log(pi / (1 - pi))|; +inf at 0 and 1.
double LocalShift(double pi_hat);

struct OverlapEstimate {
  double eta = 0.5;
  double delta_ds = 0.0;
};

// Largest eta <= 1/2 such that, within each class, the fraction of records
// with min(pi, 1 - pi) < eta is at most delta_ds.
absl::StatusOr<OverlapEstimate> EstimateOverlap(std::span<const double> pi_hat,
                                                std::span<const int> labels,
                                                double delta_ds);

// Moves pi_hat away from 1/2 so that min(pi, 1 - pi) drops by kappa,
// floored at 0. Values at exactly 1/2 move upward.
double Pessimize(double pi_hat, double kappa);

}  // namespace zraudit

#endif  // ZRAUDIT_PROPENSITY_H_

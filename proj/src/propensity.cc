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

#include "zraudit/propensity.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "zraudit/normal.h"
#include "zraudit/rng.h"

namespace zraudit {
namespace {

constexpr double kConstantFeatureTolerance = 1e-12;

// log(1 + exp(x)) without overflow.
double Softplus(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

void Shuffle(std::vector<size_t>& items, Rng& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[rng.UniformInt(i)]);
  }
}

absl::Status ValidateTrainingData(const Matrix& features,
                                  std::span<const int> labels,
                                  Eigen::Index min_rows) {
  if (static_cast<Eigen::Index>(labels.size()) != features.rows()) {
    return absl::InvalidArgumentError(
        absl::StrCat("label count ", labels.size(), " does not match ",
                     features.rows(), " feature rows"));
  }
  if (features.rows() < min_rows) {
    return absl::InvalidArgumentError(absl::StrCat(
        "need at least ", min_rows, " rows, got ", features.rows()));
  }
  if (!features.allFinite()) {
    return absl::InvalidArgumentError("features contain non-finite values");
  }
  bool has_pos = false;
  bool has_neg = false;
  for (const int y : labels) {
    if (y == 1) {
      has_pos = true;
    } else if (y == -1) {
      has_neg = true;
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("labels must be -1 or +1, got ", y));
    }
  }
  if (!has_pos || !has_neg) {
    return absl::FailedPreconditionError(
        "propensity fitting needs both classes present");
  }
  return absl::OkStatus();
}

Matrix SelectRows(const Matrix& m, std::span<const size_t> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) =
        m.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

std::vector<int> SelectLabels(std::span<const int> labels,
                              std::span<const size_t> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (const size_t r : rows) out.push_back(labels[r]);
  return out;
}

// Gradient descent with Armijo backtracking. The trial step grows after
// each accepted step so that flat regions do not stall progress.
Vector MinimizeLogistic(const Matrix& design, std::span<const int> labels,
                        double l2_lambda, const FitOptions& options,
                        int* iterations, double* gradient_norm) {
  const Eigen::Index p = design.cols() + 1;
  Vector w = Vector::Zero(p);
  double positives = 0;
  for (const int y : labels) positives += (y == 1);
  const double prior = positives / static_cast<double>(labels.size());
  w(0) = std::log(prior) - std::log1p(-prior);

  Vector grad(p);
  double loss = RegularizedLogisticLoss(design, labels, w, l2_lambda, &grad);
  double step = 1.0;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    const double gnorm2 = grad.squaredNorm();
    if (std::sqrt(gnorm2) <= options.gradient_tolerance) break;
    step = std::min(step * 2.0, 1e6);
    Vector candidate;
    double candidate_loss = 0;
    while (true) {
      candidate = w - step * grad;
      candidate_loss =
          RegularizedLogisticLoss(design, labels, candidate, l2_lambda, nullptr);
      if (candidate_loss <= loss - 0.5 * step * gnorm2 || step < 1e-20) break;
      step *= 0.5;
    }
    w = std::move(candidate);
    loss = RegularizedLogisticLoss(design, labels, w, l2_lambda, &grad);
  }
  *iterations = iter;
  *gradient_norm = grad.norm();
  return w;
}

// Platt's smoothed-target logistic fit of labels on raw logits, by damped
// Newton iterations on (a, b).
PlattCalibration FitPlatt(std::span<const double> scores,
                          std::span<const int> labels) {
  double n_pos = 0;
  double n_neg = 0;
  for (const int y : labels) (y == 1 ? n_pos : n_neg) += 1;
  const double hi_target = (n_pos + 1) / (n_pos + 2);
  const double lo_target = 1 / (n_neg + 2);

  auto objective = [&](double a, double b) {
    double total = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
      const double t = labels[i] == 1 ? hi_target : lo_target;
      const double z = a * scores[i] + b;
      total += t * Softplus(-z) + (1 - t) * Softplus(z);
    }
    return total;
  };

  double a = 1.0;
  double b = 0.0;
  double value = objective(a, b);
  for (int iter = 0; iter < 100; ++iter) {
    double ga = 0, gb = 0, haa = 0, hab = 0, hbb = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
      const double t = labels[i] == 1 ? hi_target : lo_target;
      const double prob = Sigmoid(a * scores[i] + b);
      const double resid = prob - t;
      const double w = prob * (1 - prob);
      ga += resid * scores[i];
      gb += resid;
      haa += w * scores[i] * scores[i];
      hab += w * scores[i];
      hbb += w;
    }
    if (std::hypot(ga, gb) < 1e-10) break;
    haa += 1e-12;
    hbb += 1e-12;
    const double det = haa * hbb - hab * hab;
    double da = (hbb * ga - hab * gb) / det;
    double db = (haa * gb - hab * ga) / det;
    double scale = 1.0;
    bool improved = false;
    for (int half = 0; half < 60; ++half) {
      const double trial = objective(a - scale * da, b - scale * db);
      if (trial < value) {
        a -= scale * da;
        b -= scale * db;
        value = trial;
        improved = true;
        break;
      }
      scale *= 0.5;
    }
    if (!improved) break;
  }
  return PlattCalibration{a, b};
}

}  // namespace

Standardizer Standardizer::Fit(const Matrix& features) {
  Standardizer s;
  const double n = static_cast<double>(features.rows());
  s.mean = features.colwise().mean().transpose();
  s.stddev.resize(features.cols());
  for (Eigen::Index j = 0; j < features.cols(); ++j) {
    const double var =
        n > 1 ? (features.col(j).array() - s.mean(j)).square().sum() / (n - 1)
              : 0.0;
    const double sd = std::sqrt(var);
    s.stddev(j) = sd > kConstantFeatureTolerance ? sd : 1.0;
  }
  return s;
}

Matrix Standardizer::Apply(const Matrix& features) const {
  return (features.rowwise() - mean.transpose()).array().rowwise() /
         stddev.transpose().array();
}

Matrix PcaProjection::Apply(const Matrix& features) const {
  return standardizer.Apply(features) * components;
}

absl::StatusOr<PcaProjection> FitPca(const Matrix& features, int k) {
  const Eigen::Index d = features.cols();
  const Eigen::Index m = features.rows();
  if (k < 1 || k > std::min(m, d)) {
    return absl::OutOfRangeError(absl::StrCat(
        "k must lie in [1, ", std::min(m, d), "], got ", k));
  }
  if (!features.allFinite()) {
    return absl::InvalidArgumentError("features contain non-finite values");
  }
  PcaProjection pca;
  pca.standardizer = Standardizer::Fit(features);
  const Matrix z = pca.standardizer.Apply(features);
  const Matrix cov =
      (z.transpose() * z) / static_cast<double>(std::max<Eigen::Index>(m - 1, 1));
  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
  if (solver.info() != Eigen::Success) {
    return absl::InternalError("eigendecomposition failed");
  }
  const Vector& values = solver.eigenvalues();  // ascending
  const Matrix& vectors = solver.eigenvectors();
  pca.components.resize(d, k);
  pca.explained_variance.resize(k);
  for (int c = 0; c < k; ++c) {
    const Eigen::Index src = d - 1 - c;
    Vector v = vectors.col(src);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    pca.components.col(c) = v;
    pca.explained_variance(c) = std::max(values(src), 0.0);
  }
  const double total = values.cwiseMax(0.0).sum();
  pca.explained_variance_ratio =
      total > 0 ? pca.explained_variance.sum() / total : 1.0;
  return pca;
}

absl::StatusOr<Matrix> ReduceDims(const Matrix& features, int k) {
  absl::StatusOr<PcaProjection> pca = FitPca(features, k);
  if (!pca.ok()) return pca.status();
  return pca->Apply(features);
}

double RegularizedLogisticLoss(const Matrix& design, std::span<const int> labels,
                               const Vector& weights, double l2_lambda,
                               Vector* gradient) {
  const Eigen::Index n = design.rows();
  const Vector slope = weights.tail(weights.size() - 1);
  const Vector logits = (design * slope).array() + weights(0);
  double loss = 0;
  Vector coef(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double y = labels[static_cast<size_t>(i)];
    const double margin = y * logits(i);
    loss += Softplus(-margin);
    coef(i) = -y * Sigmoid(-margin);
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  loss = loss * inv_n + 0.5 * l2_lambda * slope.squaredNorm();
  if (gradient != nullptr) {
    gradient->resize(weights.size());
    (*gradient)(0) = coef.sum() * inv_n;
    gradient->tail(weights.size() - 1) =
        design.transpose() * coef * inv_n + l2_lambda * slope;
  }
  return loss;
}

Matrix PropensityModel::Transform(const Matrix& features) const {
  Matrix z = standardizer.Apply(features);
  if (reducer.has_value()) return z * (*reducer);
  return z;
}

Vector PropensityModel::RawScores(const Matrix& features) const {
  const Matrix z = Transform(features);
  return (z * weights.tail(weights.size() - 1)).array() + weights(0);
}

std::vector<double> PropensityModel::PredictUncalibrated(
    const Matrix& features) const {
  const Vector s = RawScores(features);
  std::vector<double> out(static_cast<size_t>(s.size()));
  for (Eigen::Index i = 0; i < s.size(); ++i) out[i] = Sigmoid(s(i));
  return out;
}

std::vector<double> PropensityModel::Predict(const Matrix& features) const {
  const Vector s = RawScores(features);
  std::vector<double> out(static_cast<size_t>(s.size()));
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    out[i] = Sigmoid(platt.a * s(i) + platt.b);
  }
  return out;
}

absl::StatusOr<PropensityModel> FitPropensity(const Matrix& features,
                                              std::span<const int> labels,
                                              const FitOptions& options) {
  if (absl::Status s = ValidateTrainingData(features, labels, 10); !s.ok()) {
    return s;
  }
  if (!(options.l2_lambda > 0)) {
    return absl::InvalidArgumentError("l2_lambda must be positive");
  }

  // Stratified calibration split.
  std::vector<size_t> train_rows;
  std::vector<size_t> calib_rows;
  bool calibrate = false;
  if (options.calibrate) {
    Rng rng(DeriveSeed(options.seed, "platt-split"));
    std::vector<size_t> by_class[2];
    for (size_t i = 0; i < labels.size(); ++i) {
      by_class[labels[i] == 1 ? 1 : 0].push_back(i);
    }
    calibrate = true;
    for (auto& rows : by_class) {
      Shuffle(rows, rng);
      const auto held = static_cast<size_t>(
          std::floor(options.calibration_fraction *
                     static_cast<double>(rows.size())));
      if (held == 0 || held >= rows.size()) calibrate = false;
    }
    if (calibrate) {
      for (auto& rows : by_class) {
        const auto held = static_cast<size_t>(
            std::floor(options.calibration_fraction *
                       static_cast<double>(rows.size())));
        calib_rows.insert(calib_rows.end(), rows.begin(), rows.begin() + held);
        train_rows.insert(train_rows.end(), rows.begin() + held, rows.end());
      }
      std::sort(calib_rows.begin(), calib_rows.end());
      std::sort(train_rows.begin(), train_rows.end());
    }
  }
  if (!calibrate) {
    train_rows.resize(labels.size());
    std::iota(train_rows.begin(), train_rows.end(), size_t{0});
  }

  const Matrix train_x = SelectRows(features, train_rows);
  const std::vector<int> train_y = SelectLabels(labels, train_rows);

  PropensityModel model;
  model.standardizer = Standardizer::Fit(train_x);
  Matrix design = model.standardizer.Apply(train_x);
  if (options.reduce_to > 0) {
    absl::StatusOr<PcaProjection> pca = FitPca(train_x, options.reduce_to);
    if (!pca.ok()) return pca.status();
    model.reducer = pca->components;
    design = design * pca->components;
  }
  model.weights = MinimizeLogistic(design, train_y, options.l2_lambda, options,
                                   &model.iterations, &model.gradient_norm);
  if (calibrate) {
    const Matrix calib_x = SelectRows(features, calib_rows);
    const std::vector<int> calib_y = SelectLabels(labels, calib_rows);
    const Vector raw = model.RawScores(calib_x);
    model.platt = FitPlatt(std::span<const double>(raw.data(), raw.size()),
                           calib_y);
    model.calibrated = true;
  }
  return model;
}

std::array<std::vector<size_t>, 2> CrossfitSplit(size_t m, uint64_t seed) {
  std::vector<size_t> order(m);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(DeriveSeed(seed, "crossfit-split"));
  Shuffle(order, rng);
  std::array<std::vector<size_t>, 2> folds;
  folds[0].assign(order.begin(), order.begin() + m / 2);
  folds[1].assign(order.begin() + m / 2, order.end());
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

absl::StatusOr<std::vector<double>> Crossfit(const Matrix& features,
                                             std::span<const int> labels,
                                             const FitOptions& options,
                                             uint64_t seed) {
  if (absl::Status s = ValidateTrainingData(features, labels, 20); !s.ok()) {
    return s;
  }
  const size_t m = labels.size();
  const std::array<std::vector<size_t>, 2> folds = CrossfitSplit(m, seed);

  std::vector<double> pi_hat(m, 0.5);
  for (int k = 0; k < 2; ++k) {
    const std::vector<size_t>& fit_rows = folds[k];
    const std::vector<size_t>& score_rows = folds[1 - k];
    FitOptions fold_options = options;
    fold_options.seed = DeriveSeed(seed, static_cast<uint64_t>(k));
    absl::StatusOr<PropensityModel> model =
        FitPropensity(SelectRows(features, fit_rows),
                      SelectLabels(labels, fit_rows), fold_options);
    if (!model.ok()) return model.status();
    const std::vector<double> scored =
        model->Predict(SelectRows(features, score_rows));
    for (size_t i = 0; i < score_rows.size(); ++i) {
      pi_hat[score_rows[i]] = scored[i];
    }
  }
  return pi_hat;
}

double LocalShift(double pi_hat) {
  if (pi_hat <= 0.0 || pi_hat >= 1.0) {
    return std::numeric_limits<double>::infinity();
  }
  return std::fabs(std::log(pi_hat) - std::log1p(-pi_hat));
}

absl::StatusOr<OverlapEstimate> EstimateOverlap(std::span<const double> pi_hat,
                                                std::span<const int> labels,
                                                double delta_ds) {
  if (pi_hat.size() != labels.size()) {
    return absl::InvalidArgumentError("pi_hat and labels differ in length");
  }
  if (!(delta_ds >= 0 && delta_ds <= 1)) {
    return absl::InvalidArgumentError("delta_ds must lie in [0, 1]");
  }
  double eta = 0.5;
  for (const int cls : {-1, 1}) {
    std::vector<double> balance;
    for (size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) {
        balance.push_back(std::min(pi_hat[i], 1.0 - pi_hat[i]));
      }
    }
    if (balance.empty()) continue;
    std::sort(balance.begin(), balance.end());
    const auto n = static_cast<int64_t>(balance.size());
    // Largest count k of excluded records with k / n <= delta_ds.
    auto allowed = static_cast<int64_t>(std::floor(delta_ds * n));
    while (allowed + 1 <= n &&
           static_cast<double>(allowed + 1) / n <= delta_ds) {
      ++allowed;
    }
    while (allowed > 0 && static_cast<double>(allowed) / n > delta_ds) {
      --allowed;
    }
    if (allowed < n) eta = std::min(eta, balance[allowed]);
  }
  return OverlapEstimate{std::clamp(eta, 0.0, 0.5), delta_ds};
}

double Pessimize(double pi_hat, double kappa) {
  const double balance = std::min(pi_hat, 1.0 - pi_hat);
  const double shrunk = std::max(0.0, balance - kappa);
  return pi_hat >= 0.5 ? 1.0 - shrunk : shrunk;
}

}  // namespace zraudit

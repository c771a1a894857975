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
#include <vector>

#include "Eigen/Dense"
#include "gtest/gtest.h"
#include "zraudit/rng.h"

namespace zraudit {
namespace {

Matrix RandomMatrix(int rows, int cols, uint64_t seed) {
  Rng rng(seed);
  Matrix x(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) x(i, j) = rng.Normal();
  }
  return x;
}

// Two Gaussian clusters at +-center along every axis.
void TwoClusters(int per_class, int d, double center, uint64_t seed, Matrix* x,
                 std::vector<int>* y) {
  Rng rng(seed);
  x->resize(2 * per_class, d);
  y->assign(2 * per_class, 0);
  for (int i = 0; i < 2 * per_class; ++i) {
    const int label = i < per_class ? 1 : -1;
    (*y)[i] = label;
    for (int j = 0; j < d; ++j) {
      (*x)(i, j) = label * center + 0.5 * rng.Normal();
    }
  }
}

double Mean(const std::vector<double>& v, const std::vector<int>& y, int cls) {
  double s = 0;
  int n = 0;
  for (size_t i = 0; i < v.size(); ++i) {
    if (y[i] == cls) {
      s += v[i];
      ++n;
    }
  }
  return s / n;
}

TEST(PropensityTest, LossGradientMatchesFiniteDifferences) {
  const Matrix x = RandomMatrix(30, 4, 1);
  std::vector<int> y(30);
  for (int i = 0; i < 30; ++i) y[i] = (i * 7) % 3 == 0 ? 1 : -1;
  Rng rng(2);
  Vector w(5);
  for (int j = 0; j < 5; ++j) w(j) = rng.Normal();
  Vector grad;
  RegularizedLogisticLoss(x, y, w, 0.3, &grad);
  constexpr double kStep = 1e-5;
  for (int j = 0; j < 5; ++j) {
    Vector up = w, down = w;
    up(j) += kStep;
    down(j) -= kStep;
    const double fd = (RegularizedLogisticLoss(x, y, up, 0.3, nullptr) -
                       RegularizedLogisticLoss(x, y, down, 0.3, nullptr)) /
                      (2 * kStep);
    EXPECT_NEAR(grad(j), fd, 1e-4 * std::max(1.0, std::fabs(fd))) << j;
  }
}

TEST(PropensityTest, LossDoesNotPenalizeIntercept) {
  const Matrix x = Matrix::Zero(10, 2);
  std::vector<int> y = {1, 1, 1, 1, 1, -1, -1, -1, -1, -1};
  Vector w = Vector::Zero(3);
  w(0) = 5.0;
  const double loss = RegularizedLogisticLoss(x, y, w, 100.0, nullptr);
  const double expected =
      0.5 * (std::log1p(std::exp(-5.0)) + std::log1p(std::exp(5.0)));
  EXPECT_NEAR(loss, expected, 1e-12);
}

// Plain fixed-step gradient descent on the same objective, run far past
// convergence.
std::vector<double> OracleFit(const Matrix& x, const std::vector<int>& y,
                              double lambda) {
  const int n = static_cast<int>(x.rows());
  const int d = static_cast<int>(x.cols());
  std::vector<double> mean(d, 0), sd(d, 0);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < n; ++i) mean[j] += x(i, j) / n;
    for (int i = 0; i < n; ++i) {
      sd[j] += (x(i, j) - mean[j]) * (x(i, j) - mean[j]) / (n - 1);
    }
    sd[j] = std::sqrt(sd[j]);
  }
  std::vector<std::vector<double>> z(n, std::vector<double>(d));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) z[i][j] = (x(i, j) - mean[j]) / sd[j];
  }
  std::vector<double> w(d + 1, 0.0);
  for (int it = 0; it < 200000; ++it) {
    std::vector<double> g(d + 1, 0.0);
    for (int i = 0; i < n; ++i) {
      double s = w[0];
      for (int j = 0; j < d; ++j) s += w[j + 1] * z[i][j];
      const double c = -y[i] / (1 + std::exp(y[i] * s));
      g[0] += c / n;
      for (int j = 0; j < d; ++j) g[j + 1] += c * z[i][j] / n;
    }
    for (int j = 0; j < d; ++j) g[j + 1] += lambda * w[j + 1];
    double norm = 0;
    for (double v : g) norm += v * v;
    if (std::sqrt(norm) < 1e-12) break;
    for (int j = 0; j <= d; ++j) w[j] -= 0.5 * g[j];
  }
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    double s = w[0];
    for (int j = 0; j < d; ++j) s += w[j + 1] * z[i][j];
    out[i] = 1 / (1 + std::exp(-s));
  }
  return out;
}

TEST(PropensityTest, MatchesGradientDescentOracle) {
  Matrix x;
  std::vector<int> y;
  TwoClusters(40, 3, 0.4, 3, &x, &y);
  FitOptions options;
  options.calibrate = false;
  options.l2_lambda = 0.05;
  options.gradient_tolerance = 1e-10;
  options.max_iterations = 100000;
  const PropensityModel model = *FitPropensity(x, y, options);
  const std::vector<double> got = model.Predict(x);
  const std::vector<double> expected = OracleFit(x, y, 0.05);
  for (size_t i = 0; i < got.size(); ++i) {
    EXPECT_NEAR(got[i], expected[i], 1e-6) << i;
  }
}

TEST(PropensityTest, SeparableClustersScoreHigh) {
  Matrix x;
  std::vector<int> y;
  TwoClusters(50, 2, 2.0, 4, &x, &y);
  FitOptions options;
  options.calibrate = false;
  options.l2_lambda = 1e-3;
  const PropensityModel model = *FitPropensity(x, y, options);
  const std::vector<double> pi = model.Predict(x);
  for (size_t i = 0; i < pi.size(); ++i) {
    if (y[i] == 1) {
      EXPECT_GE(pi[i], 0.9) << i;
    }
  }
}

TEST(PropensityTest, SymmetricDuplicatesGiveOneHalf) {
  const Matrix base = RandomMatrix(20, 3, 5);
  Matrix x(40, 3);
  x << base, base;
  std::vector<int> y(40);
  for (int i = 0; i < 40; ++i) y[i] = i < 20 ? 1 : -1;
  FitOptions options;
  options.calibrate = false;
  const PropensityModel model = *FitPropensity(x, y, options);
  for (double p : model.PredictUncalibrated(x)) EXPECT_NEAR(p, 0.5, 1e-6);
}

TEST(PropensityTest, HeavyRegularizationGivesPrior) {
  Matrix x;
  std::vector<int> y;
  TwoClusters(30, 3, 1.0, 6, &x, &y);
  for (int i = 0; i < 20; ++i) y[i] = -1;  // prior 10 / 60
  FitOptions options;
  options.calibrate = false;
  options.l2_lambda = 1e9;
  const PropensityModel model = *FitPropensity(x, y, options);
  EXPECT_LT(model.weights.tail(3).norm(), 1e-6);
  for (double p : model.Predict(x)) EXPECT_NEAR(p, 10.0 / 60.0, 1e-6);
}

TEST(PropensityTest, CalibratedPredictionsStayInRange) {
  Matrix x;
  std::vector<int> y;
  TwoClusters(100, 4, 0.3, 7, &x, &y);
  FitOptions options;
  const PropensityModel model = *FitPropensity(x, y, options);
  EXPECT_TRUE(model.calibrated);
  EXPECT_GT(model.platt.a, 0.0);
  const std::vector<double> pi = model.Predict(x);
  for (double p : pi) {
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1.0);
  }
  EXPECT_GT(Mean(pi, y, 1), Mean(pi, y, -1));
}

TEST(PropensityTest, FitRejectsBadInput) {
  Matrix x;
  std::vector<int> y;
  TwoClusters(10, 2, 1.0, 8, &x, &y);
  FitOptions options;
  std::vector<int> one_class(20, 1);
  EXPECT_FALSE(FitPropensity(x, one_class, options).ok());
  std::vector<int> short_labels(5, 1);
  EXPECT_FALSE(FitPropensity(x, short_labels, options).ok());
  options.l2_lambda = 0;
  EXPECT_FALSE(FitPropensity(x, y, options).ok());
  options.l2_lambda = 1e-3;
  x(0, 0) = NAN;
  EXPECT_FALSE(FitPropensity(x, y, options).ok());
  EXPECT_FALSE(FitPropensity(Matrix::Zero(4, 2), {{1, -1, 1, -1}}, options)
                   .ok());
}

TEST(PropensityTest, CrossfitSplitIsAPartition) {
  for (size_t m : {20u, 21u, 101u}) {
    const auto folds = CrossfitSplit(m, 9);
    EXPECT_EQ(folds[0].size(), m / 2);
    EXPECT_EQ(folds[1].size(), m - m / 2);
    std::vector<size_t> all = folds[0];
    all.insert(all.end(), folds[1].begin(), folds[1].end());
    std::sort(all.begin(), all.end());
    for (size_t i = 0; i < m; ++i) EXPECT_EQ(all[i], i);
  }
  EXPECT_EQ(CrossfitSplit(50, 1), CrossfitSplit(50, 1));
  EXPECT_NE(CrossfitSplit(50, 1), CrossfitSplit(50, 2));
}

TEST(PropensityTest, CrossfitScoreIgnoresOwnLabel) {
  Matrix x;
  std::vector<int> y;
  TwoClusters(30, 3, 0.5, 10, &x, &y);
  FitOptions options;
  const std::vector<double> base = *Crossfit(x, y, options, 11);
  // Flipping one record's label changes only the other fold's scores.
  const auto folds = CrossfitSplit(60, 11);
  const size_t flipped = folds[0][3];
  std::vector<int> y2 = y;
  y2[flipped] = -y2[flipped];
  const std::vector<double> changed = *Crossfit(x, y2, options, 11);
  for (size_t i : folds[0]) EXPECT_EQ(base[i], changed[i]) << i;
}

TEST(PropensityTest, CrossfitOnSymmetricDataStaysNearHalf) {
  // Twins can land in different folds, so each fold sees a little
  // spurious signal; at this size it stays inside the band.
  const Matrix base = RandomMatrix(2000, 3, 12);
  Matrix x(4000, 3);
  x << base, base;
  std::vector<int> y(4000);
  for (int i = 0; i < 4000; ++i) y[i] = i < 2000 ? 1 : -1;
  const std::vector<double> pi = *Crossfit(x, y, FitOptions{}, 13);
  for (double p : pi) {
    EXPECT_GE(p, 0.4);
    EXPECT_LE(p, 0.6);
  }
}

TEST(PropensityTest, CrossfitSeparatesOneDimensionalSigns) {
  Rng rng(14);
  Matrix x(20, 1);
  std::vector<int> y(20);
  for (int i = 0; i < 20; ++i) {
    const double mag = 0.2 + rng.Uniform();
    x(i, 0) = i % 2 == 0 ? mag : -mag;
    y[i] = i % 2 == 0 ? 1 : -1;
  }
  FitOptions options;
  options.calibrate = false;
  const std::vector<double> pi = *Crossfit(x, y, options, 15);
  EXPECT_GT(Mean(pi, y, 1), Mean(pi, y, -1));
  EXPECT_FALSE(Crossfit(x.topRows(19), std::span<const int>(y).first(19),
                        options, 15)
                   .ok());
}

TEST(PropensityTest, LocalShift) {
  EXPECT_EQ(LocalShift(0.5), 0.0);
  EXPECT_NEAR(LocalShift(0.9), std::log(9.0), 1e-14);
  EXPECT_NEAR(LocalShift(0.1), std::log(9.0), 1e-14);
  EXPECT_EQ(LocalShift(1.0), INFINITY);
  EXPECT_EQ(LocalShift(0.0), INFINITY);
}

TEST(PropensityTest, OverlapExamples) {
  const std::vector<double> half(6, 0.5);
  const std::vector<int> y = {1, 1, 1, -1, -1, -1};
  EXPECT_EQ(EstimateOverlap(half, y, 0.0)->eta, 0.5);

  const std::vector<double> pi = {0.1, 0.3, 0.4, 0.45, 0.9, 0.7, 0.6, 0.55};
  const std::vector<int> y2 = {1, 1, 1, 1, -1, -1, -1, -1};
  EXPECT_DOUBLE_EQ(EstimateOverlap(pi, y2, 0.25)->eta, 0.3);
  EXPECT_EQ(EstimateOverlap(pi, y2, 1.0)->eta, 0.5);
  EXPECT_DOUBLE_EQ(EstimateOverlap(pi, y2, 0.0)->eta, 0.1);
  EXPECT_FALSE(EstimateOverlap(pi, y, 0.1).ok());
  EXPECT_FALSE(EstimateOverlap(pi, y2, 1.5).ok());
}

// Largest candidate eta with at most delta_ds of each class strictly below.
double OverlapOracle(const std::vector<double>& pi, const std::vector<int>& y,
                     double delta) {
  std::vector<double> candidates = {0.5};
  for (double p : pi) candidates.push_back(std::min(p, 1 - p));
  double best = 0;
  for (double eta : candidates) {
    bool ok = true;
    for (int cls : {-1, 1}) {
      int n = 0, below = 0;
      for (size_t i = 0; i < pi.size(); ++i) {
        if (y[i] != cls) continue;
        ++n;
        below += std::min(pi[i], 1 - pi[i]) < eta;
      }
      if (n > 0 && static_cast<double>(below) / n > delta) ok = false;
    }
    if (ok) best = std::max(best, eta);
  }
  return best;
}

TEST(PropensityTest, OverlapMatchesCandidateScan) {
  Rng rng(16);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(rng.UniformInt(30));
    std::vector<double> pi(n);
    std::vector<int> y(n);
    for (int i = 0; i < n; ++i) {
      pi[i] = rng.Uniform();
      y[i] = rng.Bernoulli(0.5) ? 1 : -1;
    }
    const double delta = rng.Uniform() * 0.5;
    EXPECT_DOUBLE_EQ(EstimateOverlap(pi, y, delta)->eta,
                     OverlapOracle(pi, y, delta))
        << t;
  }
}

TEST(PropensityTest, PessimizeExamples) {
  EXPECT_EQ(Pessimize(0.5, 0.0), 0.5);
  EXPECT_NEAR(Pessimize(0.7, 0.1), 0.8, 1e-15);
  EXPECT_EQ(Pessimize(0.95, 0.2), 1.0);
  EXPECT_NEAR(Pessimize(0.3, 0.1), 0.2, 1e-15);
  EXPECT_EQ(Pessimize(0.05, 0.2), 0.0);
}

TEST(PropensityTest, PessimizeNeverImprovesBalance) {
  for (double p = 0.0; p <= 1.0; p += 0.01) {
    for (double kappa : {0.0, 0.05, 0.3}) {
      const double q = Pessimize(p, kappa);
      EXPECT_LE(std::min(q, 1 - q), std::min(p, 1 - p) + 1e-15);
      EXPECT_GE(q, 0.0);
      EXPECT_LE(q, 1.0);
    }
  }
}

TEST(PcaTest, FullRankOrthonormalReconstruction) {
  const Matrix x = RandomMatrix(50, 4, 17);
  const PcaProjection pca = *FitPca(x, 4);
  const Matrix c = pca.components;
  EXPECT_LT((c.transpose() * c - Matrix::Identity(4, 4)).norm(), 1e-10);
  const Matrix z = pca.standardizer.Apply(x);
  EXPECT_LT((pca.Apply(x) * c.transpose() - z).norm(), 1e-9);
  EXPECT_NEAR(pca.explained_variance_ratio, 1.0, 1e-12);
}

TEST(PcaTest, RankOneDataIsExplainedByOneComponent) {
  Rng rng(18);
  Matrix x(30, 5);
  const double dir[5] = {1, -2, 0.5, 3, 1};
  for (int i = 0; i < 30; ++i) {
    const double t = rng.Normal();
    for (int j = 0; j < 5; ++j) x(i, j) = t * dir[j];
  }
  EXPECT_GE(FitPca(x, 1)->explained_variance_ratio, 1 - 1e-9);
}

// Cyclic Jacobi eigensolver used as an independent dense oracle.
void JacobiEigen(Matrix a, Vector* values, Matrix* vectors) {
  const int n = static_cast<int>(a.rows());
  Matrix v = Matrix::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::fabs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
        const double t = (theta >= 0 ? 1 : -1) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  *values = a.diagonal();
  *vectors = v;
}

TEST(PcaTest, MatchesJacobiOracle) {
  const Matrix x = RandomMatrix(100, 10, 19);
  const PcaProjection pca = *FitPca(x, 3);
  // Oracle on the standardized covariance.
  Vector mean = x.colwise().mean().transpose();
  Matrix z = x.rowwise() - mean.transpose();
  for (int j = 0; j < 10; ++j) {
    z.col(j) /= std::sqrt(z.col(j).squaredNorm() / 99.0);
  }
  Vector values;
  Matrix vectors;
  JacobiEigen(z.transpose() * z / 99.0, &values, &vectors);
  std::vector<int> order(10);
  for (int i = 0; i < 10; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return values(a) > values(b); });
  const Matrix projected = pca.Apply(x);
  for (int c = 0; c < 3; ++c) {
    EXPECT_NEAR(pca.explained_variance(c), values(order[c]), 1e-10);
    const Vector expected = z * vectors.col(order[c]);
    const Vector got = projected.col(c);
    const double sign = expected.dot(got) >= 0 ? 1.0 : -1.0;
    EXPECT_LT((got - sign * expected).cwiseAbs().maxCoeff(), 1e-8) << c;
  }
}

TEST(PcaTest, RejectsBadRank) {
  const Matrix x = RandomMatrix(5, 3, 20);
  EXPECT_FALSE(FitPca(x, 0).ok());
  EXPECT_FALSE(FitPca(x, 4).ok());
}

TEST(PcaTest, ReducedFitScoresInRange) {
  Matrix x;
  std::vector<int> y;
  TwoClusters(40, 6, 0.5, 21, &x, &y);
  FitOptions options;
  options.reduce_to = 2;
  const PropensityModel model = *FitPropensity(x, y, options);
  ASSERT_TRUE(model.reducer.has_value());
  EXPECT_EQ(model.reducer->cols(), 2);
  const std::vector<double> pi = model.Predict(x);
  EXPECT_GT(Mean(pi, y, 1), Mean(pi, y, -1));
}

}  // namespace
}  // namespace zraudit

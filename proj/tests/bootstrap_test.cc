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
#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "zraudit/rng.h"

namespace zraudit {
namespace {

TEST(QuantileTest, Examples) {
  const std::vector<double> v = {4, 1, 3, 2};
  EXPECT_EQ(*EmpiricalQuantile(v, 0.5, QuantileDirection::kLower), 2.0);
  EXPECT_EQ(*EmpiricalQuantile(v, 0.25, QuantileDirection::kUpper), 4.0);
  EXPECT_EQ(*EmpiricalQuantile(v, 0.5, QuantileDirection::kUpper), 3.0);
  EXPECT_EQ(*EmpiricalQuantile(v, 1e-9, QuantileDirection::kLower), 1.0);
  const std::vector<double> one = {7};
  for (double level : {0.01, 0.5, 0.99}) {
    EXPECT_EQ(*EmpiricalQuantile(one, level, QuantileDirection::kLower), 7.0);
    EXPECT_EQ(*EmpiricalQuantile(one, level, QuantileDirection::kUpper), 7.0);
  }
  EXPECT_FALSE(EmpiricalQuantile(v, 0.0, QuantileDirection::kLower).ok());
  EXPECT_FALSE(EmpiricalQuantile(v, 1.0, QuantileDirection::kLower).ok());
  EXPECT_FALSE(EmpiricalQuantile({}, 0.5, QuantileDirection::kLower).ok());
}

TEST(QuantileTest, FifteenthOrderStatistic) {
  Rng rng(1);
  std::vector<double> v(600);
  for (double& x : v) x = rng.Normal();
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(*EmpiricalQuantile(v, 0.025, QuantileDirection::kLower),
            sorted[14]);
  EXPECT_EQ(*EmpiricalQuantile(v, 0.025, QuantileDirection::kUpper),
            sorted[600 - 15]);
}

TEST(QuantileTest, WithinRangeAndMonotoneInLevel) {
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> v(2 + rng.UniformInt(100));
    for (double& x : v) x = rng.Normal();
    const double lo = *std::min_element(v.begin(), v.end());
    const double hi = *std::max_element(v.begin(), v.end());
    double prev = -INFINITY;
    for (double level = 0.01; level < 1; level += 0.01) {
      const double q = *EmpiricalQuantile(v, level, QuantileDirection::kLower);
      EXPECT_GE(q, lo);
      EXPECT_LE(q, hi);
      EXPECT_GE(q, prev);
      prev = q;
    }
  }
}

struct Data {
  Matrix x;
  std::vector<int> y;
};

Data MakeData(int n, uint64_t seed) {
  Rng rng(seed);
  Data d;
  d.x.resize(n, 3);
  d.y.resize(n);
  for (int i = 0; i < n; ++i) {
    d.y[i] = i % 2 == 0 ? 1 : -1;
    for (int j = 0; j < 3; ++j) d.x(i, j) = 0.5 * d.y[i] + rng.Normal();
  }
  return d;
}

PropensityFitter ConstantFitter(double value) {
  return [value](const Matrix&, std::span<const int>, const Matrix& score_x,
                 uint64_t) -> absl::StatusOr<std::vector<double>> {
    return std::vector<double>(static_cast<size_t>(score_x.rows()), value);
  };
}

// A bound that depends only on the propensities.
absl::StatusOr<double> MeanPi(std::span<const double> pi, uint64_t) {
  double s = 0;
  for (double p : pi) s += p;
  return s / static_cast<double>(pi.size());
}

TEST(BootstrapTest, ConstantReplicatesReturnRawValue) {
  const Data d = MakeData(60, 3);
  BootstrapOptions options;
  options.k = 40;
  const BootstrapSummary s =
      *BootstrapBound(d.x, d.y, d.x, ConstantFitter(0.5),
                      [](std::span<const double>,
                         uint64_t) -> absl::StatusOr<double> { return 1.25; },
                      options);
  EXPECT_EQ(s.result, 1.25);
  for (double v : s.values) EXPECT_EQ(v, 1.25);
}

TEST(BootstrapTest, ConstantPropensityMakesCenteringANoOp) {
  const Data d = MakeData(60, 4);
  BootstrapOptions options;
  options.k = 100;
  const BootstrapSummary s = *BootstrapBound(d.x, d.y, d.x,
                                             ConstantFitter(0.3), MeanPi,
                                             options);
  EXPECT_EQ(s.values, s.raw);
  EXPECT_EQ(s.result,
            *EmpiricalQuantile(s.raw, 0.025, QuantileDirection::kLower));
}

TEST(BootstrapTest, CenteringUsesMedianOfRawReplicates) {
  const Data d = MakeData(80, 5);
  BootstrapOptions options;
  options.k = 30;
  options.seed = 6;
  const BootstrapSummary s = *BootstrapBound(
      d.x, d.y, d.x, LogisticFitter(FitOptions{}), MeanPi, options);
  std::vector<double> sorted = s.raw;
  std::sort(sorted.begin(), sorted.end());
  const double median = 0.5 * (sorted[14] + sorted[15]);
  for (size_t k = 0; k < s.raw.size(); ++k) {
    EXPECT_DOUBLE_EQ(s.values[k], s.raw[k] + s.center - median);
  }
  EXPECT_EQ(s.warnings.size(), 1u);  // K < 50
  EXPECT_FALSE(s.crossfit);
}

TEST(BootstrapTest, ReplicateSeedsDependOnlyOnMasterSeedAndIndex) {
  const Data d = MakeData(40, 7);
  std::vector<uint64_t> seen;
  const BoundFunction record = [&](std::span<const double>,
                                   uint64_t seed) -> absl::StatusOr<double> {
    seen.push_back(seed);
    return 0.0;
  };
  BootstrapOptions options;
  options.k = 5;
  options.seed = 123;
  ASSERT_TRUE(
      BootstrapBound(d.x, d.y, d.x, ConstantFitter(0.5), record, options)
          .ok());
  ASSERT_EQ(seen.size(), 6u);
  EXPECT_EQ(seen[0], 123u);
  for (int k = 0; k < 5; ++k) {
    EXPECT_EQ(seen[k + 1], DeriveSeed(DeriveSeed(123, k), "audit"));
  }
}

TEST(BootstrapTest, DeterministicUnderFixedSeed) {
  const Data d = MakeData(100, 8);
  BootstrapOptions options;
  options.k = 60;
  options.seed = 9;
  const PropensityFitter fit = LogisticFitter(FitOptions{});
  const BootstrapSummary a = *BootstrapBound(d.x, d.y, d.x, fit, MeanPi, options);
  const BootstrapSummary b = *BootstrapBound(d.x, d.y, d.x, fit, MeanPi, options);
  EXPECT_EQ(a.raw, b.raw);
  EXPECT_EQ(a.result, b.result);
  options.seed = 10;
  const BootstrapSummary c = *BootstrapBound(d.x, d.y, d.x, fit, MeanPi, options);
  EXPECT_NE(a.raw, c.raw);
  const BootstrapSummary e =
      *BootstrapBoundCrossfit(d.x, d.y, fit, MeanPi, options);
  const BootstrapSummary f =
      *BootstrapBoundCrossfit(d.x, d.y, fit, MeanPi, options);
  EXPECT_EQ(e.raw, f.raw);
  EXPECT_TRUE(e.crossfit);
}

TEST(BootstrapTest, SmallerPPrimeIsMoreConservative) {
  const Data d = MakeData(100, 11);
  BootstrapOptions options;
  options.k = 200;
  const PropensityFitter fit = LogisticFitter(FitOptions{});
  double prev = INFINITY;
  for (double pp : {0.2, 0.1, 0.05, 0.025, 0.01}) {
    options.p_prime = pp;
    const BootstrapSummary s =
        *BootstrapBound(d.x, d.y, d.x, fit, MeanPi, options);
    EXPECT_LE(s.result, prev);
    prev = s.result;
  }
}

TEST(BootstrapTest, ReportsBudgetSplit) {
  const Data d = MakeData(40, 12);
  BootstrapOptions options;
  options.k = 50;
  options.p = 0.03;
  options.p_prime = 0.02;
  options.direction = QuantileDirection::kUpper;
  const BootstrapSummary s =
      *BootstrapBound(d.x, d.y, d.x, ConstantFitter(0.5), MeanPi, options);
  EXPECT_DOUBLE_EQ(s.confidence, 0.95);
  EXPECT_DOUBLE_EQ(s.quantile_level, 0.98);
  EXPECT_TRUE(s.warnings.empty());
}

TEST(BootstrapTest, RejectsBadOptionsAndSingleClassData) {
  const Data d = MakeData(40, 13);
  BootstrapOptions options;
  options.k = 1;
  EXPECT_FALSE(
      BootstrapBound(d.x, d.y, d.x, ConstantFitter(0.5), MeanPi, options).ok());
  options.k = 10;
  options.p_prime = 0;
  EXPECT_FALSE(
      BootstrapBound(d.x, d.y, d.x, ConstantFitter(0.5), MeanPi, options).ok());
  options.p_prime = 0.025;
  const std::vector<int> single(40, 1);
  EXPECT_FALSE(
      BootstrapBound(d.x, single, d.x, ConstantFitter(0.5), MeanPi, options)
          .ok());
  EXPECT_FALSE(BootstrapBound(d.x, d.y, Matrix::Zero(3, 2),
                              ConstantFitter(0.5), MeanPi, options)
                   .ok());
}

}  // namespace
}  // namespace zraudit

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

#include <cmath>
#include <vector>

#include "boost/math/distributions/normal.hpp"
#include "gtest/gtest.h"

namespace zraudit {
namespace {

const boost::math::normal_distribution<double> kStd;

SynthConfig Small(double rho, uint64_t seed) {
  SynthConfig c;
  c.n = 400;
  c.d = 16;
  c.rho = rho;
  c.seed = seed;
  return c;
}

TEST(SynthTest, RowsAreUnitNormAndClassesBalanced) {
  const SynthDataset data = *Generate(Small(0.8, 1));
  EXPECT_EQ(data.members.rows(), 200);
  EXPECT_EQ(data.nonmembers.rows(), 200);
  EXPECT_EQ(data.theta.size(), 16);
  EXPECT_NEAR(data.direction.norm(), 1.0, 1e-12);
  for (const Matrix* m : {&data.members, &data.nonmembers}) {
    for (Eigen::Index i = 0; i < m->rows(); ++i) {
      EXPECT_NEAR(m->row(i).norm(), 1.0, 1e-9);
    }
  }
}

TEST(SynthTest, DeterministicPerSeed) {
  const SynthDataset a = *Generate(Small(0.8, 2));
  const SynthDataset b = *Generate(Small(0.8, 2));
  const SynthDataset c = *Generate(Small(0.8, 3));
  EXPECT_EQ(a.members, b.members);
  EXPECT_EQ(a.theta, b.theta);
  EXPECT_NE(a.members, c.members);
}

TEST(SynthTest, ValidatesConfig) {
  SynthConfig c = Small(1, 1);
  c.n = 401;
  EXPECT_FALSE(Generate(c).ok());
  c = Small(0, 1);
  EXPECT_FALSE(Generate(c).ok());
  c = Small(1.2, 1);
  EXPECT_FALSE(Generate(c).ok());
  c = Small(1, 1);
  c.d = 0;
  EXPECT_FALSE(Generate(c).ok());
  c = Small(1, 1);
  c.sigma = 0;
  EXPECT_FALSE(Generate(c).ok());
  c = Small(1, 1);
  c.sigma = 1 / 0.66;
  EXPECT_NEAR(c.mu_true(), 0.66, 1e-15);
}

TEST(SynthTest, ReleaseHasUnitSensitivity) {
  const SynthDataset data = *Generate(Small(1, 4));
  const Matrix fewer = data.members.topRows(data.members.rows() - 1);
  const Vector with = *Release(data.members, 1.5, 9);
  const Vector without = *Release(fewer, 1.5, 9);
  EXPECT_NEAR((with - without).norm(), 1.0, 1e-9);
}

TEST(SynthTest, ReleaseNoiseHasRequestedScale) {
  const Matrix zero = Matrix::Zero(1, 20000);
  const Vector theta = *Release(zero, 2.0, 5);
  EXPECT_NEAR(theta.mean(), 0.0, 0.05);
  EXPECT_NEAR(std::sqrt(theta.squaredNorm() / theta.size()), 2.0, 0.05);
}

TEST(SynthTest, Deconvolve) {
  EXPECT_DOUBLE_EQ(Deconvolve(5, 3), 4.0);
  EXPECT_EQ(Deconvolve(1, 2), 0.0);
  EXPECT_EQ(Deconvolve(0.7, 0), 0.7);
}

TEST(SynthTest, DirectionIsIsotropic) {
  Vector sum = Vector::Zero(4);
  constexpr int kDraws = 4000;
  for (int s = 0; s < kDraws; ++s) {
    SynthConfig c = Small(1, static_cast<uint64_t>(s));
    c.n = 2;
    c.d = 4;
    sum += GenerateData(c)->direction;
  }
  // Each coordinate has variance 1/4 per draw.
  for (int j = 0; j < 4; ++j) EXPECT_LT(std::fabs(sum(j) / kDraws), 0.04);
}

TEST(SynthTest, MembersLeanFurtherAlongDirection) {
  const SynthDataset data = *Generate(Small(0.5, 6));
  const double m = (data.members * data.direction).mean();
  const double n = (data.nonmembers * data.direction).mean();
  EXPECT_GT(m, n);
  const SynthDataset same = *Generate(Small(1, 6));
  const double m1 = (same.members * same.direction).mean();
  const double n1 = (same.nonmembers * same.direction).mean();
  EXPECT_NEAR(m1, n1, 0.05);
}

TEST(SynthTest, StackingAndRecords) {
  const SynthDataset data = *Generate(Small(1, 7));
  const Matrix x = StackedFeatures(data);
  const std::vector<int> y = StackedLabels(data);
  EXPECT_EQ(x.rows(), 400);
  EXPECT_EQ(y.front(), 1);
  EXPECT_EQ(y.back(), -1);
  EXPECT_EQ(x.row(200), data.nonmembers.row(0));
  const std::vector<AuditRecord> recs = ToRecords(data);
  ASSERT_EQ(recs.size(), 400u);
  EXPECT_EQ(recs[0].id, "m0");
  EXPECT_EQ(recs[200].id, "n0");
  EXPECT_EQ(recs[200].membership, -1);
  EXPECT_EQ(recs[3].features.size(), 16u);
  EXPECT_EQ(recs[3].features[5], x(3, 5));
}

TEST(SynthTest, SampleReusesDirection) {
  const SynthDataset base = *GenerateData(Small(0.8, 8));
  const SynthDataset fresh = *GenerateSample(Small(0.8, 8), base.direction, 99);
  EXPECT_EQ(fresh.direction, base.direction);
  EXPECT_NE(fresh.members, base.members);
  EXPECT_FALSE(GenerateSample(Small(0.8, 8), Vector::Ones(3), 1).ok());
}

TEST(OracleTest, EqualShiftGivesOneHalf) {
  const SynthDataset data = *Generate(Small(1, 9));
  for (double p : OraclePropensity(Small(1, 9), data.direction,
                                   StackedFeatures(data))) {
    EXPECT_NEAR(p, 0.5, 1e-12);
  }
}

// Closed-form direction densities of N(gamma u, I), up to shared
// constants, as functions of b = gamma <x, u>:
//   d = 2: exp(-gamma^2/2) (1 + b Phi(b) / phi(b))
//   d = 3: exp(-gamma^2/2 + b^2/2) ((1 + b^2) Phi(b) + b phi(b))
double LogDensity2(double gamma, double t) {
  const double b = gamma * t;
  return -0.5 * gamma * gamma +
         std::log(1 + b * boost::math::cdf(kStd, b) / boost::math::pdf(kStd, b));
}
double LogDensity3(double gamma, double t) {
  const double b = gamma * t;
  return -0.5 * gamma * gamma + 0.5 * b * b +
         std::log((1 + b * b) * boost::math::cdf(kStd, b) +
                  b * boost::math::pdf(kStd, b));
}

TEST(OracleTest, MatchesClosedFormsInLowDimension) {
  for (int d : {2, 3}) {
    SynthConfig c;
    c.d = d;
    c.gamma_base = 2.0;
    c.rho = 0.4;
    Vector u = Vector::Zero(d);
    u(0) = 1;
    Matrix x(41, d);
    x.setZero();
    for (int i = 0; i <= 40; ++i) {
      const double t = -1 + i / 20.0;
      x(i, 0) = t;
      x(i, 1) = std::sqrt(std::max(0.0, 1 - t * t));
    }
    const std::vector<double> got = OraclePropensity(c, u, x);
    for (int i = 0; i <= 40; ++i) {
      const double t = x(i, 0);
      const double log_odds = d == 2 ? LogDensity2(2.0, t) - LogDensity2(0.8, t)
                                     : LogDensity3(2.0, t) - LogDensity3(0.8, t);
      // Simpson's rule on the radial integral is good to about 1e-8.
      EXPECT_NEAR(got[i], 1 / (1 + std::exp(-log_odds)), 1e-7)
          << "d=" << d << " t=" << t;
    }
  }
}

TEST(OracleTest, IncreasingAlongDirection) {
  SynthConfig c = Small(0.6, 10);
  c.d = 64;
  Vector u = Vector::Zero(64);
  u(0) = 1;
  Matrix x = Matrix::Zero(21, 64);
  for (int i = 0; i <= 20; ++i) {
    const double t = -1 + i / 10.0;
    x(i, 0) = t;
    x(i, 1) = std::sqrt(std::max(0.0, 1 - t * t));
  }
  const std::vector<double> pi = OraclePropensity(c, u, x);
  for (int i = 1; i <= 20; ++i) EXPECT_GT(pi[i], pi[i - 1]);
}

TEST(OracleTest, CalibratedOnGeneratedData) {
  // Average oracle propensity among members exceeds that among
  // non-members, and the overall mean is close to the class prior.
  SynthConfig c = Small(0.5, 11);
  c.n = 4000;
  const SynthDataset data = *Generate(c);
  const std::vector<double> pi =
      OraclePropensity(c, data.direction, StackedFeatures(data));
  double mem = 0, non = 0;
  for (int i = 0; i < 2000; ++i) mem += pi[i] / 2000;
  for (int i = 2000; i < 4000; ++i) non += pi[i] / 2000;
  EXPECT_GT(mem, non);
  EXPECT_NEAR(0.5 * (mem + non), 0.5, 0.02);
}

}  // namespace
}  // namespace zraudit

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

#include "zraudit/normal.h"

#include <cmath>

#include "boost/math/distributions/normal.hpp"
#include "gtest/gtest.h"

namespace zraudit {
namespace {

TEST(NormalTest, CdfMatchesReference) {
  const boost::math::normal_distribution<double> ref;
  for (double x = -8.0; x <= 8.0; x += 0.03125) {
    const double expected = boost::math::cdf(ref, x);
    EXPECT_NEAR(NormalCdf(x), expected, 1e-15 + 1e-13 * expected) << x;
  }
}

TEST(NormalTest, PdfMatchesReference) {
  const boost::math::normal_distribution<double> ref;
  for (double x = -6.0; x <= 6.0; x += 0.25) {
    EXPECT_NEAR(NormalPdf(x), boost::math::pdf(ref, x), 1e-15) << x;
  }
}

TEST(NormalTest, QuantileMatchesReference) {
  const boost::math::normal_distribution<double> ref;
  for (double p : {1e-12, 1e-6, 0.001, 0.025, 0.1, 0.3, 0.5, 0.75, 0.9,
                   0.975, 0.999, 1 - 1e-9}) {
    EXPECT_NEAR(NormalQuantile(p), boost::math::quantile(ref, p), 1e-9) << p;
  }
  EXPECT_EQ(NormalQuantile(0.0), -INFINITY);
  EXPECT_EQ(NormalQuantile(1.0), INFINITY);
}

// Above 3 the rounding of Phi(x) near 1 dominates, so only the lower side
// is a meaningful round trip.
TEST(NormalTest, QuantileInvertsCdf) {
  for (double x = -7.0; x <= 3.0; x += 0.1) {
    EXPECT_NEAR(NormalQuantile(NormalCdf(x)), x, 1e-8) << x;
  }
}

TEST(NormalTest, Sigmoid) {
  EXPECT_DOUBLE_EQ(Sigmoid(0.0), 0.5);
  EXPECT_NEAR(Sigmoid(std::log(9.0)), 0.9, 1e-15);
  EXPECT_NEAR(Sigmoid(-std::log(9.0)), 0.1, 1e-15);
  EXPECT_EQ(Sigmoid(INFINITY), 1.0);
  EXPECT_EQ(Sigmoid(-INFINITY), 0.0);
  EXPECT_EQ(Sigmoid(-800.0), 0.0);
}

}  // namespace
}  // namespace zraudit

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

#include "zraudit/tails.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "zraudit/normal.h"

namespace zraudit {
namespace {

// Stirling series remainder: log(n!) - log(sqrt(2 pi n) (n/e)^n).
double StirlingError(double n) {
  constexpr double kS0 = 1.0 / 12;
  constexpr double kS1 = 1.0 / 360;
  constexpr double kS2 = 1.0 / 1260;
  constexpr double kS3 = 1.0 / 1680;
  constexpr double kS4 = 1.0 / 1188;
  // Exact values for 2n = 0, ..., 30.
  static constexpr double kTable[31] = {
      0.0,
      0.1534264097200273452913848,
      0.0810614667953272582196702,
      0.0548141210519176538961390,
      0.0413406959554092940938221,
      0.03316287351993628748511048,
      0.02767792568499833914878929,
      0.02374616365629749597132920,
      0.02079067210376509311152277,
      0.01848845053267318523077934,
      0.01664469118982119216319487,
      0.01513497322191737887351255,
      0.01387612882307074799874573,
      0.01281046524292022692424986,
      0.01189670994589177009505572,
      0.01110455975820691732662991,
      0.010411265261972096497478567,
      0.009799416126158803298389475,
      0.009255462182712732917728637,
      0.008768700134139385462952823,
      0.008330563433362871256469318,
      0.007934114564314020547248100,
      0.007573675487951840794972024,
      0.007244554301320383179543912,
      0.006942840107209529865664152,
      0.006665247032707682442354394,
      0.006408994188004207068439631,
      0.006171712263039457647532867,
      0.005951370112758847735624416,
      0.005746216513010115682023589,
      0.005554733551962801371038690,
  };
  if (n <= 15.0) {
    const double twice = n + n;
    if (twice == std::floor(twice)) return kTable[static_cast<int>(twice)];
    return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n -
           0.5 * std::log(2 * std::numbers::pi);
  }
  const double nn = n * n;
  if (n > 500) return (kS0 - kS1 / nn) / n;
  if (n > 80) return (kS0 - (kS1 - kS2 / nn) / nn) / n;
  if (n > 35) return (kS0 - (kS1 - (kS2 - kS3 / nn) / nn) / nn) / n;
  return (kS0 - (kS1 - (kS2 - (kS3 - kS4 / nn) / nn) / nn) / nn) / n;
}

// Deviance term x log(x / np) + np - x, computed without cancellation.
double Deviance(double x, double np) {
  if (std::fabs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / ((j << 1) + 1);
      if (s1 == s) return s1;
      s = s1;
    }
  }
  return x * std::log(x / np) + np - x;
}

}  // namespace

double BinomPmf(int64_t n, double q, int64_t k) {
  if (k < 0 || k > n) return 0.0;
  if (q <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (q >= 1.0) return k == n ? 1.0 : 0.0;
  const double p = 1.0 - q;
  const double dn = static_cast<double>(n);
  const double dk = static_cast<double>(k);
  if (k == 0) return std::exp(dn * std::log1p(-q));
  if (k == n) return std::exp(dn * std::log(q));
  const double lc = StirlingError(dn) - StirlingError(dk) -
                    StirlingError(dn - dk) - Deviance(dk, dn * q) -
                    Deviance(dn - dk, dn * p);
  const double lf =
      std::log(2 * std::numbers::pi) + std::log(dk) + std::log1p(-dk / dn);
  return std::exp(lc - 0.5 * lf);
}

double BinomTail(int64_t n, double q, int64_t v) {
  if (v <= 0) return 1.0;
  if (v > n) return 0.0;
  if (q <= 0.0) return 0.0;
  if (q >= 1.0) return 1.0;
  const double mean = static_cast<double>(n) * q;
  if (static_cast<double>(v) > mean) {
    // Upper tail is the small side: add from the far end inward.
    double sum = 0.0;
    for (int64_t k = n; k >= v; --k) sum += BinomPmf(n, q, k);
    return std::min(sum, 1.0);
  }
  double lower = 0.0;
  for (int64_t k = 0; k < v; ++k) lower += BinomPmf(n, q, k);
  return std::clamp(1.0 - lower, 0.0, 1.0);
}

double AlphaTerm(int64_t r, double eps, int64_t v) {
  const double q = Sigmoid(eps);
  double sum = 0.0;
  for (int64_t i = std::max<int64_t>(1, v - r); i <= v; ++i) {
    sum += BinomPmf(r, q, v - i) / static_cast<double>(i);
  }
  return sum;
}

std::vector<double> PoissonBinomialPmf(std::span<const double> probs) {
  std::vector<double> pmf(probs.size() + 1, 0.0);
  pmf[0] = 1.0;
  size_t used = 0;
  for (const double prob : probs) {
    ++used;
    for (size_t k = used; k > 0; --k) {
      pmf[k] = pmf[k] * (1.0 - prob) + pmf[k - 1] * prob;
    }
    pmf[0] *= (1.0 - prob);
  }
  return pmf;
}

double PoissonBinomialTail(std::span<const double> probs, int64_t c) {
  if (c <= 0) return 1.0;
  const int64_t n = static_cast<int64_t>(probs.size());
  if (c > n) return 0.0;
  const std::vector<double> pmf = PoissonBinomialPmf(probs);
  double sum = 0.0;
  for (int64_t k = n; k >= c; --k) sum += pmf[k];
  return std::min(sum, 1.0);
}

}  // namespace zraudit

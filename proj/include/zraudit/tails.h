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

#ifndef ZRAUDIT_TAILS_H_
#define ZRAUDIT_TAILS_H_

#include <cstdint>
#include <span>
#include <vector>

namespace zraudit {

// P(Binom(n, q) = k). Loader's saddle-point evaluation, accurate to a few
// ulps in relative terms for all n that fit in an int.
double BinomPmf(int64_t n, double q, int64_t k);

// P(Binom(n, q) >= v). Returns 1 for v <= 0 and 0 for v > n. Terms are
// accumulated from the smaller tail so the result keeps full relative
// precision.
double BinomTail(int64_t n, double q, int64_t v);

// sum_{i=1}^{v} P(Z = v - i) / i with Z ~ Binom(r, e^eps / (1 + e^eps)).
// Defined for 1 <= v; terms with v - i outside [0, r] vanish.
double AlphaTerm(int64_t r, double eps, int64_t v);

// P(sum_i xi_i >= c) for independent xi_i ~ Bernoulli(probs[i]), by exact
// dynamic-programming convolution. O(n^2) time, O(n) memory.
double PoissonBinomialTail(std::span<const double> probs, int64_t c);

// Full Poisson-binomial pmf over {0, ..., n}.
std::vector<double> PoissonBinomialPmf(std::span<const double> probs);

}  // namespace zraudit

#endif  // ZRAUDIT_TAILS_H_

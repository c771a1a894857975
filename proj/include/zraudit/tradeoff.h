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

#ifndef ZRAUDIT_TRADEOFF_H_
#define ZRAUDIT_TRADEOFF_H_

#include <string_view>

#include "absl/status/statusor.h"

namespace zraudit {

enum class CurveFamily { kEpsDelta, kGaussian, kGPrime };

std::string_view CurveFamilyName(CurveFamily family);

// A symmetric trade-off function from one of three closed-form families:
//
//   EpsDelta(eps, delta):  f(a) = max(0, 1 - e^eps a - delta,
//                                     e^-eps (1 - delta - a))
//   Gaussian(mu):          G_mu(a) = Phi(Phi^-1(1 - a) - mu)
//   GPrime(mu, delta_ds):  (1 - delta_ds) G_mu(a / (1 - delta_ds)) for
//                          a <= 1 - delta_ds, and 0 beyond; this is
//                          G_mu composed with EpsDelta(0, delta_ds).
//
// Every curve is nonincreasing, convex, and bounded above by 1 - a.
// Values are immutable once constructed.
class TradeoffCurve {
 public:
  // eps must be finite and >= 0; delta in [0, 1].
  static absl::StatusOr<TradeoffCurve> EpsDelta(double eps, double delta);
  // mu >= 0; +inf is accepted and yields the vacuous curve f = 0.
  static absl::StatusOr<TradeoffCurve> Gaussian(double mu);
  static absl::StatusOr<TradeoffCurve> GPrime(double mu, double delta_ds);

  CurveFamily family() const { return family_; }
  // Parameters. delta() is delta_ds for the GPrime family; unused
  // parameters read as 0.
  double eps() const { return eps_; }
  double delta() const { return delta_; }
  double mu() const { return mu_; }

  // f(alpha); InvalidArgument when alpha is outside [0, 1].
  absl::StatusOr<double> Eval(double alpha) const;

  // Unchecked f(alpha). alpha is clamped into [0, 1].
  double operator()(double alpha) const;

  // 1 - f(alpha), evaluated without cancellation where the family allows.
  double Complement(double alpha) const;

  // Generalized inverse of the complement: sup{a : 1 - f(a) <= t}, clamped
  // to [0, 1]. Closed form for all three families.
  double ComplementInverse(double t) const;

  // Same quantity by monotone bisection (absolute tolerance 1e-12, at most
  // 200 halvings). Kept as an independent route for cross-checking.
  double ComplementInverseBisect(double t) const;

  friend bool operator==(const TradeoffCurve&, const TradeoffCurve&) = default;

 private:
  TradeoffCurve(CurveFamily family, double eps, double delta, double mu)
      : family_(family), eps_(eps), delta_(delta), mu_(mu) {}

  CurveFamily family_;
  double eps_;
  double delta_;
  double mu_;
};

// Closed-form tensor product for the supported pairs:
//   EpsDelta (x) EpsDelta  -> EpsDelta(eps + eps', 1 - (1 - delta)(1 - delta'))
//   Gaussian (x) Gaussian  -> Gaussian(sqrt(mu^2 + mu'^2))
//   Gaussian (x) EpsDelta(0, delta), either order -> GPrime(mu, delta)
//                            (Gaussian(mu) itself when delta == 0)
// Any other pair returns Unimplemented.
absl::StatusOr<TradeoffCurve> Compose(const TradeoffCurve& a,
                                      const TradeoffCurve& b);

// Worst-case parameters of the distribution-shift mechanism implied by an
// overlap level eta.
struct ShiftSummary {
  double eps_bar_ds;  // log((1 - eta) / eta)
  double mu_bar_ds;   // Phi^-1(1 - eta) - Phi^-1(eta)
};

// Accepts eta in (0, 1/2]; eta = 1/2 is the no-shift point (0, 0).
absl::StatusOr<ShiftSummary> SummarizeShift(double eta);

}  // namespace zraudit

#endif  // ZRAUDIT_TRADEOFF_H_

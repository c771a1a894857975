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

#ifndef ZRAUDIT_AUDIT_H_
#define ZRAUDIT_AUDIT_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "zraudit/tradeoff.h"

namespace zraudit {

// One audited example.
struct AuditRecord {
  std::string id;
  int membership = 1;  // S in {-1, +1}
  std::optional<double> score;
  int guess = 0;  // T in {-1, 0, +1}
  std::optional<double> pi_hat;
  double b = 1.0;     // tampering retention probability
  bool retained = true;  // B ~ Bernoulli(b)
  std::vector<double> features;
};

enum class AuditMode {
  kOneRunEpsDelta,
  kOneRunFdp,
  kCompEpsDelta,
  kCompGdpStrict,
  kCompGdpRelaxed,
  kCondEpsDelta,
  kCondFdp,
  kPureTampered,
  kPureUntampered,
  kPropensityFalsify,
};

std::string_view AuditModeName(AuditMode mode);
absl::StatusOr<AuditMode> ParseAuditMode(std::string_view name);
// Modes whose statistic depends on pi_hat.
bool ModeNeedsPropensity(AuditMode mode);
// Modes indexed by mu rather than eps.
bool ModeIsGaussian(AuditMode mode);

struct PrivacyHypothesis {
  enum class Kind { kEpsDelta, kGdp };
  Kind kind = Kind::kGdp;
  double eps = 0.0;
  double delta = 0.0;
  double mu = 0.0;

  static PrivacyHypothesis EpsDelta(double eps, double delta) {
    return {Kind::kEpsDelta, eps, delta, 0.0};
  }
  static PrivacyHypothesis Gdp(double mu) { return {Kind::kGdp, 0.0, 0.0, mu}; }
};

enum class Decision { kReject, kNoReject };
std::string_view DecisionName(Decision decision);

struct AuditInput {
  std::vector<AuditRecord> records;
  int64_t r = 0;  // maximum number of active guesses
  double p = 0.05;
  uint64_t seed = 0;
};

struct AuditReport {
  AuditMode mode = AuditMode::kOneRunEpsDelta;
  PrivacyHypothesis hypothesis;
  Decision decision = Decision::kNoReject;
  int64_t m = 0;
  int64_t r = 0;
  int64_t active_count = 0;
  int64_t c = 0;  // (retained) correct guesses
  // Count-threshold modes: the integer threshold v (r + 1 when no
  // threshold exists). Success-count modes: r / m. P-value modes: p.
  double threshold = 0.0;
  // The quantity compared against the threshold: c, r[0] + h[0], or the
  // p-value.
  double statistic = 0.0;
  double p = 0.0;               // level used by the test itself
  double validity_level = 0.0;  // overall error guarantee of the decision
  uint64_t seed = 0;
  std::optional<uint64_t> tamper_seed;
  std::optional<double> eta;
  std::optional<double> delta_ds;
  std::optional<double> empirical_bound;
  std::vector<uint8_t> retained;  // tampering draw, one bit per record
};

// Fills b_i and draws B_i for every record. With `eps` set, b_i is the
// largest value allowed by the (eps, delta) rule,
// (1 + e^(-eps - eps_ds)) / (1 + e^-eps); without it, the f-DP rule
// e^(-eps_ds). Records with pi_hat in {0, 1} get b_i = 0. Every record
// consumes exactly one uniform draw, in order.
absl::StatusOr<std::vector<AuditRecord>> Tamper(
    std::span<const AuditRecord> records, std::optional<double> eps,
    uint64_t seed);

// Smallest v in [1, r] with
//   P(Binom(r, s) >= v) + alpha(v) m delta (1 + e^-eps) <= p,
// s = e^eps / (1 + e^eps); r + 1 when none exists.
int64_t CondEpsDeltaThreshold(int64_t r, int64_t m, double eps, double delta,
                              double p);

struct SuccessCounts {
  double r0_plus_h0 = 0.0;
  bool reject = false;
};

// Success-count recursion for an f-DP hypothesis given by its curve.
// Requires 0 <= c <= r <= m, m >= 1 and p in (0, 1).
absl::StatusOr<SuccessCounts> FdpSuccessCounts(double p,
                                               const TradeoffCurve& curve,
                                               int64_t r, int64_t c, int64_t m);

// Smallest integer v in [1, r] with
//   g(v) + 2 m delta_tot max_{1<=i<=v} (g(v - i) - g(v)) / i <= p,
// g(u) = P(Binom(r, sigmoid(eps + eps_bar)) >= u), g(u) = 1 for u <= 0,
// delta_tot = delta + delta_ds - delta delta_ds. r + 1 when none exists.
int64_t CompEpsDeltaThreshold(int64_t r, int64_t m, double eps, double delta,
                              double eps_bar_ds, double delta_ds, double p);

// Baselines that ignore propensities and tampering.
absl::StatusOr<AuditReport> AuditOneRunEpsDelta(const AuditInput& input,
                                                double eps, double delta);
absl::StatusOr<AuditReport> AuditOneRunFdp(const AuditInput& input,
                                           const TradeoffCurve& curve);

// Conditional audits on already tampered records.
absl::StatusOr<AuditReport> AuditCondEpsDelta(const AuditInput& input,
                                              double eps, double delta);
absl::StatusOr<AuditReport> AuditCondFdp(const AuditInput& input,
                                         const TradeoffCurve& curve);

// Compositional audits; require exactly r active guesses.
absl::StatusOr<AuditReport> AuditCompEpsDelta(const AuditInput& input,
                                              double eps, double delta,
                                              double eta, double delta_ds);
enum class GdpVariant { kStrict, kRelaxed };
// Strict tests GPrime(hypot(mu, mu_bar), delta_ds) at level p. Relaxed
// tests Gaussian(hypot(mu, mu_bar)) at level p - delta_ds so that the
// overall guarantee is still p; delta_ds >= p is a configuration error.
absl::StatusOr<AuditReport> AuditCompGdp(const AuditInput& input, double mu,
                                         double eta, double delta_ds,
                                         GdpVariant variant);

// Pure eps-DP on tampered records: reject iff
// P(Binom(active, sigmoid(eps)) >= c) <= p. With eps = 0 this tests the
// propensity model itself.
absl::StatusOr<AuditReport> AuditPureTampered(const AuditInput& input,
                                              double eps);
// Pure eps-DP without tampering, against the Poisson-binomial with
// per-record rates sigmoid(eps + eps_ds(pi_hat_i)).
absl::StatusOr<AuditReport> AuditPureUntampered(const AuditInput& input,
                                                double eps);

// Bisection for sup{t in [lo, hi] : rejects(t)} assuming rejection is
// monotone (every t below a rejected value is rejected). Returns lo when
// lo itself is not rejected; errors when hi is rejected.
absl::StatusOr<double> ExtractEmpirical(
    const std::function<absl::StatusOr<bool>(double)>& rejects, double lo,
    double hi, double tol = 1e-3);

struct EmpiricalOptions {
  double delta = 0.0;  // fixed delta for eps-indexed modes
  double eta = 0.5;
  double delta_ds = 0.0;
  std::optional<double> lo;  // defaults to 0
  std::optional<double> hi;  // defaults to 20 for mu, 10 for eps
  double tol = 1e-3;
};

// Runs `mode` on untampered records as a function of its privacy
// parameter and returns the report at the extracted bound, with
// empirical_bound set. Tampering is drawn once from input.seed for the
// f-DP rule and redrawn per eps, from a seed derived from (seed, eps), for
// the eps rules.
absl::StatusOr<AuditReport> EmpiricalBound(const AuditInput& input,
                                           AuditMode mode,
                                           const EmpiricalOptions& options);

// Runs one mode at a fixed hypothesis on untampered records, applying the
// mode's tampering first.
absl::StatusOr<AuditReport> RunAudit(const AuditInput& input, AuditMode mode,
                                     const PrivacyHypothesis& hypothesis,
                                     const EmpiricalOptions& options);

}  // namespace zraudit

#endif  // ZRAUDIT_AUDIT_H_

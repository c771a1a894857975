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

#include "zraudit/audit.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "zraudit/normal.h"
#include "zraudit/propensity.h"
#include "zraudit/rng.h"
#include "zraudit/tails.h"

namespace zraudit {
namespace {

constexpr std::array<std::pair<AuditMode, std::string_view>, 10> kModeNames = {{
    {AuditMode::kOneRunEpsDelta, "one_run_eps_delta"},
    {AuditMode::kOneRunFdp, "one_run_fdp"},
    {AuditMode::kCompEpsDelta, "zr_comp_eps_delta"},
    {AuditMode::kCompGdpStrict, "zr_comp_gdp_strict"},
    {AuditMode::kCompGdpRelaxed, "zr_comp_gdp_relaxed"},
    {AuditMode::kCondEpsDelta, "zr_cond_eps_delta"},
    {AuditMode::kCondFdp, "zr_cond_fdp"},
    {AuditMode::kPureTampered, "pure_dp_tampered"},
    {AuditMode::kPureUntampered, "pure_dp_untampered"},
    {AuditMode::kPropensityFalsify, "propensity_falsify"},
}};

struct Counts {
  int64_t m = 0;
  int64_t active = 0;
  int64_t correct = 0;
};

// Validates the input and counts active and correct guesses. When
// `use_retained` is set only retained records count as correct.
absl::StatusOr<Counts> CountGuesses(const AuditInput& input,
                                    bool use_retained) {
  Counts counts;
  counts.m = static_cast<int64_t>(input.records.size());
  if (counts.m == 0) return absl::InvalidArgumentError("no records");
  if (!(input.p > 0 && input.p < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("p must lie in (0, 1), got ", input.p));
  }
  if (input.r < 1 || input.r > counts.m) {
    return absl::InvalidArgumentError(
        absl::StrCat("r must lie in [1, ", counts.m, "], got ", input.r));
  }
  for (const AuditRecord& rec : input.records) {
    if (rec.membership != 1 && rec.membership != -1) {
      return absl::InvalidArgumentError(
          absl::StrCat("record ", rec.id, ": membership must be -1 or +1"));
    }
    if (rec.guess < -1 || rec.guess > 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("record ", rec.id, ": guess must be -1, 0 or +1"));
    }
    if (rec.guess == 0) continue;
    ++counts.active;
    if (rec.guess == rec.membership && (!use_retained || rec.retained)) {
      ++counts.correct;
    }
  }
  if (counts.active > input.r) {
    return absl::InvalidArgumentError(absl::StrCat(
        counts.active, " active guesses exceed r = ", input.r));
  }
  return counts;
}

absl::Status RequirePropensities(const AuditInput& input) {
  for (const AuditRecord& rec : input.records) {
    if (!rec.pi_hat.has_value()) {
      return absl::FailedPreconditionError(
          absl::StrCat("record ", rec.id, " has no pi_hat"));
    }
    if (!(*rec.pi_hat >= 0 && *rec.pi_hat <= 1)) {
      return absl::InvalidArgumentError(
          absl::StrCat("record ", rec.id, ": pi_hat outside [0, 1]"));
    }
  }
  return absl::OkStatus();
}

AuditReport BaseReport(const AuditInput& input, AuditMode mode,
                       const PrivacyHypothesis& hypothesis,
                       const Counts& counts) {
  AuditReport report;
  report.mode = mode;
  report.hypothesis = hypothesis;
  report.m = counts.m;
  report.r = input.r;
  report.active_count = counts.active;
  report.c = counts.correct;
  report.p = input.p;
  report.validity_level = input.p;
  report.seed = input.seed;
  return report;
}

void RecordDraw(const AuditInput& input, AuditReport& report) {
  report.retained.reserve(input.records.size());
  for (const AuditRecord& rec : input.records) {
    report.retained.push_back(rec.retained ? 1 : 0);
  }
}

PrivacyHypothesis HypothesisFor(const TradeoffCurve& curve) {
  if (curve.family() == CurveFamily::kEpsDelta) {
    return PrivacyHypothesis::EpsDelta(curve.eps(), curve.delta());
  }
  return PrivacyHypothesis::Gdp(curve.mu());
}

absl::Status CheckEpsDelta(double eps, double delta) {
  if (!(eps >= 0) || !std::isfinite(eps)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps must be finite and >= 0, got ", eps));
  }
  if (!(delta >= 0 && delta <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in [0, 1], got ", delta));
  }
  return absl::OkStatus();
}

absl::StatusOr<AuditReport> CountThresholdAudit(const AuditInput& input,
                                                AuditMode mode, double eps,
                                                double delta,
                                                bool use_retained) {
  if (absl::Status s = CheckEpsDelta(eps, delta); !s.ok()) return s;
  absl::StatusOr<Counts> counts = CountGuesses(input, use_retained);
  if (!counts.ok()) return counts.status();
  AuditReport report = BaseReport(
      input, mode, PrivacyHypothesis::EpsDelta(eps, delta), *counts);
  const int64_t v =
      CondEpsDeltaThreshold(input.r, counts->m, eps, delta, input.p);
  report.threshold = static_cast<double>(v);
  report.statistic = static_cast<double>(counts->correct);
  report.decision =
      counts->correct >= v ? Decision::kReject : Decision::kNoReject;
  if (use_retained) RecordDraw(input, report);
  return report;
}

absl::StatusOr<AuditReport> SuccessCountAudit(const AuditInput& input,
                                              AuditMode mode,
                                              const TradeoffCurve& curve,
                                              bool use_retained) {
  absl::StatusOr<Counts> counts = CountGuesses(input, use_retained);
  if (!counts.ok()) return counts.status();
  absl::StatusOr<SuccessCounts> sc =
      FdpSuccessCounts(input.p, curve, input.r, counts->correct, counts->m);
  if (!sc.ok()) return sc.status();
  AuditReport report = BaseReport(input, mode, HypothesisFor(curve), *counts);
  report.threshold =
      static_cast<double>(input.r) / static_cast<double>(counts->m);
  report.statistic = sc->r0_plus_h0;
  report.decision = sc->reject ? Decision::kReject : Decision::kNoReject;
  if (use_retained) RecordDraw(input, report);
  return report;
}

absl::Status CheckOverlap(double eta, double delta_ds) {
  if (!(eta > 0 && eta <= 0.5)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eta must lie in (0, 1/2], got ", eta));
  }
  if (!(delta_ds >= 0 && delta_ds <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta_ds must lie in [0, 1], got ", delta_ds));
  }
  return absl::OkStatus();
}

uint64_t EpsTamperSeed(uint64_t seed, double eps) {
  return DeriveSeed(seed, std::bit_cast<uint64_t>(eps));
}

}  // namespace

std::string_view AuditModeName(AuditMode mode) {
  for (const auto& [m, name] : kModeNames) {
    if (m == mode) return name;
  }
  return "unknown";
}

absl::StatusOr<AuditMode> ParseAuditMode(std::string_view name) {
  for (const auto& [m, n] : kModeNames) {
    if (n == name) return m;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown audit mode '", std::string(name), "'"));
}

bool ModeNeedsPropensity(AuditMode mode) {
  switch (mode) {
    case AuditMode::kOneRunEpsDelta:
    case AuditMode::kOneRunFdp:
    case AuditMode::kCompEpsDelta:
    case AuditMode::kCompGdpStrict:
    case AuditMode::kCompGdpRelaxed:
      return false;
    default:
      return true;
  }
}

bool ModeIsGaussian(AuditMode mode) {
  return mode == AuditMode::kOneRunFdp || mode == AuditMode::kCondFdp ||
         mode == AuditMode::kCompGdpStrict ||
         mode == AuditMode::kCompGdpRelaxed;
}

std::string_view DecisionName(Decision decision) {
  return decision == Decision::kReject ? "REJECT" : "NO_REJECT";
}

absl::StatusOr<std::vector<AuditRecord>> Tamper(
    std::span<const AuditRecord> records, std::optional<double> eps,
    uint64_t seed) {
  if (eps.has_value() && !(*eps >= 0 && std::isfinite(*eps))) {
    return absl::InvalidArgumentError("eps must be finite and >= 0");
  }
  std::vector<AuditRecord> out(records.begin(), records.end());
  Rng rng(seed);
  for (AuditRecord& rec : out) {
    if (!rec.pi_hat.has_value()) {
      return absl::FailedPreconditionError(
          absl::StrCat("record ", rec.id, " has no pi_hat"));
    }
    const double pi = *rec.pi_hat;
    if (!(pi >= 0 && pi <= 1)) {
      return absl::InvalidArgumentError(
          absl::StrCat("record ", rec.id, ": pi_hat outside [0, 1]"));
    }
    if (pi == 0 || pi == 1) {
      rec.b = 0;
    } else {
      const double eps_ds = LocalShift(pi);
      if (eps.has_value()) {
        rec.b = (1 + std::exp(-*eps - eps_ds)) / (1 + std::exp(-*eps));
      } else {
        // e^-eps_ds written as a ratio so that pi = 1/2 gives exactly 1.
        rec.b = std::min(pi, 1 - pi) / std::max(pi, 1 - pi);
      }
      rec.b = std::clamp(rec.b, 0.0, 1.0);
    }
    rec.retained = rng.Uniform() < rec.b;
  }
  return out;
}

int64_t CondEpsDeltaThreshold(int64_t r, int64_t m, double eps, double delta,
                              double p) {
  const double q = Sigmoid(eps);
  const double inflation =
      static_cast<double>(m) * delta * (1 + std::exp(-eps));
  for (int64_t v = 1; v <= r; ++v) {
    const double tail = BinomTail(r, q, v);
    if (tail > p) continue;
    const double total =
        inflation > 0 ? tail + AlphaTerm(r, eps, v) * inflation : tail;
    if (total <= p) return v;
  }
  return r + 1;
}

absl::StatusOr<SuccessCounts> FdpSuccessCounts(double p,
                                               const TradeoffCurve& curve,
                                               int64_t r, int64_t c,
                                               int64_t m) {
  if (m < 1 || r < 0 || c < 0 || c > r || r > m) {
    return absl::InvalidArgumentError(absl::StrCat(
        "need 0 <= c <= r <= m and m >= 1, got c=", c, " r=", r, " m=", m));
  }
  if (!(p >= 0 && p <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("p must lie in [0, 1], got ", p));
  }
  const double md = static_cast<double>(m);
  const double rd = static_cast<double>(r);
  double rk = p * static_cast<double>(c) / md;
  double hk = p * static_cast<double>(r - c) / md;
  for (int64_t k = c - 1; k >= 0; --k) {
    const double h_next = hk;
    hk = curve.ComplementInverse(rk);
    rk = rk + static_cast<double>(k) * (hk - h_next) / (rd - static_cast<double>(k));
  }
  SuccessCounts out;
  out.r0_plus_h0 = rk + hk;
  out.reject = out.r0_plus_h0 >= rd / md;
  return out;
}

int64_t CompEpsDeltaThreshold(int64_t r, int64_t m, double eps, double delta,
                              double eps_bar_ds, double delta_ds, double p) {
  const double q = Sigmoid(eps + eps_bar_ds);
  // g[u] for u in [0, r + 1]; g(u) = 1 below 0.
  std::vector<double> g(static_cast<size_t>(r) + 2);
  for (int64_t u = 0; u <= r + 1; ++u) g[u] = BinomTail(r, q, u);
  const double delta_tot = delta + delta_ds - delta * delta_ds;
  const double scale = 2.0 * static_cast<double>(m) * delta_tot;
  for (int64_t v = 1; v <= r; ++v) {
    if (g[v] > p) continue;
    if (scale == 0) return v;
    double worst = 0;
    for (int64_t i = 1; i <= v; ++i) {
      worst = std::max(worst, (g[v - i] - g[v]) / static_cast<double>(i));
    }
    if (g[v] + scale * worst <= p) return v;
  }
  return r + 1;
}

absl::StatusOr<AuditReport> AuditOneRunEpsDelta(const AuditInput& input,
                                                double eps, double delta) {
  return CountThresholdAudit(input, AuditMode::kOneRunEpsDelta, eps, delta,
                             /*use_retained=*/false);
}

absl::StatusOr<AuditReport> AuditOneRunFdp(const AuditInput& input,
                                           const TradeoffCurve& curve) {
  return SuccessCountAudit(input, AuditMode::kOneRunFdp, curve,
                           /*use_retained=*/false);
}

absl::StatusOr<AuditReport> AuditCondEpsDelta(const AuditInput& input,
                                              double eps, double delta) {
  if (absl::Status s = RequirePropensities(input); !s.ok()) return s;
  return CountThresholdAudit(input, AuditMode::kCondEpsDelta, eps, delta,
                             /*use_retained=*/true);
}

absl::StatusOr<AuditReport> AuditCondFdp(const AuditInput& input,
                                         const TradeoffCurve& curve) {
  if (absl::Status s = RequirePropensities(input); !s.ok()) return s;
  return SuccessCountAudit(input, AuditMode::kCondFdp, curve,
                           /*use_retained=*/true);
}

absl::StatusOr<AuditReport> AuditCompEpsDelta(const AuditInput& input,
                                              double eps, double delta,
                                              double eta, double delta_ds) {
  if (absl::Status s = CheckEpsDelta(eps, delta); !s.ok()) return s;
  if (absl::Status s = CheckOverlap(eta, delta_ds); !s.ok()) return s;
  absl::StatusOr<Counts> counts = CountGuesses(input, false);
  if (!counts.ok()) return counts.status();
  if (counts->active != input.r) {
    return absl::FailedPreconditionError(absl::StrCat(
        "compositional audits need exactly r = ", input.r,
        " active guesses, got ", counts->active));
  }
  absl::StatusOr<ShiftSummary> shift = SummarizeShift(eta);
  if (!shift.ok()) return shift.status();
  AuditReport report =
      BaseReport(input, AuditMode::kCompEpsDelta,
                 PrivacyHypothesis::EpsDelta(eps, delta), *counts);
  const int64_t v = CompEpsDeltaThreshold(input.r, counts->m, eps, delta,
                                          shift->eps_bar_ds, delta_ds, input.p);
  report.threshold = static_cast<double>(v);
  report.statistic = static_cast<double>(counts->correct);
  report.decision =
      counts->correct >= v ? Decision::kReject : Decision::kNoReject;
  report.eta = eta;
  report.delta_ds = delta_ds;
  return report;
}

absl::StatusOr<AuditReport> AuditCompGdp(const AuditInput& input, double mu,
                                         double eta, double delta_ds,
                                         GdpVariant variant) {
  if (absl::Status s = CheckOverlap(eta, delta_ds); !s.ok()) return s;
  if (!(mu >= 0)) return absl::InvalidArgumentError("mu must be >= 0");
  absl::StatusOr<Counts> counts = CountGuesses(input, false);
  if (!counts.ok()) return counts.status();
  if (counts->active != input.r) {
    return absl::FailedPreconditionError(absl::StrCat(
        "compositional audits need exactly r = ", input.r,
        " active guesses, got ", counts->active));
  }
  absl::StatusOr<ShiftSummary> shift = SummarizeShift(eta);
  if (!shift.ok()) return shift.status();
  const double composed_mu = std::hypot(mu, shift->mu_bar_ds);

  double level = input.p;
  absl::StatusOr<TradeoffCurve> curve;
  AuditMode mode;
  if (variant == GdpVariant::kStrict) {
    mode = AuditMode::kCompGdpStrict;
    curve = TradeoffCurve::GPrime(composed_mu, delta_ds);
  } else {
    mode = AuditMode::kCompGdpRelaxed;
    if (delta_ds >= input.p) {
      return absl::InvalidArgumentError(absl::StrCat(
          "delta_ds = ", delta_ds, " leaves no budget out of p = ", input.p));
    }
    level = input.p - delta_ds;
    curve = TradeoffCurve::Gaussian(composed_mu);
  }
  if (!curve.ok()) return curve.status();
  absl::StatusOr<SuccessCounts> sc =
      FdpSuccessCounts(level, *curve, input.r, counts->correct, counts->m);
  if (!sc.ok()) return sc.status();
  AuditReport report =
      BaseReport(input, mode, PrivacyHypothesis::Gdp(mu), *counts);
  report.p = level;
  report.validity_level = input.p;
  report.threshold =
      static_cast<double>(input.r) / static_cast<double>(counts->m);
  report.statistic = sc->r0_plus_h0;
  report.decision = sc->reject ? Decision::kReject : Decision::kNoReject;
  report.eta = eta;
  report.delta_ds = delta_ds;
  return report;
}

absl::StatusOr<AuditReport> AuditPureTampered(const AuditInput& input,
                                              double eps) {
  if (absl::Status s = CheckEpsDelta(eps, 0); !s.ok()) return s;
  if (absl::Status s = RequirePropensities(input); !s.ok()) return s;
  absl::StatusOr<Counts> counts = CountGuesses(input, true);
  if (!counts.ok()) return counts.status();
  const AuditMode mode =
      eps == 0 ? AuditMode::kPropensityFalsify : AuditMode::kPureTampered;
  AuditReport report = BaseReport(
      input, mode, PrivacyHypothesis::EpsDelta(eps, 0), *counts);
  const double p_value = BinomTail(counts->active, Sigmoid(eps), counts->correct);
  report.threshold = input.p;
  report.statistic = p_value;
  report.decision = p_value <= input.p ? Decision::kReject : Decision::kNoReject;
  RecordDraw(input, report);
  return report;
}

absl::StatusOr<AuditReport> AuditPureUntampered(const AuditInput& input,
                                                double eps) {
  if (absl::Status s = CheckEpsDelta(eps, 0); !s.ok()) return s;
  if (absl::Status s = RequirePropensities(input); !s.ok()) return s;
  absl::StatusOr<Counts> counts = CountGuesses(input, false);
  if (!counts.ok()) return counts.status();
  std::vector<double> rates;
  rates.reserve(static_cast<size_t>(counts->active));
  for (const AuditRecord& rec : input.records) {
    if (rec.guess == 0) continue;
    const double eps_ds = LocalShift(*rec.pi_hat);
    rates.push_back(std::isinf(eps_ds) ? 1.0 : Sigmoid(eps + eps_ds));
  }
  AuditReport report =
      BaseReport(input, AuditMode::kPureUntampered,
                 PrivacyHypothesis::EpsDelta(eps, 0), *counts);
  const double p_value = PoissonBinomialTail(rates, counts->correct);
  report.threshold = input.p;
  report.statistic = p_value;
  report.decision = p_value <= input.p ? Decision::kReject : Decision::kNoReject;
  return report;
}

absl::StatusOr<double> ExtractEmpirical(
    const std::function<absl::StatusOr<bool>(double)>& rejects, double lo,
    double hi, double tol) {
  if (!(lo <= hi) || !(tol > 0)) {
    return absl::InvalidArgumentError("need lo <= hi and tol > 0");
  }
  absl::StatusOr<bool> at_lo = rejects(lo);
  if (!at_lo.ok()) return at_lo.status();
  if (!*at_lo) return lo;
  absl::StatusOr<bool> at_hi = rejects(hi);
  if (!at_hi.ok()) return at_hi.status();
  if (*at_hi) {
    return absl::OutOfRangeError(absl::StrCat(
        "audit still rejects at the upper bracket ", hi));
  }
  while (hi - lo > tol) {
    const double mid = lo + (hi - lo) / 2;
    absl::StatusOr<bool> at_mid = rejects(mid);
    if (!at_mid.ok()) return at_mid.status();
    (*at_mid ? lo : hi) = mid;
  }
  return lo;
}

absl::StatusOr<AuditReport> RunAudit(const AuditInput& input, AuditMode mode,
                                     const PrivacyHypothesis& hypothesis,
                                     const EmpiricalOptions& options) {
  const double eps = hypothesis.eps;
  const double delta = hypothesis.delta;
  const double mu = hypothesis.mu;
  const bool want_gaussian = ModeIsGaussian(mode);
  if (want_gaussian != (hypothesis.kind == PrivacyHypothesis::Kind::kGdp)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "mode ", std::string(AuditModeName(mode)), " does not test this hypothesis kind"));
  }
  auto with_tampering = [&](std::optional<double> rule_eps)
      -> absl::StatusOr<std::pair<AuditInput, uint64_t>> {
    const uint64_t seed =
        rule_eps.has_value() ? EpsTamperSeed(input.seed, *rule_eps) : input.seed;
    absl::StatusOr<std::vector<AuditRecord>> tampered =
        Tamper(input.records, rule_eps, seed);
    if (!tampered.ok()) return tampered.status();
    AuditInput out{*std::move(tampered), input.r, input.p, input.seed};
    return std::make_pair(std::move(out), seed);
  };
  auto tampered_report =
      [&](std::optional<double> rule_eps,
          const std::function<absl::StatusOr<AuditReport>(const AuditInput&)>&
              run) -> absl::StatusOr<AuditReport> {
    auto prepared = with_tampering(rule_eps);
    if (!prepared.ok()) return prepared.status();
    absl::StatusOr<AuditReport> report = run(prepared->first);
    if (report.ok()) report->tamper_seed = prepared->second;
    return report;
  };

  switch (mode) {
    case AuditMode::kOneRunEpsDelta:
      return AuditOneRunEpsDelta(input, eps, delta);
    case AuditMode::kOneRunFdp: {
      absl::StatusOr<TradeoffCurve> curve = TradeoffCurve::Gaussian(mu);
      if (!curve.ok()) return curve.status();
      return AuditOneRunFdp(input, *curve);
    }
    case AuditMode::kCompEpsDelta:
      return AuditCompEpsDelta(input, eps, delta, options.eta,
                               options.delta_ds);
    case AuditMode::kCompGdpStrict:
      return AuditCompGdp(input, mu, options.eta, options.delta_ds,
                          GdpVariant::kStrict);
    case AuditMode::kCompGdpRelaxed:
      return AuditCompGdp(input, mu, options.eta, options.delta_ds,
                          GdpVariant::kRelaxed);
    case AuditMode::kCondEpsDelta:
      return tampered_report(eps, [&](const AuditInput& in) {
        return AuditCondEpsDelta(in, eps, delta);
      });
    case AuditMode::kCondFdp: {
      absl::StatusOr<TradeoffCurve> curve = TradeoffCurve::Gaussian(mu);
      if (!curve.ok()) return curve.status();
      return tampered_report(std::nullopt, [&](const AuditInput& in) {
        return AuditCondFdp(in, *curve);
      });
    }
    case AuditMode::kPureTampered:
    case AuditMode::kPropensityFalsify: {
      const double e = mode == AuditMode::kPropensityFalsify ? 0.0 : eps;
      return tampered_report(e, [&](const AuditInput& in) {
        return AuditPureTampered(in, e);
      });
    }
    case AuditMode::kPureUntampered:
      return AuditPureUntampered(input, eps);
  }
  return absl::InternalError("unhandled audit mode");
}

absl::StatusOr<AuditReport> EmpiricalBound(const AuditInput& input,
                                           AuditMode mode,
                                           const EmpiricalOptions& options) {
  if (mode == AuditMode::kPropensityFalsify) {
    return absl::InvalidArgumentError(
        "propensity_falsify tests a fixed hypothesis and has no bound");
  }
  const bool gaussian = ModeIsGaussian(mode);
  auto hypothesis_at = [&](double t) {
    return gaussian ? PrivacyHypothesis::Gdp(t)
                    : PrivacyHypothesis::EpsDelta(t, options.delta);
  };

  // The f-DP tampering rule does not depend on mu, so the draw is made
  // once and reused across the search.
  AuditInput search_input = input;
  std::optional<uint64_t> fixed_tamper_seed;
  AuditMode search_mode = mode;
  if (mode == AuditMode::kCondFdp) {
    absl::StatusOr<std::vector<AuditRecord>> tampered =
        Tamper(input.records, std::nullopt, input.seed);
    if (!tampered.ok()) return tampered.status();
    search_input.records = *std::move(tampered);
    fixed_tamper_seed = input.seed;
  }
  auto run = [&](double t) -> absl::StatusOr<AuditReport> {
    if (fixed_tamper_seed.has_value()) {
      absl::StatusOr<TradeoffCurve> curve = TradeoffCurve::Gaussian(t);
      if (!curve.ok()) return curve.status();
      absl::StatusOr<AuditReport> report = AuditCondFdp(search_input, *curve);
      if (report.ok()) report->tamper_seed = fixed_tamper_seed;
      return report;
    }
    return RunAudit(search_input, search_mode, hypothesis_at(t), options);
  };
  auto rejects = [&](double t) -> absl::StatusOr<bool> {
    absl::StatusOr<AuditReport> report = run(t);
    if (!report.ok()) return report.status();
    return report->decision == Decision::kReject;
  };
  const double lo = options.lo.value_or(0.0);
  const double hi = options.hi.value_or(gaussian ? 20.0 : 10.0);
  absl::StatusOr<double> bound = ExtractEmpirical(rejects, lo, hi, options.tol);
  if (!bound.ok()) return bound.status();
  absl::StatusOr<AuditReport> report = run(*bound);
  if (!report.ok()) return report.status();
  report->empirical_bound = *bound;
  return report;
}

}  // namespace zraudit

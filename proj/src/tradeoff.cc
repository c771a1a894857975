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

#include "zraudit/tradeoff.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "zraudit/normal.h"

namespace zraudit {
namespace {

constexpr double kInverseTolerance = 1e-12;
constexpr int kInverseMaxIterations = 200;

double Clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// G_mu(a) = Phi(-Phi^-1(a) - mu), written to avoid forming 1 - a.
double GaussianCurve(double mu, double alpha) {
  if (alpha <= 0.0) return 1.0;
  if (alpha >= 1.0) return 0.0;
  if (std::isinf(mu)) return 0.0;
  return NormalCdf(-NormalQuantile(alpha) - mu);
}

double GaussianComplement(double mu, double alpha) {
  if (alpha <= 0.0) return 0.0;
  if (alpha >= 1.0) return 1.0;
  if (std::isinf(mu)) return 1.0;
  return NormalCdf(NormalQuantile(alpha) + mu);
}

}  // namespace

std::string_view CurveFamilyName(CurveFamily family) {
  switch (family) {
    case CurveFamily::kEpsDelta:
      return "eps_delta";
    case CurveFamily::kGaussian:
      return "gdp";
    case CurveFamily::kGPrime:
      return "gprime";
  }
  return "unknown";
}

absl::StatusOr<TradeoffCurve> TradeoffCurve::EpsDelta(double eps,
                                                      double delta) {
  if (!std::isfinite(eps) || eps < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps must be finite and nonnegative, got ", eps));
  }
  if (!(delta >= 0 && delta <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in [0, 1], got ", delta));
  }
  return TradeoffCurve(CurveFamily::kEpsDelta, eps, delta, 0.0);
}

absl::StatusOr<TradeoffCurve> TradeoffCurve::Gaussian(double mu) {
  if (!(mu >= 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("mu must be nonnegative, got ", mu));
  }
  return TradeoffCurve(CurveFamily::kGaussian, 0.0, 0.0, mu);
}

absl::StatusOr<TradeoffCurve> TradeoffCurve::GPrime(double mu,
                                                    double delta_ds) {
  if (!(mu >= 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("mu must be nonnegative, got ", mu));
  }
  if (!(delta_ds >= 0 && delta_ds <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta_ds must lie in [0, 1], got ", delta_ds));
  }
  return TradeoffCurve(CurveFamily::kGPrime, 0.0, delta_ds, mu);
}

absl::StatusOr<double> TradeoffCurve::Eval(double alpha) const {
  if (!(alpha >= 0 && alpha <= 1)) {
    return absl::OutOfRangeError(
        absl::StrCat("alpha must lie in [0, 1], got ", alpha));
  }
  return (*this)(alpha);
}

double TradeoffCurve::operator()(double alpha) const {
  alpha = Clamp01(alpha);
  switch (family_) {
    case CurveFamily::kEpsDelta: {
      const double a = 1.0 - std::exp(eps_) * alpha - delta_;
      const double b = std::exp(-eps_) * (1.0 - delta_ - alpha);
      return std::max({0.0, a, b});
    }
    case CurveFamily::kGaussian:
      return GaussianCurve(mu_, alpha);
    case CurveFamily::kGPrime: {
      if (delta_ == 0.0) return GaussianCurve(mu_, alpha);
      const double keep = 1.0 - delta_;
      if (keep <= 0.0 || alpha > keep) return 0.0;
      return keep * GaussianCurve(mu_, std::min(1.0, alpha / keep));
    }
  }
  return 0.0;
}

double TradeoffCurve::Complement(double alpha) const {
  alpha = Clamp01(alpha);
  // GPrime without exclusion is G_mu; share its arithmetic exactly.
  if (family_ == CurveFamily::kGaussian ||
      (family_ == CurveFamily::kGPrime && delta_ == 0.0)) {
    return GaussianComplement(mu_, alpha);
  }
  return 1.0 - (*this)(alpha);
}

double TradeoffCurve::ComplementInverse(double t) const {
  if (t >= 1.0) return 1.0;
  const bool gaussian = family_ == CurveFamily::kGaussian ||
                        (family_ == CurveFamily::kGPrime && delta_ == 0.0);
  if (gaussian) {
    if (t <= 0.0 || std::isinf(mu_)) return 0.0;
    return Clamp01(NormalCdf(NormalQuantile(t) - mu_));
  }
  switch (family_) {
    case CurveFamily::kEpsDelta: {
      if (t < delta_) return 0.0;
      const double low_branch = (t - delta_) * std::exp(-eps_);
      const double high_branch = std::exp(eps_) * (t - 1.0) + (1.0 - delta_);
      return Clamp01(std::max(low_branch, high_branch));
    }
    case CurveFamily::kGaussian:
      break;
    case CurveFamily::kGPrime: {
      if (t < delta_) return 0.0;
      const double keep = 1.0 - delta_;
      if (std::isinf(mu_)) return 0.0;
      return Clamp01(keep * GaussianCurve(mu_, (1.0 - t) / keep));
    }
  }
  return 0.0;
}

double TradeoffCurve::ComplementInverseBisect(double t) const {
  if (Complement(1.0) <= t) return 1.0;
  if (Complement(0.0) > t) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < kInverseMaxIterations && hi - lo > kInverseTolerance;
       ++i) {
    const double mid = 0.5 * (lo + hi);
    if (Complement(mid) <= t) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

absl::StatusOr<TradeoffCurve> Compose(const TradeoffCurve& a,
                                      const TradeoffCurve& b) {
  const CurveFamily fa = a.family();
  const CurveFamily fb = b.family();
  if (fa == CurveFamily::kEpsDelta && fb == CurveFamily::kEpsDelta) {
    return TradeoffCurve::EpsDelta(
        a.eps() + b.eps(), a.delta() + b.delta() - a.delta() * b.delta());
  }
  if (fa == CurveFamily::kGaussian && fb == CurveFamily::kGaussian) {
    return TradeoffCurve::Gaussian(std::hypot(a.mu(), b.mu()));
  }
  const TradeoffCurve* gaussian = nullptr;
  const TradeoffCurve* pure_delta = nullptr;
  if (fa == CurveFamily::kGaussian && fb == CurveFamily::kEpsDelta) {
    gaussian = &a;
    pure_delta = &b;
  } else if (fb == CurveFamily::kGaussian && fa == CurveFamily::kEpsDelta) {
    gaussian = &b;
    pure_delta = &a;
  }
  if (gaussian != nullptr && pure_delta->eps() == 0.0) {
    if (pure_delta->delta() == 0.0) return *gaussian;
    return TradeoffCurve::GPrime(gaussian->mu(), pure_delta->delta());
  }
  return absl::UnimplementedError(absl::StrCat(
      "no closed-form composition for ", std::string(CurveFamilyName(fa)), " and ",
      std::string(CurveFamilyName(fb))));
}

absl::StatusOr<ShiftSummary> SummarizeShift(double eta) {
  if (!(eta > 0 && eta <= 0.5)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eta must lie in (0, 1/2], got ", eta));
  }
  if (eta == 0.5) return ShiftSummary{0.0, 0.0};
  const double eps_bar = std::log1p(-eta) - std::log(eta);
  const double mu_bar = NormalQuantile(1.0 - eta) - NormalQuantile(eta);
  return ShiftSummary{eps_bar, mu_bar};
}

}  // namespace zraudit

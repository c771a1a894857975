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

#include "zraudit/mia.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace zraudit {
namespace {

// Indices sorted by descending key, ascending index among equal keys.
std::vector<size_t> RankByKey(const std::vector<double>& key,
                              std::vector<size_t> candidates) {
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](size_t a, size_t b) { return key[a] > key[b]; });
  return candidates;
}

}  // namespace

absl::StatusOr<std::vector<double>> ScoreInnerProduct(const Vector& theta,
                                                      const Matrix& features) {
  if (features.cols() != theta.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("theta has dimension ", theta.size(), " but features have ",
                     features.cols(), " columns"));
  }
  const Vector s = features * theta;
  return std::vector<double>(s.data(), s.data() + s.size());
}

double Median(std::span<const double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> v(values.begin(), values.end());
  const size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return lower + (upper - lower) / 2;
}

double DefaultThreshold(std::span<const double> scores) {
  return Median(scores);
}

absl::StatusOr<GuessVector> MakeGuesses(std::span<const double> scores,
                                        double threshold, int64_t r,
                                        GuessMode mode,
                                        std::span<const double> b,
                                        bool balanced) {
  const auto m = static_cast<int64_t>(scores.size());
  if (r < 0 || r > m) {
    return absl::InvalidArgumentError(
        absl::StrCat("r must lie in [0, ", m, "], got ", r));
  }
  if (mode == GuessMode::kPropensityAware &&
      static_cast<int64_t>(b.size()) != m) {
    return absl::InvalidArgumentError(
        "propensity-aware guessing needs one tampering weight per record");
  }
  for (const double w : b) {
    if (!(w >= 0 && w <= 1)) {
      return absl::InvalidArgumentError("tampering weights must lie in [0, 1]");
    }
  }
  for (const double s : scores) {
    if (!std::isfinite(s)) {
      return absl::InvalidArgumentError("scores must be finite");
    }
  }

  GuessVector out;
  out.guesses.assign(scores.size(), 0);
  out.selection_key.resize(scores.size());
  if (m == 0) return out;

  const double center = Median(scores);
  std::vector<double> deviation(scores.size());
  for (size_t i = 0; i < scores.size(); ++i) {
    deviation[i] = std::fabs(scores[i] - center);
  }
  double scale = Median(deviation);
  if (!(scale > 0)) {
    scale = std::accumulate(deviation.begin(), deviation.end(), 0.0) /
            static_cast<double>(m);
  }
  if (!(scale > 0)) scale = 1.0;

  std::vector<size_t> positive;
  std::vector<size_t> negative;
  for (size_t i = 0; i < scores.size(); ++i) {
    double key = std::fabs(scores[i] - threshold) / scale;
    if (mode == GuessMode::kPropensityAware) key *= b[i];
    out.selection_key[i] = key;
    (scores[i] > threshold ? positive : negative).push_back(i);
  }

  std::vector<size_t> chosen;
  if (!balanced) {
    std::vector<size_t> all(scores.size());
    std::iota(all.begin(), all.end(), size_t{0});
    const std::vector<size_t> ranked = RankByKey(out.selection_key, all);
    chosen.assign(ranked.begin(), ranked.begin() + r);
  } else {
    const std::vector<size_t> pos = RankByKey(out.selection_key, positive);
    const std::vector<size_t> neg = RankByKey(out.selection_key, negative);
    const auto half = static_cast<size_t>((r + 1) / 2);
    size_t take_pos = std::min(half, pos.size());
    size_t take_neg = std::min(static_cast<size_t>(r) - take_pos, neg.size());
    take_pos = static_cast<size_t>(r) - take_neg;
    chosen.assign(pos.begin(), pos.begin() + take_pos);
    chosen.insert(chosen.end(), neg.begin(), neg.begin() + take_neg);
  }
  for (const size_t i : chosen) {
    out.guesses[i] = scores[i] > threshold ? 1 : -1;
  }
  out.active_count = static_cast<int64_t>(chosen.size());
  return out;
}

}  // namespace zraudit

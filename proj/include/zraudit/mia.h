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

#ifndef ZRAUDIT_MIA_H_
#define ZRAUDIT_MIA_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "zraudit/propensity.h"

namespace zraudit {

enum class GuessMode { kPlain, kPropensityAware };

struct GuessVector {
  std::vector<int> guesses;  // -1, 0 (abstain) or +1 per record
  int64_t active_count = 0;
  // Ranking statistic used for abstention; larger keys are kept first.
  std::vector<double> selection_key;
};

// Per-record <x_i, theta>.
absl::StatusOr<std::vector<double>> ScoreInnerProduct(const Vector& theta,
                                                      const Matrix& features);

// Median; the mean of the two middle values for even lengths. NaN when
// empty.
double Median(std::span<const double> values);

// Median score, so that roughly half of the records are guessed members.
double DefaultThreshold(std::span<const double> scores);

// Thresholds scores into +-1 guesses (score > threshold guesses +1, ties
// guess -1) and keeps the r records with the largest selection key, ties
// going to the smaller index. The key is |score - threshold| divided by
// the median absolute deviation of the scores, times b_i in the
// propensity-aware mode. With `balanced`, ceil(r/2) guesses go to each
// sign where available and the remainder is filled from the other sign.
absl::StatusOr<GuessVector> MakeGuesses(std::span<const double> scores,
                                        double threshold, int64_t r,
                                        GuessMode mode,
                                        std::span<const double> b = {},
                                        bool balanced = false);

}  // namespace zraudit

#endif  // ZRAUDIT_MIA_H_

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

#ifndef ZRAUDIT_NORMAL_H_
#define ZRAUDIT_NORMAL_H_

namespace zraudit {

// Standard normal density.
double NormalPdf(double x);

// Standard normal CDF, computed through erfc so that both tails keep full
// relative precision.
double NormalCdf(double x);

// Inverse of NormalCdf. Wichura's AS241 rational approximation followed by
// one Newton step. Returns -inf at 0 and +inf at 1; NaN outside [0, 1].
double NormalQuantile(double p);

// Logistic function 1 / (1 + exp(-x)), stable for large |x|.
double Sigmoid(double x);

}  // namespace zraudit

#endif  // ZRAUDIT_NORMAL_H_

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

#ifndef ZRAUDIT_SYNTH_H_
#define ZRAUDIT_SYNTH_H_

#include <cstdint>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "zraudit/audit.h"
#include "zraudit/propensity.h"

namespace zraudit {

// Members and non-members are projections onto the unit sphere of
// N(gamma * u, I) draws, with gamma = gamma_base for members and
// rho * gamma_base for non-members, around a random unit direction u.
// The release is the sum of member rows plus N(0, sigma^2 I) noise, which
// is (1 / sigma)-GDP since every row has norm 1.
struct SynthConfig {
  int64_t n = 4000;  // total records, split evenly
  int d = 64;
  double gamma_base = 2.0;
  double rho = 1.0;
  double sigma = 1.0 / 0.66;
  uint64_t seed = 0;

  double mu_true() const { return 1.0 / sigma; }
};

absl::Status ValidateSynthConfig(const SynthConfig& config);

struct SynthDataset {
  Matrix members;      // n/2 x d
  Matrix nonmembers;   // n/2 x d
  Vector direction;    // unit vector
  Vector theta;        // released noisy sum
};

// Seeded; direction, members, non-members and noise come from independent
// streams derived from config.seed.
absl::StatusOr<SynthDataset> Generate(const SynthConfig& config);

// Draws members and non-members around a given direction from streams
// derived from `seed`; theta is left empty.
absl::StatusOr<SynthDataset> GenerateSample(const SynthConfig& config,
                                            const Vector& direction,
                                            uint64_t seed);

// Draws only the data (direction, members, non-members) without a release.
absl::StatusOr<SynthDataset> GenerateData(const SynthConfig& config);

// Sum of member rows plus N(0, sigma^2 I).
absl::StatusOr<Vector> Release(const Matrix& members, double sigma,
                               uint64_t seed);

// Seed of the noise stream used by Generate.
uint64_t NoiseSeed(const SynthConfig& config);

// sqrt(max(0, mu_tot^2 - mu_ds^2)).
double Deconvolve(double mu_tot, double mu_ds);

// Members first, then non-members.
Matrix StackedFeatures(const SynthDataset& data);
std::vector<int> StackedLabels(const SynthDataset& data);

// Audit records (ids m<i> and n<i>) in stacked order, with features.
std::vector<AuditRecord> ToRecords(const SynthDataset& data);

// Exact P(member | x) for unit-norm rows under the generating model with
// equal class sizes, by numerical integration over the radial coordinate.
std::vector<double> OraclePropensity(const SynthConfig& config,
                                     const Vector& direction,
                                     const Matrix& features);

}  // namespace zraudit

#endif  // ZRAUDIT_SYNTH_H_

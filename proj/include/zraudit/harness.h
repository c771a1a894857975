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

#ifndef ZRAUDIT_HARNESS_H_
#define ZRAUDIT_HARNESS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "zraudit/audit.h"
#include "zraudit/io.h"
#include "zraudit/mia.h"
#include "zraudit/propensity.h"
#include "zraudit/synth.h"

namespace zraudit {

enum class ExperimentKind { kValidity, kSweep, kCompare };
enum class PropensitySource { kConstantHalf, kCrossfit, kSeparateTrain, kOracle };

struct ModeSpec {
  AuditMode mode = AuditMode::kCondFdp;
  GuessMode adversary = GuessMode::kPlain;
};

struct ExperimentPlan {
  ExperimentKind kind = ExperimentKind::kSweep;
  int trials = 200;
  // config.seed is ignored; each trial draws from its own derived seed.
  SynthConfig config;
  std::vector<ModeSpec> modes;
  // Kept-guess counts r. Empty means a single entry r = n.
  std::vector<int64_t> abstention_grid;
  double p = 0.025;
  double p_prime = 0.025;
  uint64_t master_seed = 0;
  PropensitySource propensity = PropensitySource::kCrossfit;
  FitOptions fit;
  double delta = 0.0;     // delta of eps-indexed hypotheses
  double delta_ds = 0.0;  // overlap slack for compositional modes
  // Parameter (mu or eps) tested by validity runs.
  std::optional<double> hypothesis;
  // Bootstrap replicates per trial for sweeps; 0 disables.
  int bootstrap_k = 0;
  int threads = 1;
};

absl::Status ValidatePlan(const ExperimentPlan& plan);
// Unknown keys and wrong types are InvalidArgument.
absl::StatusOr<ExperimentPlan> PlanFromJson(const Json& json);
Json ToJson(const ExperimentPlan& plan);

struct RateEstimate {
  int64_t successes = 0;
  int64_t trials = 0;
  double rate = 0.0;
  double lo = 0.0;
  double hi = 1.0;
};

// Wilson score interval; z defaults to the two-sided 95% quantile.
RateEstimate WilsonInterval(int64_t successes, int64_t trials,
                            double z = 1.959963984540054);

struct CellResult {
  int64_t r = 0;
  std::vector<double> bounds;      // per trial; sweeps only
  std::vector<uint8_t> rejected;   // per trial; validity only
  RateEstimate rejection_rate;
};

struct ModeResult {
  ModeSpec spec;
  std::vector<CellResult> cells;  // one per grid entry
  // Per-trial maximum over the grid and the r attaining it. The maximum
  // is chosen after looking at every r and carries no multiplicity
  // adjustment.
  std::vector<double> best_bound;
  std::vector<int64_t> best_r;
  // best_bound minus the first mode's best_bound, per trial.
  std::vector<double> paired_difference;
  double median_best = 0.0;
};

struct ExperimentResult {
  ExperimentPlan plan;
  std::vector<uint64_t> trial_seeds;
  std::vector<double> eta;  // per-trial overlap estimate
  std::vector<ModeResult> modes;
};

// Fixed-hypothesis rejection rates; requires plan.hypothesis.
absl::StatusOr<ExperimentResult> RunValidity(const ExperimentPlan& plan);
// Empirical bounds for every mode and grid entry.
absl::StatusOr<ExperimentResult> RunSweep(const ExperimentPlan& plan);
// RunSweep plus paired per-trial differences against the first mode.
absl::StatusOr<ExperimentResult> CompareModes(const ExperimentPlan& plan);
// Dispatches on plan.kind.
absl::StatusOr<ExperimentResult> RunExperiment(const ExperimentPlan& plan);

Json ToJson(const ExperimentResult& result);
// trial,seed,mode,adversary,r,bound,rejected
std::string TrialsCsv(const ExperimentResult& result);

// Randomized-response check of the tampered count bound. Each trial draws
// S_i uniformly, x_i ~ N(S_i * shift / 2, 1) so that P(S = 1 | x) =
// sigmoid(shift * x), releases S_i flipped with probability
// 1 - sigmoid(eps) (exactly eps-DP per record), guesses the sign of
// eps * release + shift * x, and tampers with the eps rule under the true
// propensity.
struct DominanceConfig {
  int trials = 500;
  int64_t m = 60;
  double eps = 1.0;
  double shift = 1.5;
  uint64_t seed = 0;
};

struct DominanceResult {
  std::vector<int64_t> v;           // ceil(m/2) .. m
  std::vector<double> frequency;    // fraction of trials with c >= v
  std::vector<double> bound;        // P(Binom(m, sigmoid(eps)) >= v)
  std::vector<double> allowance;    // 3 * sqrt(bound / trials)
  bool within = true;
};

absl::StatusOr<DominanceResult> RunTamperingDominance(
    const DominanceConfig& config);

// Runs fn(i) for i in [0, n) on up to `threads` threads and returns the
// first error by index.
absl::Status ParallelFor(int64_t n, int threads,
                         const std::function<absl::Status(int64_t)>& fn);

}  // namespace zraudit

#endif  // ZRAUDIT_HARNESS_H_

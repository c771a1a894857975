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

#include "zraudit/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "absl/strings/str_cat.h"
#include "zraudit/bootstrap.h"
#include "zraudit/normal.h"
#include "zraudit/rng.h"
#include "zraudit/tails.h"

namespace zraudit {
namespace {

constexpr std::pair<PropensitySource, const char*> kSourceNames[] = {
    {PropensitySource::kConstantHalf, "constant_half"},
    {PropensitySource::kCrossfit, "crossfit"},
    {PropensitySource::kSeparateTrain, "separate_train"},
    {PropensitySource::kOracle, "oracle"},
};

constexpr std::pair<ExperimentKind, const char*> kKindNames[] = {
    {ExperimentKind::kValidity, "validity"},
    {ExperimentKind::kSweep, "sweep"},
    {ExperimentKind::kCompare, "compare"},
};

const char* AdversaryName(GuessMode mode) {
  return mode == GuessMode::kPlain ? "plain" : "propensity_aware";
}

absl::StatusOr<GuessMode> ParseAdversary(const std::string& name) {
  if (name == "plain") return GuessMode::kPlain;
  if (name == "propensity_aware") return GuessMode::kPropensityAware;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown adversary '", name, "'"));
}

template <typename Enum, size_t N>
const char* NameOf(const std::pair<Enum, const char*> (&table)[N], Enum e) {
  for (const auto& [value, name] : table) {
    if (value == e) return name;
  }
  return "unknown";
}

template <typename Enum, size_t N>
absl::StatusOr<Enum> ParseName(const std::pair<Enum, const char*> (&table)[N],
                               const std::string& name, const char* what) {
  for (const auto& [value, n] : table) {
    if (name == n) return value;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown ", what, " '", name, "'"));
}

// Retention weight of the f-DP tampering rule, used to rank guesses for
// the propensity-aware adversary.
double FdpWeight(double pi) {
  if (pi <= 0 || pi >= 1) return 0.0;
  return std::min(pi, 1 - pi) / std::max(pi, 1 - pi);
}

struct TrialData {
  std::vector<AuditRecord> base;  // membership, score, pi_hat
  std::vector<double> scores;
  std::vector<double> pi_hat;
  std::vector<double> weights;
  double threshold = 0.0;
  double eta = 0.5;
  Matrix x;
  std::vector<int> y;
  Matrix train_x;
  std::vector<int> train_y;
};

absl::StatusOr<TrialData> PrepareTrial(const ExperimentPlan& plan,
                                       uint64_t seed) {
  SynthConfig config = plan.config;
  config.seed = seed;
  absl::StatusOr<SynthDataset> data = Generate(config);
  if (!data.ok()) return data.status();

  TrialData trial;
  trial.x = StackedFeatures(*data);
  trial.y = StackedLabels(*data);
  absl::StatusOr<std::vector<double>> scores =
      ScoreInnerProduct(data->theta, trial.x);
  if (!scores.ok()) return scores.status();
  trial.scores = *std::move(scores);
  trial.threshold = DefaultThreshold(trial.scores);

  const size_t m = trial.y.size();
  switch (plan.propensity) {
    case PropensitySource::kConstantHalf:
      trial.pi_hat.assign(m, 0.5);
      break;
    case PropensitySource::kCrossfit: {
      absl::StatusOr<std::vector<double>> pi = Crossfit(
          trial.x, trial.y, plan.fit, DeriveSeed(seed, "crossfit"));
      if (!pi.ok()) return pi.status();
      trial.pi_hat = *std::move(pi);
      break;
    }
    case PropensitySource::kSeparateTrain: {
      absl::StatusOr<SynthDataset> train =
          GenerateSample(config, data->direction, DeriveSeed(seed, "train"));
      if (!train.ok()) return train.status();
      trial.train_x = StackedFeatures(*train);
      trial.train_y = StackedLabels(*train);
      FitOptions fit = plan.fit;
      fit.seed = DeriveSeed(seed, "fit");
      absl::StatusOr<PropensityModel> model =
          FitPropensity(trial.train_x, trial.train_y, fit);
      if (!model.ok()) return model.status();
      trial.pi_hat = model->Predict(trial.x);
      break;
    }
    case PropensitySource::kOracle:
      trial.pi_hat = OraclePropensity(config, data->direction, trial.x);
      break;
  }
  trial.weights.resize(m);
  for (size_t i = 0; i < m; ++i) trial.weights[i] = FdpWeight(trial.pi_hat[i]);

  absl::StatusOr<OverlapEstimate> overlap =
      EstimateOverlap(trial.pi_hat, trial.y, plan.delta_ds);
  if (!overlap.ok()) return overlap.status();
  trial.eta = overlap->eta;

  trial.base.resize(m);
  for (size_t i = 0; i < m; ++i) {
    AuditRecord& rec = trial.base[i];
    rec.id = absl::StrCat(i);
    rec.membership = trial.y[i];
    rec.score = trial.scores[i];
    rec.pi_hat = trial.pi_hat[i];
  }
  return trial;
}

absl::StatusOr<AuditInput> BuildInput(const TrialData& trial,
                                      const ModeSpec& spec, int64_t r,
                                      double p, uint64_t seed) {
  absl::StatusOr<GuessVector> guesses =
      MakeGuesses(trial.scores, trial.threshold, r, spec.adversary,
                  trial.weights);
  if (!guesses.ok()) return guesses.status();
  AuditInput input;
  input.records = trial.base;
  for (size_t i = 0; i < input.records.size(); ++i) {
    input.records[i].guess = guesses->guesses[i];
  }
  input.r = r;
  input.p = p;
  input.seed = seed;
  return input;
}

EmpiricalOptions OptionsFor(const ExperimentPlan& plan, double eta) {
  EmpiricalOptions options;
  options.delta = plan.delta;
  options.eta = eta;
  options.delta_ds = plan.delta_ds;
  return options;
}

absl::StatusOr<double> BootstrappedBound(const ExperimentPlan& plan,
                                         const TrialData& trial,
                                         const AuditInput& input,
                                         AuditMode mode, uint64_t seed) {
  BoundFunction bound = [&](std::span<const double> pi,
                            uint64_t audit_seed) -> absl::StatusOr<double> {
    AuditInput replicate = input;
    replicate.seed = audit_seed;
    for (size_t i = 0; i < pi.size(); ++i) replicate.records[i].pi_hat = pi[i];
    absl::StatusOr<OverlapEstimate> overlap =
        EstimateOverlap(pi, trial.y, plan.delta_ds);
    if (!overlap.ok()) return overlap.status();
    absl::StatusOr<AuditReport> report =
        EmpiricalBound(replicate, mode, OptionsFor(plan, overlap->eta));
    if (!report.ok()) return report.status();
    return *report->empirical_bound;
  };
  BootstrapOptions options;
  options.k = plan.bootstrap_k;
  options.p = plan.p;
  options.p_prime = plan.p_prime;
  options.seed = seed;
  const PropensityFitter fitter = LogisticFitter(plan.fit);
  absl::StatusOr<BootstrapSummary> summary =
      plan.propensity == PropensitySource::kSeparateTrain
          ? BootstrapBound(trial.train_x, trial.train_y, trial.x, fitter, bound,
                           options)
          : BootstrapBoundCrossfit(trial.x, trial.y, fitter, bound, options);
  if (!summary.ok()) return summary.status();
  return summary->result;
}

std::vector<int64_t> Grid(const ExperimentPlan& plan) {
  if (plan.abstention_grid.empty()) return {plan.config.n};
  return plan.abstention_grid;
}

absl::StatusOr<ExperimentResult> RunCore(const ExperimentPlan& plan,
                                         bool fixed_hypothesis) {
  if (absl::Status s = ValidatePlan(plan); !s.ok()) return s;
  if (fixed_hypothesis && !plan.hypothesis.has_value()) {
    return absl::InvalidArgumentError("validity runs need a hypothesis");
  }
  const std::vector<int64_t> grid = Grid(plan);
  const auto trials = static_cast<size_t>(plan.trials);

  ExperimentResult result;
  result.plan = plan;
  result.trial_seeds.resize(trials);
  result.eta.resize(trials);
  for (size_t t = 0; t < trials; ++t) {
    result.trial_seeds[t] = DeriveSeed(plan.master_seed, t);
  }
  result.modes.resize(plan.modes.size());
  for (size_t k = 0; k < plan.modes.size(); ++k) {
    ModeResult& mode = result.modes[k];
    mode.spec = plan.modes[k];
    mode.cells.resize(grid.size());
    for (size_t g = 0; g < grid.size(); ++g) {
      mode.cells[g].r = grid[g];
      if (fixed_hypothesis) {
        mode.cells[g].rejected.assign(trials, 0);
      } else {
        mode.cells[g].bounds.assign(trials, 0.0);
      }
    }
  }

  absl::Status status = ParallelFor(
      static_cast<int64_t>(trials), plan.threads,
      [&](int64_t t) -> absl::Status {
        const uint64_t seed = result.trial_seeds[t];
        absl::StatusOr<TrialData> trial = PrepareTrial(plan, seed);
        if (!trial.ok()) {
          return absl::Status(trial.status().code(),
                              absl::StrCat("trial ", t, ": ",
                                           trial.status().message()));
        }
        result.eta[t] = trial->eta;
        const uint64_t audit_seed = DeriveSeed(seed, "audit");
        for (size_t k = 0; k < plan.modes.size(); ++k) {
          const ModeSpec& spec = plan.modes[k];
          for (size_t g = 0; g < grid.size(); ++g) {
            absl::StatusOr<AuditInput> input =
                BuildInput(*trial, spec, grid[g], plan.p, audit_seed);
            if (!input.ok()) return input.status();
            const EmpiricalOptions options = OptionsFor(plan, trial->eta);
            if (fixed_hypothesis) {
              const PrivacyHypothesis h =
                  ModeIsGaussian(spec.mode)
                      ? PrivacyHypothesis::Gdp(*plan.hypothesis)
                      : PrivacyHypothesis::EpsDelta(*plan.hypothesis,
                                                    plan.delta);
              absl::StatusOr<AuditReport> report =
                  RunAudit(*input, spec.mode, h, options);
              if (!report.ok()) return report.status();
              result.modes[k].cells[g].rejected[t] =
                  report->decision == Decision::kReject;
              continue;
            }
            const bool bootstrap =
                plan.bootstrap_k > 0 &&
                spec.mode != AuditMode::kOneRunEpsDelta &&
                spec.mode != AuditMode::kOneRunFdp &&
                (plan.propensity == PropensitySource::kCrossfit ||
                 plan.propensity == PropensitySource::kSeparateTrain);
            if (bootstrap) {
              absl::StatusOr<double> b = BootstrappedBound(
                  plan, *trial, *input, spec.mode,
                  DeriveSeed(seed, absl::StrCat("bootstrap", k, "/", g)));
              if (!b.ok()) return b.status();
              result.modes[k].cells[g].bounds[t] = *b;
            } else {
              absl::StatusOr<AuditReport> report =
                  EmpiricalBound(*input, spec.mode, options);
              if (!report.ok()) return report.status();
              result.modes[k].cells[g].bounds[t] = *report->empirical_bound;
            }
          }
        }
        return absl::OkStatus();
      });
  if (!status.ok()) return status;

  for (ModeResult& mode : result.modes) {
    for (CellResult& cell : mode.cells) {
      if (fixed_hypothesis) {
        int64_t hits = 0;
        for (const uint8_t r : cell.rejected) hits += r;
        cell.rejection_rate =
            WilsonInterval(hits, static_cast<int64_t>(trials));
      }
    }
    if (fixed_hypothesis) continue;
    mode.best_bound.assign(trials, 0.0);
    mode.best_r.assign(trials, 0);
    for (size_t t = 0; t < trials; ++t) {
      double best = -1;
      for (const CellResult& cell : mode.cells) {
        if (cell.bounds[t] > best) {
          best = cell.bounds[t];
          mode.best_r[t] = cell.r;
        }
      }
      mode.best_bound[t] = best;
    }
    mode.median_best = Median(mode.best_bound);
  }
  return result;
}

Json RateJson(const RateEstimate& rate) {
  return Json{{"successes", rate.successes},
              {"trials", rate.trials},
              {"rate", rate.rate},
              {"wilson_lo", rate.lo},
              {"wilson_hi", rate.hi}};
}

}  // namespace

absl::Status ParallelFor(int64_t n, int threads,
                         const std::function<absl::Status(int64_t)>& fn) {
  std::vector<absl::Status> statuses(static_cast<size_t>(std::max<int64_t>(n, 0)));
  const int workers = static_cast<int>(
      std::clamp<int64_t>(threads, 1, std::max<int64_t>(n, 1)));
  if (workers == 1) {
    for (int64_t i = 0; i < n; ++i) {
      statuses[i] = fn(i);
      if (!statuses[i].ok()) return statuses[i];
    }
    return absl::OkStatus();
  }
  std::atomic<int64_t> next{0};
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int64_t i = next++; i < n && !failed; i = next++) {
        statuses[i] = fn(i);
        if (!statuses[i].ok()) failed = true;
      }
    });
  }
  for (std::thread& th : pool) th.join();
  for (const absl::Status& s : statuses) {
    if (!s.ok()) return s;
  }
  return absl::OkStatus();
}

RateEstimate WilsonInterval(int64_t successes, int64_t trials, double z) {
  RateEstimate out;
  out.successes = successes;
  out.trials = trials;
  if (trials <= 0) return out;
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1 + z2 / n;
  const double center = (phat + z2 / (2 * n)) / denom;
  const double half =
      z * std::sqrt(phat * (1 - phat) / n + z2 / (4 * n * n)) / denom;
  out.rate = phat;
  // The endpoints are exact at the extremes; rounding would leave ~1e-18.
  out.lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
  out.hi = successes == trials ? 1.0 : std::min(1.0, center + half);
  return out;
}

absl::Status ValidatePlan(const ExperimentPlan& plan) {
  if (plan.trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  if (absl::Status s = ValidateSynthConfig(plan.config); !s.ok()) return s;
  if (plan.modes.empty()) return absl::InvalidArgumentError("no audit modes");
  if (!(plan.p > 0 && plan.p < 1) || !(plan.p_prime >= 0) ||
      !(plan.p + plan.p_prime < 1)) {
    return absl::InvalidArgumentError("need p in (0, 1) and p + p_prime < 1");
  }
  for (const int64_t r : plan.abstention_grid) {
    if (r < 1 || r > plan.config.n) {
      return absl::InvalidArgumentError(absl::StrCat(
          "abstention grid entry ", r, " outside [1, ", plan.config.n, "]"));
    }
  }
  if (!(plan.delta >= 0 && plan.delta <= 1) ||
      !(plan.delta_ds >= 0 && plan.delta_ds <= 1)) {
    return absl::InvalidArgumentError("delta and delta_ds must lie in [0, 1]");
  }
  if (plan.bootstrap_k != 0 && plan.bootstrap_k < 2) {
    return absl::InvalidArgumentError("bootstrap_k must be 0 or >= 2");
  }
  if (plan.threads < 1) return absl::InvalidArgumentError("threads must be >= 1");
  for (const ModeSpec& spec : plan.modes) {
    if (spec.mode == AuditMode::kPropensityFalsify &&
        plan.kind != ExperimentKind::kValidity) {
      return absl::InvalidArgumentError(
          "propensity_falsify only runs in validity experiments");
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<ExperimentPlan> PlanFromJson(const Json& json) {
  if (!json.is_object()) {
    return absl::InvalidArgumentError("plan must be a JSON object");
  }
  static const std::set<std::string> kKnown = {
      "kind",      "trials",   "config",          "modes",
      "adversary", "abstention_grid", "abstention_fractions",
      "budget",    "master_seed", "propensity",   "l2_lambda",
      "reduce_to", "delta",    "delta_ds",        "hypothesis",
      "bootstrap_k", "threads"};
  for (const auto& [key, value] : json.items()) {
    if (!kKnown.contains(key)) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown plan key '", key, "'"));
    }
  }
  ExperimentPlan plan;
  try {
    if (json.contains("kind")) {
      absl::StatusOr<ExperimentKind> kind =
          ParseName(kKindNames, json["kind"].get<std::string>(), "kind");
      if (!kind.ok()) return kind.status();
      plan.kind = *kind;
    }
    plan.trials = json.value("trials", plan.trials);
    if (json.contains("config")) {
      const Json& c = json["config"];
      static const std::set<std::string> kConfigKeys = {
          "n", "d", "gamma_base", "rho", "sigma", "mu_true"};
      for (const auto& [key, value] : c.items()) {
        if (!kConfigKeys.contains(key)) {
          return absl::InvalidArgumentError(
              absl::StrCat("unknown config key '", key, "'"));
        }
      }
      plan.config.n = c.value("n", plan.config.n);
      plan.config.d = c.value("d", plan.config.d);
      plan.config.gamma_base = c.value("gamma_base", plan.config.gamma_base);
      plan.config.rho = c.value("rho", plan.config.rho);
      if (c.contains("sigma") && c.contains("mu_true")) {
        return absl::InvalidArgumentError("give sigma or mu_true, not both");
      }
      plan.config.sigma = c.value("sigma", plan.config.sigma);
      if (c.contains("mu_true")) {
        plan.config.sigma = 1.0 / c["mu_true"].get<double>();
      }
    }
    GuessMode default_adversary = GuessMode::kPlain;
    if (json.contains("adversary")) {
      absl::StatusOr<GuessMode> a =
          ParseAdversary(json["adversary"].get<std::string>());
      if (!a.ok()) return a.status();
      default_adversary = *a;
    }
    if (json.contains("modes")) {
      for (const Json& entry : json["modes"]) {
        ModeSpec spec;
        spec.adversary = default_adversary;
        std::string name;
        if (entry.is_string()) {
          name = entry.get<std::string>();
        } else {
          name = entry.at("mode").get<std::string>();
          if (entry.contains("adversary")) {
            absl::StatusOr<GuessMode> a =
                ParseAdversary(entry["adversary"].get<std::string>());
            if (!a.ok()) return a.status();
            spec.adversary = *a;
          }
        }
        absl::StatusOr<AuditMode> mode = ParseAuditMode(name);
        if (!mode.ok()) return mode.status();
        spec.mode = *mode;
        plan.modes.push_back(spec);
      }
    }
    if (json.contains("abstention_grid") &&
        json.contains("abstention_fractions")) {
      return absl::InvalidArgumentError(
          "give abstention_grid or abstention_fractions, not both");
    }
    if (json.contains("abstention_grid")) {
      plan.abstention_grid =
          json["abstention_grid"].get<std::vector<int64_t>>();
    }
    if (json.contains("abstention_fractions")) {
      for (const double f :
           json["abstention_fractions"].get<std::vector<double>>()) {
        if (!(f > 0 && f <= 1)) {
          return absl::InvalidArgumentError(
              "abstention fractions must lie in (0, 1]");
        }
        plan.abstention_grid.push_back(std::max<int64_t>(
            1, std::llround(f * static_cast<double>(plan.config.n))));
      }
    }
    if (json.contains("budget")) {
      plan.p = json["budget"].value("p", plan.p);
      plan.p_prime = json["budget"].value("p_prime", plan.p_prime);
    }
    plan.master_seed = json.value("master_seed", plan.master_seed);
    if (json.contains("propensity")) {
      absl::StatusOr<PropensitySource> source = ParseName(
          kSourceNames, json["propensity"].get<std::string>(), "propensity");
      if (!source.ok()) return source.status();
      plan.propensity = *source;
    }
    plan.fit.l2_lambda = json.value("l2_lambda", plan.fit.l2_lambda);
    plan.fit.reduce_to = json.value("reduce_to", plan.fit.reduce_to);
    plan.delta = json.value("delta", plan.delta);
    plan.delta_ds = json.value("delta_ds", plan.delta_ds);
    if (json.contains("hypothesis") && !json["hypothesis"].is_null()) {
      plan.hypothesis = json["hypothesis"].get<double>();
    }
    plan.bootstrap_k = json.value("bootstrap_k", plan.bootstrap_k);
    plan.threads = json.value("threads", plan.threads);
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("malformed plan: ", e.what()));
  }
  if (absl::Status s = ValidatePlan(plan); !s.ok()) return s;
  return plan;
}

Json ToJson(const ExperimentPlan& plan) {
  Json j;
  j["kind"] = NameOf(kKindNames, plan.kind);
  j["trials"] = plan.trials;
  Json config = ToJson(plan.config);
  config.erase("seed");
  config.erase("mu_true");  // derived from sigma
  j["config"] = config;
  Json modes = Json::array();
  for (const ModeSpec& spec : plan.modes) {
    modes.push_back({{"mode", std::string(AuditModeName(spec.mode))},
                     {"adversary", AdversaryName(spec.adversary)}});
  }
  j["modes"] = modes;
  j["abstention_grid"] = Grid(plan);
  j["budget"] = {{"p", plan.p}, {"p_prime", plan.p_prime}};
  j["master_seed"] = plan.master_seed;
  j["propensity"] = NameOf(kSourceNames, plan.propensity);
  j["l2_lambda"] = plan.fit.l2_lambda;
  j["reduce_to"] = plan.fit.reduce_to;
  j["delta"] = plan.delta;
  j["delta_ds"] = plan.delta_ds;
  j["hypothesis"] =
      plan.hypothesis.has_value() ? Json(*plan.hypothesis) : Json(nullptr);
  j["bootstrap_k"] = plan.bootstrap_k;
  j["threads"] = plan.threads;
  return j;
}

absl::StatusOr<ExperimentResult> RunValidity(const ExperimentPlan& plan) {
  return RunCore(plan, /*fixed_hypothesis=*/true);
}

absl::StatusOr<ExperimentResult> RunSweep(const ExperimentPlan& plan) {
  return RunCore(plan, /*fixed_hypothesis=*/false);
}

absl::StatusOr<ExperimentResult> CompareModes(const ExperimentPlan& plan) {
  absl::StatusOr<ExperimentResult> result = RunSweep(plan);
  if (!result.ok()) return result;
  const std::vector<double>& reference = result->modes.front().best_bound;
  for (ModeResult& mode : result->modes) {
    mode.paired_difference.resize(reference.size());
    for (size_t t = 0; t < reference.size(); ++t) {
      mode.paired_difference[t] = mode.best_bound[t] - reference[t];
    }
  }
  return result;
}

absl::StatusOr<ExperimentResult> RunExperiment(const ExperimentPlan& plan) {
  switch (plan.kind) {
    case ExperimentKind::kValidity:
      return RunValidity(plan);
    case ExperimentKind::kSweep:
      return RunSweep(plan);
    case ExperimentKind::kCompare:
      return CompareModes(plan);
  }
  return absl::InternalError("unhandled experiment kind");
}

Json ToJson(const ExperimentResult& result) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["plan"] = ToJson(result.plan);
  j["trial_seeds"] = result.trial_seeds;
  j["eta"] = result.eta;
  Json modes = Json::array();
  for (const ModeResult& mode : result.modes) {
    Json m;
    m["mode"] = std::string(AuditModeName(mode.spec.mode));
    m["adversary"] = AdversaryName(mode.spec.adversary);
    Json cells = Json::array();
    for (const CellResult& cell : mode.cells) {
      Json c;
      c["r"] = cell.r;
      if (!cell.rejected.empty()) {
        c["rejection_rate"] = RateJson(cell.rejection_rate);
      } else {
        c["bounds"] = cell.bounds;
        c["median_bound"] = Median(cell.bounds);
      }
      cells.push_back(c);
    }
    m["cells"] = cells;
    if (!mode.best_bound.empty()) {
      m["best_bound"] = mode.best_bound;
      m["best_r"] = mode.best_r;
      m["median_best"] = mode.median_best;
      m["best_is_post_selection"] = true;
    }
    if (!mode.paired_difference.empty()) {
      m["paired_difference"] = mode.paired_difference;
    }
    modes.push_back(m);
  }
  j["modes"] = modes;
  return j;
}

std::string TrialsCsv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "trial,seed,mode,adversary,r,bound,rejected\n";
  for (size_t t = 0; t < result.trial_seeds.size(); ++t) {
    for (const ModeResult& mode : result.modes) {
      for (const CellResult& cell : mode.cells) {
        out << t << ',' << result.trial_seeds[t] << ','
            << AuditModeName(mode.spec.mode) << ','
            << AdversaryName(mode.spec.adversary) << ',' << cell.r << ',';
        if (!cell.bounds.empty()) out << FormatDouble(cell.bounds[t]);
        out << ',';
        if (!cell.rejected.empty()) out << static_cast<int>(cell.rejected[t]);
        out << '\n';
      }
    }
  }
  return out.str();
}

absl::StatusOr<DominanceResult> RunTamperingDominance(
    const DominanceConfig& config) {
  if (config.trials < 1 || config.m < 1) {
    return absl::InvalidArgumentError("need trials >= 1 and m >= 1");
  }
  if (!(config.eps >= 0) || !(config.shift >= 0)) {
    return absl::InvalidArgumentError("eps and shift must be >= 0");
  }
  const int64_t m = config.m;
  const double keep = Sigmoid(config.eps);
  std::vector<int64_t> counts(static_cast<size_t>(m) + 1, 0);
  for (int t = 0; t < config.trials; ++t) {
    const uint64_t seed = DeriveSeed(config.seed, static_cast<uint64_t>(t));
    Rng rng(DeriveSeed(seed, "mechanism"));
    std::vector<AuditRecord> records(static_cast<size_t>(m));
    for (AuditRecord& rec : records) {
      rec.membership = rng.Bernoulli(0.5) ? 1 : -1;
      const double x = rec.membership * config.shift / 2 + rng.Normal();
      const int release = rng.Bernoulli(keep) ? rec.membership : -rec.membership;
      rec.pi_hat = Sigmoid(config.shift * x);
      rec.guess = config.eps * release + config.shift * x > 0 ? 1 : -1;
    }
    absl::StatusOr<std::vector<AuditRecord>> tampered =
        Tamper(records, config.eps, DeriveSeed(seed, "tamper"));
    if (!tampered.ok()) return tampered.status();
    int64_t c = 0;
    for (const AuditRecord& rec : *tampered) {
      c += rec.retained && rec.guess == rec.membership;
    }
    ++counts[c];
  }
  DominanceResult out;
  int64_t at_least = 0;
  std::vector<int64_t> tail(static_cast<size_t>(m) + 2, 0);
  for (int64_t v = m; v >= 0; --v) {
    at_least += counts[v];
    tail[v] = at_least;
  }
  const double n = config.trials;
  for (int64_t v = (m + 1) / 2; v <= m; ++v) {
    const double freq = static_cast<double>(tail[v]) / n;
    const double bound = BinomTail(m, keep, v);
    const double allowance = 3.0 * std::sqrt(bound / n);
    out.v.push_back(v);
    out.frequency.push_back(freq);
    out.bound.push_back(bound);
    out.allowance.push_back(allowance);
    if (freq > bound + allowance) out.within = false;
  }
  return out;
}

}  // namespace zraudit

// Copyright 2026 The pilqr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PILQR_HARNESS_EXPERIMENT_H_
#define PILQR_HARNESS_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pilqr/harness/config.h"
#include "pilqr/mdgps.h"
#include "pilqr/serialization.h"
#include "pilqr/tvlg_policy.h"

namespace pilqr {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalError = 3;

struct ConditionEvaluation {
  double total_cost = 0.0;      // deterministic mean rollout
  double final_distance = 0.0;  // reacher: end effector to target; pusher: block to goal
};

struct ExperimentOutcome {
  std::vector<IterationReport> reports;  // aggregated over conditions
  std::vector<TvlgPolicy> policies;      // final local policy per condition
  std::optional<GlobalPolicy> global;
  std::vector<ConditionEvaluation> local_evaluation;
  std::vector<ConditionEvaluation> global_evaluation;
};

// Mean and pooled standard deviation across conditions; equal episode
// counts per condition are assumed and `episodes` stays per condition.
IterationReport aggregate_reports(const std::vector<IterationReport>& per_condition);

// Initial local policy: zero gains and offsets, isotropic covariance.
TvlgPolicy initial_policy(const Environment& env, double variance);

ConditionEvaluation evaluate_rollout(const Environment& env, const Rollout& rollout);

// Runs the configured algorithm in memory. When `out_dir` is set, writes
// iterations.csv and policies.json (plus global_policy.json for MDGPS)
// after every iteration, then evaluation.json. A failing iteration leaves
// the files of the last completed one in place and rethrows.
ExperimentOutcome execute_experiment(const ExperimentConfig& config, std::uint64_t seed,
                                     const std::optional<std::filesystem::path>& out_dir);

json_util::Json make_manifest(const ExperimentConfig& config, std::uint64_t seed);

// CLI entry points. They print diagnostics to `err` and return an exit code.
int run_experiment(const ExperimentConfig& config, std::uint64_t seed,
                   const std::filesystem::path& out_dir, std::ostream& err);
int run_from_manifest(const std::filesystem::path& manifest,
                      const std::filesystem::path& out_dir, std::ostream& err);

struct SummaryRow {
  std::string config;
  std::string algorithm;
  int seeds = 0;
  IterationRow mean;            // across-seed means of every column
  double mean_cost_std = 0.0;   // across-seed std of mean_cost
};

// Per-iteration across-seed aggregation. Throws ConfigurationError when the
// runs disagree on the number of iterations.
std::vector<SummaryRow> summarize(const std::string& config_name, const std::string& algorithm,
                                  const std::vector<std::vector<IterationRow>>& runs);
std::string summary_csv(const std::vector<SummaryRow>& rows);

// Runs every seed of every config under out_dir/<name>/seed_<s>/ and writes
// out_dir/summary.csv. All configs must share the iteration count.
int compare(const std::vector<std::filesystem::path>& configs,
            const std::filesystem::path& out_dir, std::ostream& err);

}  // namespace pilqr

#endif  // PILQR_HARNESS_EXPERIMENT_H_

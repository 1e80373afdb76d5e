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

#ifndef PILQR_SERIALIZATION_H_
#define PILQR_SERIALIZATION_H_

#include <string>
#include <vector>

#include "pilqr/iteration.h"
#include "pilqr/json_util.h"
#include "pilqr/tvlg_policy.h"

namespace pilqr {

// {"horizon": T, "gains": [[[..]]], "offsets": [[..]], "covariances": [[[..]]]}
json_util::Json to_json(const TvlgPolicy& policy);
TvlgPolicy policy_from_json(const json_util::Json& j);

// {"condition_id", "rng_seed", "rollouts": [{"states", "actions", "noise",
// "step_costs"}]}
json_util::Json to_json(const RolloutBatch& batch);
RolloutBatch batch_from_json(const json_util::Json& j);

// Columns: t, x_0..x_{nx-1}, u_0..u_{nu-1}, cost. Doubles use %.17g.
std::string trajectory_csv(const Rollout& rollout);
Rollout rollout_from_csv(const std::string& text, Index state_dim, Index action_dim);

struct IterationRow {
  int iteration = 0;
  Index episodes_cumulative = 0;
  double mean_cost = 0.0;
  double std_cost = 0.0;
  double residual_ratio = 0.0;
  double mean_eps = 0.0;
  double mean_eta_lqr = 0.0;
  double mean_eta_pi2 = 0.0;
};

inline constexpr const char* kIterationCsvHeader =
    "iteration,episodes_cumulative,mean_cost,std_cost,residual_ratio,mean_eps,"
    "mean_eta_lqr,mean_eta_pi2";

// Rows with cumulative episode counts summed from report.episodes.
std::vector<IterationRow> iteration_rows(const std::vector<IterationReport>& reports);
std::string iteration_csv(const std::vector<IterationRow>& rows);
std::vector<IterationRow> parse_iteration_csv(const std::string& text);

std::string format_double(double v);

}  // namespace pilqr

#endif  // PILQR_SERIALIZATION_H_

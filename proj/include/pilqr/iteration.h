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

#ifndef PILQR_ITERATION_H_
#define PILQR_ITERATION_H_

#include <limits>
#include <optional>

#include <Eigen/Core>

#include "pilqr/lqr_flm.h"
#include "pilqr/pi2.h"
#include "pilqr/tvlg_policy.h"

namespace pilqr {

// Per-timestep KL step and its adaptation rule. With the residual ratio
// r_t = mean|S_tilde| / mean|S|: r_t < ratio_low multiplies eps_t by
// `factor` (capped at max), r_t > ratio_high divides it (floored at min).
struct EpsSchedule {
  double initial = 1.0;
  double min = 1e-2;
  double max = 10.0;
  double ratio_low = 0.2;
  double ratio_high = 0.5;
  double factor = 2.0;
  bool adapt = true;
};

struct LocalOptions {
  Index episodes = 20;
  double dynamics_reg = 1e-6;
  double min_eig_uu = 1e-6;
  EpsSchedule eps;
  LqrFlmOptions lqr;
  DualOptions dual;
  MlUpdateOptions ml;
  // Fixed KL bound for the path-integral stage; unset follows eps_t.
  std::optional<double> pi2_eps;
  // Hybrid only: re-solve the temperature on the residual cost-to-go
  // (true) or reuse the temperature of the full cost-to-go (false).
  bool reoptimize_eta_on_residual = true;
  // Hybrid only: a timestep whose residual spread is at most this fraction of
  // the mean |S| gets uniform path-integral weights.
  double residual_floor = 1e-6;
  // Simulated model states beyond this norm mark a sample as divergent.
  double divergence_threshold = 1e6;
};

// Per-iteration diagnostics.
struct IterationReport {
  int iteration = 0;
  Index episodes = 0;
  double mean_cost = 0.0;  // mean total cost of the sampled batch
  double std_cost = 0.0;
  double residual_ratio = 0.0;
  double mean_eps = 0.0;
  double mean_eta_lqr = 0.0;
  double mean_eta_pi2 = 0.0;
  double lqr_converged_fraction = 0.0;
  int diverged_samples = 0;
};

// State carried by a local policy across iterations.
struct LocalState {
  TvlgPolicy policy;
  Eigen::VectorXd eps;

  static LocalState initial(TvlgPolicy policy, const EpsSchedule& schedule) {
    LocalState s;
    s.eps = Eigen::VectorXd::Constant(policy.horizon(), schedule.initial);
    s.policy = std::move(policy);
    return s;
  }
};

struct LocalIterationResult {
  LocalState state;
  IterationReport report;
};

}  // namespace pilqr

#endif  // PILQR_ITERATION_H_

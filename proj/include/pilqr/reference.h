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

#ifndef PILQR_REFERENCE_H_
#define PILQR_REFERENCE_H_

// Single-threaded versions of the parallel kernels. Results are bitwise
// identical to the OpenMP versions; tests and benchmarks compare the two.

#include <cstdint>

#include <Eigen/Core>

#include "pilqr/cost_approx.h"
#include "pilqr/dynamics_fit.h"
#include "pilqr/envs/environment.h"
#include "pilqr/pi2.h"
#include "pilqr/pilqr.h"
#include "pilqr/tvlg_policy.h"

namespace pilqr::reference {

RolloutBatch sample_rollouts(const TvlgPolicy& policy, const Environment& env, Index n,
                             std::uint64_t seed, int condition_id = 0);

FittedDynamics fit_dynamics(const RolloutBatch& batch, double reg = 1e-6);

ModelCostToGo eval_shat(const RolloutBatch& batch, const FittedDynamics& dyn,
                        const QuadCostApprox& cost, const TvlgPolicy& sampling,
                        double divergence_threshold = 1e6);

Pi2Weights compute_pi2_weights(const Eigen::MatrixXd& S, const Eigen::VectorXd& eps,
                               const DualOptions& options = {});

}  // namespace pilqr::reference

#endif  // PILQR_REFERENCE_H_

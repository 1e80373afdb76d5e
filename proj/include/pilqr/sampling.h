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

#ifndef PILQR_SAMPLING_H_
#define PILQR_SAMPLING_H_

#include <cstdint>

#include "pilqr/envs/environment.h"
#include "pilqr/tvlg_policy.h"

namespace pilqr {

// Runs `n` rollouts of `policy` on `env`. Rollout i at step t draws its
// action noise (and then any process noise) from the stream
// derive_seed(seed, {i, t}), so results are bitwise identical regardless of
// thread count or scheduling. Rollouts are sampled in parallel.
//
// Throws ConfigurationError on n < 1 or dimension mismatch and
// RolloutDivergenceError when the environment returns a non-finite state.
RolloutBatch sample_rollouts(const TvlgPolicy& policy, const Environment& env,
                             Index n, std::uint64_t seed, int condition_id = 0);

// One rollout of the noise-free controller u = K x + k.
Rollout mean_rollout(const TvlgPolicy& policy, const Environment& env);

namespace internal {
Rollout sample_one_rollout(const TvlgPolicy& policy,
                           const std::vector<Eigen::MatrixXd>& chol,
                           const Environment& env, Index i, std::uint64_t seed);
void check_sampling_inputs(const TvlgPolicy& policy, const Environment& env, Index n);
}  // namespace internal

}  // namespace pilqr

#endif  // PILQR_SAMPLING_H_

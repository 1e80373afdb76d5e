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

#include "pilqr/sampling.h"

#include <string>

#include "pilqr/rng.h"

namespace pilqr {
namespace internal {

void check_sampling_inputs(const TvlgPolicy& policy, const Environment& env,
                           Index n) {
  if (n < 1) throw ConfigurationError("sample_rollouts: n must be >= 1");
  policy.validate();
  if (policy.state_dim() != env.state_dim() ||
      policy.action_dim() != env.action_dim() ||
      policy.horizon() != env.horizon()) {
    throw ConfigurationError("sample_rollouts: policy dimensions (T=" +
                             std::to_string(policy.horizon()) + ", nx=" +
                             std::to_string(policy.state_dim()) + ", nu=" +
                             std::to_string(policy.action_dim()) +
                             ") do not match environment '" + env.name() + "'");
  }
}

Rollout sample_one_rollout(const TvlgPolicy& policy,
                           const std::vector<Eigen::MatrixXd>& chol,
                           const Environment& env, Index i, std::uint64_t seed) {
  const Index T = policy.horizon();
  const Index nx = env.state_dim();
  const Index nu = env.action_dim();
  const double noise = env.process_noise();

  Rollout r;
  r.states.reserve(T);
  r.actions.reserve(T);
  r.noise.reserve(T);
  r.costs.resize(T);

  Eigen::VectorXd x = env.reset();
  for (Index t = 0; t < T; ++t) {
    NormalStream stream(derive_seed(seed, {static_cast<std::uint64_t>(i),
                                           static_cast<std::uint64_t>(t)}));
    Eigen::VectorXd xi = stream.draw(nu);
    Eigen::VectorXd u = reparametrized_action(policy, t, chol[t], x, xi);
    r.costs(t) = env.cost(x, u, t);
    r.states.push_back(x);
    r.actions.push_back(u);
    r.noise.push_back(std::move(xi));
    if (t + 1 < T) {
      x = env.step(r.states.back(), r.actions.back(), t);
      if (noise > 0.0) x += noise * stream.draw(nx);
      if (!x.allFinite()) {
        throw RolloutDivergenceError(
            "sample_rollouts: non-finite state in rollout " + std::to_string(i), t + 1);
      }
    }
  }
  if (!r.costs.allFinite()) {
    throw RolloutDivergenceError("sample_rollouts: non-finite cost in rollout " +
                                 std::to_string(i));
  }
  return r;
}

}  // namespace internal

RolloutBatch sample_rollouts(const TvlgPolicy& policy, const Environment& env,
                             Index n, std::uint64_t seed, int condition_id) {
  internal::check_sampling_inputs(policy, env, n);
  const std::vector<Eigen::MatrixXd> chol = policy.cholesky_factors();
  RolloutBatch batch;
  batch.condition_id = condition_id;
  batch.rng_seed = seed;
  batch.rollouts.resize(n);
  parallel_for(n, [&](Index i) {
    batch.rollouts[i] = internal::sample_one_rollout(policy, chol, env, i, seed);
  });
  return batch;
}

Rollout mean_rollout(const TvlgPolicy& policy, const Environment& env) {
  internal::check_sampling_inputs(policy, env, 1);
  const Index T = policy.horizon();
  Rollout r;
  r.costs.resize(T);
  Eigen::VectorXd x = env.reset();
  for (Index t = 0; t < T; ++t) {
    Eigen::VectorXd u = policy.mean(t, x);
    r.costs(t) = env.cost(x, u, t);
    r.states.push_back(x);
    r.actions.push_back(u);
    r.noise.push_back(Eigen::VectorXd::Zero(env.action_dim()));
    if (t + 1 < T) {
      x = env.step(r.states.back(), r.actions.back(), t);
      if (!x.allFinite()) {
        throw RolloutDivergenceError("mean_rollout: non-finite state", t + 1);
      }
    }
  }
  return r;
}

}  // namespace pilqr

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

#include "pilqr/reference.h"

#include <cmath>
#include <limits>

#include "pilqr/sampling.h"

namespace pilqr::reference {

RolloutBatch sample_rollouts(const TvlgPolicy& policy, const Environment& env, Index n,
                             std::uint64_t seed, int condition_id) {
  internal::check_sampling_inputs(policy, env, n);
  const std::vector<Eigen::MatrixXd> chol = policy.cholesky_factors();
  RolloutBatch batch;
  batch.condition_id = condition_id;
  batch.rng_seed = seed;
  batch.rollouts.reserve(n);
  for (Index i = 0; i < n; ++i) {
    batch.rollouts.push_back(internal::sample_one_rollout(policy, chol, env, i, seed));
  }
  return batch;
}

FittedDynamics fit_dynamics(const RolloutBatch& batch, double reg) {
  if (batch.size() < 2) throw ConfigurationError("fit_dynamics: need at least 2 rollouts");
  if (!(reg >= 0.0)) throw ConfigurationError("fit_dynamics: reg must be >= 0");
  batch.validate();
  const Index transitions = batch.horizon() > 0 ? batch.horizon() - 1 : 0;
  FittedDynamics dyn;
  dyn.state_jacobian.resize(transitions);
  dyn.control_jacobian.resize(transitions);
  dyn.offset.resize(transitions);
  dyn.noise_covariance.resize(transitions);
  for (Index t = 0; t < transitions; ++t) {
    internal::fit_transition(batch.states_at(t), batch.actions_at(t),
                             batch.states_at(t + 1), reg, t, dyn.state_jacobian[t],
                             dyn.control_jacobian[t], dyn.offset[t],
                             dyn.noise_covariance[t]);
  }
  return dyn;
}

ModelCostToGo eval_shat(const RolloutBatch& batch, const FittedDynamics& dyn,
                        const QuadCostApprox& cost, const TvlgPolicy& sampling,
                        double divergence_threshold) {
  batch.validate();
  const Index N = batch.size();
  const Index T = batch.horizon();
  if (dyn.transitions() != T - 1 || cost.horizon() != T || sampling.horizon() != T) {
    throw ConfigurationError("eval_shat: horizon mismatch");
  }
  const std::vector<Eigen::MatrixXd> chol = sampling.cholesky_factors();
  ModelCostToGo out;
  out.values.resize(N, T);
  out.diverged = Eigen::MatrixXd::Zero(N, T);
  for (Index i = 0; i < N; ++i) {
    const Rollout& r = batch.rollouts[i];
    for (Index t = 0; t < T; ++t) {
      Eigen::VectorXd x = r.states[t];
      Eigen::VectorXd u = r.actions[t];
      double total = cost.evaluate(t, x, u);
      bool diverged = false;
      for (Index j = t + 1; j < T && !diverged; ++j) {
        x = dyn.predict(j - 1, x, u);
        diverged = !x.allFinite() || x.norm() > divergence_threshold;
        if (diverged) break;
        u = reparametrized_action(sampling, j, chol[j], x, r.noise[j]);
        total += cost.evaluate(j, x, u);
      }
      if (diverged || !std::isfinite(total)) {
        out.diverged(i, t) = 1.0;
        out.values(i, t) = std::numeric_limits<double>::quiet_NaN();
      } else {
        out.values(i, t) = total;
      }
    }
  }
  return out;
}

Pi2Weights compute_pi2_weights(const Eigen::MatrixXd& S, const Eigen::VectorXd& eps,
                               const DualOptions& options) {
  const Index N = S.rows();
  const Index T = S.cols();
  if (eps.size() != T) throw ConfigurationError("compute_pi2_weights: eps size mismatch");
  Pi2Weights out;
  out.weights.resize(N, T);
  out.eta.resize(T);
  out.kl.resize(T);
  out.eps = eps;
  for (Index t = 0; t < T; ++t) {
    if (!S.col(t).array().isFinite().any()) {
      out.eta(t) = 0.0;
      out.weights.col(t).setConstant(1.0 / static_cast<double>(N));
      out.kl(t) = 0.0;
      continue;
    }
    const DualResult d = dual_eta(S.col(t), eps(t), options);
    out.eta(t) = d.eta;
    out.weights.col(t) = pi2_weights(S.col(t), d.eta);
    out.kl(t) = kl_from_uniform(out.weights.col(t));
  }
  return out;
}

}  // namespace pilqr::reference

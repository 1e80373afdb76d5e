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

#include "pilqr/local_update.h"

#include "pilqr/cost_approx.h"
#include "pilqr/dynamics_fit.h"
#include "pilqr/lqr_flm.h"
#include "pilqr/pi2.h"
#include "pilqr/report_util.h"
#include "pilqr/sampling.h"

namespace pilqr {

const char* to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kPi2: return "pi2";
    case Algorithm::kLqrFlm: return "lqr_flm";
    case Algorithm::kPilqr: return "pilqr";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "pi2") return Algorithm::kPi2;
  if (name == "lqr_flm") return Algorithm::kLqrFlm;
  if (name == "pilqr") return Algorithm::kPilqr;
  throw ConfigurationError("unknown algorithm '" + name + "'");
}

LocalIterationResult pi2_iteration(const Environment& env, const LocalState& state,
                                   const LocalOptions& options, std::uint64_t seed,
                                   const TvlgPolicy* anchor) {
  const RolloutBatch batch = sample_rollouts(state.policy, env, options.episodes, seed);
  const Index T = batch.horizon();
  const Eigen::MatrixXd S = cost_to_go(batch);
  const Eigen::VectorXd eps =
      options.pi2_eps ? Eigen::VectorXd::Constant(T, *options.pi2_eps) : state.eps;
  const Pi2Weights weights = compute_pi2_weights(S, eps, options.dual);

  std::vector<Eigen::MatrixXd> controls(T);
  for (Index t = 0; t < T; ++t) controls[t] = batch.actions_at(t);

  TvlgPolicy prior = anchor ? *anchor : state.policy;
  LocalIterationResult result;
  result.state.policy =
      weighted_ml_update(batch.all_states(), controls, weights.weights, prior, options.ml);
  result.state.eps = state.eps;

  IterationReport& rep = result.report;
  rep.episodes = batch.size();
  fill_cost_stats(batch, rep);
  rep.residual_ratio = 1.0;
  rep.mean_eps = eps.mean();
  rep.mean_eta_pi2 = weights.eta.mean();
  return result;
}

LocalIterationResult lqr_flm_iteration(const Environment& env, const LocalState& state,
                                       const LocalOptions& options, std::uint64_t seed,
                                       const TvlgPolicy* anchor) {
  const RolloutBatch batch = sample_rollouts(state.policy, env, options.episodes, seed);
  const FittedDynamics dyn = fit_dynamics(batch, options.dynamics_reg);
  const QuadCostApprox cost = expand_cost(env, batch, options.min_eig_uu);
  const BackwardPassResult lqr = backward_pass(
      dyn, cost, anchor ? *anchor : state.policy, state.eps, batch.all_states(), options.lqr);

  // Model fit diagnostic only; does not influence the update.
  const Eigen::MatrixXd S = cost_to_go(batch);
  const ModelCostToGo S_hat =
      eval_shat(batch, dyn, cost, state.policy, options.divergence_threshold);

  LocalIterationResult result;
  result.state.policy = lqr.policy;
  result.state.eps = state.eps;

  IterationReport& rep = result.report;
  rep.episodes = batch.size();
  fill_cost_stats(batch, rep);
  rep.residual_ratio = residual_ratios(S, S - S_hat.values).mean();
  rep.mean_eps = state.eps.mean();
  rep.mean_eta_lqr = lqr.mean_eta();
  rep.lqr_converged_fraction = lqr.converged_fraction();
  rep.diverged_samples = S_hat.diverged_count();
  return result;
}

LocalIterationResult local_iteration(Algorithm algorithm, const Environment& env,
                                     const LocalState& state, const LocalOptions& options,
                                     std::uint64_t seed, const TvlgPolicy* anchor) {
  switch (algorithm) {
    case Algorithm::kPi2: return pi2_iteration(env, state, options, seed, anchor);
    case Algorithm::kLqrFlm: return lqr_flm_iteration(env, state, options, seed, anchor);
    case Algorithm::kPilqr: return pilqr_iteration(env, state, options, seed, anchor);
  }
  throw ConfigurationError("local_iteration: unknown algorithm");
}

}  // namespace pilqr

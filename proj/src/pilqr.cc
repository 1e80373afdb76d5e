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

#include "pilqr/pilqr.h"

#include <cmath>
#include <algorithm>
#include <limits>
#include <utility>

#include "pilqr/pi2.h"
#include "pilqr/report_util.h"
#include "pilqr/sampling.h"

namespace pilqr {

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
  parallel_for(N, [&](Index i) {
    const Rollout& r = batch.rollouts[i];
    for (Index t = 0; t < T; ++t) {
      Eigen::VectorXd x = r.states[t];
      Eigen::VectorXd u = r.actions[t];
      double total = cost.evaluate(t, x, u);
      bool diverged = false;
      for (Index j = t + 1; j < T; ++j) {
        x = dyn.predict(j - 1, x, u);
        if (!x.allFinite() || x.norm() > divergence_threshold) {
          diverged = true;
          break;
        }
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
  });
  return out;
}

std::vector<Eigen::MatrixXd> reparametrize_controls(const RolloutBatch& batch,
                                                    const TvlgPolicy& p_hat) {
  batch.validate();
  const Index T = batch.horizon();
  if (p_hat.horizon() != T || p_hat.state_dim() != batch.state_dim() ||
      p_hat.action_dim() != batch.action_dim()) {
    throw ConfigurationError("reparametrize_controls: policy does not match batch");
  }
  const Index N = batch.size();
  const std::vector<Eigen::MatrixXd> chol = p_hat.cholesky_factors();
  std::vector<Eigen::MatrixXd> out(T, Eigen::MatrixXd(batch.action_dim(), N));
  parallel_for(T, [&](Index t) {
    for (Index i = 0; i < N; ++i) {
      const Rollout& r = batch.rollouts[i];
      out[t].col(i) = reparametrized_action(p_hat, t, chol[t], r.states[t], r.noise[t]);
    }
  });
  return out;
}

Eigen::VectorXd residual_ratios(const Eigen::MatrixXd& S, const Eigen::MatrixXd& S_tilde) {
  const Index T = S.cols();
  Eigen::VectorXd ratios(T);
  for (Index t = 0; t < T; ++t) {
    double residual = 0.0, total = 0.0;
    Index n = 0;
    for (Index i = 0; i < S.rows(); ++i) {
      if (!std::isfinite(S_tilde(i, t))) continue;
      residual += std::abs(S_tilde(i, t));
      total += std::abs(S(i, t));
      ++n;
    }
    if (n == 0) {
      ratios(t) = 1.0;
      continue;
    }
    ratios(t) = (residual / n) / std::max(total / n, std::numeric_limits<double>::min());
  }
  return ratios;
}

Eigen::VectorXd adjust_eps(const Eigen::VectorXd& eps_prev, const Eigen::MatrixXd& S,
                           const Eigen::MatrixXd& S_tilde, const EpsSchedule& schedule) {
  if (!(schedule.min > 0.0) || !(schedule.max > schedule.min) || !(schedule.factor > 0.0)) {
    throw ConfigurationError("adjust_eps: need 0 < min < max and factor > 0");
  }
  if (eps_prev.size() != S.cols() || S.cols() != S_tilde.cols() || S.rows() != S_tilde.rows()) {
    throw ConfigurationError("adjust_eps: size mismatch");
  }
  const Eigen::VectorXd ratios = residual_ratios(S, S_tilde);
  Eigen::VectorXd eps = eps_prev;
  for (Index t = 0; t < eps.size(); ++t) {
    if (ratios(t) < schedule.ratio_low) {
      eps(t) = std::min(eps(t) * schedule.factor, schedule.max);
    } else if (ratios(t) > schedule.ratio_high) {
      eps(t) = std::max(eps(t) / schedule.factor, schedule.min);
    }
  }
  return eps;
}

TvlgPolicy pilqr_update(const LocalState& state, const Eigen::VectorXd& eps,
                        const LocalOptions& options, PilqrTrace& trace,
                        const TvlgPolicy* anchor) {
  const RolloutBatch& batch = trace.batch;
  const Index T = batch.horizon();
  const std::vector<Eigen::MatrixXd> states = batch.all_states();

  const TvlgPolicy& reference = anchor ? *anchor : state.policy;
  trace.lqr = backward_pass(trace.dynamics, trace.cost, reference, eps, states, options.lqr);
  const TvlgPolicy& p_hat = trace.lqr.policy;
  trace.u_hat = reparametrize_controls(batch, p_hat);

  const Eigen::VectorXd pi2_eps =
      options.pi2_eps ? Eigen::VectorXd::Constant(T, *options.pi2_eps) : eps;
  if (options.reoptimize_eta_on_residual) {
    trace.pi2 = compute_pi2_weights(trace.S_tilde, pi2_eps, options.dual);
  } else {
    // Temperatures from the full cost-to-go, applied to the residuals.
    Pi2Weights full = compute_pi2_weights(trace.S, pi2_eps, options.dual);
    trace.pi2 = full;
    for (Index t = 0; t < T; ++t) {
      trace.pi2.weights.col(t) = pi2_weights(trace.S_tilde.col(t), full.eta(t));
      trace.pi2.kl(t) = kl_from_uniform(trace.pi2.weights.col(t));
    }
  }
  for (Index t = 0; t < T; ++t) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, scale = 0.0;
    Index finite = 0;
    for (Index i = 0; i < trace.S_tilde.rows(); ++i) {
      const double r = trace.S_tilde(i, t);
      if (!std::isfinite(r)) continue;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      scale += std::abs(trace.S(i, t));
      ++finite;
    }
    if (finite == 0 || hi - lo > options.residual_floor * scale / finite) continue;
    for (Index i = 0; i < trace.S_tilde.rows(); ++i) {
      trace.pi2.weights(i, t) = std::isfinite(trace.S_tilde(i, t)) ? 1.0 / finite : 0.0;
    }
    trace.pi2.kl(t) = kl_from_uniform(trace.pi2.weights.col(t));
  }
  return weighted_ml_update(states, trace.u_hat, trace.pi2.weights, p_hat, options.ml);
}

void pilqr_prepare(const Environment& env, const LocalState& state,
                   const LocalOptions& options, std::uint64_t seed, PilqrTrace& trace) {
  trace.batch = sample_rollouts(state.policy, env, options.episodes, seed);
  trace.dynamics = fit_dynamics(trace.batch, options.dynamics_reg);
  trace.cost = expand_cost(env, trace.batch, options.min_eig_uu);
  trace.S = cost_to_go(trace.batch);
  trace.S_hat = eval_shat(trace.batch, trace.dynamics, trace.cost, state.policy,
                          options.divergence_threshold);
  trace.S_tilde = trace.S - trace.S_hat.values;
  for (Index i = 0; i < trace.S_tilde.rows(); ++i) {
    for (Index t = 0; t < trace.S_tilde.cols(); ++t) {
      if (trace.S_hat.diverged(i, t) > 0.0) {
        trace.S_tilde(i, t) = std::numeric_limits<double>::infinity();
      }
    }
  }
  trace.ratios = residual_ratios(trace.S, trace.S_tilde);
}

LocalIterationResult pilqr_finish(const LocalState& state, const LocalOptions& options,
                                  PilqrTrace& trace, const TvlgPolicy* anchor) {
  const Eigen::VectorXd eps = options.eps.adapt
                                  ? adjust_eps(state.eps, trace.S, trace.S_tilde, options.eps)
                                  : state.eps;

  LocalIterationResult result;
  result.state.policy = pilqr_update(state, eps, options, trace, anchor);
  result.state.eps = eps;

  IterationReport& rep = result.report;
  rep.episodes = trace.batch.size();
  fill_cost_stats(trace.batch, rep);
  rep.residual_ratio = trace.ratios.mean();
  rep.mean_eps = eps.mean();
  rep.mean_eta_lqr = trace.lqr.mean_eta();
  rep.mean_eta_pi2 = trace.pi2.eta.mean();
  rep.lqr_converged_fraction = trace.lqr.converged_fraction();
  rep.diverged_samples = trace.S_hat.diverged_count();
  return result;
}

LocalIterationResult pilqr_iteration(const Environment& env, const LocalState& state,
                                     const LocalOptions& options, std::uint64_t seed,
                                     const TvlgPolicy* anchor, PilqrTrace* trace_out) {
  PilqrTrace local_trace;
  PilqrTrace& trace = trace_out ? *trace_out : local_trace;
  pilqr_prepare(env, state, options, seed, trace);
  return pilqr_finish(state, options, trace, anchor);
}

}  // namespace pilqr

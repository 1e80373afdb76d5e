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

#ifndef PILQR_PILQR_H_
#define PILQR_PILQR_H_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "pilqr/cost_approx.h"
#include "pilqr/dynamics_fit.h"
#include "pilqr/envs/environment.h"
#include "pilqr/iteration.h"
#include "pilqr/tvlg_policy.h"

namespace pilqr {

// Approximate cost-to-go of every sample under the fitted model.
struct ModelCostToGo {
  Eigen::MatrixXd values;    // N x T
  Eigen::MatrixXd diverged;  // N x T, 1 where the simulated state blew up
  int diverged_count() const { return static_cast<int>(diverged.sum()); }
};

// For every (i, t): start from the sampled (x_it, u_it), roll the
// deterministic controller u = K x + k + chol(Sigma) xi_ij of `sampling`
// (the policy that generated the batch, with the stored noise) forward
// under the mean fitted dynamics, and sum the quadratic cost approximation
// from t to T-1. Parallel over rollouts.
ModelCostToGo eval_shat(const RolloutBatch& batch, const FittedDynamics& dyn,
                        const QuadCostApprox& cost, const TvlgPolicy& sampling,
                        double divergence_threshold = 1e6);

// u_hat_it = K_hat x_it + k_hat + chol(Sigma_hat) xi_it with the stored
// noise; element t is nu x N.
std::vector<Eigen::MatrixXd> reparametrize_controls(const RolloutBatch& batch,
                                                    const TvlgPolicy& p_hat);

// Residual ratio per timestep, mean_i |S_tilde| / mean_i |S|, over the
// finite entries of S_tilde.
Eigen::VectorXd residual_ratios(const Eigen::MatrixXd& S, const Eigen::MatrixXd& S_tilde);

// Applies the adaptation rule of `schedule` to every timestep.
Eigen::VectorXd adjust_eps(const Eigen::VectorXd& eps_prev, const Eigen::MatrixXd& S,
                           const Eigen::MatrixXd& S_tilde, const EpsSchedule& schedule);

// Everything one hybrid update computes, exposed for tests and reports.
struct PilqrTrace {
  RolloutBatch batch;
  FittedDynamics dynamics;
  QuadCostApprox cost;
  Eigen::MatrixXd S;
  ModelCostToGo S_hat;
  Eigen::MatrixXd S_tilde;
  Eigen::VectorXd ratios;
  BackwardPassResult lqr;
  std::vector<Eigen::MatrixXd> u_hat;
  Pi2Weights pi2;
};

// Second half of the hybrid update on an existing batch: LQR-FLM from
// `state.policy` (or against `anchor` when given) to p_hat, then the
// path-integral refit of p_hat on the residual cost-to-go using the
// reparametrized controls. `trace` must already hold batch, dynamics, cost,
// S, S_hat and S_tilde. Returns the new policy.
TvlgPolicy pilqr_update(const LocalState& state, const Eigen::VectorXd& eps,
                        const LocalOptions& options, PilqrTrace& trace,
                        const TvlgPolicy* anchor = nullptr);

// One full iteration: sample, fit dynamics, expand the cost, compute
// residuals, adapt eps, LQR-FLM update, path-integral update on residuals.
// The input state is never modified; on error nothing is returned.
// `anchor` replaces the previous policy as KL reference of the model-based
// stage (used by guided policy search).
// Sampling and model stage: fills batch, dynamics, cost, S, S_hat, S_tilde
// and ratios.
void pilqr_prepare(const Environment& env, const LocalState& state,
                   const LocalOptions& options, std::uint64_t seed, PilqrTrace& trace);

// Adapts eps, runs the two-stage update on a prepared trace and reports.
LocalIterationResult pilqr_finish(const LocalState& state, const LocalOptions& options,
                                  PilqrTrace& trace, const TvlgPolicy* anchor = nullptr);

LocalIterationResult pilqr_iteration(const Environment& env, const LocalState& state,
                                     const LocalOptions& options, std::uint64_t seed,
                                     const TvlgPolicy* anchor = nullptr,
                                     PilqrTrace* trace = nullptr);

}  // namespace pilqr

#endif  // PILQR_PILQR_H_

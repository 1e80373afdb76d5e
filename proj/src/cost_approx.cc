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

#include "pilqr/cost_approx.h"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace pilqr {

double QuadCostStep::evaluate(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  const Eigen::VectorXd dx = x - x_ref;
  const Eigen::VectorXd du = u - u_ref;
  return value + grad_x.dot(dx) + grad_u.dot(du) + 0.5 * dx.dot(hess_xx * dx) +
         0.5 * du.dot(hess_uu * du) + dx.dot(hess_xu * du);
}

QuadCostApprox QuadCostApprox::zero(Index horizon, Index state_dim, Index action_dim) {
  QuadCostStep s;
  s.grad_x = Eigen::VectorXd::Zero(state_dim);
  s.grad_u = Eigen::VectorXd::Zero(action_dim);
  s.hess_xx = Eigen::MatrixXd::Zero(state_dim, state_dim);
  s.hess_uu = Eigen::MatrixXd::Zero(action_dim, action_dim);
  s.hess_xu = Eigen::MatrixXd::Zero(state_dim, action_dim);
  s.x_ref = Eigen::VectorXd::Zero(state_dim);
  s.u_ref = Eigen::VectorXd::Zero(action_dim);
  QuadCostApprox a;
  a.steps.assign(horizon, s);
  return a;
}

Eigen::MatrixXd clamp_eigenvalues(const Eigen::MatrixXd& m, double min_eig) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (m + m.transpose()));
  const Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(min_eig);
  Eigen::MatrixXd out = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

QuadCostApprox expand_cost(const Environment& env, const RolloutBatch& batch,
                           double min_eig_uu) {
  batch.validate();
  const Index T = batch.horizon();
  QuadCostApprox approx;
  approx.steps.resize(T);
  parallel_for(T, [&](Index t) {
    QuadCostStep& s = approx.steps[t];
    s.x_ref = batch.states_at(t).rowwise().mean();
    s.u_ref = batch.actions_at(t).rowwise().mean();
    const CostExpansion e = env.cost_expansion(s.x_ref, s.u_ref, t);
    if (!std::isfinite(e.value) || !e.lx.allFinite() || !e.lu.allFinite() ||
        !e.lxx.allFinite() || !e.luu.allFinite() || !e.lxu.allFinite()) {
      throw NumericalError("expand_cost: non-finite cost derivatives", t);
    }
    s.value = e.value;
    s.grad_x = e.lx;
    s.grad_u = e.lu;
    s.hess_xx = 0.5 * (e.lxx + e.lxx.transpose());
    s.hess_uu = clamp_eigenvalues(e.luu, min_eig_uu);
    s.hess_xu = e.lxu;
  });
  return approx;
}

Eigen::MatrixXd approximate_costs(const RolloutBatch& batch, const QuadCostApprox& approx) {
  const Index N = batch.size();
  const Index T = batch.horizon();
  Eigen::MatrixXd out(N, T);
  parallel_for(N, [&](Index i) {
    const Rollout& r = batch.rollouts[i];
    for (Index t = 0; t < T; ++t) out(i, t) = approx.evaluate(t, r.states[t], r.actions[t]);
  });
  return out;
}

Eigen::MatrixXd residual_costs(const Environment& env, const RolloutBatch& batch,
                               const QuadCostApprox& approx) {
  const Index N = batch.size();
  const Index T = batch.horizon();
  Eigen::MatrixXd out(N, T);
  parallel_for(N, [&](Index i) {
    const Rollout& r = batch.rollouts[i];
    for (Index t = 0; t < T; ++t) {
      out(i, t) = env.cost(r.states[t], r.actions[t], t) -
                  approx.evaluate(t, r.states[t], r.actions[t]);
    }
  });
  return out;
}

}  // namespace pilqr

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

#ifndef PILQR_COST_APPROX_H_
#define PILQR_COST_APPROX_H_

#include <vector>

#include <Eigen/Core>

#include "pilqr/envs/environment.h"
#include "pilqr/tvlg_policy.h"

namespace pilqr {

// Second-order expansion of the cost at step t about (x_ref, u_ref):
//   c_hat(x, u) = value + grad_x'dx + grad_u'du + 0.5 dx'hess_xx dx
//               + 0.5 du'hess_uu du + dx'hess_xu du,
// with dx = x - x_ref and du = u - u_ref.
struct QuadCostStep {
  double value = 0.0;
  Eigen::VectorXd grad_x;
  Eigen::VectorXd grad_u;
  Eigen::MatrixXd hess_xx;
  Eigen::MatrixXd hess_uu;
  Eigen::MatrixXd hess_xu;
  Eigen::VectorXd x_ref;
  Eigen::VectorXd u_ref;

  double evaluate(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;
};

struct QuadCostApprox {
  std::vector<QuadCostStep> steps;

  Index horizon() const { return static_cast<Index>(steps.size()); }
  double evaluate(Index t, const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
    return steps[t].evaluate(x, u);
  }
  // The approximation that is identically zero.
  static QuadCostApprox zero(Index horizon, Index state_dim, Index action_dim);
};

// Expands env's cost about the per-timestep batch mean (x_bar_t, u_bar_t)
// using the environment's analytic derivatives. hess_uu is projected onto
// the positive definite cone by clamping eigenvalues at `min_eig_uu`.
// Throws NumericalError (with t) on non-finite derivatives.
QuadCostApprox expand_cost(const Environment& env, const RolloutBatch& batch,
                           double min_eig_uu = 1e-6);

// Residual c(x, u) - c_hat(x, u) at every sample; row i, column t.
Eigen::MatrixXd residual_costs(const Environment& env, const RolloutBatch& batch,
                               const QuadCostApprox& approx);

// Approximate cost c_hat at every sample; row i, column t.
Eigen::MatrixXd approximate_costs(const RolloutBatch& batch, const QuadCostApprox& approx);

// Symmetric eigenvalue clamp.
Eigen::MatrixXd clamp_eigenvalues(const Eigen::MatrixXd& m, double min_eig);

}  // namespace pilqr

#endif  // PILQR_COST_APPROX_H_

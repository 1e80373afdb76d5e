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

#include "pilqr/dynamics_fit.h"

#include <Eigen/Cholesky>
#include <Eigen/QR>

namespace pilqr {
namespace internal {

void fit_transition(const Eigen::MatrixXd& x, const Eigen::MatrixXd& u,
                    const Eigen::MatrixXd& x_next, double reg, Index t,
                    Eigen::MatrixXd& fx, Eigen::MatrixXd& fu, Eigen::VectorXd& fc,
                    Eigen::MatrixXd& cov) {
  const Index nx = x.rows();
  const Index nu = u.rows();
  const Index n = x.cols();
  const Index p = nx + nu;

  Eigen::MatrixXd z(p, n);
  z.topRows(nx) = x;
  z.bottomRows(nu) = u;
  const Eigen::VectorXd z_mean = z.rowwise().mean();
  const Eigen::VectorXd y_mean = x_next.rowwise().mean();
  z.colwise() -= z_mean;
  const Eigen::MatrixXd y = x_next.colwise() - y_mean;

  Eigen::MatrixXd coef;  // nx x p
  if (reg == 0.0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(z.transpose());
    if (qr.rank() < p) {
      throw NumericalError("fit_dynamics: rank-deficient design without regularization", t);
    }
    coef = qr.solve(y.transpose()).transpose();
  } else {
    Eigen::MatrixXd gram = z * z.transpose();
    gram.diagonal().array() += reg;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("fit_dynamics: regularized design is singular", t);
    }
    coef = llt.solve(z * y.transpose()).transpose();
  }

  fx = coef.leftCols(nx);
  fu = coef.rightCols(nu);
  fc = y_mean - coef * z_mean;

  const Eigen::MatrixXd residual = y - coef * z;
  cov = residual * residual.transpose() / static_cast<double>(n);
  cov = 0.5 * (cov + cov.transpose());
  cov.diagonal().array() += reg;
}

}  // namespace internal

FittedDynamics fit_dynamics(const RolloutBatch& batch, double reg) {
  if (batch.size() < 2) throw ConfigurationError("fit_dynamics: need at least 2 rollouts");
  if (!(reg >= 0.0)) throw ConfigurationError("fit_dynamics: reg must be >= 0");
  batch.validate();
  const Index T = batch.horizon();
  const Index transitions = T > 0 ? T - 1 : 0;
  FittedDynamics dyn;
  dyn.state_jacobian.resize(transitions);
  dyn.control_jacobian.resize(transitions);
  dyn.offset.resize(transitions);
  dyn.noise_covariance.resize(transitions);
  parallel_for(transitions, [&](Index t) {
    internal::fit_transition(batch.states_at(t), batch.actions_at(t),
                             batch.states_at(t + 1), reg, t, dyn.state_jacobian[t],
                             dyn.control_jacobian[t], dyn.offset[t],
                             dyn.noise_covariance[t]);
  });
  return dyn;
}

}  // namespace pilqr

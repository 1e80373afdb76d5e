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

#include "pilqr/kl.h"

#include <Eigen/Cholesky>

namespace pilqr {

double conditional_kl(const Eigen::MatrixXd& gain_new, const Eigen::VectorXd& offset_new,
                      const Eigen::MatrixXd& cov_new, const Eigen::MatrixXd& gain_old,
                      const Eigen::VectorXd& offset_old, const Eigen::MatrixXd& cov_old,
                      const Eigen::MatrixXd& states, Index t) {
  if (states.cols() == 0) throw ConfigurationError("conditional_kl: no states");
  const Index d = cov_new.rows();
  if (gain_new.cols() != states.rows() || gain_old.cols() != states.rows() ||
      cov_old.rows() != d || gain_new.rows() != d || gain_old.rows() != d) {
    throw ConfigurationError("conditional_kl: dimension mismatch");
  }
  Eigen::LLT<Eigen::MatrixXd> old_llt(cov_old);
  if (old_llt.info() != Eigen::Success) {
    throw NumericalError("conditional_kl: reference covariance is singular", t);
  }
  Eigen::LLT<Eigen::MatrixXd> new_llt(cov_new);
  if (new_llt.info() != Eigen::Success) {
    throw NumericalError("conditional_kl: covariance is singular", t);
  }
  const Eigen::MatrixXd L_old = old_llt.matrixL();
  const Eigen::MatrixXd L_new = new_llt.matrixL();
  const double logdet_old = 2.0 * L_old.diagonal().array().log().sum();
  const double logdet_new = 2.0 * L_new.diagonal().array().log().sum();
  const double trace = old_llt.solve(cov_new).trace();
  const double constant = logdet_old - logdet_new - static_cast<double>(d) + trace;

  // Mean differences for all states at once, whitened by the reference factor.
  Eigen::MatrixXd diff = (gain_new - gain_old) * states;
  diff.colwise() += offset_new - offset_old;
  old_llt.matrixL().solveInPlace(diff);
  const double mahalanobis = diff.colwise().squaredNorm().mean();
  return 0.5 * (constant + mahalanobis);
}

double conditional_kl(const TvlgPolicy& p_new, const TvlgPolicy& p_old,
                      const Eigen::MatrixXd& states, Index t) {
  if (t < 0 || t >= p_new.horizon() || t >= p_old.horizon()) {
    throw ConfigurationError("conditional_kl: timestep out of range");
  }
  return conditional_kl(p_new.gains[t], p_new.offsets[t], p_new.covariances[t],
                        p_old.gains[t], p_old.offsets[t], p_old.covariances[t],
                        states, t);
}

double gaussian_kl(const Eigen::VectorXd& mean_p, const Eigen::MatrixXd& cov_p,
                   const Eigen::VectorXd& mean_q, const Eigen::MatrixXd& cov_q) {
  const Index d = mean_p.size();
  Eigen::MatrixXd states = Eigen::MatrixXd::Zero(1, 1);
  return conditional_kl(Eigen::MatrixXd::Zero(d, 1), mean_p, cov_p,
                        Eigen::MatrixXd::Zero(d, 1), mean_q, cov_q, states);
}

}  // namespace pilqr

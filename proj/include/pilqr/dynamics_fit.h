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

#ifndef PILQR_DYNAMICS_FIT_H_
#define PILQR_DYNAMICS_FIT_H_

#include <vector>

#include <Eigen/Core>

#include "pilqr/tvlg_policy.h"

namespace pilqr {

// Per-transition linear-Gaussian dynamics
//   x_{t+1} ~ N(state_jacobian[t] x_t + control_jacobian[t] u_t + offset[t],
//               noise_covariance[t]),  t = 0..T-2.
struct FittedDynamics {
  std::vector<Eigen::MatrixXd> state_jacobian;    // nx x nx
  std::vector<Eigen::MatrixXd> control_jacobian;  // nx x nu
  std::vector<Eigen::VectorXd> offset;            // nx
  std::vector<Eigen::MatrixXd> noise_covariance;  // nx x nx

  Index transitions() const { return static_cast<Index>(state_jacobian.size()); }
  Eigen::VectorXd predict(Index t, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& u) const {
    return state_jacobian[t] * x + control_jacobian[t] * u + offset[t];
  }
};

// Least squares of x_{t+1} on [x_t; u_t; 1] for every transition, with a
// ridge penalty `reg` on the (centered) slope terms; the intercept is not
// penalized. noise_covariance is the residual covariance plus reg * I.
// Transitions are fitted in parallel.
//
// Throws ConfigurationError when the batch has fewer than 2 rollouts or
// reg < 0, and NumericalError naming t when reg == 0 and the design at t is
// rank deficient.
FittedDynamics fit_dynamics(const RolloutBatch& batch, double reg = 1e-6);

namespace internal {
// Fits one transition from column-stacked samples.
void fit_transition(const Eigen::MatrixXd& x, const Eigen::MatrixXd& u,
                    const Eigen::MatrixXd& x_next, double reg, Index t,
                    Eigen::MatrixXd& fx, Eigen::MatrixXd& fu, Eigen::VectorXd& fc,
                    Eigen::MatrixXd& cov);
}  // namespace internal

}  // namespace pilqr

#endif  // PILQR_DYNAMICS_FIT_H_

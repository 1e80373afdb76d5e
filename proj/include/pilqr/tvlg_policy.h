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

#ifndef PILQR_TVLG_POLICY_H_
#define PILQR_TVLG_POLICY_H_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "pilqr/common.h"

namespace pilqr {

// Time-varying linear-Gaussian controller
//   u_t ~ N(gains[t] * x_t + offsets[t], covariances[t]),  t = 0..T-1.
// Every covariance must be symmetric positive definite; the sampling noise
// is always mapped through the lower Cholesky factor so that a stored
// standard-normal draw reproduces the action exactly.
struct TvlgPolicy {
  std::vector<Eigen::MatrixXd> gains;        // action_dim x state_dim
  std::vector<Eigen::VectorXd> offsets;      // action_dim
  std::vector<Eigen::MatrixXd> covariances;  // action_dim x action_dim

  // Zero gains and offsets with isotropic covariance `variance * I`.
  static TvlgPolicy zero(Index horizon, Index state_dim, Index action_dim,
                         double variance);

  Index horizon() const { return static_cast<Index>(gains.size()); }
  Index state_dim() const { return gains.empty() ? 0 : gains.front().cols(); }
  Index action_dim() const { return gains.empty() ? 0 : gains.front().rows(); }

  // Throws ConfigurationError on ragged or mismatched dimensions and
  // NumericalError if a covariance is not symmetric positive definite.
  void validate() const;

  Eigen::VectorXd mean(Index t, const Eigen::VectorXd& x) const {
    return gains[t] * x + offsets[t];
  }
  // Lower Cholesky factor of covariances[t].
  Eigen::MatrixXd cholesky(Index t) const;
  std::vector<Eigen::MatrixXd> cholesky_factors() const;

  // Eigenvalue floor on every covariance.
  void floor_covariances(double min_eigenvalue);
};

struct Rollout {
  std::vector<Eigen::VectorXd> states;   // x_0..x_{T-1}
  std::vector<Eigen::VectorXd> actions;  // u_0..u_{T-1}
  std::vector<Eigen::VectorXd> noise;    // standard-normal draws behind u_t
  Eigen::VectorXd costs;                 // c(x_t, u_t)

  double total_cost() const { return costs.sum(); }
};

struct RolloutBatch {
  std::vector<Rollout> rollouts;
  int condition_id = 0;
  std::uint64_t rng_seed = 0;

  Index size() const { return static_cast<Index>(rollouts.size()); }
  Index horizon() const;
  Index state_dim() const;
  Index action_dim() const;

  // Column i holds rollout i.
  Eigen::MatrixXd states_at(Index t) const;
  Eigen::MatrixXd actions_at(Index t) const;
  Eigen::MatrixXd noise_at(Index t) const;
  // Row i, column t: cost of rollout i at step t.
  Eigen::MatrixXd cost_table() const;

  std::vector<Eigen::MatrixXd> all_states() const;

  // Throws ConfigurationError unless every rollout shares T and dimensions.
  void validate() const;
};

// u = gains * x + offsets + chol(covariance) * noise for one step.
Eigen::VectorXd reparametrized_action(const TvlgPolicy& policy, Index t,
                                      const Eigen::MatrixXd& chol,
                                      const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& noise);

}  // namespace pilqr

#endif  // PILQR_TVLG_POLICY_H_

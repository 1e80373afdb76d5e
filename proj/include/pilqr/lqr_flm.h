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

#ifndef PILQR_LQR_FLM_H_
#define PILQR_LQR_FLM_H_

#include <vector>

#include <Eigen/Core>

#include "pilqr/cost_approx.h"
#include "pilqr/dynamics_fit.h"
#include "pilqr/tvlg_policy.h"

namespace pilqr {

struct LqrFlmOptions {
  // Temperature search bracket.
  double eta_min = 1e-6;
  double eta_max = 1e6;
  // Accept eta once |KL - eps| <= kl_tolerance * eps.
  double kl_tolerance = 0.05;
  int max_search_iterations = 200;
  int fallback_grid_points = 400;
  // When the bound is slack even at eta_min, return the unconstrained mean
  // -Q_uu^-1 [Q_ux, Q_u] instead of the eta_min solution.
  bool unconstrained_when_slack = true;
  // Levenberg regularization of Q_uu: mu_init, multiplied by mu_factor on
  // each failed Cholesky, up to mu_max.
  double mu_init = 1e-6;
  double mu_factor = 10.0;
  double mu_max = 1e2;
};

enum class EtaStatus {
  kConverged,    // |KL - eps| within tolerance
  kLowerBound,   // constraint inactive even at eta_min
  kUpperBound,   // KL exceeds eps even at eta_max
  kGridFallback  // non-monotone KL detected; best grid point returned
};

const char* to_string(EtaStatus status);

// Second-order Q-function blocks at one timestep.
struct QuadraticQ {
  Eigen::VectorXd grad_x;
  Eigen::VectorXd grad_u;
  Eigen::MatrixXd hess_xx;
  Eigen::MatrixXd hess_uu;
  Eigen::MatrixXd hess_xu;  // nx x nu
};

// Previous (reference) controller at one timestep.
struct ReferenceStep {
  Eigen::MatrixXd gain;
  Eigen::VectorXd offset;
  Eigen::MatrixXd covariance;
};

struct EtaSolution {
  double eta = 0.0;
  double kl = 0.0;
  EtaStatus status = EtaStatus::kConverged;
  bool nonmonotone = false;
  Eigen::MatrixXd gain;
  Eigen::VectorXd offset;
  Eigen::MatrixXd covariance;
};

// Finds the temperature for which the KL-constrained update
//   cov   = (Q_uu / eta + cov_ref^-1)^-1
//   gain  = -cov (Q_ux / eta - cov_ref^-1 gain_ref)
//   offset= -cov (Q_u  / eta - cov_ref^-1 offset_ref)
// has average KL (over the columns of `states`) equal to eps. Bisection on
// log(eta) inside [eta_min, eta_max]; KL is non-increasing in eta. Throws
// ConstraintInfeasibleError when no eta in the bracket gives a positive
// definite covariance.
EtaSolution solve_eta(Index t, const QuadraticQ& q, const ReferenceStep& ref,
                      const Eigen::MatrixXd& states, double eps,
                      const LqrFlmOptions& options = {});

// Per-timestep record of one backward pass.
struct BackwardPassStep {
  QuadraticQ q;
  Eigen::VectorXd value_grad;  // V_x
  Eigen::MatrixXd value_hess;  // V_xx
  double eta = 0.0;
  double eps = 0.0;
  double kl = 0.0;
  double mu = 0.0;  // infinity when Q_uu stayed indefinite
  EtaStatus status = EtaStatus::kConverged;
  bool nonmonotone = false;
};

struct BackwardPassResult {
  TvlgPolicy policy;
  std::vector<BackwardPassStep> steps;

  double mean_eta() const;
  // Fraction of timesteps whose search converged within tolerance.
  double converged_fraction() const;
};

// KL-constrained LQR backward pass from t = T-1 down to 0 on affine fitted
// dynamics and the quadratic cost approximation, with one KL bound eps[t]
// per timestep against `prev`. The value recursion uses the update for a
// non-optimal controller so that V reflects the constrained gains.
// `kl_states[t]` (nx x N) are the states at which the expected KL is
// measured.
BackwardPassResult backward_pass(const FittedDynamics& dyn, const QuadCostApprox& cost,
                                 const TvlgPolicy& prev, const Eigen::VectorXd& eps,
                                 const std::vector<Eigen::MatrixXd>& kl_states,
                                 const LqrFlmOptions& options = {});

}  // namespace pilqr

#endif  // PILQR_LQR_FLM_H_

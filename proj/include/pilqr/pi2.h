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

#ifndef PILQR_PI2_H_
#define PILQR_PI2_H_

#include <vector>

#include <Eigen/Core>

#include "pilqr/tvlg_policy.h"

namespace pilqr {

// Suffix sums S(i, t) = sum_{j >= t} costs(i, j) for an N x T cost table.
Eigen::MatrixXd cost_to_go(const Eigen::MatrixXd& step_costs);
Eigen::MatrixXd cost_to_go(const RolloutBatch& batch);

struct DualOptions {
  // The temperature is searched on log10(eta / spread) in this range, where
  // spread = max(S) - min(S) over the finite samples.
  double log10_min = -6.0;
  double log10_max = 6.0;
  int max_iterations = 500;
};

struct DualResult {
  double eta = 0.0;
  double kl = 0.0;          // KL(weights || uniform) at eta
  bool degenerate = false;  // all costs equal
};

// Sample-based dual g(eta) = eta*eps + eta*log(mean_i exp(-S_i / eta)),
// evaluated with the max-shift trick. Non-finite S_i are skipped.
double dual_function(const Eigen::VectorXd& S, double eps, double eta);

// Minimizes g over the bracket with Brent's method. When all finite S are
// equal the weights are uniform for every eta and the upper end of the
// bracket is returned with `degenerate` set.
DualResult dual_eta(const Eigen::VectorXd& S, double eps, const DualOptions& options = {});

// w_i = softmax(-S_i / eta). Non-finite S_i get zero weight.
Eigen::VectorXd pi2_weights(const Eigen::VectorXd& S, double eta);

// KL(w || uniform) over the entries with nonzero weight count.
double kl_from_uniform(const Eigen::VectorXd& w);
double effective_sample_size(const Eigen::VectorXd& w);

// Weights for every timestep with a per-timestep KL bound.
struct Pi2Weights {
  Eigen::MatrixXd weights;  // N x T, columns sum to one
  Eigen::VectorXd eta;      // T
  Eigen::VectorXd eps;      // T
  Eigen::VectorXd kl;       // T
};
Pi2Weights compute_pi2_weights(const Eigen::MatrixXd& S, const Eigen::VectorXd& eps,
                               const DualOptions& options = {});

struct MlUpdateOptions {
  // Ridge strength pulling the gains toward the previous policy's gains.
  double ridge = 1e-6;
  // Added to the residual covariance.
  double cov_reg = 1e-6;
  // Eigenvalue floor applied to the final covariance.
  double cov_floor = 1e-6;
  // Fraction of the ML covariance estimate taken each update; the rest is
  // kept from the previous covariance.
  double cov_damping = 0.9;
  // Keep the previous gains and refit only the offsets.
  bool freeze_gains = false;
  // Below this effective sample size the previous covariance is kept.
  double min_ess = 2.0;
};

struct MlUpdateDiagnostics {
  std::vector<double> ess;
  int degenerate_steps = 0;
};

// Per-timestep weighted maximum-likelihood refit of a TVLG policy:
// weighted ridge regression of controls on states for (gain, offset) and
// the weighted residual covariance for the covariance. states[t] is
// nx x N, controls[t] is nu x N, weights is N x T with unit column sums.
TvlgPolicy weighted_ml_update(const std::vector<Eigen::MatrixXd>& states,
                              const std::vector<Eigen::MatrixXd>& controls,
                              const Eigen::MatrixXd& weights, const TvlgPolicy& prev,
                              const MlUpdateOptions& options = {},
                              MlUpdateDiagnostics* diagnostics = nullptr);

}  // namespace pilqr

#endif  // PILQR_PI2_H_

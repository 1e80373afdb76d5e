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

#ifndef PILQR_MDGPS_H_
#define PILQR_MDGPS_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pilqr/envs/environment.h"
#include "pilqr/iteration.h"
#include "pilqr/json_util.h"
#include "pilqr/lqr_flm.h"
#include "pilqr/tvlg_policy.h"

namespace pilqr {

enum class GlobalArchitecture { kAffine, kMlp };

const char* to_string(GlobalArchitecture architecture);
GlobalArchitecture parse_architecture(const std::string& name);

// Deterministic state-to-action map. The affine form is u = W x + b; the
// network form has two hidden ReLU layers. Inputs are standardized with a
// shift and scale fixed at the first fit.
class GlobalPolicy {
 public:
  static GlobalPolicy affine(Index state_dim, Index action_dim);
  static GlobalPolicy mlp(Index state_dim, Index action_dim, Index hidden, std::uint64_t seed);

  GlobalArchitecture architecture() const { return architecture_; }
  Index state_dim() const { return state_dim_; }
  Index action_dim() const { return action_dim_; }
  Index hidden() const { return hidden_; }
  Index parameter_count() const { return params_.size(); }

  const Eigen::VectorXd& parameters() const { return params_; }
  void set_parameters(const Eigen::VectorXd& params);

  bool normalized() const { return normalized_; }
  const Eigen::VectorXd& input_shift() const { return shift_; }
  const Eigen::VectorXd& input_scale() const { return scale_; }
  void set_normalization(const Eigen::VectorXd& shift, const Eigen::VectorXd& scale);

  Eigen::VectorXd mean(const Eigen::VectorXd& x) const;
  // Column i is the action for column i of X.
  Eigen::MatrixXd mean(const Eigen::MatrixXd& X) const;
  // d mean / d x at x (action_dim x state_dim).
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;

  // loss = sum_i w_i * 0.5 * r_i' P_i r_i / sum_i w_i with r_i = U_i - mean(X_i).
  // Writes d loss / d parameters to `grad` when non-null.
  double loss(const Eigen::MatrixXd& X, const Eigen::MatrixXd& U,
              const std::vector<Eigen::MatrixXd>& precisions, const Eigen::VectorXd& weights,
              Eigen::VectorXd* grad) const;

  json_util::Json to_json() const;
  static GlobalPolicy from_json(const json_util::Json& j);

 private:
  GlobalPolicy(GlobalArchitecture architecture, Index state_dim, Index action_dim,
               Index hidden);
  Eigen::MatrixXd standardize(const Eigen::MatrixXd& X) const;

  GlobalArchitecture architecture_ = GlobalArchitecture::kAffine;
  Index state_dim_ = 0;
  Index action_dim_ = 0;
  Index hidden_ = 0;
  Eigen::VectorXd params_;
  Eigen::VectorXd shift_;
  Eigen::VectorXd scale_;
  bool normalized_ = false;
};

// Affine fit of the global policy's mean over `states` (state_dim x N):
// ridge regression of mean(x) on x, shrunk toward the Jacobian at the state
// mean so that directions without state spread take the local slope.
ReferenceStep linearize_global(const GlobalPolicy& policy, const Eigen::MatrixXd& states,
                               const Eigen::MatrixXd& covariance, double ridge = 1e-6);

// Per-timestep linearization with the given fixed covariances.
TvlgPolicy linearize_global(const GlobalPolicy& policy,
                            const std::vector<Eigen::MatrixXd>& states,
                            const std::vector<Eigen::MatrixXd>& covariances,
                            double ridge = 1e-6);

struct TrainingSet {
  Eigen::MatrixXd states;                  // state_dim x M
  Eigen::MatrixXd actions;                 // action_dim x M
  std::vector<Eigen::MatrixXd> precisions;  // M entries, action_dim x action_dim
  Eigen::VectorXd weights;                 // M, nonnegative

  Index size() const { return states.cols(); }
  void append(const Eigen::MatrixXd& x, const Eigen::MatrixXd& u,
              const Eigen::MatrixXd& precision, double weight = 1.0);
};

struct FitOptions {
  int epochs = 500;
  double learning_rate = 0.1;
  double growth = 1.1;  // step growth after an accepted step
  int max_halvings = 40;
};

struct FitResult {
  std::vector<double> losses;  // losses[0] before the first step
  int halvings = 0;
};

// Full-batch gradient descent on the precision-weighted squared error.
// Precisions are rescaled by their mean trace per action dimension. A step
// that raises the loss is halved until it does not; the loss sequence is
// nonincreasing. Throws NumericalError on a non-finite loss.
FitResult fit_global(GlobalPolicy& policy, const TrainingSet& data,
                     const FitOptions& options = {});

struct MdgpsOptions {
  LocalOptions local;
  FitOptions fit;
  double linearization_ridge = 1e-6;
};

struct MdgpsState {
  std::vector<LocalState> locals;
  GlobalPolicy global = GlobalPolicy::affine(0, 0);
  // False until the first fit; the first local update is then constrained
  // against the previous local policy.
  bool global_trained = false;
};

struct MdgpsIterationResult {
  MdgpsState state;
  std::vector<IterationReport> reports;  // one per condition
  FitResult fit;
};

MdgpsIterationResult mdgps_iteration(const std::vector<EnvironmentPtr>& envs,
                                     const MdgpsState& state, const MdgpsOptions& options,
                                     std::uint64_t seed);

// Deterministic rollout of the global policy's mean.
Rollout global_rollout(const GlobalPolicy& policy, const Environment& env);

}  // namespace pilqr

#endif  // PILQR_MDGPS_H_

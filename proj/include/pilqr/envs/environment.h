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

#ifndef PILQR_ENVS_ENVIRONMENT_H_
#define PILQR_ENVS_ENVIRONMENT_H_

#include <memory>
#include <string>

#include <Eigen/Core>

#include "pilqr/common.h"

namespace pilqr {

// Cost value with exact first and second derivatives at (x, u).
struct CostExpansion {
  double value = 0.0;
  Eigen::VectorXd lx;   // dc/dx
  Eigen::VectorXd lu;   // dc/du
  Eigen::MatrixXd lxx;  // d2c/dx2
  Eigen::MatrixXd luu;  // d2c/du2
  Eigen::MatrixXd lxu;  // d2c/dxdu, state_dim x action_dim
};

// A simulated task bound to one condition (initial state, targets). All
// member functions are const and the object holds no mutable state, so one
// instance may be read concurrently by any number of rollouts.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  virtual Index state_dim() const = 0;
  virtual Index action_dim() const = 0;
  virtual Index horizon() const = 0;
  virtual double dt() const = 0;

  // Initial state of the bound condition.
  virtual Eigen::VectorXd reset() const = 0;
  // Deterministic transition x_{t+1} = f(x_t, u_t).
  virtual Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                               Index t) const = 0;
  // Standard deviation of additive Gaussian process noise (0 = none). The
  // sampler draws it from the rollout's own stream.
  virtual double process_noise() const { return 0.0; }

  virtual double cost(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                      Index t) const = 0;
  virtual CostExpansion cost_expansion(const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& u, Index t) const = 0;
  virtual bool nonnegative_costs() const { return true; }
};

using EnvironmentPtr = std::shared_ptr<const Environment>;

}  // namespace pilqr

#endif  // PILQR_ENVS_ENVIRONMENT_H_

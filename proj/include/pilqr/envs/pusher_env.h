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

#ifndef PILQR_ENVS_PUSHER_ENV_H_
#define PILQR_ENVS_PUSHER_ENV_H_

#include <memory>

#include <Eigen/Core>

#include "pilqr/envs/environment.h"
#include "pilqr/envs/generic_loss.h"

namespace pilqr {

// Planar point gripper (damped double integrator driven by a force) and a
// block resting on a high-friction surface:
//   x = (gripper_x, gripper_y, gripper_vx, gripper_vy, block_x, block_y).
//
// The block only moves while the gripper overlaps it. An overlap of depth d
// along the contact normal n produces the penalty impulse
//   J = stiffness * d * dt,
// which is removed from the gripper (velocity change -J / gripper_mass along
// n). Static friction absorbs up to block_friction * dt of it; the rest
// displaces the block by dt * (J - block_friction * dt) / block_mass along n,
// after which the surface absorbs the block's momentum. The dynamics are
// therefore piecewise: the block is exactly stationary without contact or
// below the friction threshold.
struct PusherParams {
  double gripper_mass = 1.0;
  double block_mass = 1.0;
  double gripper_damping = 1.0;
  double contact_radius = 0.15;
  double stiffness = 200.0;
  double block_friction = 0.0;  // force the contact must exceed to slide the block
  double dt = 0.05;
  Index horizon = 100;
  double block_goal_weight = 4.0;
  double gripper_block_weight = 1.0;
  double action_penalty = 0.0;
  GenericLoss loss{10.0, 0.1, 1e-5};
};

struct PusherCondition {
  Eigen::Vector2d gripper = Eigen::Vector2d::Zero();
  Eigen::Vector2d block = Eigen::Vector2d(0.5, 0.0);
  Eigen::Vector2d goal = Eigen::Vector2d(1.0, 0.0);
};

class PusherEnvironment final : public Environment {
 public:
  static constexpr Index kStateDim = 6;
  static constexpr Index kActionDim = 2;

  PusherEnvironment(PusherCondition condition, PusherParams params);

  std::string name() const override { return "pusher"; }
  Index state_dim() const override { return kStateDim; }
  Index action_dim() const override { return kActionDim; }
  Index horizon() const override { return params_.horizon; }
  double dt() const override { return params_.dt; }

  Eigen::VectorXd reset() const override;
  Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                       Index t) const override;
  double cost(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
              Index t) const override;
  CostExpansion cost_expansion(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                               Index t) const override;

  bool in_contact(const Eigen::VectorXd& x) const;
  double block_goal_distance(const Eigen::VectorXd& x) const;

  const PusherCondition& condition() const { return condition_; }
  const PusherParams& params() const { return params_; }

 private:
  PusherCondition condition_;
  PusherParams params_;
};

std::shared_ptr<const PusherEnvironment> make_pusher_env(
    const PusherCondition& condition, const PusherParams& params = {});

}  // namespace pilqr

#endif  // PILQR_ENVS_PUSHER_ENV_H_

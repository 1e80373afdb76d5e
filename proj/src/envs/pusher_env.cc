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

#include "pilqr/envs/pusher_env.h"

#include <algorithm>
#include <utility>

namespace pilqr {

PusherEnvironment::PusherEnvironment(PusherCondition condition, PusherParams params)
    : condition_(std::move(condition)), params_(params) {
  if (params_.horizon < 1 || !(params_.dt > 0.0) || !(params_.gripper_mass > 0.0) ||
      !(params_.block_mass > 0.0) || params_.gripper_damping < 0.0 ||
      !(params_.contact_radius > 0.0) || params_.stiffness < 0.0 || params_.block_friction < 0.0 ||
      params_.action_penalty < 0.0) {
    throw ConfigurationError("pusher env: invalid parameters");
  }
}

Eigen::VectorXd PusherEnvironment::reset() const {
  Eigen::VectorXd x(kStateDim);
  x << condition_.gripper, Eigen::Vector2d::Zero(), condition_.block;
  return x;
}

bool PusherEnvironment::in_contact(const Eigen::VectorXd& x) const {
  return (x.segment<2>(4) - x.head<2>()).norm() < params_.contact_radius;
}

double PusherEnvironment::block_goal_distance(const Eigen::VectorXd& x) const {
  return (x.segment<2>(4) - condition_.goal).norm();
}

Eigen::VectorXd PusherEnvironment::step(const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& u, Index) const {
  const double dt = params_.dt;
  Eigen::Vector2d velocity =
      x.segment<2>(2) +
      dt * (u.head<2>() - params_.gripper_damping * x.segment<2>(2)) / params_.gripper_mass;
  const Eigen::Vector2d gripper = x.head<2>() + dt * velocity;
  Eigen::Vector2d block = x.segment<2>(4);

  const Eigen::Vector2d offset = block - gripper;
  const double distance = offset.norm();
  if (distance < params_.contact_radius) {
    const Eigen::Vector2d normal =
        distance > 0.0 ? Eigen::Vector2d(offset / distance) : Eigen::Vector2d(1.0, 0.0);
    const double impulse = params_.stiffness * (params_.contact_radius - distance) * dt;
    const double sliding = std::max(0.0, impulse - params_.block_friction * dt);
    block += dt * (sliding / params_.block_mass) * normal;
    velocity -= (impulse / params_.gripper_mass) * normal;
  }

  Eigen::VectorXd next(kStateDim);
  next << gripper, velocity, block;
  return next;
}

double PusherEnvironment::cost(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                               Index) const {
  const Eigen::VectorXd block_goal = x.segment<2>(4) - condition_.goal;
  const Eigen::VectorXd gripper_block = x.head<2>() - x.segment<2>(4);
  return params_.block_goal_weight * generic_loss_value(block_goal, params_.loss) +
         params_.gripper_block_weight * generic_loss_value(gripper_block, params_.loss) +
         params_.action_penalty * u.squaredNorm();
}

CostExpansion PusherEnvironment::cost_expansion(const Eigen::VectorXd& x,
                                                const Eigen::VectorXd& u,
                                                Index) const {
  const LossValue goal_term = generic_loss(x.segment<2>(4) - condition_.goal, params_.loss);
  const LossValue grip_term = generic_loss(x.head<2>() - x.segment<2>(4), params_.loss);
  const double wg = params_.block_goal_weight;
  const double wb = params_.gripper_block_weight;

  CostExpansion e;
  e.value = wg * goal_term.value + wb * grip_term.value +
            params_.action_penalty * u.squaredNorm();
  e.lx = Eigen::VectorXd::Zero(kStateDim);
  e.lx.segment<2>(4) += wg * goal_term.grad;
  e.lx.head<2>() += wb * grip_term.grad;
  e.lx.segment<2>(4) -= wb * grip_term.grad;

  e.lxx = Eigen::MatrixXd::Zero(kStateDim, kStateDim);
  e.lxx.block<2, 2>(4, 4) += wg * goal_term.hessian;
  e.lxx.block<2, 2>(0, 0) += wb * grip_term.hessian;
  e.lxx.block<2, 2>(4, 4) += wb * grip_term.hessian;
  e.lxx.block<2, 2>(0, 4) -= wb * grip_term.hessian;
  e.lxx.block<2, 2>(4, 0) -= wb * grip_term.hessian;

  e.lu = 2.0 * params_.action_penalty * u;
  e.luu = 2.0 * params_.action_penalty * Eigen::MatrixXd::Identity(kActionDim, kActionDim);
  e.lxu = Eigen::MatrixXd::Zero(kStateDim, kActionDim);
  return e;
}

std::shared_ptr<const PusherEnvironment> make_pusher_env(
    const PusherCondition& condition, const PusherParams& params) {
  return std::make_shared<const PusherEnvironment>(condition, params);
}

}  // namespace pilqr

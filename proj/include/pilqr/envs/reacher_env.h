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

#ifndef PILQR_ENVS_REACHER_ENV_H_
#define PILQR_ENVS_REACHER_ENV_H_

#include <memory>

#include <Eigen/Core>

#include "pilqr/envs/environment.h"
#include "pilqr/envs/generic_loss.h"

namespace pilqr {

// Torque-controlled planar two-link arm without gravity. Point masses sit
// at the link tips; joints carry viscous damping. The target position is
// appended to the state so that a single global policy can condition on it:
//   x = (q1, q2, dq1, dq2, target_x, target_y),  u = (tau1, tau2).
struct ReacherParams {
  double link1 = 1.0;
  double link2 = 1.0;
  double mass1 = 1.0;
  double mass2 = 1.0;
  double damping = 0.5;
  // Joint torques are clipped to [-max_torque, max_torque].
  double max_torque = 4.0;
  double dt = 0.05;
  Index horizon = 100;
  double action_penalty = 1e-4;
  GenericLoss loss{0.0, 1.0, 1e-5};
};

struct ReacherCondition {
  Eigen::Vector2d angles = Eigen::Vector2d::Zero();
  Eigen::Vector2d velocities = Eigen::Vector2d::Zero();
  Eigen::Vector2d target = Eigen::Vector2d(1.0, 1.0);
};

class ReacherEnvironment final : public Environment {
 public:
  static constexpr Index kStateDim = 6;
  static constexpr Index kActionDim = 2;

  ReacherEnvironment(ReacherCondition condition, ReacherParams params);

  std::string name() const override { return "reacher"; }
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

  // End-effector position relative to the base for joint angles q.
  Eigen::Vector2d end_effector(const Eigen::Vector2d& q) const;
  // Distance from the end effector to the target stored in x.
  double target_distance(const Eigen::VectorXd& x) const;

  const ReacherCondition& condition() const { return condition_; }
  const ReacherParams& params() const { return params_; }

 private:
  ReacherCondition condition_;
  ReacherParams params_;
};

std::shared_ptr<const ReacherEnvironment> make_reacher_env(
    const ReacherCondition& condition, const ReacherParams& params = {});

}  // namespace pilqr

#endif  // PILQR_ENVS_REACHER_ENV_H_

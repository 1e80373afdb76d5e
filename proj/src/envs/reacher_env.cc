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

#include "pilqr/envs/reacher_env.h"

#include <cmath>
#include <utility>

#include <Eigen/Cholesky>

namespace pilqr {

ReacherEnvironment::ReacherEnvironment(ReacherCondition condition,
                                       ReacherParams params)
    : condition_(std::move(condition)), params_(params) {
  if (params_.horizon < 1 || !(params_.dt > 0.0) || !(params_.link1 > 0.0) ||
      !(params_.link2 > 0.0) || !(params_.mass1 > 0.0) || !(params_.mass2 > 0.0) ||
      params_.damping < 0.0 || params_.action_penalty < 0.0 || !(params_.max_torque > 0.0)) {
    throw ConfigurationError("reacher env: invalid parameters");
  }
}

Eigen::VectorXd ReacherEnvironment::reset() const {
  Eigen::VectorXd x(kStateDim);
  x << condition_.angles, condition_.velocities, condition_.target;
  return x;
}

Eigen::Vector2d ReacherEnvironment::end_effector(const Eigen::Vector2d& q) const {
  const double a12 = q(0) + q(1);
  return {params_.link1 * std::cos(q(0)) + params_.link2 * std::cos(a12),
          params_.link1 * std::sin(q(0)) + params_.link2 * std::sin(a12)};
}

double ReacherEnvironment::target_distance(const Eigen::VectorXd& x) const {
  return (end_effector(x.head<2>()) - x.segment<2>(4)).norm();
}

Eigen::VectorXd ReacherEnvironment::step(const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& u, Index) const {
  const double l1 = params_.link1, l2 = params_.link2;
  const double m1 = params_.mass1, m2 = params_.mass2;
  const double q2 = x(1), dq1 = x(2), dq2 = x(3);
  const double c2 = std::cos(q2), s2 = std::sin(q2);

  Eigen::Matrix2d M;
  M(0, 0) = (m1 + m2) * l1 * l1 + m2 * l2 * l2 + 2.0 * m2 * l1 * l2 * c2;
  M(0, 1) = m2 * l2 * l2 + m2 * l1 * l2 * c2;
  M(1, 0) = M(0, 1);
  M(1, 1) = m2 * l2 * l2;
  const double h = m2 * l1 * l2 * s2;
  Eigen::Vector2d coriolis(-h * (2.0 * dq1 * dq2 + dq2 * dq2), h * dq1 * dq1);
  Eigen::Vector2d dq(dq1, dq2);
  const Eigen::Vector2d tau = u.head<2>().cwiseMax(-params_.max_torque).cwiseMin(params_.max_torque);
  Eigen::Vector2d qdd = M.ldlt().solve(tau - coriolis - params_.damping * dq);

  // Semi-implicit Euler: velocities first, positions with the new velocities.
  Eigen::VectorXd next = x;
  next.segment<2>(2) = dq + params_.dt * qdd;
  next.head<2>() = x.head<2>() + params_.dt * next.segment<2>(2);
  return next;
}

double ReacherEnvironment::cost(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                Index) const {
  const Eigen::VectorXd z = end_effector(x.head<2>()) - x.segment<2>(4);
  return generic_loss_value(z, params_.loss) + params_.action_penalty * u.squaredNorm();
}

CostExpansion ReacherEnvironment::cost_expansion(const Eigen::VectorXd& x,
                                                 const Eigen::VectorXd& u,
                                                 Index) const {
  const double l1 = params_.link1, l2 = params_.link2;
  const double c1 = std::cos(x(0)), s1 = std::sin(x(0));
  const double c12 = std::cos(x(0) + x(1)), s12 = std::sin(x(0) + x(1));
  const Eigen::VectorXd z = end_effector(x.head<2>()) - x.segment<2>(4);
  const LossValue loss = generic_loss(z, params_.loss);

  // dz/dx = [J, 0, -I].
  Eigen::Matrix<double, 2, kStateDim> D = Eigen::Matrix<double, 2, kStateDim>::Zero();
  D(0, 0) = -l1 * s1 - l2 * s12;
  D(0, 1) = -l2 * s12;
  D(1, 0) = l1 * c1 + l2 * c12;
  D(1, 1) = l2 * c12;
  D(0, 4) = -1.0;
  D(1, 5) = -1.0;

  // Second derivatives of z with respect to (q1, q2).
  Eigen::Matrix2d hx, hy;
  hx << -l1 * c1 - l2 * c12, -l2 * c12, -l2 * c12, -l2 * c12;
  hy << -l1 * s1 - l2 * s12, -l2 * s12, -l2 * s12, -l2 * s12;

  CostExpansion e;
  e.value = loss.value + params_.action_penalty * u.squaredNorm();
  e.lx = D.transpose() * loss.grad;
  e.lxx = D.transpose() * loss.hessian * D;
  e.lxx.topLeftCorner<2, 2>() += loss.grad(0) * hx + loss.grad(1) * hy;
  e.lu = 2.0 * params_.action_penalty * u;
  e.luu = 2.0 * params_.action_penalty * Eigen::MatrixXd::Identity(kActionDim, kActionDim);
  e.lxu = Eigen::MatrixXd::Zero(kStateDim, kActionDim);
  return e;
}

std::shared_ptr<const ReacherEnvironment> make_reacher_env(
    const ReacherCondition& condition, const ReacherParams& params) {
  return std::make_shared<const ReacherEnvironment>(condition, params);
}

}  // namespace pilqr

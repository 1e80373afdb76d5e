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

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "pilqr/cost_approx.h"
#include "pilqr/envs/lq_env.h"
#include "pilqr/envs/pusher_env.h"
#include "pilqr/envs/reacher_env.h"
#include "pilqr/sampling.h"
#include "test_util.h"

namespace pilqr {
namespace {

using testing::Rng;

// Batch of identical copies of one (x, u) point per timestep.
RolloutBatch point_batch(const Eigen::VectorXd& x, const Eigen::VectorXd& u, Index T) {
  Rollout r;
  for (Index t = 0; t < T; ++t) {
    r.states.push_back(x);
    r.actions.push_back(u);
    r.noise.push_back(Eigen::VectorXd::Zero(u.size()));
  }
  r.costs = Eigen::VectorXd::Zero(T);
  RolloutBatch b;
  b.rollouts = {r, r};
  return b;
}

TEST(CostApproxTest, QuadraticCostHasZeroResidual) {
  Rng rng(1);
  const auto env = make_lq_env(testing::random_lq_problem(rng, 10, 3, 2));
  const RolloutBatch batch = sample_rollouts(testing::random_policy(rng, 10, 3, 2), *env, 8, 2);
  const QuadCostApprox approx = expand_cost(*env, batch);
  const Eigen::MatrixXd residual = residual_costs(*env, batch, approx);
  EXPECT_LT(residual.cwiseAbs().maxCoeff(), 1e-10);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd x = rng.vector(3, 3.0), u = rng.vector(2, 3.0);
    const Index t = rng.integer(0, 9);
    EXPECT_NEAR(approx.evaluate(t, x, u), env->cost(x, u, t), 1e-10);
  }
}

TEST(CostApproxTest, DecompositionIdentity) {
  Rng rng(2);
  const auto env = make_reacher_env({});
  const RolloutBatch batch = sample_rollouts(TvlgPolicy::zero(100, 6, 2, 4.0), *env, 6, 3);
  const QuadCostApprox approx = expand_cost(*env, batch);
  const Eigen::MatrixXd approx_costs = approximate_costs(batch, approx);
  const Eigen::MatrixXd residual = residual_costs(*env, batch, approx);
  const Eigen::MatrixXd costs = batch.cost_table();
  EXPECT_LT((approx_costs + residual - costs).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CostApproxTest, ExactAtExpansionPoint) {
  Rng rng(3);
  const auto env = make_reacher_env({});
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd x = env->reset() + rng.vector(6), u = rng.vector(2);
    const QuadCostApprox approx = expand_cost(*env, point_batch(x, u, 3));
    EXPECT_DOUBLE_EQ(approx.evaluate(1, x, u), env->cost(x, u, 1));
  }
}

TEST(CostApproxTest, ThirdOrderRemainder) {
  Rng rng(4);
  PusherParams params;
  params.action_penalty = 1e-4;
  const auto env = make_pusher_env({}, params);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd x = env->reset() + rng.vector(6, 0.5), u = rng.vector(2);
    const QuadCostApprox approx = expand_cost(*env, point_batch(x, u, 1));
    Eigen::VectorXd d = rng.vector(8);
    d *= 1e-3 / d.norm();
    const double gap = std::abs(env->cost(x + d.head(6), u + d.tail(2), 0) -
                                approx.evaluate(0, x + d.head(6), u + d.tail(2)));
    worst = std::max(worst, gap / std::pow(1e-3, 3));
  }
  // The third derivative of the smoothed norm scales like beta / sqrt(gamma)^2
  // near the origin; this bound only guards against a missing second-order term.
  EXPECT_LT(worst, 1e6);
}

TEST(CostApproxTest, ExpansionDerivativesMatchFiniteDifferences) {
  Rng rng(5);
  const auto env = make_reacher_env({});
  const Eigen::VectorXd x = env->reset() + rng.vector(6), u = rng.vector(2);
  const QuadCostStep s = expand_cost(*env, point_batch(x, u, 1)).steps[0];
  auto fx = [&](const Eigen::VectorXd& v) { return env->cost(v, u, 0); };
  EXPECT_LT(testing::rel_error(s.grad_x, testing::fd_gradient(fx, x)), 1e-4);
  EXPECT_LT(testing::rel_error(s.hess_xx, testing::fd_hessian(fx, x)), 1e-4);
}

TEST(CostApproxTest, ControlHessianIsClamped) {
  PusherParams params;
  params.action_penalty = 0.0;
  const auto env = make_pusher_env({}, params);
  const QuadCostApprox approx =
      expand_cost(*env, point_batch(env->reset(), Eigen::Vector2d::Zero(), 2), 1e-3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(approx.steps[0].hess_uu);
  EXPECT_NEAR(es.eigenvalues().minCoeff(), 1e-3, 1e-15);
}

TEST(CostApproxTest, ResidualLargerNearContact) {
  PusherCondition near, far;
  near.gripper << 0.0, 0.0;
  near.block << 0.15, 0.0;
  far.gripper << 0.0, 0.0;
  far.block << 3.0, 3.0;
  far.goal << 3.0, 3.0;
  auto max_residual = [&](const PusherCondition& c) {
    const auto env = make_pusher_env(c);
    const TvlgPolicy p =
        TvlgPolicy::zero(env->horizon(), env->state_dim(), env->action_dim(), 1.0);
    const RolloutBatch batch = sample_rollouts(p, *env, 20, 8);
    return residual_costs(*env, batch, expand_cost(*env, batch)).cwiseAbs().maxCoeff();
  };
  EXPECT_GT(max_residual(near), max_residual(far));
}

class NanCostEnv final : public Environment {
 public:
  std::string name() const override { return "nan"; }
  Index state_dim() const override { return 1; }
  Index action_dim() const override { return 1; }
  Index horizon() const override { return 4; }
  double dt() const override { return 1.0; }
  Eigen::VectorXd reset() const override { return Eigen::VectorXd::Zero(1); }
  Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd&, Index) const override {
    return x;
  }
  double cost(const Eigen::VectorXd&, const Eigen::VectorXd&, Index) const override {
    return 0.0;
  }
  CostExpansion cost_expansion(const Eigen::VectorXd&, const Eigen::VectorXd&,
                               Index t) const override {
    CostExpansion e;
    e.lx = Eigen::VectorXd::Zero(1);
    e.lu = Eigen::VectorXd::Zero(1);
    e.lxx = Eigen::MatrixXd::Zero(1, 1);
    e.luu = Eigen::MatrixXd::Identity(1, 1);
    e.lxu = Eigen::MatrixXd::Zero(1, 1);
    if (t == 2) e.lx(0) = std::numeric_limits<double>::quiet_NaN();
    return e;
  }
};

TEST(CostApproxTest, NonFiniteDerivativesNameTimestep) {
  const NanCostEnv env;
  const RolloutBatch batch = sample_rollouts(TvlgPolicy::zero(4, 1, 1, 1.0), env, 2, 0);
  try {
    expand_cost(env, batch);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.timestep(), 2);
  }
}

}  // namespace
}  // namespace pilqr

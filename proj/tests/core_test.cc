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

#include <Eigen/Cholesky>
#include <gtest/gtest.h>

#include "pilqr/envs/lq_env.h"
#include "pilqr/kl.h"
#include "pilqr/pi2.h"
#include "pilqr/rng.h"
#include "pilqr/sampling.h"
#include "test_util.h"

namespace pilqr {
namespace {

using testing::Rng;

// x_{t+1} = x_t, zero cost.
class StaticEnv final : public Environment {
 public:
  StaticEnv(Index nx, Index nu, Index T) : nx_(nx), nu_(nu), T_(T) {}
  std::string name() const override { return "static"; }
  Index state_dim() const override { return nx_; }
  Index action_dim() const override { return nu_; }
  Index horizon() const override { return T_; }
  double dt() const override { return 1.0; }
  Eigen::VectorXd reset() const override { return Eigen::VectorXd::LinSpaced(nx_, 0.5, 1.5); }
  Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd&, Index) const override {
    return x;
  }
  double cost(const Eigen::VectorXd&, const Eigen::VectorXd& u, Index) const override {
    return u.squaredNorm();
  }
  CostExpansion cost_expansion(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                               Index t) const override {
    CostExpansion e;
    e.value = cost(x, u, t);
    e.lx = Eigen::VectorXd::Zero(nx_);
    e.lu = 2.0 * u;
    e.lxx = Eigen::MatrixXd::Zero(nx_, nx_);
    e.luu = 2.0 * Eigen::MatrixXd::Identity(nu_, nu_);
    e.lxu = Eigen::MatrixXd::Zero(nx_, nu_);
    return e;
  }

 private:
  Index nx_, nu_, T_;
};

// Multiplies the state by 10 each step; overflows after a few hundred steps.
class ExplodingEnv final : public Environment {
 public:
  std::string name() const override { return "exploding"; }
  Index state_dim() const override { return 1; }
  Index action_dim() const override { return 1; }
  Index horizon() const override { return 400; }
  double dt() const override { return 1.0; }
  Eigen::VectorXd reset() const override { return Eigen::VectorXd::Ones(1); }
  Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd&, Index) const override {
    return 1e10 * x;
  }
  double cost(const Eigen::VectorXd&, const Eigen::VectorXd&, Index) const override {
    return 0.0;
  }
  CostExpansion cost_expansion(const Eigen::VectorXd&, const Eigen::VectorXd&,
                               Index) const override {
    return {};
  }
};

TEST(TvlgPolicyTest, ZeroPolicyValidates) {
  const TvlgPolicy p = TvlgPolicy::zero(5, 3, 2, 0.5);
  EXPECT_EQ(p.horizon(), 5);
  EXPECT_EQ(p.state_dim(), 3);
  EXPECT_EQ(p.action_dim(), 2);
  EXPECT_NO_THROW(p.validate());
  EXPECT_TRUE(p.covariances[2].isApprox(0.5 * Eigen::MatrixXd::Identity(2, 2)));
}

TEST(TvlgPolicyTest, RejectsRaggedAndIndefinite) {
  TvlgPolicy p = TvlgPolicy::zero(3, 2, 1, 1.0);
  p.gains[1] = Eigen::MatrixXd::Zero(1, 3);
  EXPECT_THROW(p.validate(), ConfigurationError);
  p = TvlgPolicy::zero(3, 2, 1, 1.0);
  p.offsets.pop_back();
  EXPECT_THROW(p.validate(), ConfigurationError);
  p = TvlgPolicy::zero(3, 2, 2, 1.0);
  p.covariances[2] << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(p.validate(), NumericalError);
}

TEST(TvlgPolicyTest, CholeskyIsLowerTriangular) {
  Rng rng(3);
  const TvlgPolicy p = testing::random_policy(rng, 2, 3, 3);
  const Eigen::MatrixXd L = p.cholesky(1);
  EXPECT_TRUE(L.isLowerTriangular());
  EXPECT_TRUE((L * L.transpose()).isApprox(p.covariances[1], 1e-12));
}

TEST(TvlgPolicyTest, FloorCovariances) {
  TvlgPolicy p = TvlgPolicy::zero(2, 1, 2, 1e-9);
  p.floor_covariances(1e-3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.covariances[0]);
  EXPECT_NEAR(es.eigenvalues().minCoeff(), 1e-3, 1e-15);
}

TEST(SamplingTest, ZeroGainIdentityActionsEqualNoise) {
  const StaticEnv env(2, 2, 8);
  const TvlgPolicy p = TvlgPolicy::zero(8, 2, 2, 1.0);
  const RolloutBatch batch = sample_rollouts(p, env, 4, 17);
  ASSERT_EQ(batch.size(), 4);
  for (const Rollout& r : batch.rollouts) {
    for (Index t = 0; t < 8; ++t) {
      EXPECT_EQ(r.actions[t], r.noise[t]);
      EXPECT_EQ(r.states[t], env.reset());
    }
  }
}

TEST(SamplingTest, SameSeedIsBitwiseIdentical) {
  Rng rng(5);
  LqProblem prob = testing::random_lq_problem(rng, 20, 3, 2);
  prob.noise_scale = 0.1;
  const auto env = make_lq_env(prob);
  const TvlgPolicy p = testing::random_policy(rng, 20, 3, 2);
  const RolloutBatch a = sample_rollouts(p, *env, 6, 99, 3);
  const RolloutBatch b = sample_rollouts(p, *env, 6, 99, 3);
  EXPECT_EQ(a.condition_id, 3);
  EXPECT_EQ(a.rng_seed, 99u);
  for (Index i = 0; i < 6; ++i) {
    for (Index t = 0; t < 20; ++t) {
      EXPECT_EQ(a.rollouts[i].states[t], b.rollouts[i].states[t]);
      EXPECT_EQ(a.rollouts[i].actions[t], b.rollouts[i].actions[t]);
      EXPECT_EQ(a.rollouts[i].noise[t], b.rollouts[i].noise[t]);
    }
    EXPECT_EQ(a.rollouts[i].costs, b.rollouts[i].costs);
  }
  const RolloutBatch c = sample_rollouts(p, *env, 6, 100);
  EXPECT_NE(a.rollouts[0].noise[0], c.rollouts[0].noise[0]);
}

TEST(SamplingTest, StoredNoiseReproducesActions) {
  Rng rng(6);
  const auto env = make_lq_env(testing::random_lq_problem(rng, 15, 4, 2));
  const TvlgPolicy p = testing::random_policy(rng, 15, 4, 2);
  const RolloutBatch batch = sample_rollouts(p, *env, 5, 1);
  for (const Rollout& r : batch.rollouts) {
    for (Index t = 0; t < 15; ++t) {
      const Eigen::VectorXd u = p.mean(t, r.states[t]) + p.cholesky(t) * r.noise[t];
      EXPECT_LT((u - r.actions[t]).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(SamplingTest, ActionNoiseHasZeroMean) {
  Rng rng(7);
  const auto env = make_lq_env(testing::random_lq_problem(rng, 10, 3, 2));
  const TvlgPolicy p = testing::random_policy(rng, 10, 3, 2);
  const Index n = 500;
  const RolloutBatch batch = sample_rollouts(p, *env, n, 2024);
  for (Index t = 0; t < 10; ++t) {
    Eigen::MatrixXd dev(2, n);
    for (Index i = 0; i < n; ++i) {
      dev.col(i) = batch.rollouts[i].actions[t] - p.mean(t, batch.rollouts[i].states[t]);
    }
    const Eigen::VectorXd mean = dev.rowwise().mean();
    for (Index d = 0; d < 2; ++d) {
      const double stderr_d = std::sqrt(p.covariances[t](d, d) / static_cast<double>(n));
      EXPECT_LT(std::abs(mean(d)), 5.0 * stderr_d) << "t=" << t << " d=" << d;
    }
  }
}

TEST(SamplingTest, DimensionMismatchIsConfigurationError) {
  const StaticEnv env(2, 2, 8);
  EXPECT_THROW(sample_rollouts(TvlgPolicy::zero(8, 3, 2, 1.0), env, 2, 0), ConfigurationError);
  EXPECT_THROW(sample_rollouts(TvlgPolicy::zero(7, 2, 2, 1.0), env, 2, 0), ConfigurationError);
  EXPECT_THROW(sample_rollouts(TvlgPolicy::zero(8, 2, 2, 1.0), env, 0, 0), ConfigurationError);
}

TEST(SamplingTest, DivergenceNamesTimestep) {
  const ExplodingEnv env;
  try {
    sample_rollouts(TvlgPolicy::zero(400, 1, 1, 1.0), env, 2, 0);
    FAIL() << "expected RolloutDivergenceError";
  } catch (const RolloutDivergenceError& e) {
    // 1e10^31 overflows double.
    EXPECT_EQ(e.timestep(), 31);
  }
}

TEST(SamplingTest, CostToGoNonincreasingForNonnegativeCosts) {
  Rng rng(8);
  const auto env = make_lq_env(testing::random_lq_problem(rng, 25, 2, 2));
  ASSERT_TRUE(env->nonnegative_costs());
  const RolloutBatch batch = sample_rollouts(testing::random_policy(rng, 25, 2, 2), *env, 10, 4);
  const Eigen::MatrixXd S = cost_to_go(batch);
  for (Index i = 0; i < S.rows(); ++i) {
    for (Index t = 0; t + 1 < S.cols(); ++t) EXPECT_GE(S(i, t), S(i, t + 1));
  }
}

TEST(SamplingTest, MeanRolloutIsNoiseFree) {
  Rng rng(9);
  const LqProblem prob = testing::random_lq_problem(rng, 10, 2, 1);
  const auto env = make_lq_env(prob);
  const TvlgPolicy p = testing::random_policy(rng, 10, 2, 1);
  const Rollout r = mean_rollout(p, *env);
  Eigen::VectorXd x = prob.x0;
  for (Index t = 0; t < 10; ++t) {
    EXPECT_TRUE(r.states[t].isApprox(x, 1e-14));
    const Eigen::VectorXd u = p.mean(t, x);
    x = prob.A[t] * x + prob.B[t] * u;
  }
}

TEST(RngTest, DerivedSeedsDependOnTagsAndOrder) {
  EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(2, {2, 3}));
  EXPECT_NE(derive_seed(1, {0}), derive_seed(1, {}));
}

TEST(KlTest, IdenticalPoliciesHaveZeroKl) {
  Rng rng(10);
  const TvlgPolicy p = testing::random_policy(rng, 3, 3, 2);
  const Eigen::MatrixXd states = rng.matrix(3, 20);
  for (Index t = 0; t < 3; ++t) EXPECT_NEAR(conditional_kl(p, p, states, t), 0.0, 1e-12);
}

TEST(KlTest, MeanShiftIsHalfSquaredNorm) {
  Rng rng(11);
  TvlgPolicy a = TvlgPolicy::zero(1, 3, 2, 1.0);
  a.gains[0] = rng.matrix(2, 3);
  TvlgPolicy b = a;
  const Eigen::VectorXd delta = rng.vector(2);
  b.offsets[0] += delta;
  for (int trial = 0; trial < 3; ++trial) {
    const Eigen::MatrixXd states = rng.matrix(3, 7, 3.0);
    EXPECT_NEAR(conditional_kl(b, a, states, 0), 0.5 * delta.squaredNorm(), 1e-12);
  }
}

TEST(KlTest, MatchesMonteCarloEstimate) {
  Rng rng(12);
  const Eigen::VectorXd mp = rng.vector(2), mq = rng.vector(2);
  const Eigen::MatrixXd Sp = rng.spd(2, 0.5, 1.5), Sq = rng.spd(2, 0.5, 1.5);
  const double exact = gaussian_kl(mp, Sp, mq, Sq);

  // KL(p||q) = E_p[log p(x) - log q(x)].
  const Eigen::LLT<Eigen::MatrixXd> lp(Sp), lq(Sq);
  const Eigen::MatrixXd Lp = lp.matrixL();
  const double logdet_p = 2.0 * Lp.diagonal().array().log().sum();
  const Eigen::MatrixXd Lq = lq.matrixL();
  const double logdet_q = 2.0 * Lq.diagonal().array().log().sum();
  const int n = 1000000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d z(rng.normal(), rng.normal());
    const Eigen::VectorXd x = mp + Lp * z;
    const Eigen::VectorXd dq = lq.matrixL().solve(x - mq);
    sum += 0.5 * (dq.squaredNorm() - z.squaredNorm()) + 0.5 * (logdet_q - logdet_p);
  }
  const double mc = sum / n;
  EXPECT_NEAR(mc, exact, 0.01 * exact);
}

TEST(KlTest, NonnegativeOnRandomInstances) {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const TvlgPolicy a = testing::random_policy(rng, 1, 3, 2);
    const TvlgPolicy b = testing::random_policy(rng, 1, 3, 2);
    EXPECT_GE(conditional_kl(a, b, rng.matrix(3, 5), 0), 0.0);
  }
}

TEST(KlTest, SingularReferenceCovarianceNamesTimestep) {
  TvlgPolicy a = TvlgPolicy::zero(4, 1, 2, 1.0);
  TvlgPolicy b = a;
  b.covariances[2] << 1.0, 1.0, 1.0, 1.0;
  try {
    conditional_kl(a, b, Eigen::MatrixXd::Ones(1, 3), 2);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.timestep(), 2);
  }
}

}  // namespace
}  // namespace pilqr

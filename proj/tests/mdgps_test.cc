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

#include <gtest/gtest.h>

#include "pilqr/envs/reacher_env.h"
#include "pilqr/mdgps.h"
#include "pilqr/pilqr.h"
#include "pilqr/rng.h"
#include "test_util.h"

namespace pilqr {
namespace {

using testing::Rng;

GlobalPolicy random_affine(Rng& rng, Index nx, Index nu) {
  GlobalPolicy p = GlobalPolicy::affine(nx, nu);
  p.set_parameters(rng.vector(p.parameter_count()));
  return p;
}

GlobalPolicy random_mlp(Rng& rng, Index nx, Index nu, Index hidden) {
  GlobalPolicy p = GlobalPolicy::mlp(nx, nu, hidden, 5);
  p.set_parameters(rng.vector(p.parameter_count(), 0.5));
  p.set_normalization(rng.vector(nx), rng.vector(nx).cwiseAbs().array() + 0.5);
  return p;
}

TEST(GlobalPolicyTest, JacobianMatchesFiniteDifferences) {
  Rng rng(1);
  for (const GlobalPolicy& p : {random_affine(rng, 4, 2), random_mlp(rng, 4, 2, 8)}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::VectorXd x = rng.vector(4);
      Eigen::MatrixXd fd(2, 4);
      for (Index j = 0; j < 4; ++j) {
        Eigen::VectorXd a = x, b = x;
        a(j) += 1e-6;
        b(j) -= 1e-6;
        fd.col(j) = (p.mean(a) - p.mean(b)) / 2e-6;
      }
      EXPECT_LT(testing::rel_error(p.jacobian(x), fd), 1e-6);
    }
  }
}

TEST(GlobalPolicyTest, LossGradientMatchesFiniteDifferences) {
  Rng rng(2);
  const Eigen::MatrixXd X = rng.matrix(3, 12), U = rng.matrix(2, 12);
  std::vector<Eigen::MatrixXd> P;
  for (int i = 0; i < 12; ++i) P.push_back(rng.spd(2));
  const Eigen::VectorXd w = rng.vector(12).cwiseAbs();
  for (GlobalPolicy p : {random_affine(rng, 3, 2), random_mlp(rng, 3, 2, 6)}) {
    Eigen::VectorXd grad;
    p.loss(X, U, P, w, &grad);
    const Eigen::VectorXd theta = p.parameters();
    auto f = [&](const Eigen::VectorXd& v) {
      GlobalPolicy q = p;
      q.set_parameters(v);
      return q.loss(X, U, P, w, nullptr);
    };
    EXPECT_LT(testing::rel_error(grad, testing::fd_gradient(f, theta, 1e-6)), 1e-6);
  }
}

TEST(GlobalPolicyTest, JsonRoundTrip) {
  Rng rng(3);
  const GlobalPolicy p = random_mlp(rng, 3, 2, 4);
  const GlobalPolicy q = GlobalPolicy::from_json(p.to_json());
  const Eigen::VectorXd x = rng.vector(3);
  EXPECT_EQ(p.mean(x), q.mean(x));
  EXPECT_EQ(q.architecture(), GlobalArchitecture::kMlp);
}

TEST(LinearizeTest, AffinePolicyIsRecoveredExactly) {
  Rng rng(4);
  const GlobalPolicy p = random_affine(rng, 4, 2);
  const Eigen::MatrixXd states = rng.matrix(4, 20);
  const ReferenceStep step = linearize_global(p, states, Eigen::MatrixXd::Identity(2, 2));
  const Eigen::MatrixXd test = rng.matrix(4, 5, 3.0);
  const Eigen::MatrixXd pred = (step.gain * test).colwise() + step.offset;
  EXPECT_LT((pred - p.mean(test)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(LinearizeTest, ConstantPolicy) {
  Rng rng(5);
  GlobalPolicy p = GlobalPolicy::affine(3, 2);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p.parameter_count());
  theta.tail(2) << 0.7, -1.3;
  p.set_parameters(theta);
  const ReferenceStep step = linearize_global(p, rng.matrix(3, 10), Eigen::MatrixXd::Identity(2, 2));
  EXPECT_LT(step.gain.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((step.offset - Eigen::Vector2d(0.7, -1.3)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(LinearizeTest, MlpErrorShrinksWithStateSpread) {
  Rng rng(6);
  const GlobalPolicy p = random_mlp(rng, 3, 2, 16);
  const Eigen::VectorXd center = rng.vector(3);
  double last = std::numeric_limits<double>::infinity();
  for (double spread : {1e-1, 1e-2, 1e-3}) {
    const Eigen::MatrixXd states = (rng.matrix(3, 30, spread)).colwise() + center;
    const ReferenceStep step = linearize_global(p, states, Eigen::MatrixXd::Identity(2, 2));
    const Eigen::MatrixXd pred = (step.gain * states).colwise() + step.offset;
    const double err = (pred - p.mean(states)).cwiseAbs().maxCoeff();
    // Piecewise-linear net: error is at most first order in the spread and
    // vanishes once no unit switches inside the cloud.
    EXPECT_LE(err, std::max(1e-12, 10.0 * spread * p.jacobian(center).norm()));
    EXPECT_LE(err, last + 1e-12);
    last = err;
  }
}

TEST(FitGlobalTest, RecoversRealizableAffineTarget) {
  Rng rng(7);
  const Eigen::MatrixXd K = rng.matrix(2, 3);
  const Eigen::VectorXd k = rng.vector(2);
  TrainingSet data;
  const Eigen::MatrixXd X = rng.matrix(3, 40);
  data.append(X, (K * X).colwise() + k, Eigen::MatrixXd::Identity(2, 2));
  GlobalPolicy p = GlobalPolicy::affine(3, 2);
  FitOptions o;
  o.epochs = 3000;
  const FitResult r = fit_global(p, data, o);
  for (size_t i = 1; i < r.losses.size(); ++i) EXPECT_LE(r.losses[i], r.losses[i - 1]);
  const Eigen::MatrixXd test = rng.matrix(3, 5);
  const Eigen::MatrixXd expected = (K * test).colwise() + k;
  EXPECT_LT((p.mean(test) - expected).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(FitGlobalTest, ZeroWeightSamplesAreIgnored) {
  Rng rng(8);
  const Eigen::MatrixXd X = rng.matrix(3, 20), U = rng.matrix(2, 20);
  TrainingSet clean, noisy;
  clean.append(X, U, Eigen::MatrixXd::Identity(2, 2));
  noisy.append(X, U, Eigen::MatrixXd::Identity(2, 2));
  noisy.append(rng.matrix(3, 10, 100.0), rng.matrix(2, 10, 100.0),
               Eigen::MatrixXd::Identity(2, 2), 0.0);
  GlobalPolicy a = GlobalPolicy::mlp(3, 2, 8, 1), b = a;
  fit_global(a, clean);
  fit_global(b, noisy);
  EXPECT_EQ(a.parameters(), b.parameters());
}

TEST(FitGlobalTest, ConflictingTargetsGivePrecisionWeightedAverage) {
  Rng rng(9);
  const Eigen::MatrixXd X = rng.matrix(3, 30);
  const Eigen::MatrixXd U1 = (rng.matrix(2, 3) * X).colwise() + rng.vector(2);
  const Eigen::MatrixXd U2 = (rng.matrix(2, 3) * X).colwise() + rng.vector(2);
  TrainingSet data;
  data.append(X, U1, 3.0 * Eigen::MatrixXd::Identity(2, 2));
  data.append(X, U2, 1.0 * Eigen::MatrixXd::Identity(2, 2));
  GlobalPolicy p = GlobalPolicy::affine(3, 2);
  FitOptions o;
  o.epochs = 3000;
  fit_global(p, data, o);
  const Eigen::MatrixXd expected = 0.75 * U1 + 0.25 * U2;
  EXPECT_LT((p.mean(X) - expected).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(FitGlobalTest, RejectsAllZeroWeights) {
  TrainingSet data;
  data.append(Eigen::MatrixXd::Ones(2, 3), Eigen::MatrixXd::Ones(1, 3),
              Eigen::MatrixXd::Identity(1, 1), 0.0);
  GlobalPolicy p = GlobalPolicy::affine(2, 1);
  EXPECT_THROW(fit_global(p, data), ConfigurationError);
}

std::vector<EnvironmentPtr> reacher_envs(int count, Index horizon) {
  ReacherParams params;
  params.horizon = horizon;
  std::vector<EnvironmentPtr> envs;
  for (int c = 0; c < count; ++c) {
    ReacherCondition cond;
    cond.target << 1.0 + 0.2 * c, 0.8 - 0.1 * c;
    envs.push_back(make_reacher_env(cond, params));
  }
  return envs;
}

TEST(MdgpsTest, FirstIterationMatchesPlainPilqr) {
  const auto envs = reacher_envs(1, 30);
  MdgpsOptions options;
  options.local.episodes = 8;
  options.fit.epochs = 20;
  MdgpsState state;
  state.locals.push_back(LocalState::initial(TvlgPolicy::zero(30, 6, 2, 1.0), options.local.eps));
  state.global = GlobalPolicy::affine(6, 2);
  const MdgpsIterationResult r = mdgps_iteration(envs, state, options, 42);
  const LocalIterationResult plain =
      pilqr_iteration(*envs[0], state.locals[0], options.local, derive_seed(42, {0}));
  for (Index t = 0; t < 30; ++t) {
    EXPECT_EQ(r.state.locals[0].policy.gains[t], plain.state.policy.gains[t]);
    EXPECT_EQ(r.state.locals[0].policy.offsets[t], plain.state.policy.offsets[t]);
  }
  EXPECT_TRUE(r.state.global_trained);
}

TEST(MdgpsTest, DeterministicUnderSeed) {
  const auto envs = reacher_envs(2, 20);
  MdgpsOptions options;
  options.local.episodes = 5;
  options.fit.epochs = 30;
  MdgpsState state;
  for (int c = 0; c < 2; ++c) {
    state.locals.push_back(
        LocalState::initial(TvlgPolicy::zero(20, 6, 2, 1.0), options.local.eps));
  }
  state.global = GlobalPolicy::mlp(6, 2, 8, 3);
  MdgpsState a = state, b = state;
  for (int k = 0; k < 2; ++k) {
    a = mdgps_iteration(envs, a, options, derive_seed(7, {static_cast<std::uint64_t>(k)})).state;
    b = mdgps_iteration(envs, b, options, derive_seed(7, {static_cast<std::uint64_t>(k)})).state;
  }
  EXPECT_EQ(a.global.parameters(), b.global.parameters());
  EXPECT_EQ(a.locals[1].policy.offsets[5], b.locals[1].policy.offsets[5]);
}

TEST(MdgpsTest, RejectsMismatchedConditions) {
  const auto envs = reacher_envs(2, 10);
  MdgpsState state;
  state.locals.push_back(LocalState::initial(TvlgPolicy::zero(10, 6, 2, 1.0), EpsSchedule{}));
  state.global = GlobalPolicy::affine(6, 2);
  EXPECT_THROW(mdgps_iteration(envs, state, {}, 1), ConfigurationError);
}

}  // namespace
}  // namespace pilqr

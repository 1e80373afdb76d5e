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


// OpenMP kernels against their serial references on pusher-sized batches.
// Run with OMP_NUM_THREADS set to compare thread counts.

#include <benchmark/benchmark.h>

#include <memory>

#include <Eigen/Core>

#include "pilqr/cost_approx.h"
#include "pilqr/dynamics_fit.h"
#include "pilqr/envs/pusher_env.h"
#include "pilqr/harness/experiment.h"
#include "pilqr/pi2.h"
#include "pilqr/pilqr.h"
#include "pilqr/reference.h"
#include "pilqr/sampling.h"

namespace pilqr {
namespace {

struct Fixture {
  std::shared_ptr<const Environment> env = make_pusher_env({});
  TvlgPolicy policy = initial_policy(*env, 1.0);
  RolloutBatch batch;
  FittedDynamics dyn;
  QuadCostApprox cost;

  explicit Fixture(Index n) {
    batch = sample_rollouts(policy, *env, n, 11);
    dyn = fit_dynamics(batch);
    cost = expand_cost(*env, batch);
  }
};

void BM_Sample(benchmark::State& state) {
  Fixture f(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_rollouts(f.policy, *f.env, state.range(0), 3));
  }
}
void BM_SampleSerial(benchmark::State& state) {
  Fixture f(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::sample_rollouts(f.policy, *f.env, state.range(0), 3));
  }
}

void BM_FitDynamics(benchmark::State& state) {
  Fixture f(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fit_dynamics(f.batch));
}
void BM_FitDynamicsSerial(benchmark::State& state) {
  Fixture f(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(reference::fit_dynamics(f.batch));
}

void BM_EvalShat(benchmark::State& state) {
  Fixture f(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(eval_shat(f.batch, f.dyn, f.cost, f.policy));
}
void BM_EvalShatSerial(benchmark::State& state) {
  Fixture f(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::eval_shat(f.batch, f.dyn, f.cost, f.policy));
  }
}

void BM_Pi2Weights(benchmark::State& state) {
  const Eigen::MatrixXd S = cost_to_go(Fixture(state.range(0)).batch);
  const Eigen::VectorXd eps = Eigen::VectorXd::Constant(S.cols(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(compute_pi2_weights(S, eps));
}
void BM_Pi2WeightsSerial(benchmark::State& state) {
  const Eigen::MatrixXd S = cost_to_go(Fixture(state.range(0)).batch);
  const Eigen::VectorXd eps = Eigen::VectorXd::Constant(S.cols(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(reference::compute_pi2_weights(S, eps));
}

BENCHMARK(BM_Sample)->Arg(20)->Arg(200);
BENCHMARK(BM_SampleSerial)->Arg(20)->Arg(200);
BENCHMARK(BM_FitDynamics)->Arg(20)->Arg(200);
BENCHMARK(BM_FitDynamicsSerial)->Arg(20)->Arg(200);
BENCHMARK(BM_EvalShat)->Arg(20)->Arg(200);
BENCHMARK(BM_EvalShatSerial)->Arg(20)->Arg(200);
BENCHMARK(BM_Pi2Weights)->Arg(20)->Arg(200);
BENCHMARK(BM_Pi2WeightsSerial)->Arg(20)->Arg(200);

}  // namespace
}  // namespace pilqr

BENCHMARK_MAIN();

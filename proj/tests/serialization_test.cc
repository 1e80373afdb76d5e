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

#include <limits>

#include <gtest/gtest.h>

#include "pilqr/envs/reacher_env.h"
#include "pilqr/sampling.h"
#include "pilqr/serialization.h"
#include "test_util.h"

namespace pilqr {
namespace {

using testing::Rng;

TEST(PolicyJsonTest, RoundTripIsBitwise) {
  Rng rng(1);
  const TvlgPolicy p = testing::random_policy(rng, 7, 3, 2);
  const TvlgPolicy q = policy_from_json(json_util::Json::parse(to_json(p).dump()));
  for (Index t = 0; t < 7; ++t) {
    EXPECT_EQ(p.gains[t], q.gains[t]);
    EXPECT_EQ(p.offsets[t], q.offsets[t]);
    EXPECT_EQ(p.covariances[t], q.covariances[t]);
  }
}

TEST(PolicyJsonTest, RejectsMalformed) {
  auto j = to_json(TvlgPolicy::zero(2, 2, 1, 1.0));
  j["gains"][1] = json_util::Json::array({json_util::Json::array({1.0})});
  EXPECT_THROW(policy_from_json(j), ConfigurationError);
  auto extra = to_json(TvlgPolicy::zero(2, 2, 1, 1.0));
  extra["K"] = 1;
  EXPECT_THROW(policy_from_json(extra), ConfigurationError);
}

TEST(BatchJsonTest, RoundTripIsBitwise) {
  Rng rng(2);
  const auto env = make_reacher_env({});
  const RolloutBatch b = sample_rollouts(testing::random_policy(rng, 100, 6, 2), *env, 3, 99, 2);
  const RolloutBatch c = batch_from_json(json_util::Json::parse(to_json(b).dump()));
  EXPECT_EQ(c.condition_id, 2);
  EXPECT_EQ(c.rng_seed, 99u);
  ASSERT_EQ(c.size(), 3);
  for (Index i = 0; i < 3; ++i) {
    EXPECT_EQ(b.rollouts[i].costs, c.rollouts[i].costs);
    for (Index t = 0; t < 100; ++t) {
      EXPECT_EQ(b.rollouts[i].states[t], c.rollouts[i].states[t]);
      EXPECT_EQ(b.rollouts[i].actions[t], c.rollouts[i].actions[t]);
      EXPECT_EQ(b.rollouts[i].noise[t], c.rollouts[i].noise[t]);
    }
  }
}

TEST(TrajectoryCsvTest, RoundTripIsBitwise) {
  Rng rng(3);
  const auto env = make_reacher_env({});
  const Rollout r = sample_rollouts(testing::random_policy(rng, 100, 6, 2), *env, 1, 4).rollouts[0];
  const std::string text = trajectory_csv(r);
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,x0,x1,x2,x3,x4,x5,u0,u1,cost");
  const Rollout back = rollout_from_csv(text, 6, 2);
  for (Index t = 0; t < 100; ++t) {
    EXPECT_EQ(back.states[t], r.states[t]);
    EXPECT_EQ(back.actions[t], r.actions[t]);
  }
  EXPECT_EQ(back.costs, r.costs);
  EXPECT_THROW(rollout_from_csv(text, 5, 2), ConfigurationError);
}

TEST(IterationCsvTest, HeaderAndCumulativeEpisodes) {
  std::vector<IterationReport> reports(3);
  for (int k = 0; k < 3; ++k) {
    reports[k].iteration = k + 1;
    reports[k].episodes = 20;
    reports[k].mean_cost = 1.0 / (k + 3);
  }
  const auto rows = iteration_rows(reports);
  EXPECT_EQ(rows[2].episodes_cumulative, 60);
  const std::string text = iteration_csv(rows);
  EXPECT_EQ(text.substr(0, text.find('\n')), kIterationCsvHeader);
  const auto back = parse_iteration_csv(text);
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[1].mean_cost, rows[1].mean_cost);
  EXPECT_EQ(iteration_csv(back), text);
}

TEST(IterationCsvTest, RejectsWrongHeader) {
  EXPECT_THROW(parse_iteration_csv("iteration,cost\n1,2\n"), ConfigurationError);
}

TEST(FormatDoubleTest, ShortestExactRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.0}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

}  // namespace
}  // namespace pilqr

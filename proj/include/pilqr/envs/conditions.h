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

#ifndef PILQR_ENVS_CONDITIONS_H_
#define PILQR_ENVS_CONDITIONS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "pilqr/envs/environment.h"
#include "pilqr/envs/pusher_env.h"
#include "pilqr/envs/reacher_env.h"
#include "pilqr/json_util.h"

namespace pilqr {

// Environment parameters from a JSON object. Absent keys keep defaults;
// unknown keys are rejected.
ReacherParams parse_reacher_params(const json_util::Json& j);
PusherParams parse_pusher_params(const json_util::Json& j);
json_util::Json to_json(const ReacherParams& params);
json_util::Json to_json(const PusherParams& params);

// Condition files:
//   reacher: {"angles": [q1, q2], "velocities": [v1, v2], "target": [x, y]}
//   pusher:  {"gripper": [x, y], "block": [x, y], "goal": [x, y]}
//   lq:      {"A": [[..]], "B": [[..]], "Q": [[..]], "R": [[..]], "x0": [..],
//             "horizon": T, "noise": s}
// "velocities" and "noise" are optional.
ReacherCondition parse_reacher_condition(const json_util::Json& j);
PusherCondition parse_pusher_condition(const json_util::Json& j);
json_util::Json to_json(const ReacherCondition& condition);
json_util::Json to_json(const PusherCondition& condition);

// Builds the named environment ("lq", "reacher", "pusher") for one
// condition. `params` may be null for defaults; it must be null for "lq".
EnvironmentPtr make_environment(const std::string& name, const json_util::Json& params,
                                const json_util::Json& condition);

// Random reacher conditions: joint angles uniform in [-pi, pi], zero
// velocities, target uniform on the reachable annulus.
std::vector<ReacherCondition> random_reacher_conditions(int count, std::uint64_t seed,
                                                        const ReacherParams& params = {});

}  // namespace pilqr

#endif  // PILQR_ENVS_CONDITIONS_H_

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

#ifndef PILQR_LOCAL_UPDATE_H_
#define PILQR_LOCAL_UPDATE_H_

#include <cstdint>
#include <string>

#include "pilqr/envs/environment.h"
#include "pilqr/iteration.h"
#include "pilqr/pilqr.h"

namespace pilqr {

enum class Algorithm { kPi2, kLqrFlm, kPilqr };

const char* to_string(Algorithm algorithm);
// Accepts "pi2", "lqr_flm", "pilqr"; throws ConfigurationError otherwise.
Algorithm parse_algorithm(const std::string& name);

// Model-free iteration: sample, weight the controls by softmax of the
// negative cost-to-go, refit. With `anchor`, the refit shrinks toward the
// anchor's gains and falls back to its covariance.
LocalIterationResult pi2_iteration(const Environment& env, const LocalState& state,
                                   const LocalOptions& options, std::uint64_t seed,
                                   const TvlgPolicy* anchor = nullptr);

// Model-based iteration: sample, fit dynamics, expand cost, KL-constrained
// backward pass with the current eps (not adapted).
LocalIterationResult lqr_flm_iteration(const Environment& env, const LocalState& state,
                                       const LocalOptions& options, std::uint64_t seed,
                                       const TvlgPolicy* anchor = nullptr);

LocalIterationResult local_iteration(Algorithm algorithm, const Environment& env,
                                     const LocalState& state, const LocalOptions& options,
                                     std::uint64_t seed, const TvlgPolicy* anchor = nullptr);

}  // namespace pilqr

#endif  // PILQR_LOCAL_UPDATE_H_

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

#ifndef PILQR_HARNESS_CONFIG_H_
#define PILQR_HARNESS_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pilqr/envs/environment.h"
#include "pilqr/iteration.h"
#include "pilqr/json_util.h"
#include "pilqr/local_update.h"
#include "pilqr/mdgps.h"

namespace pilqr {

struct MdgpsConfig {
  GlobalArchitecture architecture = GlobalArchitecture::kAffine;
  Index hidden = 32;
  FitOptions fit;
  double linearization_ridge = 1e-6;
};

struct EvaluationConfig {
  // Held-out conditions for the global policy; training conditions when
  // both are empty.
  std::vector<json_util::Json> conditions;
  int random_reacher_count = 0;
  std::uint64_t random_reacher_seed = 0;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::string env_name;
  json_util::Json env_params;  // null for defaults
  std::vector<json_util::Json> conditions;
  std::string algorithm = "pilqr";  // pi2 | lqr_flm | pilqr | mdgps
  int iterations = 20;
  Index episodes = 20;
  std::vector<std::uint64_t> seeds{0};
  std::string output_dir = "runs";
  double initial_variance = 1.0;
  LocalOptions local;
  MdgpsConfig mdgps;
  EvaluationConfig evaluation;

  bool is_mdgps() const { return algorithm == "mdgps"; }
  // Local update rule; PILQR for the MDGPS variant.
  Algorithm local_algorithm() const;
  // Every field with defaults filled in and condition files inlined. Parsing
  // the result yields an identical config.
  json_util::Json resolved() const;
};

// Validates and fills an ExperimentConfig. Relative condition paths are
// resolved against `base_dir`. Throws ConfigurationError.
ExperimentConfig parse_config(const json_util::Json& j, const std::filesystem::path& base_dir);

// Reads and parses a config file; errors carry "path:line: " prefixes when
// the offending key can be located in the text.
ExperimentConfig load_config(const std::filesystem::path& path);

std::vector<EnvironmentPtr> build_environments(const ExperimentConfig& config);
std::vector<EnvironmentPtr> build_evaluation_environments(const ExperimentConfig& config);

// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& text);

}  // namespace pilqr

#endif  // PILQR_HARNESS_CONFIG_H_

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

// Command-line experiment runner.
//
//   pilqr run --config PATH --seed INT --out DIR
//   pilqr run --manifest PATH --out DIR
//   pilqr compare --out DIR CFG...
//   pilqr validate --config PATH
//
// PILQR_THREADS caps the OpenMP worker pool.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pilqr/common.h"
#include "pilqr/harness/config.h"
#include "pilqr/harness/experiment.h"

namespace {

void apply_thread_cap() {
  if (const char* env = std::getenv("PILQR_THREADS")) {
    try {
      pilqr::set_max_threads(std::stoi(env));
    } catch (const std::exception&) {
      std::cerr << "ignoring PILQR_THREADS='" << env << "'\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PILQR experiment runner"};
  app.require_subcommand(1);

  std::string config_path, manifest_path, out_dir;
  std::uint64_t seed = 0;
  auto* run = app.add_subcommand("run", "Run one experiment for one seed");
  auto* run_config = run->add_option("--config", config_path, "Experiment config (JSON)");
  auto* run_manifest =
      run->add_option("--manifest", manifest_path, "Re-run from a manifest.json");
  run_config->excludes(run_manifest);
  run->add_option("--seed", seed, "Random seed")->excludes(run_manifest);
  run->add_option("--out", out_dir, "Output directory")->required();

  std::vector<std::string> compare_configs;
  std::string compare_out;
  auto* cmp = app.add_subcommand("compare", "Run configs over their seeds and summarize");
  cmp->add_option("--out", compare_out, "Output directory")->required();
  cmp->add_option("configs", compare_configs, "Experiment configs")->required();

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("--config", validate_path, "Experiment config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pilqr::kExitConfigError;
  }
  apply_thread_cap();

  if (*run) {
    if (!manifest_path.empty()) {
      return pilqr::run_from_manifest(manifest_path, out_dir, std::cerr);
    }
    if (config_path.empty()) {
      std::cerr << "run: one of --config or --manifest is required\n";
      return pilqr::kExitConfigError;
    }
    pilqr::ExperimentConfig config;
    try {
      config = pilqr::load_config(config_path);
    } catch (const pilqr::ConfigurationError& e) {
      std::cerr << "configuration error: " << e.what() << "\n";
      return pilqr::kExitConfigError;
    }
    return pilqr::run_experiment(config, seed, out_dir, std::cerr);
  }
  if (*cmp) {
    std::vector<std::filesystem::path> paths(compare_configs.begin(), compare_configs.end());
    return pilqr::compare(paths, compare_out, std::cerr);
  }
  if (*validate) {
    try {
      const pilqr::ExperimentConfig config = pilqr::load_config(validate_path);
      std::cout << validate_path << ": ok (" << config.env_name << ", " << config.algorithm
                << ", " << config.conditions.size() << " conditions, " << config.iterations
                << " iterations x " << config.episodes << " episodes)\n";
      return pilqr::kExitOk;
    } catch (const pilqr::ConfigurationError& e) {
      std::cerr << "configuration error: " << e.what() << "\n";
      return pilqr::kExitConfigError;
    }
  }
  return pilqr::kExitConfigError;
}

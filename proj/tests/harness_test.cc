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

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "pilqr/harness/config.h"
#include "pilqr/harness/experiment.h"

namespace pilqr {
namespace {

namespace fs = std::filesystem;

const fs::path kConfigDir = PILQR_CONFIG_DIR;

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / "pilqr_harness" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(PILQR_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(ConfigTest, LoadsSmokeConfig) {
  const ExperimentConfig c = load_config(kConfigDir / "lq_smoke.json");
  EXPECT_EQ(c.env_name, "lq");
  EXPECT_EQ(c.iterations, 1);
  EXPECT_EQ(c.episodes, 2);
  EXPECT_EQ(c.conditions.size(), 1u);
  EXPECT_EQ(c.local_algorithm(), Algorithm::kPilqr);
}

TEST(ConfigTest, ResolvedConfigReparsesIdentically) {
  const ExperimentConfig c = load_config(kConfigDir / "pusher_pilqr.json");
  const ExperimentConfig d = parse_config(c.resolved(), kConfigDir);
  EXPECT_EQ(c.resolved().dump(), d.resolved().dump());
}

TEST(ConfigTest, UnknownKeyReportsLine) {
  const fs::path dir = scratch("unknown_key");
  const fs::path p = write_config(dir, R"({
  "env": {"name": "lq", "conditions": [")" + (kConfigDir / "conditions/lq_double_integrator.json").string() + R"("]},
  "algorithm": "pilqr",
  "iteratons": 3
})");
  try {
    load_config(p);
    FAIL() << "expected ConfigurationError";
  } catch (const ConfigurationError& e) {
    EXPECT_NE(std::string(e.what()).find("config.json:4:"), std::string::npos) << e.what();
  }
}

TEST(ConfigTest, RejectsInvalidValues) {
  const fs::path dir = scratch("invalid");
  const std::string cond = (kConfigDir / "conditions/lq_double_integrator.json").string();
  for (const std::string& body :
       {R"("algorithm": "ppo")", R"("episodes": 1)", R"("iterations": 0)"}) {
    const fs::path p = write_config(
        dir, R"({"env": {"name": "lq", "conditions": [")" + cond + R"("]}, )" + body + "}");
    EXPECT_THROW(load_config(p), ConfigurationError) << body;
  }
  const fs::path missing = write_config(dir, R"({"env": {"name": "lq", "conditions": ["nope.json"]}})");
  EXPECT_THROW(load_config(missing), ConfigurationError);
}

TEST(ConfigTest, HashIsFnv1a) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(ExperimentTest, SmokeRunEmitsOneRow) {
  const fs::path out = scratch("smoke");
  std::ostringstream err;
  const auto start = std::chrono::steady_clock::now();
  ASSERT_EQ(run_experiment(load_config(kConfigDir / "lq_smoke.json"), 0, out, err), kExitOk)
      << err.str();
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_LT(seconds, 1.0);
  const auto rows = parse_iteration_csv(read_text(out / "iterations.csv"));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].episodes_cumulative, 2);
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
  EXPECT_TRUE(fs::exists(out / "policies.json"));
  EXPECT_TRUE(fs::exists(out / "evaluation.json"));
}

TEST(ExperimentTest, SameSeedSameBytes) {
  const ExperimentConfig c = load_config(kConfigDir / "lq_smoke.json");
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  std::ostringstream err;
  ASSERT_EQ(run_experiment(c, 5, a, err), kExitOk);
  ASSERT_EQ(run_experiment(c, 5, b, err), kExitOk);
  EXPECT_EQ(read_text(a / "iterations.csv"), read_text(b / "iterations.csv"));
  EXPECT_EQ(read_text(a / "policies.json"), read_text(b / "policies.json"));
}

TEST(ExperimentTest, ManifestReproducesOutputs) {
  ExperimentConfig c = load_config(kConfigDir / "lq_smoke.json");
  c.iterations = 3;
  c.episodes = 6;
  const fs::path a = scratch("manifest_a"), b = scratch("manifest_b");
  std::ostringstream err;
  ASSERT_EQ(run_experiment(c, 17, a, err), kExitOk);
  ASSERT_EQ(run_from_manifest(a / "manifest.json", b, err), kExitOk) << err.str();
  EXPECT_EQ(read_text(a / "iterations.csv"), read_text(b / "iterations.csv"));
  EXPECT_EQ(read_text(a / "policies.json"), read_text(b / "policies.json"));
  EXPECT_EQ(read_text(a / "manifest.json"), read_text(b / "manifest.json"));
}

TEST(ExperimentTest, TamperedManifestIsRejected) {
  const fs::path a = scratch("tamper_a"), b = scratch("tamper_b");
  std::ostringstream err;
  ASSERT_EQ(run_experiment(load_config(kConfigDir / "lq_smoke.json"), 1, a, err), kExitOk);
  auto m = json_util::read_file(a / "manifest.json");
  m["config"]["iterations"] = 2;
  json_util::write_file(a / "manifest.json", m);
  EXPECT_EQ(run_from_manifest(a / "manifest.json", b, err), kExitConfigError);
}

TEST(ExperimentTest, PusherBudgetIs400EpisodesPerCondition) {
  ExperimentConfig c = load_config(kConfigDir / "pusher_pilqr.json");
  ASSERT_EQ(c.iterations, 20);
  ASSERT_EQ(c.episodes, 20);
  const ExperimentOutcome o = execute_experiment(c, 1, std::nullopt);
  const auto rows = iteration_rows(o.reports);
  EXPECT_EQ(rows.back().episodes_cumulative, 400);
  EXPECT_EQ(o.policies.size(), 4u);
}

TEST(ExperimentTest, AggregateAcrossConditions) {
  IterationReport a, b;
  a.iteration = b.iteration = 2;
  a.episodes = b.episodes = 10;
  a.mean_cost = 1.0;
  b.mean_cost = 3.0;
  a.std_cost = b.std_cost = 0.0;
  const IterationReport r = aggregate_reports({a, b});
  EXPECT_EQ(r.episodes, 10);
  EXPECT_DOUBLE_EQ(r.mean_cost, 2.0);
  EXPECT_DOUBLE_EQ(r.std_cost, 1.0);
}

TEST(SummaryTest, SingleRunEqualsItsOwnCsv) {
  std::vector<IterationRow> rows(4);
  for (int k = 0; k < 4; ++k) {
    rows[k].iteration = k + 1;
    rows[k].episodes_cumulative = 5 * (k + 1);
    rows[k].mean_cost = 10.0 - k;
    rows[k].std_cost = 0.5;
  }
  const auto summary = summarize("cfg", "pilqr", {rows});
  ASSERT_EQ(summary.size(), 4u);
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(summary[k].mean.mean_cost, rows[k].mean_cost);
    EXPECT_EQ(summary[k].mean.episodes_cumulative, rows[k].episodes_cumulative);
    EXPECT_EQ(summary[k].mean_cost_std, 0.0);
  }
}

TEST(SummaryTest, MismatchedLengthsAreRejected) {
  std::vector<IterationRow> a(3), b(2);
  EXPECT_THROW(summarize("cfg", "pi2", {a, b}), ConfigurationError);
}

TEST(CompareTest, IdenticalConfigsAgreeWithinSeedSpread) {
  const fs::path dir = scratch("compare");
  const std::string cond = (kConfigDir / "conditions/lq_double_integrator.json").string();
  const std::string body = R"("env": {"name": "lq", "conditions": [")" + cond +
                           R"("]}, "algorithm": "pi2", "iterations": 4, "episodes": 8)";
  std::ofstream(dir / "a.json") << R"({"name": "a", "seeds": [1, 2, 3, 4], )" + body + "}";
  std::ofstream(dir / "b.json") << R"({"name": "b", "seeds": [5, 6, 7, 8], )" + body + "}";
  std::ostringstream err;
  ASSERT_EQ(compare({dir / "a.json", dir / "b.json"}, dir / "out", err), kExitOk) << err.str();
  const std::string summary = read_text(dir / "out" / "summary.csv");
  std::istringstream lines(summary);
  std::string line;
  std::getline(lines, line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(lines, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  ASSERT_EQ(rows.size(), 8u);
  // Column 5 is mean_cost, 6 is mean_cost_std; compare the last iterations.
  const double ma = std::stod(rows[3][5]), sa = std::stod(rows[3][6]);
  const double mb = std::stod(rows[7][5]), sb = std::stod(rows[7][6]);
  EXPECT_LE(std::abs(ma - mb), 2.0 * std::max(sa, sb) + 1e-12);
}

TEST(CliTest, ExitCodes) {
  const fs::path dir = scratch("cli");
  EXPECT_EQ(run_cli("validate --config " + (kConfigDir / "lq_smoke.json").string()), 0);
  const fs::path bad = write_config(dir, R"({"env": {"name": "lq"}, "bogus": 1})");
  EXPECT_EQ(run_cli("validate --config " + bad.string()), 2);
  EXPECT_EQ(run_cli("run --config " + bad.string() + " --seed 0 --out " + (dir / "r").string()), 2);
  // State grows by 1e200 per step and overflows.
  std::ofstream(dir / "blowup.json") << R"({"env": {"name": "lq", "conditions": [{
      "A": [[1e200]], "B": [[1.0]], "Q": [[1.0]], "R": [[1.0]], "x0": [1.0], "horizon": 5}]},
      "iterations": 1, "episodes": 2})";
  EXPECT_EQ(run_cli("run --config " + (dir / "blowup.json").string() + " --seed 0 --out " +
                    (dir / "blow").string()),
            3);
  EXPECT_EQ(run_cli("run --config " + (kConfigDir / "lq_smoke.json").string() +
                    " --seed 0 --out " + (dir / "ok").string()),
            0);
  EXPECT_TRUE(fs::exists(dir / "ok" / "iterations.csv"));
}

}  // namespace
}  // namespace pilqr

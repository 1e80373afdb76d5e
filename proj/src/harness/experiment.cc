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

#include "pilqr/harness/experiment.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <boost/version.hpp>
#include <Eigen/Core>

#include "pilqr/envs/lq_env.h"
#include "pilqr/envs/pusher_env.h"
#include "pilqr/envs/reacher_env.h"
#include "pilqr/local_update.h"
#include "pilqr/rng.h"
#include "pilqr/sampling.h"

#ifndef PILQR_VERSION
#define PILQR_VERSION "unknown"
#endif

namespace pilqr {

using json_util::Json;
namespace fs = std::filesystem;

IterationReport aggregate_reports(const std::vector<IterationReport>& per_condition) {
  if (per_condition.empty()) throw ConfigurationError("aggregate_reports: no reports");
  const double n = static_cast<double>(per_condition.size());
  IterationReport out;
  out.iteration = per_condition.front().iteration;
  out.episodes = per_condition.front().episodes;
  double second_moment = 0.0;
  for (const IterationReport& r : per_condition) {
    out.mean_cost += r.mean_cost / n;
    second_moment += (r.std_cost * r.std_cost + r.mean_cost * r.mean_cost) / n;
    out.residual_ratio += r.residual_ratio / n;
    out.mean_eps += r.mean_eps / n;
    out.mean_eta_lqr += r.mean_eta_lqr / n;
    out.mean_eta_pi2 += r.mean_eta_pi2 / n;
    out.lqr_converged_fraction += r.lqr_converged_fraction / n;
    out.diverged_samples += r.diverged_samples;
  }
  out.std_cost = std::sqrt(std::max(0.0, second_moment - out.mean_cost * out.mean_cost));
  return out;
}

TvlgPolicy initial_policy(const Environment& env, double variance) {
  return TvlgPolicy::zero(env.horizon(), env.state_dim(), env.action_dim(), variance);
}

ConditionEvaluation evaluate_rollout(const Environment& env, const Rollout& rollout) {
  ConditionEvaluation e;
  e.total_cost = rollout.total_cost();
  const Eigen::VectorXd& last = rollout.states.back();
  if (const auto* reacher = dynamic_cast<const ReacherEnvironment*>(&env)) {
    e.final_distance = reacher->target_distance(last);
  } else if (const auto* pusher = dynamic_cast<const PusherEnvironment*>(&env)) {
    e.final_distance = pusher->block_goal_distance(last);
  } else {
    e.final_distance = last.norm();
  }
  return e;
}

namespace {

Json policies_json(const std::vector<TvlgPolicy>& policies) {
  Json list = Json::array();
  for (std::size_t c = 0; c < policies.size(); ++c) {
    list.push_back(Json{{"condition_id", c}, {"policy", to_json(policies[c])}});
  }
  return Json{{"conditions", list}};
}

Json evaluation_json(const std::vector<ConditionEvaluation>& evals) {
  Json list = Json::array();
  for (const ConditionEvaluation& e : evals) {
    list.push_back(Json{{"total_cost", e.total_cost}, {"final_distance", e.final_distance}});
  }
  return list;
}

void write_checkpoint(const fs::path& out, const std::vector<IterationReport>& reports,
                      const std::vector<TvlgPolicy>& policies, const GlobalPolicy* global) {
  json_util::write_text(out / "iterations.csv", iteration_csv(iteration_rows(reports)));
  json_util::write_file(out / "policies.json", policies_json(policies));
  if (global) json_util::write_file(out / "global_policy.json", global->to_json());
}

}  // namespace

ExperimentOutcome execute_experiment(const ExperimentConfig& config, std::uint64_t seed,
                                     const std::optional<fs::path>& out_dir) {
  const std::vector<EnvironmentPtr> envs = build_environments(config);
  const Index C = static_cast<Index>(envs.size());
  LocalOptions options = config.local;
  options.episodes = config.episodes;

  std::vector<LocalState> locals;
  for (const auto& env : envs) {
    locals.push_back(LocalState::initial(initial_policy(*env, config.initial_variance),
                                         options.eps));
  }

  ExperimentOutcome outcome;
  MdgpsState mdgps;
  MdgpsOptions mdgps_options;
  if (config.is_mdgps()) {
    const Environment& env = *envs.front();
    mdgps.global = config.mdgps.architecture == GlobalArchitecture::kAffine
                       ? GlobalPolicy::affine(env.state_dim(), env.action_dim())
                       : GlobalPolicy::mlp(env.state_dim(), env.action_dim(),
                                           config.mdgps.hidden,
                                           derive_seed(seed, {0x474c4fULL}));
    mdgps.locals = locals;
    mdgps_options.local = options;
    mdgps_options.fit = config.mdgps.fit;
    mdgps_options.linearization_ridge = config.mdgps.linearization_ridge;
  }

  const Algorithm algorithm = config.local_algorithm();
  std::vector<TvlgPolicy> policies;
  for (const auto& l : locals) policies.push_back(l.policy);

  for (int k = 0; k < config.iterations; ++k) {
    const std::uint64_t iteration_seed = derive_seed(seed, {static_cast<std::uint64_t>(k)});
    std::vector<IterationReport> per_condition(C);
    if (config.is_mdgps()) {
      MdgpsIterationResult r = mdgps_iteration(envs, mdgps, mdgps_options, iteration_seed);
      mdgps = std::move(r.state);
      per_condition = std::move(r.reports);
      for (Index c = 0; c < C; ++c) policies[c] = mdgps.locals[c].policy;
    } else {
      std::vector<LocalIterationResult> results(C);
      parallel_for(C, [&](Index c) {
        results[c] = local_iteration(algorithm, *envs[c], locals[c], options,
                                     derive_seed(iteration_seed, {static_cast<std::uint64_t>(c)}));
      });
      for (Index c = 0; c < C; ++c) {
        locals[c] = std::move(results[c].state);
        per_condition[c] = results[c].report;
        policies[c] = locals[c].policy;
      }
    }
    IterationReport report = aggregate_reports(per_condition);
    report.iteration = k + 1;
    outcome.reports.push_back(report);
    if (out_dir) {
      write_checkpoint(*out_dir, outcome.reports, policies,
                       config.is_mdgps() ? &mdgps.global : nullptr);
    }
  }

  outcome.policies = policies;
  for (Index c = 0; c < C; ++c) {
    outcome.local_evaluation.push_back(
        evaluate_rollout(*envs[c], mean_rollout(policies[c], *envs[c])));
  }
  if (config.is_mdgps()) {
    outcome.global = mdgps.global;
    std::vector<EnvironmentPtr> eval_envs = build_evaluation_environments(config);
    if (eval_envs.empty()) eval_envs = envs;
    for (const auto& env : eval_envs) {
      outcome.global_evaluation.push_back(
          evaluate_rollout(*env, global_rollout(mdgps.global, *env)));
    }
  }
  if (out_dir) {
    Json eval{{"local", evaluation_json(outcome.local_evaluation)}};
    if (config.is_mdgps()) eval["global"] = evaluation_json(outcome.global_evaluation);
    json_util::write_file(*out_dir / "evaluation.json", eval);
  }
  return outcome;
}

Json make_manifest(const ExperimentConfig& config, std::uint64_t seed) {
  const Json resolved = config.resolved();
  return Json{{"format", 1},
              {"pilqr_version", PILQR_VERSION},
              {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                    std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                    std::to_string(EIGEN_MINOR_VERSION)},
              {"boost_version", BOOST_LIB_VERSION},
              {"seed", seed},
              {"config_hash", fnv1a_hex(resolved.dump())},
              {"config", resolved}};
}

int run_experiment(const ExperimentConfig& config, std::uint64_t seed, const fs::path& out_dir,
                   std::ostream& err) {
  try {
    fs::create_directories(out_dir);
    json_util::write_file(out_dir / "manifest.json", make_manifest(config, seed));
    execute_experiment(config, seed, out_dir);
    return kExitOk;
  } catch (const ConfigurationError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const NumericalError& e) {
    err << "numerical error";
    if (e.timestep() >= 0) err << " at timestep " << e.timestep();
    err << ": " << e.what() << "\n"
        << "last completed iteration kept in " << out_dir.string() << "\n";
    return kExitNumericalError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumericalError;
  }
}

int run_from_manifest(const fs::path& manifest, const fs::path& out_dir, std::ostream& err) {
  ExperimentConfig config;
  std::uint64_t seed = 0;
  try {
    const Json m = json_util::read_file(manifest);
    json_util::reject_unknown_keys(m, {"format", "pilqr_version", "eigen_version",
                                       "boost_version", "seed", "config_hash", "config"},
                                   "manifest");
    if (!m.contains("config") || !m.contains("seed") || !m.at("seed").is_number_integer()) {
      throw ConfigurationError("manifest needs 'config' and an integer 'seed'");
    }
    seed = m.at("seed").get<std::uint64_t>();
    config = parse_config(m.at("config"), manifest.parent_path());
    const std::string hash = fnv1a_hex(config.resolved().dump());
    if (m.contains("config_hash") && m.at("config_hash") != hash) {
      throw ConfigurationError("manifest config_hash does not match its config");
    }
  } catch (const ConfigurationError& e) {
    err << "configuration error: " << manifest.string() << ": " << e.what() << "\n";
    return kExitConfigError;
  }
  return run_experiment(config, seed, out_dir, err);
}

std::vector<SummaryRow> summarize(const std::string& config_name, const std::string& algorithm,
                                  const std::vector<std::vector<IterationRow>>& runs) {
  if (runs.empty()) throw ConfigurationError("summarize: no runs for '" + config_name + "'");
  const std::size_t K = runs.front().size();
  for (const auto& r : runs) {
    if (r.size() != K) {
      throw ConfigurationError("alignment error: runs of '" + config_name +
                               "' have different iteration counts");
    }
  }
  const double n = static_cast<double>(runs.size());
  std::vector<SummaryRow> out;
  for (std::size_t k = 0; k < K; ++k) {
    SummaryRow row;
    row.config = config_name;
    row.algorithm = algorithm;
    row.seeds = static_cast<int>(runs.size());
    row.mean.iteration = runs.front()[k].iteration;
    row.mean.episodes_cumulative = runs.front()[k].episodes_cumulative;
    for (const auto& r : runs) {
      const IterationRow& v = r[k];
      if (v.iteration != row.mean.iteration ||
          v.episodes_cumulative != row.mean.episodes_cumulative) {
        throw ConfigurationError("alignment error: runs of '" + config_name +
                                 "' disagree on iteration or episode counts");
      }
      row.mean.mean_cost += v.mean_cost / n;
      row.mean.std_cost += v.std_cost / n;
      row.mean.residual_ratio += v.residual_ratio / n;
      row.mean.mean_eps += v.mean_eps / n;
      row.mean.mean_eta_lqr += v.mean_eta_lqr / n;
      row.mean.mean_eta_pi2 += v.mean_eta_pi2 / n;
    }
    if (runs.size() > 1) {
      double ss = 0.0;
      for (const auto& r : runs) {
        const double d = r[k].mean_cost - row.mean.mean_cost;
        ss += d * d;
      }
      row.mean_cost_std = std::sqrt(ss / (n - 1.0));
    }
    if (runs.size() == 1) row.mean = runs.front()[k];
    out.push_back(row);
  }
  return out;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "config,algorithm,seeds,iteration,episodes_cumulative,mean_cost,mean_cost_std,"
         "std_cost,residual_ratio,mean_eps,mean_eta_lqr,mean_eta_pi2\n";
  for (const SummaryRow& r : rows) {
    out << r.config << ',' << r.algorithm << ',' << r.seeds << ',' << r.mean.iteration << ','
        << r.mean.episodes_cumulative << ',' << format_double(r.mean.mean_cost) << ','
        << format_double(r.mean_cost_std) << ',' << format_double(r.mean.std_cost) << ','
        << format_double(r.mean.residual_ratio) << ',' << format_double(r.mean.mean_eps) << ','
        << format_double(r.mean.mean_eta_lqr) << ',' << format_double(r.mean.mean_eta_pi2)
        << '\n';
  }
  return out.str();
}

namespace {

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read '" + p.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

int compare(const std::vector<fs::path>& config_paths, const fs::path& out_dir,
            std::ostream& err) {
  std::vector<ExperimentConfig> configs;
  std::vector<std::string> names;
  try {
    std::map<std::string, int> seen;
    for (const fs::path& p : config_paths) {
      configs.push_back(load_config(p));
      std::string name = configs.back().name;
      const int count = ++seen[name];
      if (count > 1) name += "_" + std::to_string(count);
      names.push_back(name);
    }
  } catch (const ConfigurationError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  }
  if (configs.empty()) {
    err << "configuration error: compare needs at least one config\n";
    return kExitConfigError;
  }
  for (const auto& c : configs) {
    if (c.iterations != configs.front().iterations) {
      err << "alignment error: configs have different iteration counts\n";
      return kExitConfigError;
    }
  }

  struct Job {
    std::size_t config;
    std::uint64_t seed;
    fs::path dir;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    for (std::uint64_t s : configs[i].seeds) {
      jobs.push_back({i, s, out_dir / names[i] / ("seed_" + std::to_string(s))});
    }
  }
  std::vector<int> codes(jobs.size(), 0);
  std::vector<std::string> messages(jobs.size());
  parallel_for(static_cast<Index>(jobs.size()), [&](Index j) {
    std::ostringstream log;
    codes[j] = run_experiment(configs[jobs[j].config], jobs[j].seed, jobs[j].dir, log);
    messages[j] = log.str();
  });
  int worst = kExitOk;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (codes[j] != kExitOk) {
      err << names[jobs[j].config] << " seed " << jobs[j].seed << ": " << messages[j];
      worst = std::max(worst, codes[j]);
    }
  }
  if (worst != kExitOk) return worst;

  try {
    std::vector<SummaryRow> rows;
    for (std::size_t i = 0; i < configs.size(); ++i) {
      std::vector<std::vector<IterationRow>> runs;
      for (const Job& job : jobs) {
        if (job.config == i) runs.push_back(parse_iteration_csv(read_text(job.dir / "iterations.csv")));
      }
      const auto summary = summarize(names[i], configs[i].algorithm, runs);
      rows.insert(rows.end(), summary.begin(), summary.end());
    }
    json_util::write_text(out_dir / "summary.csv", summary_csv(rows));
  } catch (const ConfigurationError& e) {
    err << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitOk;
}

}  // namespace pilqr

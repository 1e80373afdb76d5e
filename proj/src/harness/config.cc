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

#include "pilqr/harness/config.h"

#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

#include "pilqr/envs/conditions.h"

namespace pilqr {

using json_util::Json;
namespace fs = std::filesystem;

namespace {

Json load_condition(const Json& entry, const fs::path& base_dir) {
  if (entry.is_object()) return entry;
  if (!entry.is_string()) {
    throw ConfigurationError("'env.conditions' entries must be file paths or objects");
  }
  fs::path p = entry.get<std::string>();
  if (p.is_relative()) p = base_dir / p;
  if (!fs::exists(p)) throw ConfigurationError("condition file '" + p.string() + "' not found");
  return json_util::read_file(p);
}

std::vector<Json> load_conditions(const Json& list, const fs::path& base_dir,
                                  const char* context) {
  if (!list.is_array()) {
    throw ConfigurationError(std::string("'") + context + "' must be an array");
  }
  std::vector<Json> out;
  for (const Json& entry : list) out.push_back(load_condition(entry, base_dir));
  return out;
}

void parse_eps(const Json& j, EpsSchedule& s) {
  constexpr const char* ctx = "eps";
  json_util::reject_unknown_keys(
      j, {"initial", "min", "max", "ratio_low", "ratio_high", "factor", "adapt"}, ctx);
  json_util::maybe_double(j, "initial", ctx, s.initial);
  json_util::maybe_double(j, "min", ctx, s.min);
  json_util::maybe_double(j, "max", ctx, s.max);
  json_util::maybe_double(j, "ratio_low", ctx, s.ratio_low);
  json_util::maybe_double(j, "ratio_high", ctx, s.ratio_high);
  json_util::maybe_double(j, "factor", ctx, s.factor);
  json_util::maybe_bool(j, "adapt", ctx, s.adapt);
}

void parse_lqr(const Json& j, LqrFlmOptions& o) {
  constexpr const char* ctx = "lqr";
  json_util::reject_unknown_keys(j, {"eta_min", "eta_max", "kl_tolerance",
                                     "max_search_iterations", "mu_init", "mu_factor", "mu_max"},
                                 ctx);
  json_util::maybe_double(j, "eta_min", ctx, o.eta_min);
  json_util::maybe_double(j, "eta_max", ctx, o.eta_max);
  json_util::maybe_double(j, "kl_tolerance", ctx, o.kl_tolerance);
  json_util::maybe_int(j, "max_search_iterations", ctx, o.max_search_iterations);
  json_util::maybe_double(j, "mu_init", ctx, o.mu_init);
  json_util::maybe_double(j, "mu_factor", ctx, o.mu_factor);
  json_util::maybe_double(j, "mu_max", ctx, o.mu_max);
}

void parse_pi2(const Json& j, LocalOptions& o) {
  constexpr const char* ctx = "pi2";
  json_util::reject_unknown_keys(j, {"eps", "reoptimize_eta_on_residual", "residual_floor", "ridge", "cov_reg",
                                     "cov_floor", "cov_damping", "freeze_gains", "min_ess"},
                                 ctx);
  if (j.contains("eps") && !j.at("eps").is_null()) o.pi2_eps = json_util::get_double(j, "eps", ctx);
  json_util::maybe_bool(j, "reoptimize_eta_on_residual", ctx, o.reoptimize_eta_on_residual);
  json_util::maybe_double(j, "residual_floor", ctx, o.residual_floor);
  json_util::maybe_double(j, "ridge", ctx, o.ml.ridge);
  json_util::maybe_double(j, "cov_reg", ctx, o.ml.cov_reg);
  json_util::maybe_double(j, "cov_floor", ctx, o.ml.cov_floor);
  json_util::maybe_double(j, "cov_damping", ctx, o.ml.cov_damping);
  json_util::maybe_bool(j, "freeze_gains", ctx, o.ml.freeze_gains);
  json_util::maybe_double(j, "min_ess", ctx, o.ml.min_ess);
}

void parse_mdgps(const Json& j, MdgpsConfig& m) {
  constexpr const char* ctx = "mdgps";
  json_util::reject_unknown_keys(j, {"architecture", "hidden", "epochs", "learning_rate",
                                     "growth", "max_halvings", "linearization_ridge"},
                                 ctx);
  if (j.contains("architecture")) {
    m.architecture = parse_architecture(json_util::get_string(j, "architecture", ctx));
  }
  json_util::maybe_int(j, "hidden", ctx, m.hidden);
  json_util::maybe_int(j, "epochs", ctx, m.fit.epochs);
  json_util::maybe_double(j, "learning_rate", ctx, m.fit.learning_rate);
  json_util::maybe_double(j, "growth", ctx, m.fit.growth);
  json_util::maybe_int(j, "max_halvings", ctx, m.fit.max_halvings);
  json_util::maybe_double(j, "linearization_ridge", ctx, m.linearization_ridge);
  if (m.hidden < 1 || m.fit.epochs < 0 || !(m.fit.learning_rate > 0.0) ||
      !(m.fit.growth >= 1.0) || !(m.linearization_ridge > 0.0)) {
    throw ConfigurationError("'mdgps' has out-of-range values");
  }
}

void parse_evaluation(const Json& j, const fs::path& base_dir, EvaluationConfig& e) {
  constexpr const char* ctx = "evaluation";
  json_util::reject_unknown_keys(j, {"conditions", "random_reacher"}, ctx);
  if (j.contains("conditions")) {
    e.conditions = load_conditions(j.at("conditions"), base_dir, "evaluation.conditions");
  }
  if (j.contains("random_reacher")) {
    const Json& r = j.at("random_reacher");
    json_util::reject_unknown_keys(r, {"count", "seed"}, "evaluation.random_reacher");
    e.random_reacher_count =
        static_cast<int>(json_util::get_int(r, "count", "evaluation.random_reacher"));
    e.random_reacher_seed = static_cast<std::uint64_t>(
        json_util::get_int(r, "seed", "evaluation.random_reacher"));
    if (e.random_reacher_count < 0) {
      throw ConfigurationError("'evaluation.random_reacher.count' must be >= 0");
    }
  }
}

void validate_local(const LocalOptions& o) {
  const EpsSchedule& s = o.eps;
  if (!(s.min > 0.0) || !(s.max > s.min) || !(s.initial >= s.min) || !(s.initial <= s.max) ||
      !(s.factor > 1.0) || !(s.ratio_low >= 0.0) || !(s.ratio_high > s.ratio_low)) {
    throw ConfigurationError("'eps' must satisfy 0 < min <= initial <= max, factor > 1 and "
                             "0 <= ratio_low < ratio_high");
  }
  if (!(o.lqr.eta_min > 0.0) || !(o.lqr.eta_max > o.lqr.eta_min) ||
      !(o.lqr.kl_tolerance > 0.0)) {
    throw ConfigurationError("'lqr' must satisfy 0 < eta_min < eta_max, kl_tolerance > 0");
  }
  if (o.pi2_eps && !(*o.pi2_eps > 0.0)) throw ConfigurationError("'pi2.eps' must be > 0");
  if (!(o.ml.cov_damping >= 0.0 && o.ml.cov_damping <= 1.0) || o.ml.ridge < 0.0 ||
      o.ml.cov_reg < 0.0 || o.ml.cov_floor < 0.0) {
    throw ConfigurationError("'pi2' has out-of-range values");
  }
  if (o.dynamics_reg < 0.0 || o.min_eig_uu < 0.0) {
    throw ConfigurationError("'dynamics.regularization' and 'cost.min_eig_uu' must be >= 0");
  }
}

}  // namespace

Algorithm ExperimentConfig::local_algorithm() const {
  return is_mdgps() ? Algorithm::kPilqr : parse_algorithm(algorithm);
}

ExperimentConfig parse_config(const Json& j, const fs::path& base_dir) {
  json_util::reject_unknown_keys(
      j, {"name", "env", "algorithm", "iterations", "episodes", "seeds", "output_dir",
          "initial_policy", "eps", "lqr", "pi2", "dynamics", "cost", "mdgps", "evaluation"},
      "");
  ExperimentConfig c;
  if (j.contains("name")) c.name = json_util::get_string(j, "name", "");

  if (!j.contains("env")) throw ConfigurationError("missing key 'env'");
  const Json& env = j.at("env");
  json_util::reject_unknown_keys(env, {"name", "params", "conditions"}, "env");
  c.env_name = json_util::get_string(env, "name", "env");
  if (env.contains("params")) c.env_params = env.at("params");
  if (!env.contains("conditions")) throw ConfigurationError("missing key 'env.conditions'");
  c.conditions = load_conditions(env.at("conditions"), base_dir, "env.conditions");
  if (c.conditions.empty()) throw ConfigurationError("'env.conditions' must not be empty");

  if (j.contains("algorithm")) c.algorithm = json_util::get_string(j, "algorithm", "");
  if (c.algorithm != "mdgps") parse_algorithm(c.algorithm);
  json_util::maybe_int(j, "iterations", "", c.iterations);
  json_util::maybe_int(j, "episodes", "", c.episodes);
  if (c.iterations < 1) throw ConfigurationError("'iterations' must be >= 1");
  if (c.episodes < 2) throw ConfigurationError("'episodes' must be >= 2");
  c.local.episodes = c.episodes;

  if (j.contains("seeds")) {
    const Json& seeds = j.at("seeds");
    if (!seeds.is_array() || seeds.empty()) {
      throw ConfigurationError("'seeds' must be a nonempty array of integers");
    }
    c.seeds.clear();
    for (const Json& s : seeds) {
      if (!s.is_number_integer() || s.get<long long>() < 0) {
        throw ConfigurationError("'seeds' must contain nonnegative integers");
      }
      c.seeds.push_back(s.get<std::uint64_t>());
    }
  }
  if (j.contains("output_dir")) c.output_dir = json_util::get_string(j, "output_dir", "");

  if (j.contains("initial_policy")) {
    const Json& ip = j.at("initial_policy");
    json_util::reject_unknown_keys(ip, {"variance"}, "initial_policy");
    json_util::maybe_double(ip, "variance", "initial_policy", c.initial_variance);
    if (!(c.initial_variance > 0.0)) {
      throw ConfigurationError("'initial_policy.variance' must be > 0");
    }
  }
  if (j.contains("eps")) parse_eps(j.at("eps"), c.local.eps);
  if (j.contains("lqr")) parse_lqr(j.at("lqr"), c.local.lqr);
  if (j.contains("pi2")) parse_pi2(j.at("pi2"), c.local);
  if (j.contains("dynamics")) {
    json_util::reject_unknown_keys(j.at("dynamics"), {"regularization"}, "dynamics");
    json_util::maybe_double(j.at("dynamics"), "regularization", "dynamics",
                            c.local.dynamics_reg);
  }
  if (j.contains("cost")) {
    json_util::reject_unknown_keys(j.at("cost"), {"min_eig_uu"}, "cost");
    json_util::maybe_double(j.at("cost"), "min_eig_uu", "cost", c.local.min_eig_uu);
  }
  if (j.contains("mdgps")) parse_mdgps(j.at("mdgps"), c.mdgps);
  if (j.contains("evaluation")) parse_evaluation(j.at("evaluation"), base_dir, c.evaluation);
  validate_local(c.local);

  // Build every environment once so condition errors surface here.
  build_environments(c);
  build_evaluation_environments(c);
  return c;
}

Json ExperimentConfig::resolved() const {
  const LocalOptions& o = local;
  Json conds = Json::array();
  for (const Json& cj : conditions) conds.push_back(cj);
  Json env{{"name", env_name}, {"params", env_params}, {"conditions", conds}};
  if (env_params.is_null()) env.erase("params");
  Json eval_conds = Json::array();
  for (const Json& cj : evaluation.conditions) eval_conds.push_back(cj);
  Json out{
      {"name", name},
      {"env", env},
      {"algorithm", algorithm},
      {"iterations", iterations},
      {"episodes", episodes},
      {"seeds", seeds},
      {"output_dir", output_dir},
      {"initial_policy", {{"variance", initial_variance}}},
      {"eps",
       {{"initial", o.eps.initial},
        {"min", o.eps.min},
        {"max", o.eps.max},
        {"ratio_low", o.eps.ratio_low},
        {"ratio_high", o.eps.ratio_high},
        {"factor", o.eps.factor},
        {"adapt", o.eps.adapt}}},
      {"lqr",
       {{"eta_min", o.lqr.eta_min},
        {"eta_max", o.lqr.eta_max},
        {"kl_tolerance", o.lqr.kl_tolerance},
        {"max_search_iterations", o.lqr.max_search_iterations},
        {"mu_init", o.lqr.mu_init},
        {"mu_factor", o.lqr.mu_factor},
        {"mu_max", o.lqr.mu_max}}},
      {"pi2",
       {{"eps", o.pi2_eps ? Json(*o.pi2_eps) : Json(nullptr)},
        {"reoptimize_eta_on_residual", o.reoptimize_eta_on_residual},
        {"residual_floor", o.residual_floor},
        {"ridge", o.ml.ridge},
        {"cov_reg", o.ml.cov_reg},
        {"cov_floor", o.ml.cov_floor},
        {"cov_damping", o.ml.cov_damping},
        {"freeze_gains", o.ml.freeze_gains},
        {"min_ess", o.ml.min_ess}}},
      {"dynamics", {{"regularization", o.dynamics_reg}}},
      {"cost", {{"min_eig_uu", o.min_eig_uu}}},
      {"mdgps",
       {{"architecture", to_string(mdgps.architecture)},
        {"hidden", mdgps.hidden},
        {"epochs", mdgps.fit.epochs},
        {"learning_rate", mdgps.fit.learning_rate},
        {"growth", mdgps.fit.growth},
        {"max_halvings", mdgps.fit.max_halvings},
        {"linearization_ridge", mdgps.linearization_ridge}}},
      {"evaluation",
       {{"conditions", eval_conds},
        {"random_reacher",
         {{"count", evaluation.random_reacher_count},
          {"seed", evaluation.random_reacher_seed}}}}}};
  return out;
}

namespace {

// Last quoted identifier in a diagnostic such as "unknown key 'env.foo'".
std::optional<std::string> offending_key(const std::string& message) {
  static const std::regex quoted("'([A-Za-z0-9_.]+)'");
  std::optional<std::string> key;
  for (auto it = std::sregex_iterator(message.begin(), message.end(), quoted);
       it != std::sregex_iterator(); ++it) {
    key = (*it)[1].str();
    break;
  }
  if (!key) return std::nullopt;
  const auto dot = key->rfind('.');
  return dot == std::string::npos ? *key : key->substr(dot + 1);
}

int line_of_key(const std::string& text, const std::string& key) {
  const std::string needle = "\"" + key + "\"";
  const auto pos = text.find(needle);
  if (pos == std::string::npos) return 0;
  int line = 1;
  for (std::size_t i = 0; i < pos; ++i) line += text[i] == '\n';
  return line;
}

}  // namespace

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError(path.string() + ": cannot open config");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigurationError(path.string() + ": " + e.what());
  }
  try {
    return parse_config(j, path.has_parent_path() ? path.parent_path() : fs::path("."));
  } catch (const ConfigurationError& e) {
    const std::string message = e.what();
    int line = 0;
    if (auto key = offending_key(message)) line = line_of_key(text, *key);
    if (line > 0) {
      throw ConfigurationError(path.string() + ":" + std::to_string(line) + ": " + message);
    }
    throw ConfigurationError(path.string() + ": " + message);
  }
}

std::vector<EnvironmentPtr> build_environments(const ExperimentConfig& config) {
  std::vector<EnvironmentPtr> envs;
  for (const Json& condition : config.conditions) {
    envs.push_back(make_environment(config.env_name, config.env_params, condition));
  }
  return envs;
}

std::vector<EnvironmentPtr> build_evaluation_environments(const ExperimentConfig& config) {
  std::vector<EnvironmentPtr> envs;
  for (const Json& condition : config.evaluation.conditions) {
    envs.push_back(make_environment(config.env_name, config.env_params, condition));
  }
  if (config.evaluation.random_reacher_count > 0) {
    if (config.env_name != "reacher") {
      throw ConfigurationError("'evaluation.random_reacher' requires env 'reacher'");
    }
    const ReacherParams params = parse_reacher_params(config.env_params);
    for (const ReacherCondition& c :
         random_reacher_conditions(config.evaluation.random_reacher_count,
                                   config.evaluation.random_reacher_seed, params)) {
      envs.push_back(make_reacher_env(c, params));
    }
  }
  return envs;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pilqr

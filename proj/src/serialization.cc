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

#include "pilqr/serialization.h"

#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace pilqr {

using json_util::Json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Json to_json(const TvlgPolicy& policy) {
  Json gains = Json::array(), offsets = Json::array(), covs = Json::array();
  for (Index t = 0; t < policy.horizon(); ++t) {
    gains.push_back(json_util::from_matrix(policy.gains[t]));
    offsets.push_back(json_util::from_vector(policy.offsets[t]));
    covs.push_back(json_util::from_matrix(policy.covariances[t]));
  }
  return Json{{"horizon", policy.horizon()},
              {"gains", std::move(gains)},
              {"offsets", std::move(offsets)},
              {"covariances", std::move(covs)}};
}

TvlgPolicy policy_from_json(const Json& j) {
  json_util::reject_unknown_keys(j, {"horizon", "gains", "offsets", "covariances"}, "policy");
  const long long T = json_util::get_int(j, "horizon", "policy");
  const Json& gains = j.at("gains");
  const Json& offsets = j.at("offsets");
  const Json& covs = j.at("covariances");
  if (!gains.is_array() || !offsets.is_array() || !covs.is_array() ||
      static_cast<long long>(gains.size()) != T || static_cast<long long>(offsets.size()) != T ||
      static_cast<long long>(covs.size()) != T) {
    throw ConfigurationError("policy: gains, offsets and covariances must have horizon entries");
  }
  TvlgPolicy p;
  for (long long t = 0; t < T; ++t) {
    p.gains.push_back(json_util::to_matrix(gains[t], "policy.gains"));
    p.offsets.push_back(json_util::to_vector(offsets[t], "policy.offsets"));
    p.covariances.push_back(json_util::to_matrix(covs[t], "policy.covariances"));
  }
  p.validate();
  return p;
}

Json to_json(const RolloutBatch& batch) {
  Json rollouts = Json::array();
  for (const Rollout& r : batch.rollouts) {
    Json states = Json::array(), actions = Json::array(), noise = Json::array();
    for (const auto& x : r.states) states.push_back(json_util::from_vector(x));
    for (const auto& u : r.actions) actions.push_back(json_util::from_vector(u));
    for (const auto& e : r.noise) noise.push_back(json_util::from_vector(e));
    rollouts.push_back(Json{{"states", std::move(states)},
                            {"actions", std::move(actions)},
                            {"noise", std::move(noise)},
                            {"step_costs", json_util::from_vector(r.costs)}});
  }
  return Json{{"condition_id", batch.condition_id},
              {"rng_seed", batch.rng_seed},
              {"rollouts", std::move(rollouts)}};
}

RolloutBatch batch_from_json(const Json& j) {
  json_util::reject_unknown_keys(j, {"condition_id", "rng_seed", "rollouts"}, "batch");
  RolloutBatch batch;
  batch.condition_id = static_cast<int>(json_util::get_int(j, "condition_id", "batch"));
  if (!j.at("rng_seed").is_number_unsigned() && !j.at("rng_seed").is_number_integer()) {
    throw ConfigurationError("'batch.rng_seed' must be an integer");
  }
  batch.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  for (const Json& rj : j.at("rollouts")) {
    json_util::reject_unknown_keys(rj, {"states", "actions", "noise", "step_costs"},
                                   "batch.rollouts");
    Rollout r;
    for (const Json& x : rj.at("states")) r.states.push_back(json_util::to_vector(x, "states"));
    for (const Json& u : rj.at("actions")) {
      r.actions.push_back(json_util::to_vector(u, "actions"));
    }
    for (const Json& e : rj.at("noise")) r.noise.push_back(json_util::to_vector(e, "noise"));
    r.costs = json_util::to_vector(rj.at("step_costs"), "step_costs");
    batch.rollouts.push_back(std::move(r));
  }
  batch.validate();
  return batch;
}

std::string trajectory_csv(const Rollout& rollout) {
  const Index T = static_cast<Index>(rollout.states.size());
  if (T == 0) return "t,cost\n";
  const Index nx = rollout.states.front().size();
  const Index nu = rollout.actions.front().size();
  std::ostringstream out;
  out << "t";
  for (Index i = 0; i < nx; ++i) out << ",x" << i;
  for (Index i = 0; i < nu; ++i) out << ",u" << i;
  out << ",cost\n";
  for (Index t = 0; t < T; ++t) {
    out << t;
    for (Index i = 0; i < nx; ++i) out << ',' << format_double(rollout.states[t](i));
    for (Index i = 0; i < nu; ++i) out << ',' << format_double(rollout.actions[t](i));
    out << ',' << format_double(rollout.costs(t)) << '\n';
  }
  return out.str();
}

namespace {

std::vector<double> split_numbers(const std::string& line, std::size_t line_no) {
  std::vector<double> values;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size()) {
      throw ConfigurationError("csv line " + std::to_string(line_no) + ": bad number '" +
                               cell + "'");
    }
    values.push_back(v);
  }
  return values;
}

}  // namespace

Rollout rollout_from_csv(const std::string& text, Index state_dim, Index action_dim) {
  std::stringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    rows.push_back(split_numbers(line, line_no));
    if (static_cast<Index>(rows.back().size()) != 2 + state_dim + action_dim) {
      throw ConfigurationError("csv line " + std::to_string(line_no) + ": wrong column count");
    }
  }
  Rollout r;
  r.costs.resize(static_cast<Index>(rows.size()));
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const Eigen::Map<const Eigen::VectorXd> v(rows[t].data(), static_cast<Index>(rows[t].size()));
    r.states.push_back(v.segment(1, state_dim));
    r.actions.push_back(v.segment(1 + state_dim, action_dim));
    r.noise.push_back(Eigen::VectorXd::Zero(action_dim));
    r.costs(static_cast<Index>(t)) = v(1 + state_dim + action_dim);
  }
  return r;
}

std::vector<IterationRow> iteration_rows(const std::vector<IterationReport>& reports) {
  std::vector<IterationRow> rows;
  Index cumulative = 0;
  for (const IterationReport& r : reports) {
    cumulative += r.episodes;
    rows.push_back({r.iteration, cumulative, r.mean_cost, r.std_cost, r.residual_ratio,
                    r.mean_eps, r.mean_eta_lqr, r.mean_eta_pi2});
  }
  return rows;
}

std::string iteration_csv(const std::vector<IterationRow>& rows) {
  std::ostringstream out;
  out << kIterationCsvHeader << '\n';
  for (const IterationRow& r : rows) {
    out << r.iteration << ',' << r.episodes_cumulative << ',' << format_double(r.mean_cost)
        << ',' << format_double(r.std_cost) << ',' << format_double(r.residual_ratio) << ','
        << format_double(r.mean_eps) << ',' << format_double(r.mean_eta_lqr) << ','
        << format_double(r.mean_eta_pi2) << '\n';
  }
  return out.str();
}

std::vector<IterationRow> parse_iteration_csv(const std::string& text) {
  std::stringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kIterationCsvHeader) {
    throw ConfigurationError("iteration csv: unexpected header");
  }
  std::vector<IterationRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<double> v = split_numbers(line, line_no);
    if (v.size() != 8) {
      throw ConfigurationError("iteration csv line " + std::to_string(line_no) +
                               ": expected 8 columns");
    }
    rows.push_back({static_cast<int>(v[0]), static_cast<Index>(v[1]), v[2], v[3], v[4], v[5],
                    v[6], v[7]});
  }
  return rows;
}

}  // namespace pilqr

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

#include "pilqr/envs/conditions.h"

#include <cmath>
#include <numbers>

#include "pilqr/envs/lq_env.h"
#include "pilqr/rng.h"

namespace pilqr {

using json_util::Json;

namespace {

Eigen::Vector2d get_vec2(const Json& j, const char* key, const char* context) {
  if (!j.contains(key)) {
    throw ConfigurationError(std::string("missing key '") + context + "." + key + "'");
  }
  const Eigen::VectorXd v = json_util::to_vector(j.at(key), std::string(context) + "." + key);
  if (v.size() != 2) {
    throw ConfigurationError(std::string("'") + context + "." + key + "' must have 2 entries");
  }
  return v;
}

Json vec2(const Eigen::Vector2d& v) { return Json::array({v(0), v(1)}); }

GenericLoss parse_loss(const Json& j, GenericLoss loss, const std::string& context) {
  json_util::reject_unknown_keys(j, {"alpha", "beta", "gamma"}, context);
  json_util::maybe_double(j, "alpha", context, loss.alpha);
  json_util::maybe_double(j, "beta", context, loss.beta);
  json_util::maybe_double(j, "gamma", context, loss.gamma);
  if (!(loss.gamma > 0.0)) throw ConfigurationError("'" + context + ".gamma' must be > 0");
  return loss;
}

Json loss_json(const GenericLoss& loss) {
  return Json{{"alpha", loss.alpha}, {"beta", loss.beta}, {"gamma", loss.gamma}};
}

void check_positive(double v, const char* name) {
  if (!(v > 0.0)) throw ConfigurationError(std::string("'") + name + "' must be > 0");
}

}  // namespace

ReacherParams parse_reacher_params(const Json& j) {
  ReacherParams p;
  if (j.is_null()) return p;
  constexpr const char* ctx = "env.params";
  json_util::reject_unknown_keys(j, {"link1", "link2", "mass1", "mass2", "damping", "dt",
                                     "horizon", "action_penalty", "max_torque", "loss"},
                                 ctx);
  json_util::maybe_double(j, "link1", ctx, p.link1);
  json_util::maybe_double(j, "link2", ctx, p.link2);
  json_util::maybe_double(j, "mass1", ctx, p.mass1);
  json_util::maybe_double(j, "mass2", ctx, p.mass2);
  json_util::maybe_double(j, "damping", ctx, p.damping);
  json_util::maybe_double(j, "dt", ctx, p.dt);
  json_util::maybe_int(j, "horizon", ctx, p.horizon);
  json_util::maybe_double(j, "action_penalty", ctx, p.action_penalty);
  json_util::maybe_double(j, "max_torque", ctx, p.max_torque);
  if (j.contains("loss")) p.loss = parse_loss(j.at("loss"), p.loss, "env.params.loss");
  check_positive(p.link1, "link1");
  check_positive(p.max_torque, "max_torque");
  check_positive(p.link2, "link2");
  check_positive(p.mass1, "mass1");
  check_positive(p.mass2, "mass2");
  check_positive(p.dt, "dt");
  if (p.horizon < 2) throw ConfigurationError("'env.params.horizon' must be >= 2");
  if (p.damping < 0.0 || p.action_penalty < 0.0) {
    throw ConfigurationError("reacher damping and action_penalty must be >= 0");
  }
  return p;
}

PusherParams parse_pusher_params(const Json& j) {
  PusherParams p;
  if (j.is_null()) return p;
  constexpr const char* ctx = "env.params";
  json_util::reject_unknown_keys(
      j, {"gripper_mass", "block_mass", "gripper_damping", "contact_radius", "stiffness", "block_friction", "dt",
          "horizon", "block_goal_weight", "gripper_block_weight", "action_penalty", "loss"},
      ctx);
  json_util::maybe_double(j, "gripper_mass", ctx, p.gripper_mass);
  json_util::maybe_double(j, "block_mass", ctx, p.block_mass);
  json_util::maybe_double(j, "gripper_damping", ctx, p.gripper_damping);
  json_util::maybe_double(j, "contact_radius", ctx, p.contact_radius);
  json_util::maybe_double(j, "stiffness", ctx, p.stiffness);
  json_util::maybe_double(j, "block_friction", ctx, p.block_friction);
  json_util::maybe_double(j, "dt", ctx, p.dt);
  json_util::maybe_int(j, "horizon", ctx, p.horizon);
  json_util::maybe_double(j, "block_goal_weight", ctx, p.block_goal_weight);
  json_util::maybe_double(j, "gripper_block_weight", ctx, p.gripper_block_weight);
  json_util::maybe_double(j, "action_penalty", ctx, p.action_penalty);
  if (j.contains("loss")) p.loss = parse_loss(j.at("loss"), p.loss, "env.params.loss");
  check_positive(p.gripper_mass, "gripper_mass");
  check_positive(p.block_mass, "block_mass");
  check_positive(p.contact_radius, "contact_radius");
  check_positive(p.dt, "dt");
  if (p.horizon < 2) throw ConfigurationError("'env.params.horizon' must be >= 2");
  if (p.stiffness < 0.0 || p.block_friction < 0.0 || p.gripper_damping < 0.0 || p.action_penalty < 0.0 ||
      p.block_goal_weight < 0.0 || p.gripper_block_weight < 0.0) {
    throw ConfigurationError("pusher stiffness, friction, damping and weights must be >= 0");
  }
  return p;
}

Json to_json(const ReacherParams& p) {
  return Json{{"link1", p.link1},     {"link2", p.link2},
              {"mass1", p.mass1},     {"mass2", p.mass2},
              {"damping", p.damping}, {"dt", p.dt},
              {"horizon", p.horizon}, {"action_penalty", p.action_penalty},
              {"max_torque", p.max_torque}, {"loss", loss_json(p.loss)}};
}

Json to_json(const PusherParams& p) {
  return Json{{"gripper_mass", p.gripper_mass},
              {"block_mass", p.block_mass},
              {"gripper_damping", p.gripper_damping},
              {"contact_radius", p.contact_radius},
              {"stiffness", p.stiffness},
              {"block_friction", p.block_friction},
              {"dt", p.dt},
              {"horizon", p.horizon},
              {"block_goal_weight", p.block_goal_weight},
              {"gripper_block_weight", p.gripper_block_weight},
              {"action_penalty", p.action_penalty},
              {"loss", loss_json(p.loss)}};
}

ReacherCondition parse_reacher_condition(const Json& j) {
  json_util::reject_unknown_keys(j, {"angles", "velocities", "target"}, "condition");
  ReacherCondition c;
  c.angles = get_vec2(j, "angles", "condition");
  if (j.contains("velocities")) c.velocities = get_vec2(j, "velocities", "condition");
  c.target = get_vec2(j, "target", "condition");
  return c;
}

PusherCondition parse_pusher_condition(const Json& j) {
  json_util::reject_unknown_keys(j, {"gripper", "block", "goal"}, "condition");
  PusherCondition c;
  c.gripper = get_vec2(j, "gripper", "condition");
  c.block = get_vec2(j, "block", "condition");
  c.goal = get_vec2(j, "goal", "condition");
  return c;
}

Json to_json(const ReacherCondition& c) {
  return Json{{"angles", vec2(c.angles)},
              {"velocities", vec2(c.velocities)},
              {"target", vec2(c.target)}};
}

Json to_json(const PusherCondition& c) {
  return Json{{"gripper", vec2(c.gripper)}, {"block", vec2(c.block)}, {"goal", vec2(c.goal)}};
}

EnvironmentPtr make_environment(const std::string& name, const Json& params,
                                const Json& condition) {
  if (name == "reacher") {
    return make_reacher_env(parse_reacher_condition(condition), parse_reacher_params(params));
  }
  if (name == "pusher") {
    return make_pusher_env(parse_pusher_condition(condition), parse_pusher_params(params));
  }
  if (name == "lq") {
    if (!params.is_null() && !params.empty()) {
      throw ConfigurationError("env 'lq' takes no params; put everything in the condition");
    }
    json_util::reject_unknown_keys(condition, {"A", "B", "Q", "R", "x0", "horizon", "noise"},
                                   "condition");
    const auto m = [&](const char* key) {
      if (!condition.contains(key)) {
        throw ConfigurationError(std::string("missing key 'condition.") + key + "'");
      }
      return json_util::to_matrix(condition.at(key), std::string("condition.") + key);
    };
    if (!condition.contains("x0")) throw ConfigurationError("missing key 'condition.x0'");
    const Eigen::VectorXd x0 = json_util::to_vector(condition.at("x0"), "condition.x0");
    const long long horizon = json_util::get_int(condition, "horizon", "condition");
    if (horizon < 2) throw ConfigurationError("'condition.horizon' must be >= 2");
    double noise = 0.0;
    json_util::maybe_double(condition, "noise", "condition", noise);
    const Eigen::MatrixXd A = m("A"), B = m("B"), Q = m("Q"), R = m("R");
    if (A.rows() != x0.size() || A.cols() != x0.size() || B.rows() != x0.size() ||
        Q.rows() != x0.size() || Q.cols() != x0.size() || R.rows() != B.cols() ||
        R.cols() != B.cols()) {
      throw ConfigurationError("lq condition: inconsistent matrix dimensions");
    }
    return make_lq_env(A, B, Q, R, x0, static_cast<Index>(horizon), noise);
  }
  throw ConfigurationError("unknown env '" + name + "' (expected lq, reacher or pusher)");
}

std::vector<ReacherCondition> random_reacher_conditions(int count, std::uint64_t seed,
                                                        const ReacherParams& params) {
  std::vector<ReacherCondition> out;
  out.reserve(count);
  const double pi = std::numbers::pi;
  const double r_min = std::abs(params.link1 - params.link2) + 0.1;
  const double r_max = params.link1 + params.link2 - 0.1;
  for (int i = 0; i < count; ++i) {
    NormalStream stream(derive_seed(seed, {0x52454143ULL, static_cast<std::uint64_t>(i)}));
    ReacherCondition c;
    c.angles << stream.uniform(-pi, pi), stream.uniform(-pi, pi);
    const double radius = std::sqrt(stream.uniform(r_min * r_min, r_max * r_max));
    const double angle = stream.uniform(-pi, pi);
    c.target << radius * std::cos(angle), radius * std::sin(angle);
    out.push_back(c);
  }
  return out;
}

}  // namespace pilqr

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

#include "pilqr/mdgps.h"

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Cholesky>

#include "pilqr/pilqr.h"
#include "pilqr/rng.h"

namespace pilqr {

using json_util::Json;

const char* to_string(GlobalArchitecture architecture) {
  return architecture == GlobalArchitecture::kAffine ? "affine" : "mlp";
}

GlobalArchitecture parse_architecture(const std::string& name) {
  if (name == "affine") return GlobalArchitecture::kAffine;
  if (name == "mlp") return GlobalArchitecture::kMlp;
  throw ConfigurationError("unknown global policy architecture '" + name + "'");
}

namespace {

Eigen::ArrayXXd relu(const Eigen::MatrixXd& a) { return a.array().max(0.0); }
Eigen::ArrayXXd relu_mask(const Eigen::MatrixXd& a) {
  return (a.array() > 0.0).cast<double>();
}

// Views into the flat parameter vector.
struct AffineView {
  Eigen::Map<const Eigen::MatrixXd> W;
  Eigen::Map<const Eigen::VectorXd> b;
};

struct MlpView {
  Eigen::Map<const Eigen::MatrixXd> W1;
  Eigen::Map<const Eigen::VectorXd> b1;
  Eigen::Map<const Eigen::MatrixXd> W2;
  Eigen::Map<const Eigen::VectorXd> b2;
  Eigen::Map<const Eigen::MatrixXd> W3;
  Eigen::Map<const Eigen::VectorXd> b3;
};

AffineView affine_view(const double* p, Index nx, Index nu) {
  return {Eigen::Map<const Eigen::MatrixXd>(p, nu, nx),
          Eigen::Map<const Eigen::VectorXd>(p + nu * nx, nu)};
}

MlpView mlp_view(const double* p, Index nx, Index nu, Index h) {
  const double* w1 = p;
  const double* b1 = w1 + h * nx;
  const double* w2 = b1 + h;
  const double* b2 = w2 + h * h;
  const double* w3 = b2 + h;
  const double* b3 = w3 + nu * h;
  return {Eigen::Map<const Eigen::MatrixXd>(w1, h, nx),
          Eigen::Map<const Eigen::VectorXd>(b1, h),
          Eigen::Map<const Eigen::MatrixXd>(w2, h, h),
          Eigen::Map<const Eigen::VectorXd>(b2, h),
          Eigen::Map<const Eigen::MatrixXd>(w3, nu, h),
          Eigen::Map<const Eigen::VectorXd>(b3, nu)};
}

Index flat_size(GlobalArchitecture a, Index nx, Index nu, Index h) {
  if (a == GlobalArchitecture::kAffine) return nu * nx + nu;
  return h * nx + h + h * h + h + nu * h + nu;
}

}  // namespace

GlobalPolicy::GlobalPolicy(GlobalArchitecture architecture, Index state_dim,
                           Index action_dim, Index hidden)
    : architecture_(architecture),
      state_dim_(state_dim),
      action_dim_(action_dim),
      hidden_(hidden),
      params_(Eigen::VectorXd::Zero(flat_size(architecture, state_dim, action_dim, hidden))),
      shift_(Eigen::VectorXd::Zero(state_dim)),
      scale_(Eigen::VectorXd::Ones(state_dim)) {}

GlobalPolicy GlobalPolicy::affine(Index state_dim, Index action_dim) {
  if (state_dim < 0 || action_dim < 0) throw ConfigurationError("GlobalPolicy: negative dims");
  return GlobalPolicy(GlobalArchitecture::kAffine, state_dim, action_dim, 0);
}

GlobalPolicy GlobalPolicy::mlp(Index state_dim, Index action_dim, Index hidden,
                               std::uint64_t seed) {
  if (state_dim < 1 || action_dim < 1 || hidden < 1) {
    throw ConfigurationError("GlobalPolicy: mlp needs positive dims");
  }
  GlobalPolicy p(GlobalArchitecture::kMlp, state_dim, action_dim, hidden);
  // He-uniform hidden layers; a small output layer keeps the initial
  // actions near zero.
  const auto fill = [&](double* data, Index count, Index fan_in, double gain, std::uint64_t tag) {
    NormalStream stream(derive_seed(seed, {0x4d4c50ULL, tag}));
    const double limit = gain * std::sqrt(6.0 / static_cast<double>(fan_in));
    for (Index i = 0; i < count; ++i) data[i] = stream.uniform(-limit, limit);
  };
  double* w = p.params_.data();
  const Index h = hidden;
  fill(w, h * state_dim, state_dim, 1.0, 1);
  w += h * state_dim + h;
  fill(w, h * h, h, 1.0, 2);
  w += h * h + h;
  fill(w, action_dim * h, h, 0.01, 3);
  return p;
}

void GlobalPolicy::set_parameters(const Eigen::VectorXd& params) {
  if (params.size() != params_.size()) {
    throw ConfigurationError("GlobalPolicy: expected " + std::to_string(params_.size()) +
                             " parameters, got " + std::to_string(params.size()));
  }
  params_ = params;
}

void GlobalPolicy::set_normalization(const Eigen::VectorXd& shift, const Eigen::VectorXd& scale) {
  if (shift.size() != state_dim_ || scale.size() != state_dim_ || !(scale.array() > 0.0).all()) {
    throw ConfigurationError("GlobalPolicy: bad normalization");
  }
  shift_ = shift;
  scale_ = scale;
  normalized_ = true;
}

Eigen::MatrixXd GlobalPolicy::standardize(const Eigen::MatrixXd& X) const {
  if (X.rows() != state_dim_) throw ConfigurationError("GlobalPolicy: state dimension mismatch");
  return ((X.colwise() - shift_).array().colwise() * scale_.array()).matrix();
}

Eigen::MatrixXd GlobalPolicy::mean(const Eigen::MatrixXd& X) const {
  const Eigen::MatrixXd Z = standardize(X);
  if (architecture_ == GlobalArchitecture::kAffine) {
    const AffineView v = affine_view(params_.data(), state_dim_, action_dim_);
    return (v.W * Z).colwise() + v.b;
  }
  const MlpView v = mlp_view(params_.data(), state_dim_, action_dim_, hidden_);
  const Eigen::MatrixXd H1 = relu((v.W1 * Z).colwise() + v.b1).matrix();
  const Eigen::MatrixXd H2 = relu((v.W2 * H1).colwise() + v.b2).matrix();
  return (v.W3 * H2).colwise() + v.b3;
}

Eigen::VectorXd GlobalPolicy::mean(const Eigen::VectorXd& x) const {
  return mean(Eigen::MatrixXd(x)).col(0);
}

Eigen::MatrixXd GlobalPolicy::jacobian(const Eigen::VectorXd& x) const {
  const Eigen::MatrixXd Z = standardize(Eigen::MatrixXd(x));
  if (architecture_ == GlobalArchitecture::kAffine) {
    const AffineView v = affine_view(params_.data(), state_dim_, action_dim_);
    return v.W * scale_.asDiagonal();
  }
  const MlpView v = mlp_view(params_.data(), state_dim_, action_dim_, hidden_);
  const Eigen::MatrixXd A1 = (v.W1 * Z).colwise() + v.b1;
  const Eigen::MatrixXd A2 = (v.W2 * relu(A1).matrix()).colwise() + v.b2;
  const Eigen::VectorXd d1 = relu_mask(A1).col(0);
  const Eigen::VectorXd d2 = relu_mask(A2).col(0);
  return v.W3 * d2.asDiagonal() * v.W2 * d1.asDiagonal() * v.W1 * scale_.asDiagonal();
}

double GlobalPolicy::loss(const Eigen::MatrixXd& X, const Eigen::MatrixXd& U,
                          const std::vector<Eigen::MatrixXd>& precisions,
                          const Eigen::VectorXd& weights, Eigen::VectorXd* grad) const {
  const Index M = X.cols();
  if (U.rows() != action_dim_ || U.cols() != M || weights.size() != M ||
      static_cast<Index>(precisions.size()) != M) {
    throw ConfigurationError("GlobalPolicy::loss: data size mismatch");
  }
  const double total_weight = weights.sum();
  if (!(total_weight > 0.0)) throw ConfigurationError("GlobalPolicy::loss: zero total weight");

  const Eigen::MatrixXd Z = standardize(X);
  Eigen::MatrixXd H1, H2, A1, A2, Y;
  if (architecture_ == GlobalArchitecture::kAffine) {
    const AffineView v = affine_view(params_.data(), state_dim_, action_dim_);
    Y = (v.W * Z).colwise() + v.b;
  } else {
    const MlpView v = mlp_view(params_.data(), state_dim_, action_dim_, hidden_);
    A1 = (v.W1 * Z).colwise() + v.b1;
    H1 = relu(A1).matrix();
    A2 = (v.W2 * H1).colwise() + v.b2;
    H2 = relu(A2).matrix();
    Y = (v.W3 * H2).colwise() + v.b3;
  }

  double value = 0.0;
  Eigen::MatrixXd dY = Eigen::MatrixXd::Zero(action_dim_, M);
  for (Index i = 0; i < M; ++i) {
    if (weights(i) == 0.0) continue;
    const Eigen::VectorXd r = U.col(i) - Y.col(i);
    const Eigen::VectorXd Pr = precisions[i] * r;
    value += 0.5 * weights(i) * r.dot(Pr);
    dY.col(i) = -weights(i) * Pr;
  }
  value /= total_weight;
  dY /= total_weight;
  if (!grad) return value;

  grad->resize(params_.size());
  double* g = grad->data();
  if (architecture_ == GlobalArchitecture::kAffine) {
    Eigen::Map<Eigen::MatrixXd>(g, action_dim_, state_dim_) = dY * Z.transpose();
    Eigen::Map<Eigen::VectorXd>(g + action_dim_ * state_dim_, action_dim_) =
        dY.rowwise().sum();
    return value;
  }
  const MlpView v = mlp_view(params_.data(), state_dim_, action_dim_, hidden_);
  const Index h = hidden_;
  const Eigen::MatrixXd dA2 = ((v.W3.transpose() * dY).array() * relu_mask(A2)).matrix();
  const Eigen::MatrixXd dA1 = ((v.W2.transpose() * dA2).array() * relu_mask(A1)).matrix();
  Eigen::Map<Eigen::MatrixXd>(g, h, state_dim_) = dA1 * Z.transpose();
  g += h * state_dim_;
  Eigen::Map<Eigen::VectorXd>(g, h) = dA1.rowwise().sum();
  g += h;
  Eigen::Map<Eigen::MatrixXd>(g, h, h) = dA2 * H1.transpose();
  g += h * h;
  Eigen::Map<Eigen::VectorXd>(g, h) = dA2.rowwise().sum();
  g += h;
  Eigen::Map<Eigen::MatrixXd>(g, action_dim_, h) = dY * H2.transpose();
  g += action_dim_ * h;
  Eigen::Map<Eigen::VectorXd>(g, action_dim_) = dY.rowwise().sum();
  return value;
}

Json GlobalPolicy::to_json() const {
  return Json{{"architecture", pilqr::to_string(architecture_)},
              {"state_dim", state_dim_},
              {"action_dim", action_dim_},
              {"hidden", hidden_},
              {"normalized", normalized_},
              {"input_shift", json_util::from_vector(shift_)},
              {"input_scale", json_util::from_vector(scale_)},
              {"parameters", json_util::from_vector(params_)}};
}

GlobalPolicy GlobalPolicy::from_json(const Json& j) {
  constexpr const char* ctx = "global_policy";
  json_util::reject_unknown_keys(j, {"architecture", "state_dim", "action_dim", "hidden",
                                     "normalized", "input_shift", "input_scale", "parameters"},
                                 ctx);
  const GlobalArchitecture a = parse_architecture(json_util::get_string(j, "architecture", ctx));
  const Index nx = json_util::get_int(j, "state_dim", ctx);
  const Index nu = json_util::get_int(j, "action_dim", ctx);
  const Index h = json_util::get_int(j, "hidden", ctx);
  if (nx < 1 || nu < 1 || (a == GlobalArchitecture::kMlp && h < 1)) {
    throw ConfigurationError("global_policy: bad dimensions");
  }
  GlobalPolicy p(a, nx, nu, a == GlobalArchitecture::kMlp ? h : 0);
  p.set_parameters(json_util::to_vector(j.at("parameters"), "global_policy.parameters"));
  if (json_util::get_bool(j, "normalized", ctx)) {
    p.set_normalization(json_util::to_vector(j.at("input_shift"), "global_policy.input_shift"),
                        json_util::to_vector(j.at("input_scale"), "global_policy.input_scale"));
  }
  return p;
}

ReferenceStep linearize_global(const GlobalPolicy& policy, const Eigen::MatrixXd& states,
                               const Eigen::MatrixXd& covariance, double ridge) {
  const Index nx = policy.state_dim();
  const Index N = states.cols();
  if (states.rows() != nx || N < 1) {
    throw ConfigurationError("linearize_global: states must be state_dim x N with N >= 1");
  }
  if (!(ridge > 0.0)) throw ConfigurationError("linearize_global: ridge must be > 0");
  const Eigen::MatrixXd Y = policy.mean(states);
  const Eigen::VectorXd x_mean = states.rowwise().mean();
  const Eigen::VectorXd y_mean = Y.rowwise().mean();
  const Eigen::MatrixXd Xc = states.colwise() - x_mean;
  const Eigen::MatrixXd Yc = Y.colwise() - y_mean;
  const Eigen::MatrixXd J = policy.jacobian(x_mean);

  Eigen::MatrixXd gram = Xc * Xc.transpose();
  const double lambda = ridge * std::max(1.0, gram.trace() / static_cast<double>(nx));
  gram.diagonal().array() += lambda;
  const Eigen::MatrixXd rhs = Yc * Xc.transpose() + lambda * J;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("linearize_global: regularized state covariance is singular");
  }
  ReferenceStep out;
  out.gain = llt.solve(rhs.transpose()).transpose();
  out.offset = y_mean - out.gain * x_mean;
  out.covariance = covariance;
  return out;
}

TvlgPolicy linearize_global(const GlobalPolicy& policy,
                            const std::vector<Eigen::MatrixXd>& states,
                            const std::vector<Eigen::MatrixXd>& covariances, double ridge) {
  if (states.size() != covariances.size()) {
    throw ConfigurationError("linearize_global: horizon mismatch");
  }
  const Index T = static_cast<Index>(states.size());
  TvlgPolicy out;
  out.gains.resize(T);
  out.offsets.resize(T);
  out.covariances.resize(T);
  parallel_for(T, [&](Index t) {
    ReferenceStep step = linearize_global(policy, states[t], covariances[t], ridge);
    out.gains[t] = std::move(step.gain);
    out.offsets[t] = std::move(step.offset);
    out.covariances[t] = std::move(step.covariance);
  });
  return out;
}

void TrainingSet::append(const Eigen::MatrixXd& x, const Eigen::MatrixXd& u,
                         const Eigen::MatrixXd& precision, double weight) {
  if (x.cols() != u.cols()) throw ConfigurationError("TrainingSet: column mismatch");
  if (states.size() > 0 && (x.rows() != states.rows() || u.rows() != actions.rows())) {
    throw ConfigurationError("TrainingSet: dimension mismatch");
  }
  if (!(weight >= 0.0)) throw ConfigurationError("TrainingSet: weight must be >= 0");
  const Index M = size();
  const Index n = x.cols();
  states.conservativeResize(x.rows(), M + n);
  actions.conservativeResize(u.rows(), M + n);
  weights.conservativeResize(M + n);
  states.rightCols(n) = x;
  actions.rightCols(n) = u;
  weights.tail(n).setConstant(weight);
  for (Index i = 0; i < n; ++i) precisions.push_back(precision);
}

FitResult fit_global(GlobalPolicy& policy, const TrainingSet& data, const FitOptions& options) {
  if (options.epochs < 0 || !(options.learning_rate > 0.0) || !(options.growth >= 1.0)) {
    throw ConfigurationError("fit_global: invalid options");
  }
  // Keep positive-weight samples only.
  std::vector<Index> keep;
  for (Index i = 0; i < data.size(); ++i) {
    if (data.weights(i) > 0.0) keep.push_back(i);
  }
  if (keep.empty()) throw ConfigurationError("fit_global: no samples with positive weight");
  const Index M = static_cast<Index>(keep.size());
  Eigen::MatrixXd X(data.states.rows(), M), U(data.actions.rows(), M);
  Eigen::VectorXd w(M);
  std::vector<Eigen::MatrixXd> P(M);
  double trace_mean = 0.0;
  for (Index j = 0; j < M; ++j) {
    X.col(j) = data.states.col(keep[j]);
    U.col(j) = data.actions.col(keep[j]);
    w(j) = data.weights(keep[j]);
    P[j] = data.precisions[keep[j]];
    trace_mean += P[j].trace();
  }
  trace_mean /= static_cast<double>(M * U.rows());
  if (!(trace_mean > 0.0) || !std::isfinite(trace_mean)) {
    throw NumericalError("fit_global: precisions must have positive finite trace");
  }
  for (auto& p : P) p /= trace_mean;

  if (!policy.normalized()) {
    const Eigen::VectorXd shift = X * w / w.sum();
    const Eigen::VectorXd var =
        ((X.colwise() - shift).array().square().matrix() * w) / w.sum();
    Eigen::VectorXd scale(var.size());
    for (Index d = 0; d < var.size(); ++d) {
      scale(d) = var(d) > 1e-12 ? 1.0 / std::sqrt(var(d)) : 1.0;
    }
    policy.set_normalization(shift, scale);
  }

  FitResult result;
  Eigen::VectorXd grad;
  double current = policy.loss(X, U, P, w, &grad);
  if (!std::isfinite(current)) {
    throw NumericalError("fit_global: non-finite initial loss (" + std::to_string(current) +
                         ") over " + std::to_string(M) + " samples");
  }
  result.losses.push_back(current);
  double lr = options.learning_rate;
  GlobalPolicy trial = policy;
  Eigen::VectorXd trial_grad;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    bool accepted = false;
    for (int k = 0; k <= options.max_halvings; ++k) {
      trial.set_parameters(policy.parameters() - lr * grad);
      const double value = trial.loss(X, U, P, w, &trial_grad);
      if (std::isfinite(value) && value <= current) {
        policy.set_parameters(trial.parameters());
        current = value;
        grad.swap(trial_grad);
        lr *= options.growth;
        accepted = true;
        break;
      }
      lr *= 0.5;
      ++result.halvings;
    }
    if (!accepted) break;  // no descent step at machine precision
    result.losses.push_back(current);
  }
  return result;
}

MdgpsIterationResult mdgps_iteration(const std::vector<EnvironmentPtr>& envs,
                                     const MdgpsState& state, const MdgpsOptions& options,
                                     std::uint64_t seed) {
  const Index C = static_cast<Index>(envs.size());
  if (C == 0 || static_cast<Index>(state.locals.size()) != C) {
    throw ConfigurationError("mdgps_iteration: need one local policy per condition");
  }
  for (const auto& env : envs) {
    if (!env) throw ConfigurationError("mdgps_iteration: null environment");
    if (env->state_dim() != state.global.state_dim() ||
        env->action_dim() != state.global.action_dim()) {
      throw ConfigurationError("mdgps_iteration: global policy dimensions do not match env");
    }
  }

  std::vector<PilqrTrace> traces(C);
  std::vector<LocalIterationResult> updates(C);
  parallel_for(C, [&](Index c) {
    const LocalState& local = state.locals[c];
    pilqr_prepare(*envs[c], local, options.local,
                  derive_seed(seed, {static_cast<std::uint64_t>(c)}), traces[c]);
    traces[c].batch.condition_id = static_cast<int>(c);
    if (state.global_trained) {
      const TvlgPolicy anchor =
          linearize_global(state.global, traces[c].batch.all_states(),
                           local.policy.covariances, options.linearization_ridge);
      updates[c] = pilqr_finish(local, options.local, traces[c], &anchor);
    } else {
      updates[c] = pilqr_finish(local, options.local, traces[c]);
    }
  });

  MdgpsIterationResult result;
  result.state.global = state.global;
  TrainingSet data;
  for (Index c = 0; c < C; ++c) {
    const TvlgPolicy& p = updates[c].state.policy;
    const RolloutBatch& batch = traces[c].batch;
    for (Index t = 0; t < p.horizon(); ++t) {
      const Eigen::MatrixXd X = batch.states_at(t);
      const Eigen::MatrixXd U = (p.gains[t] * X).colwise() + p.offsets[t];
      const Eigen::MatrixXd precision = p.covariances[t].llt().solve(
          Eigen::MatrixXd::Identity(p.action_dim(), p.action_dim()));
      data.append(X, U, precision);
    }
    result.state.locals.push_back(updates[c].state);
    result.reports.push_back(updates[c].report);
  }
  result.fit = fit_global(result.state.global, data, options.fit);
  result.state.global_trained = true;
  return result;
}

Rollout global_rollout(const GlobalPolicy& policy, const Environment& env) {
  if (env.state_dim() != policy.state_dim() || env.action_dim() != policy.action_dim()) {
    throw ConfigurationError("global_rollout: dimension mismatch");
  }
  const Index T = env.horizon();
  Rollout r;
  r.costs.resize(T);
  Eigen::VectorXd x = env.reset();
  for (Index t = 0; t < T; ++t) {
    Eigen::VectorXd u = policy.mean(x);
    r.costs(t) = env.cost(x, u, t);
    r.states.push_back(x);
    r.actions.push_back(u);
    r.noise.push_back(Eigen::VectorXd::Zero(env.action_dim()));
    if (t + 1 < T) {
      x = env.step(r.states.back(), r.actions.back(), t);
      if (!x.allFinite()) throw RolloutDivergenceError("global_rollout: non-finite state", t + 1);
    }
  }
  return r;
}

}  // namespace pilqr

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

#include "pilqr/pi2.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/tools/minima.hpp>
#include <Eigen/Cholesky>

#include "pilqr/cost_approx.h"

namespace pilqr {

Eigen::MatrixXd cost_to_go(const Eigen::MatrixXd& step_costs) {
  Eigen::MatrixXd S(step_costs.rows(), step_costs.cols());
  const Index T = step_costs.cols();
  if (T == 0) return S;
  S.col(T - 1) = step_costs.col(T - 1);
  for (Index t = T - 2; t >= 0; --t) S.col(t) = step_costs.col(t) + S.col(t + 1);
  return S;
}

Eigen::MatrixXd cost_to_go(const RolloutBatch& batch) {
  return cost_to_go(batch.cost_table());
}

namespace {

struct FiniteRange {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  Index count = 0;
};

FiniteRange finite_range(const Eigen::VectorXd& S) {
  FiniteRange r;
  for (Index i = 0; i < S.size(); ++i) {
    if (!std::isfinite(S(i))) continue;
    r.min = std::min(r.min, S(i));
    r.max = std::max(r.max, S(i));
    ++r.count;
  }
  return r;
}

}  // namespace

double dual_function(const Eigen::VectorXd& S, double eps, double eta) {
  const FiniteRange r = finite_range(S);
  if (r.count == 0) throw ConfigurationError("dual_function: no finite costs");
  double sum = 0.0;
  for (Index i = 0; i < S.size(); ++i) {
    if (std::isfinite(S(i))) sum += std::exp(-(S(i) - r.min) / eta);
  }
  return eta * eps + r.min + eta * std::log(sum / static_cast<double>(r.count));
}

Eigen::VectorXd pi2_weights(const Eigen::VectorXd& S, double eta) {
  if (!(eta > 0.0)) throw ConfigurationError("pi2_weights: eta must be positive");
  const FiniteRange r = finite_range(S);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(S.size());
  if (r.count == 0) return w;
  for (Index i = 0; i < S.size(); ++i) {
    if (std::isfinite(S(i))) w(i) = std::exp(-(S(i) - r.min) / eta);
  }
  return w / w.sum();
}

double kl_from_uniform(const Eigen::VectorXd& w) {
  double kl = 0.0;
  const double n = static_cast<double>(w.size());
  for (Index i = 0; i < w.size(); ++i) {
    if (w(i) > 0.0) kl += w(i) * std::log(n * w(i));
  }
  return kl;
}

double effective_sample_size(const Eigen::VectorXd& w) {
  const double sq = w.squaredNorm();
  return sq > 0.0 ? 1.0 / sq : 0.0;
}

DualResult dual_eta(const Eigen::VectorXd& S, double eps, const DualOptions& options) {
  if (!(eps > 0.0)) throw ConfigurationError("dual_eta: eps must be positive");
  const FiniteRange r = finite_range(S);
  if (r.count == 0) throw ConfigurationError("dual_eta: no finite costs");
  const double spread = r.max - r.min;
  DualResult out;
  if (!(spread > 1e-12 * std::max(1.0, std::abs(r.max)))) {
    out.eta = std::pow(10.0, options.log10_max) * (spread > 0.0 ? spread : 1.0);
    out.kl = 0.0;
    out.degenerate = true;
    return out;
  }
  auto objective = [&](double y) { return dual_function(S, eps, spread * std::pow(10.0, y)); };
  boost::uintmax_t iterations = static_cast<boost::uintmax_t>(options.max_iterations);
  const auto best = boost::math::tools::brent_find_minima(
      objective, options.log10_min, options.log10_max,
      std::numeric_limits<double>::digits / 2, iterations);
  out.eta = spread * std::pow(10.0, best.first);
  out.kl = kl_from_uniform(pi2_weights(S, out.eta));
  return out;
}

Pi2Weights compute_pi2_weights(const Eigen::MatrixXd& S, const Eigen::VectorXd& eps,
                               const DualOptions& options) {
  const Index N = S.rows();
  const Index T = S.cols();
  if (eps.size() != T) throw ConfigurationError("compute_pi2_weights: eps size mismatch");
  Pi2Weights out;
  out.weights.resize(N, T);
  out.eta.resize(T);
  out.kl.resize(T);
  out.eps = eps;
  parallel_for(T, [&](Index t) {
    if (finite_range(S.col(t)).count == 0) {
      out.eta(t) = 0.0;
      out.weights.col(t).setConstant(1.0 / static_cast<double>(N));
      out.kl(t) = 0.0;
      return;
    }
    const DualResult d = dual_eta(S.col(t), eps(t), options);
    out.eta(t) = d.eta;
    out.weights.col(t) = pi2_weights(S.col(t), d.eta);
    out.kl(t) = kl_from_uniform(out.weights.col(t));
  });
  return out;
}

TvlgPolicy weighted_ml_update(const std::vector<Eigen::MatrixXd>& states,
                              const std::vector<Eigen::MatrixXd>& controls,
                              const Eigen::MatrixXd& weights, const TvlgPolicy& prev,
                              const MlUpdateOptions& options,
                              MlUpdateDiagnostics* diagnostics) {
  const Index T = prev.horizon();
  const Index nx = prev.state_dim();
  const Index nu = prev.action_dim();
  if (static_cast<Index>(states.size()) != T || static_cast<Index>(controls.size()) != T ||
      weights.cols() != T) {
    throw ConfigurationError("weighted_ml_update: horizon mismatch");
  }
  const Index N = weights.rows();
  if (N < 2) throw ConfigurationError("weighted_ml_update: need at least 2 samples");
  if (options.ridge < 0.0 || options.cov_reg < 0.0 || options.cov_damping < 0.0 ||
      options.cov_damping > 1.0) {
    throw ConfigurationError("weighted_ml_update: invalid options");
  }

  TvlgPolicy out = prev;
  std::vector<double> ess(T, 0.0);
  std::vector<char> degenerate(T, 0);
  parallel_for(T, [&](Index t) {
    const Eigen::MatrixXd& X = states[t];
    const Eigen::MatrixXd& U = controls[t];
    if (X.rows() != nx || U.rows() != nu || X.cols() != N || U.cols() != N) {
      throw ConfigurationError("weighted_ml_update: dimension mismatch at timestep " +
                               std::to_string(t));
    }
    const Eigen::VectorXd w = weights.col(t);
    if (!w.allFinite() || w.minCoeff() < 0.0 || std::abs(w.sum() - 1.0) > 1e-9) {
      throw NumericalError("weighted_ml_update: weights must be nonnegative and sum to one", t);
    }
    ess[t] = effective_sample_size(w);

    const Eigen::VectorXd x_mean = X * w;
    const Eigen::VectorXd u_mean = U * w;
    Eigen::MatrixXd K;
    if (options.freeze_gains) {
      K = prev.gains[t];
    } else {
      const Eigen::MatrixXd Xc = X.colwise() - x_mean;
      const Eigen::MatrixXd Uc = U.colwise() - u_mean;
      Eigen::MatrixXd sxx = Xc * w.asDiagonal() * Xc.transpose();
      sxx.diagonal().array() += options.ridge;
      const Eigen::MatrixXd sux =
          Uc * w.asDiagonal() * Xc.transpose() + options.ridge * prev.gains[t];
      Eigen::LDLT<Eigen::MatrixXd> ldlt(sxx);
      if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0)) {
        // No state spread and no ridge: keep the previous gains.
        K = prev.gains[t];
      } else {
        K = ldlt.solve(sux.transpose()).transpose();
      }
    }
    const Eigen::VectorXd k = u_mean - K * x_mean;

    Eigen::MatrixXd cov;
    if (ess[t] < options.min_ess) {
      degenerate[t] = 1;
      cov = prev.covariances[t];
    } else {
      Eigen::MatrixXd R = U - K * X;
      R.colwise() -= k;
      Eigen::MatrixXd ml = R * w.asDiagonal() * R.transpose();
      ml.diagonal().array() += options.cov_reg;
      cov = options.cov_damping * ml + (1.0 - options.cov_damping) * prev.covariances[t];
    }
    out.gains[t] = K;
    out.offsets[t] = k;
    out.covariances[t] = clamp_eigenvalues(cov, options.cov_floor);
  });

  if (diagnostics) {
    diagnostics->ess = ess;
    diagnostics->degenerate_steps = 0;
    for (char d : degenerate) diagnostics->degenerate_steps += d;
  }
  return out;
}

}  // namespace pilqr

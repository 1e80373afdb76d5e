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

#include "pilqr/lqr_flm.h"

#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Cholesky>

#include "pilqr/kl.h"

namespace pilqr {
namespace {

constexpr double kInfeasible = std::numeric_limits<double>::infinity();

struct Candidate {
  double kl = kInfeasible;
  Eigen::MatrixXd gain;
  Eigen::VectorXd offset;
  Eigen::MatrixXd covariance;
};

class ConstrainedStep {
 public:
  ConstrainedStep(Index t, const QuadraticQ& q, const ReferenceStep& ref,
                  const Eigen::MatrixXd& states)
      : t_(t), q_(q), ref_(ref), states_(states) {
    Eigen::LLT<Eigen::MatrixXd> llt(ref.covariance);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("solve_eta: reference covariance is not positive definite", t);
    }
    const Index nu = ref.covariance.rows();
    ref_precision_ = llt.solve(Eigen::MatrixXd::Identity(nu, nu));
    ref_precision_ = 0.5 * (ref_precision_ + ref_precision_.transpose());
    precision_gain_ = ref_precision_ * ref.gain;
    precision_offset_ = ref_precision_ * ref.offset;
  }

  Candidate evaluate(double eta) const {
    Candidate c;
    Eigen::MatrixXd precision = q_.hess_uu / eta + ref_precision_;
    precision = 0.5 * (precision + precision.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(precision);
    if (llt.info() != Eigen::Success) return c;
    const Index nu = precision.rows();
    c.covariance = llt.solve(Eigen::MatrixXd::Identity(nu, nu));
    c.covariance = 0.5 * (c.covariance + c.covariance.transpose());
    c.gain = -llt.solve(q_.hess_xu.transpose() / eta - precision_gain_);
    c.offset = -llt.solve(q_.grad_u / eta - precision_offset_);
    Eigen::LLT<Eigen::MatrixXd> check(c.covariance);
    if (check.info() != Eigen::Success) return c;
    c.kl = conditional_kl(c.gain, c.offset, c.covariance, ref_.gain, ref_.offset,
                          ref_.covariance, states_, t_);
    if (!std::isfinite(c.kl)) c.kl = kInfeasible;
    return c;
  }

  // Slack constraint: the mean drops the pull toward the reference and the
  // covariance keeps the maximum-entropy form eta * Q_uu^-1.
  Candidate unconstrained(double eta) const {
    Candidate c;
    Eigen::LLT<Eigen::MatrixXd> llt(q_.hess_uu);
    if (llt.info() != Eigen::Success) return c;
    const Index nu = q_.hess_uu.rows();
    c.covariance = eta * llt.solve(Eigen::MatrixXd::Identity(nu, nu));
    c.covariance = 0.5 * (c.covariance + c.covariance.transpose());
    c.gain = -llt.solve(q_.hess_xu.transpose());
    c.offset = -llt.solve(q_.grad_u);
    c.kl = conditional_kl(c.gain, c.offset, c.covariance, ref_.gain, ref_.offset,
                          ref_.covariance, states_, t_);
    if (!std::isfinite(c.kl)) c.kl = kInfeasible;
    return c;
  }

 private:
  Index t_;
  const QuadraticQ& q_;
  const ReferenceStep& ref_;
  const Eigen::MatrixXd& states_;
  Eigen::MatrixXd ref_precision_;
  Eigen::MatrixXd precision_gain_;
  Eigen::VectorXd precision_offset_;
};

EtaSolution make_solution(double eta, Candidate c, EtaStatus status, bool nonmonotone) {
  EtaSolution s;
  s.eta = eta;
  s.kl = c.kl;
  s.status = status;
  s.nonmonotone = nonmonotone;
  s.gain = std::move(c.gain);
  s.offset = std::move(c.offset);
  s.covariance = std::move(c.covariance);
  return s;
}

EtaSolution grid_scan(const ConstrainedStep& step, Index t, double eps,
                      const LqrFlmOptions& options) {
  const double lo = std::log(options.eta_min);
  const double hi = std::log(options.eta_max);
  const int n = std::max(2, options.fallback_grid_points);
  std::optional<Candidate> best;
  double best_eta = 0.0;
  double best_score = kInfeasible;
  for (int i = 0; i < n; ++i) {
    const double eta = std::exp(lo + (hi - lo) * i / (n - 1));
    Candidate c = step.evaluate(eta);
    if (!std::isfinite(c.kl)) continue;
    // Prefer points satisfying the bound; among them the one closest to eps.
    const double score = std::abs(c.kl - eps) + (c.kl > eps ? 1e6 * eps : 0.0);
    if (score < best_score) {
      best_score = score;
      best_eta = eta;
      best = std::move(c);
    }
  }
  if (!best) {
    throw ConstraintInfeasibleError("solve_eta: no temperature gives a positive definite "
                                    "covariance", t);
  }
  return make_solution(best_eta, std::move(*best), EtaStatus::kGridFallback, true);
}

}  // namespace

const char* to_string(EtaStatus status) {
  switch (status) {
    case EtaStatus::kConverged: return "converged";
    case EtaStatus::kLowerBound: return "lower_bound";
    case EtaStatus::kUpperBound: return "upper_bound";
    case EtaStatus::kGridFallback: return "grid_fallback";
  }
  return "unknown";
}

EtaSolution solve_eta(Index t, const QuadraticQ& q, const ReferenceStep& ref,
                      const Eigen::MatrixXd& states, double eps,
                      const LqrFlmOptions& options) {
  if (!(eps > 0.0)) throw ConfigurationError("solve_eta: eps must be positive");
  if (!(options.eta_min > 0.0) || !(options.eta_max > options.eta_min)) {
    throw ConfigurationError("solve_eta: invalid temperature bracket");
  }
  const ConstrainedStep step(t, q, ref, states);
  const double tol = options.kl_tolerance * eps;

  Candidate at_max = step.evaluate(options.eta_max);
  if (!std::isfinite(at_max.kl)) {
    throw ConstraintInfeasibleError(
        "solve_eta: covariance not positive definite even at the largest temperature", t);
  }
  if (at_max.kl > eps + tol) {
    return make_solution(options.eta_max, std::move(at_max), EtaStatus::kUpperBound, false);
  }
  Candidate at_min = step.evaluate(options.eta_min);
  if (std::isfinite(at_min.kl) && at_min.kl <= eps + tol) {
    if (options.unconstrained_when_slack) {
      Candidate limit = step.unconstrained(options.eta_min);
      if (std::isfinite(limit.kl) && limit.kl <= eps + tol) at_min = std::move(limit);
    }
    return make_solution(options.eta_min, std::move(at_min), EtaStatus::kLowerBound, false);
  }

  // Invariant: KL(lo) > eps (or infeasible), KL(hi) <= eps + tol.
  double log_lo = std::log(options.eta_min);
  double log_hi = std::log(options.eta_max);
  double kl_lo = at_min.kl;
  double kl_hi = at_max.kl;
  for (int it = 0; it < options.max_search_iterations; ++it) {
    const double log_mid = 0.5 * (log_lo + log_hi);
    const double eta = std::exp(log_mid);
    Candidate c = step.evaluate(eta);
    if (std::isfinite(c.kl) && (c.kl > kl_lo * (1.0 + 1e-9) + 1e-12 ||
                                c.kl < kl_hi * (1.0 - 1e-9) - 1e-12)) {
      return grid_scan(step, t, eps, options);
    }
    if (std::isfinite(c.kl) && std::abs(c.kl - eps) <= tol) {
      return make_solution(eta, std::move(c), EtaStatus::kConverged, false);
    }
    if (!std::isfinite(c.kl) || c.kl > eps) {
      log_lo = log_mid;
      kl_lo = c.kl;
    } else {
      log_hi = log_mid;
      kl_hi = c.kl;
    }
    if (log_hi - log_lo < 1e-14) break;
  }
  // Bracket collapsed without meeting the tolerance: KL jumps across eps.
  return grid_scan(step, t, eps, options);
}

double BackwardPassResult::mean_eta() const {
  if (steps.empty()) return 0.0;
  double s = 0.0;
  for (const auto& st : steps) s += st.eta;
  return s / static_cast<double>(steps.size());
}

double BackwardPassResult::converged_fraction() const {
  if (steps.empty()) return 0.0;
  double n = 0.0;
  for (const auto& st : steps) n += st.status == EtaStatus::kConverged ? 1.0 : 0.0;
  return n / static_cast<double>(steps.size());
}

BackwardPassResult backward_pass(const FittedDynamics& dyn, const QuadCostApprox& cost,
                                 const TvlgPolicy& prev, const Eigen::VectorXd& eps,
                                 const std::vector<Eigen::MatrixXd>& kl_states,
                                 const LqrFlmOptions& options) {
  prev.validate();
  const Index T = prev.horizon();
  const Index nx = prev.state_dim();
  if (cost.horizon() != T || dyn.transitions() != T - 1 || eps.size() != T ||
      static_cast<Index>(kl_states.size()) != T) {
    throw ConfigurationError("backward_pass: horizon mismatch between inputs");
  }
  for (Index t = 0; t < T; ++t) {
    if (!(eps(t) > 0.0)) throw ConfigurationError("backward_pass: eps must be positive");
  }

  BackwardPassResult result;
  result.policy = prev;
  result.steps.resize(T);

  Eigen::VectorXd value_grad = Eigen::VectorXd::Zero(nx);
  Eigen::MatrixXd value_hess = Eigen::MatrixXd::Zero(nx, nx);

  for (Index t = T - 1; t >= 0; --t) {
    const QuadCostStep& c = cost.steps[t];
    BackwardPassStep& rec = result.steps[t];
    QuadraticQ& q = rec.q;

    // Cost expansion re-expressed about the origin.
    q.hess_xx = c.hess_xx;
    q.hess_uu = c.hess_uu;
    q.hess_xu = c.hess_xu;
    q.grad_x = c.grad_x - c.hess_xx * c.x_ref - c.hess_xu * c.u_ref;
    q.grad_u = c.grad_u - c.hess_uu * c.u_ref - c.hess_xu.transpose() * c.x_ref;

    if (t < T - 1) {
      const Eigen::MatrixXd& fx = dyn.state_jacobian[t];
      const Eigen::MatrixXd& fu = dyn.control_jacobian[t];
      const Eigen::VectorXd next_grad = value_grad + value_hess * dyn.offset[t];
      q.grad_x += fx.transpose() * next_grad;
      q.grad_u += fu.transpose() * next_grad;
      q.hess_xx += fx.transpose() * value_hess * fx;
      q.hess_uu += fu.transpose() * value_hess * fu;
      q.hess_xu += fx.transpose() * value_hess * fu;
    }
    q.hess_xx = 0.5 * (q.hess_xx + q.hess_xx.transpose());
    q.hess_uu = 0.5 * (q.hess_uu + q.hess_uu.transpose());
    if (!q.grad_x.allFinite() || !q.grad_u.allFinite() || !q.hess_xx.allFinite() ||
        !q.hess_uu.allFinite() || !q.hess_xu.allFinite()) {
      throw NumericalError("backward_pass: non-finite Q-function", t);
    }

    // Levenberg regularization until Q_uu is positive definite. Past mu_max
    // the raw Q_uu is kept; the temperature search then only accepts eta
    // for which Q_uu / eta + Sigma_prev^-1 is positive definite.
    double mu = 0.0;
    for (;;) {
      Eigen::MatrixXd reg = q.hess_uu;
      reg.diagonal().array() += mu;
      if (Eigen::LLT<Eigen::MatrixXd>(reg).info() == Eigen::Success) {
        q.hess_uu = reg;
        break;
      }
      mu = mu == 0.0 ? options.mu_init : mu * options.mu_factor;
      if (mu > options.mu_max) {
        mu = std::numeric_limits<double>::infinity();
        break;
      }
    }
    rec.mu = mu;

    const ReferenceStep ref{prev.gains[t], prev.offsets[t], prev.covariances[t]};
    EtaSolution sol;
    try {
      sol = solve_eta(t, q, ref, kl_states[t], eps(t), options);
    } catch (const ConstraintInfeasibleError&) {
      // eta -> infinity: the step keeps the previous policy.
      sol.eta = options.eta_max;
      sol.kl = 0.0;
      sol.status = EtaStatus::kUpperBound;
      sol.gain = ref.gain;
      sol.offset = ref.offset;
      sol.covariance = ref.covariance;
    }
    rec.eta = sol.eta;
    rec.eps = eps(t);
    rec.kl = sol.kl;
    rec.status = sol.status;
    rec.nonmonotone = sol.nonmonotone;

    const Eigen::MatrixXd& K = sol.gain;
    const Eigen::VectorXd& k = sol.offset;
    const Eigen::MatrixXd q_ux = q.hess_xu.transpose();
    value_grad = q.grad_x + K.transpose() * q.hess_uu * k + K.transpose() * q.grad_u +
                 q.hess_xu * k;
    value_hess = q.hess_xx + K.transpose() * q.hess_uu * K + q.hess_xu * K + K.transpose() * q_ux;
    value_hess = 0.5 * (value_hess + value_hess.transpose());
    rec.value_grad = value_grad;
    rec.value_hess = value_hess;

    result.policy.gains[t] = K;
    result.policy.offsets[t] = k;
    result.policy.covariances[t] = sol.covariance;
  }
  return result;
}

}  // namespace pilqr

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

#ifndef PILQR_TESTS_TEST_UTIL_H_
#define PILQR_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "pilqr/cost_approx.h"
#include "pilqr/dynamics_fit.h"
#include "pilqr/envs/lq_env.h"
#include "pilqr/tvlg_policy.h"

namespace pilqr::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  Eigen::MatrixXd matrix(Index rows, Index cols, double scale = 1.0) {
    Eigen::MatrixXd m(rows, cols);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = scale * normal();
    return m;
  }
  Eigen::VectorXd vector(Index n, double scale = 1.0) { return matrix(n, 1, scale); }
  // Symmetric positive definite with eigenvalues in [lo, hi].
  Eigen::MatrixXd spd(Index n, double lo = 0.5, double hi = 2.0) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(matrix(n, n));
    const Eigen::MatrixXd Q = qr.householderQ();
    Eigen::VectorXd d(n);
    for (Index i = 0; i < n; ++i) d(i) = uniform(lo, hi);
    return Q * d.asDiagonal() * Q.transpose();
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

inline TvlgPolicy random_policy(Rng& rng, Index T, Index nx, Index nu, double gain_scale = 0.3) {
  TvlgPolicy p;
  for (Index t = 0; t < T; ++t) {
    p.gains.push_back(rng.matrix(nu, nx, gain_scale));
    p.offsets.push_back(rng.vector(nu, 0.5));
    p.covariances.push_back(rng.spd(nu, 0.2, 1.0));
  }
  return p;
}

// Time-varying LQ problem with mildly stable dynamics.
inline LqProblem random_lq_problem(Rng& rng, Index T, Index nx, Index nu) {
  LqProblem p;
  for (Index t = 0; t < T; ++t) {
    p.A.push_back(Eigen::MatrixXd::Identity(nx, nx) + rng.matrix(nx, nx, 0.1));
    p.B.push_back(rng.matrix(nx, nu, 0.5));
    p.Q.push_back(rng.spd(nx, 0.5, 2.0));
    p.R.push_back(rng.spd(nu, 0.5, 2.0));
  }
  p.x0 = rng.vector(nx);
  return p;
}

// Central differences of a scalar function.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd a = x, b = x;
    a(i) += h;
    b(i) -= h;
    g(i) = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

inline Eigen::MatrixXd fd_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                                  const Eigen::VectorXd& x, double h = 1e-4) {
  const Index n = x.size();
  Eigen::MatrixXd H(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      Eigen::VectorXd pp = x, pm = x, mp = x, mm = x;
      pp(i) += h, pp(j) += h;
      pm(i) += h, pm(j) -= h;
      mp(i) -= h, mp(j) += h;
      mm(i) -= h, mm(j) -= h;
      H(i, j) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
    }
  }
  return H;
}

inline double rel_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double floor = 1e-8) {
  return (a - b).norm() / std::max(b.norm(), floor);
}

// The true dynamics of an LQ problem in fitted-model form.
inline FittedDynamics exact_dynamics(const LqProblem& p) {
  FittedDynamics d;
  const Index nx = p.x0.size();
  for (Index t = 0; t + 1 < p.horizon(); ++t) {
    d.state_jacobian.push_back(p.A[t]);
    d.control_jacobian.push_back(p.B[t]);
    d.offset.push_back(Eigen::VectorXd::Zero(nx));
    d.noise_covariance.push_back(p.noise_scale * p.noise_scale *
                                 Eigen::MatrixXd::Identity(nx, nx));
  }
  return d;
}

// The exact quadratic cost of an LQ problem, expanded about the origin.
inline QuadCostApprox exact_cost(const LqProblem& p) {
  const Index nx = p.x0.size(), nu = p.B.front().cols();
  QuadCostApprox c = QuadCostApprox::zero(p.horizon(), nx, nu);
  for (Index t = 0; t < p.horizon(); ++t) {
    c.steps[t].hess_xx = p.Q[t];
    c.steps[t].hess_uu = p.R[t];
  }
  return c;
}

struct RiccatiSolution {
  std::vector<Eigen::MatrixXd> gains;
  std::vector<Eigen::MatrixXd> value_hess;  // P_t
  double optimal_cost = 0.0;                // from x0, noise-free
};

// Textbook discrete-time Riccati recursion for cost 1/2 x'Qx + 1/2 u'Ru,
// with the last step taking no action that affects the future.
inline RiccatiSolution riccati(const LqProblem& p) {
  const Index T = p.horizon();
  const Index nx = p.x0.size(), nu = p.B.front().cols();
  RiccatiSolution s;
  s.gains.assign(T, Eigen::MatrixXd::Zero(nu, nx));
  s.value_hess.assign(T, Eigen::MatrixXd::Zero(nx, nx));
  Eigen::MatrixXd P = p.Q[T - 1];
  s.value_hess[T - 1] = P;
  for (Index t = T - 2; t >= 0; --t) {
    const Eigen::MatrixXd Huu = p.R[t] + p.B[t].transpose() * P * p.B[t];
    const Eigen::MatrixXd Hux = p.B[t].transpose() * P * p.A[t];
    const Eigen::MatrixXd K = -Huu.llt().solve(Hux);
    P = p.Q[t] + p.A[t].transpose() * P * p.A[t] + Hux.transpose() * K;
    P = 0.5 * (P + P.transpose());
    s.gains[t] = K;
    s.value_hess[t] = P;
  }
  s.optimal_cost = 0.5 * p.x0.dot(s.value_hess[0] * p.x0);
  return s;
}

}  // namespace pilqr::testing

#endif  // PILQR_TESTS_TEST_UTIL_H_

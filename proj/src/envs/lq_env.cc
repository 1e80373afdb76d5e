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

#include "pilqr/envs/lq_env.h"

#include <string>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace pilqr {

LqEnvironment::LqEnvironment(LqProblem problem) : problem_(std::move(problem)) {
  const Index T = problem_.horizon();
  if (T < 1) throw ConfigurationError("lq env: empty horizon");
  if (static_cast<Index>(problem_.B.size()) != T ||
      static_cast<Index>(problem_.Q.size()) != T ||
      static_cast<Index>(problem_.R.size()) != T) {
    throw ConfigurationError("lq env: A, B, Q, R must have one entry per step");
  }
  const Index nx = problem_.x0.size();
  const Index nu = problem_.B.front().cols();
  if (nx < 1 || nu < 1) throw ConfigurationError("lq env: empty state or action");
  if (problem_.noise_scale < 0.0) {
    throw ConfigurationError("lq env: negative noise scale");
  }
  for (Index t = 0; t < T; ++t) {
    const std::string at = " at step " + std::to_string(t);
    if (problem_.A[t].rows() != nx || problem_.A[t].cols() != nx ||
        problem_.B[t].rows() != nx || problem_.B[t].cols() != nu ||
        problem_.Q[t].rows() != nx || problem_.Q[t].cols() != nx ||
        problem_.R[t].rows() != nu || problem_.R[t].cols() != nu) {
      throw ConfigurationError("lq env: inconsistent dimensions" + at);
    }
    const Eigen::MatrixXd& Q = problem_.Q[t];
    const Eigen::MatrixXd& R = problem_.R[t];
    if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 ||
        (R - R.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
      throw ConfigurationError("lq env: Q and R must be symmetric" + at);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eq(Q, Eigen::EigenvaluesOnly);
    if (eq.eigenvalues().minCoeff() < -1e-12) {
      throw ConfigurationError("lq env: Q is not positive semidefinite" + at);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(R);
    if (llt.info() != Eigen::Success) {
      throw ConfigurationError("lq env: R is not positive definite" + at);
    }
  }
}

Eigen::VectorXd LqEnvironment::step(const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& u, Index t) const {
  return problem_.A[t] * x + problem_.B[t] * u;
}

double LqEnvironment::cost(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                           Index t) const {
  return 0.5 * x.dot(problem_.Q[t] * x) + 0.5 * u.dot(problem_.R[t] * u);
}

CostExpansion LqEnvironment::cost_expansion(const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& u,
                                            Index t) const {
  CostExpansion e;
  e.value = cost(x, u, t);
  e.lx = problem_.Q[t] * x;
  e.lu = problem_.R[t] * u;
  e.lxx = problem_.Q[t];
  e.luu = problem_.R[t];
  e.lxu = Eigen::MatrixXd::Zero(x.size(), u.size());
  return e;
}

std::shared_ptr<const LqEnvironment> make_lq_env(LqProblem problem) {
  return std::make_shared<const LqEnvironment>(std::move(problem));
}

std::shared_ptr<const LqEnvironment> make_lq_env(
    const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
    const Eigen::MatrixXd& R, const Eigen::VectorXd& x0, Index horizon,
    double noise_scale) {
  LqProblem p;
  p.A.assign(horizon, A);
  p.B.assign(horizon, B);
  p.Q.assign(horizon, Q);
  p.R.assign(horizon, R);
  p.x0 = x0;
  p.noise_scale = noise_scale;
  return make_lq_env(std::move(p));
}

}  // namespace pilqr

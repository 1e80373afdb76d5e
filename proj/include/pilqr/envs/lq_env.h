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

#ifndef PILQR_ENVS_LQ_ENV_H_
#define PILQR_ENVS_LQ_ENV_H_

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "pilqr/envs/environment.h"

namespace pilqr {

// Time-varying linear-quadratic problem
//   x_{t+1} = A_t x_t + B_t u_t + w_t,  c_t = 0.5 x'Q_t x + 0.5 u'R_t u.
struct LqProblem {
  std::vector<Eigen::MatrixXd> A;
  std::vector<Eigen::MatrixXd> B;
  std::vector<Eigen::MatrixXd> Q;
  std::vector<Eigen::MatrixXd> R;
  Eigen::VectorXd x0;
  double noise_scale = 0.0;
  double dt = 0.05;

  Index horizon() const { return static_cast<Index>(A.size()); }
};

class LqEnvironment final : public Environment {
 public:
  // Throws ConfigurationError on ragged dimensions, Q not PSD or R not PD.
  explicit LqEnvironment(LqProblem problem);

  std::string name() const override { return "lq"; }
  Index state_dim() const override { return problem_.x0.size(); }
  Index action_dim() const override { return problem_.B.front().cols(); }
  Index horizon() const override { return problem_.horizon(); }
  double dt() const override { return problem_.dt; }

  Eigen::VectorXd reset() const override { return problem_.x0; }
  Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                       Index t) const override;
  double process_noise() const override { return problem_.noise_scale; }
  double cost(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
              Index t) const override;
  CostExpansion cost_expansion(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                               Index t) const override;

  const LqProblem& problem() const { return problem_; }

 private:
  LqProblem problem_;
};

std::shared_ptr<const LqEnvironment> make_lq_env(LqProblem problem);

// Time-invariant convenience overload: the same matrices at every step.
std::shared_ptr<const LqEnvironment> make_lq_env(
    const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
    const Eigen::MatrixXd& R, const Eigen::VectorXd& x0, Index horizon,
    double noise_scale = 0.0);

}  // namespace pilqr

#endif  // PILQR_ENVS_LQ_ENV_H_

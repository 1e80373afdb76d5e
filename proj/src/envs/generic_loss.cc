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

#include "pilqr/envs/generic_loss.h"

#include <cmath>

#include "pilqr/common.h"

namespace pilqr {

LossValue generic_loss(const Eigen::VectorXd& z, const GenericLoss& params) {
  if (!(params.gamma > 0.0)) {
    throw ConfigurationError("generic_loss: gamma must be positive");
  }
  const Index n = z.size();
  const double sq = z.squaredNorm();
  const double root = std::sqrt(params.gamma + sq);
  LossValue out;
  out.value = 0.5 * params.alpha * sq + params.beta * root;
  out.grad = (params.alpha + params.beta / root) * z;
  out.hessian = (params.alpha + params.beta / root) * Eigen::MatrixXd::Identity(n, n);
  out.hessian.noalias() -= (params.beta / (root * root * root)) * z * z.transpose();
  return out;
}

double generic_loss_value(const Eigen::VectorXd& z, const GenericLoss& params) {
  const double sq = z.squaredNorm();
  return 0.5 * params.alpha * sq + params.beta * std::sqrt(params.gamma + sq);
}

}  // namespace pilqr

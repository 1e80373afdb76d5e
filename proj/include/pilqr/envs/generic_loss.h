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

#ifndef PILQR_ENVS_GENERIC_LOSS_H_
#define PILQR_ENVS_GENERIC_LOSS_H_

#include <Eigen/Core>

namespace pilqr {

struct GenericLoss {
  double alpha = 0.0;  // weight of the squared term
  double beta = 0.0;   // weight of the smoothed-norm term
  double gamma = 1e-5;
};

struct LossValue {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hessian;
};

// l(z) = 0.5 * alpha * |z|^2 + beta * sqrt(gamma + |z|^2), with its exact
// gradient and Hessian. Requires gamma > 0.
LossValue generic_loss(const Eigen::VectorXd& z, const GenericLoss& params);
double generic_loss_value(const Eigen::VectorXd& z, const GenericLoss& params);

}  // namespace pilqr

#endif  // PILQR_ENVS_GENERIC_LOSS_H_

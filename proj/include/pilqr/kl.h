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

#ifndef PILQR_KL_H_
#define PILQR_KL_H_

#include <Eigen/Core>

#include "pilqr/tvlg_policy.h"

namespace pilqr {

// Closed-form KL(N(mean_p, cov_p) || N(mean_q, cov_q)) in nats.
double gaussian_kl(const Eigen::VectorXd& mean_p, const Eigen::MatrixXd& cov_p,
                   const Eigen::VectorXd& mean_q, const Eigen::MatrixXd& cov_q);

// Average over the columns of `states` of
//   KL(p_new(.|x, t) || p_old(.|x, t)).
// Throws NumericalError (with t) when either covariance is singular, and
// ConfigurationError on empty states or mismatched dimensions.
double conditional_kl(const TvlgPolicy& p_new, const TvlgPolicy& p_old,
                      const Eigen::MatrixXd& states, Index t);

// Same quantity from raw per-timestep parameters; used inside the
// temperature search where the candidate policy is not materialized.
double conditional_kl(const Eigen::MatrixXd& gain_new, const Eigen::VectorXd& offset_new,
                      const Eigen::MatrixXd& cov_new, const Eigen::MatrixXd& gain_old,
                      const Eigen::VectorXd& offset_old, const Eigen::MatrixXd& cov_old,
                      const Eigen::MatrixXd& states, Index t = -1);

}  // namespace pilqr

#endif  // PILQR_KL_H_

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

#include "pilqr/tvlg_policy.h"

#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace pilqr {

TvlgPolicy TvlgPolicy::zero(Index horizon, Index state_dim, Index action_dim,
                            double variance) {
  if (horizon < 1 || state_dim < 1 || action_dim < 1 || !(variance > 0.0)) {
    throw ConfigurationError("TvlgPolicy::zero: invalid dimensions or variance");
  }
  TvlgPolicy p;
  p.gains.assign(horizon, Eigen::MatrixXd::Zero(action_dim, state_dim));
  p.offsets.assign(horizon, Eigen::VectorXd::Zero(action_dim));
  p.covariances.assign(horizon,
                       variance * Eigen::MatrixXd::Identity(action_dim, action_dim));
  return p;
}

void TvlgPolicy::validate() const {
  const Index T = horizon();
  if (T < 1) throw ConfigurationError("TvlgPolicy: empty horizon");
  if (static_cast<Index>(offsets.size()) != T ||
      static_cast<Index>(covariances.size()) != T) {
    throw ConfigurationError("TvlgPolicy: per-timestep arrays differ in length");
  }
  const Index nx = state_dim();
  const Index nu = action_dim();
  for (Index t = 0; t < T; ++t) {
    if (gains[t].rows() != nu || gains[t].cols() != nx ||
        offsets[t].size() != nu || covariances[t].rows() != nu ||
        covariances[t].cols() != nu) {
      throw ConfigurationError("TvlgPolicy: inconsistent dimensions at timestep " +
                               std::to_string(t));
    }
    const Eigen::MatrixXd& S = covariances[t];
    if (!S.allFinite() || (S - S.transpose()).cwiseAbs().maxCoeff() >
                              1e-9 * (1.0 + S.cwiseAbs().maxCoeff())) {
      throw NumericalError("TvlgPolicy: covariance not symmetric", t);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(S);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("TvlgPolicy: covariance not positive definite", t);
    }
  }
}

Eigen::MatrixXd TvlgPolicy::cholesky(Index t) const {
  Eigen::LLT<Eigen::MatrixXd> llt(covariances[t]);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("TvlgPolicy: Cholesky factorization failed", t);
  }
  return llt.matrixL();
}

std::vector<Eigen::MatrixXd> TvlgPolicy::cholesky_factors() const {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(covariances.size());
  for (Index t = 0; t < horizon(); ++t) out.push_back(cholesky(t));
  return out;
}

void TvlgPolicy::floor_covariances(double min_eigenvalue) {
  if (!(min_eigenvalue > 0.0)) return;
  for (auto& S : covariances) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (S + S.transpose()));
    Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(min_eigenvalue);
    S = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
    S = 0.5 * (S + S.transpose());
  }
}

Index RolloutBatch::horizon() const {
  return rollouts.empty() ? 0 : static_cast<Index>(rollouts.front().states.size());
}

Index RolloutBatch::state_dim() const {
  return rollouts.empty() ? 0 : rollouts.front().states.front().size();
}

Index RolloutBatch::action_dim() const {
  return rollouts.empty() ? 0 : rollouts.front().actions.front().size();
}

Eigen::MatrixXd RolloutBatch::states_at(Index t) const {
  Eigen::MatrixXd m(state_dim(), size());
  for (Index i = 0; i < size(); ++i) m.col(i) = rollouts[i].states[t];
  return m;
}

Eigen::MatrixXd RolloutBatch::actions_at(Index t) const {
  Eigen::MatrixXd m(action_dim(), size());
  for (Index i = 0; i < size(); ++i) m.col(i) = rollouts[i].actions[t];
  return m;
}

Eigen::MatrixXd RolloutBatch::noise_at(Index t) const {
  Eigen::MatrixXd m(action_dim(), size());
  for (Index i = 0; i < size(); ++i) m.col(i) = rollouts[i].noise[t];
  return m;
}

Eigen::MatrixXd RolloutBatch::cost_table() const {
  Eigen::MatrixXd m(size(), horizon());
  for (Index i = 0; i < size(); ++i) m.row(i) = rollouts[i].costs.transpose();
  return m;
}

std::vector<Eigen::MatrixXd> RolloutBatch::all_states() const {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(horizon());
  for (Index t = 0; t < horizon(); ++t) out.push_back(states_at(t));
  return out;
}

void RolloutBatch::validate() const {
  if (rollouts.empty()) throw ConfigurationError("RolloutBatch: no rollouts");
  const Index T = horizon();
  const Index nx = state_dim();
  const Index nu = action_dim();
  for (const Rollout& r : rollouts) {
    if (static_cast<Index>(r.states.size()) != T ||
        static_cast<Index>(r.actions.size()) != T ||
        static_cast<Index>(r.noise.size()) != T || r.costs.size() != T) {
      throw ConfigurationError("RolloutBatch: rollouts differ in horizon");
    }
    for (Index t = 0; t < T; ++t) {
      if (r.states[t].size() != nx || r.actions[t].size() != nu ||
          r.noise[t].size() != nu) {
        throw ConfigurationError("RolloutBatch: rollouts differ in dimensions");
      }
    }
  }
}

Eigen::VectorXd reparametrized_action(const TvlgPolicy& policy, Index t,
                                      const Eigen::MatrixXd& chol,
                                      const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& noise) {
  Eigen::VectorXd u = policy.gains[t] * x;
  u += policy.offsets[t];
  u.noalias() += chol.triangularView<Eigen::Lower>() * noise;
  return u;
}

}  // namespace pilqr

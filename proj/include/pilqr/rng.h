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

#ifndef PILQR_RNG_H_
#define PILQR_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>

#include <Eigen/Core>

namespace pilqr {

// Mixes a seed with an ordered list of tags (rollout index, timestep,
// iteration, ...) into an independent 64-bit stream seed. The result only
// depends on the values, never on the order in which streams are created.
std::uint64_t derive_seed(std::uint64_t seed,
                          std::initializer_list<std::uint64_t> tags);

// Standard-normal stream backed by a 64-bit Mersenne twister.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double operator()() { return normal_(engine_); }
  Eigen::VectorXd draw(Eigen::Index n);
  double uniform(double lo, double hi);
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace pilqr

#endif  // PILQR_RNG_H_

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

#ifndef PILQR_COMMON_H_
#define PILQR_COMMON_H_

#include <cstdint>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace pilqr {

using Index = Eigen::Index;

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent dimensions, invalid options, malformed inputs.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

// A numerical failure tied to a timestep (singular matrix, non-finite
// values). timestep() is -1 when the failure is not tied to one.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, Index timestep = -1);
  Index timestep() const { return timestep_; }

 private:
  Index timestep_;
};

// The environment produced a non-finite state while sampling.
class RolloutDivergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// No temperature in the search bracket yields a positive definite
// covariance.
class ConstraintInfeasibleError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Caps the OpenMP worker pool. n <= 0 leaves the runtime default.
void set_max_threads(int n);
int max_threads();

// Runs fn(i) for i in [0, n) across the OpenMP pool. If any call throws,
// the exception from the lowest index is rethrown after the loop.
template <class Fn>
void parallel_for(Index n, Fn&& fn) {
  std::exception_ptr error;
  Index error_index = std::numeric_limits<Index>::max();
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical(pilqr_parallel_for_error)
      {
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

inline bool all_finite(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  return m.allFinite();
}

}  // namespace pilqr

#endif  // PILQR_COMMON_H_

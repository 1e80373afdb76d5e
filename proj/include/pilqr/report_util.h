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

#ifndef PILQR_REPORT_UTIL_H_
#define PILQR_REPORT_UTIL_H_

#include <cmath>

#include "pilqr/iteration.h"
#include "pilqr/tvlg_policy.h"

namespace pilqr {

// Mean and (population) standard deviation of the batch's total costs.
inline void fill_cost_stats(const RolloutBatch& batch, IterationReport& report) {
  const Index n = batch.size();
  double sum = 0.0;
  for (const Rollout& r : batch.rollouts) sum += r.total_cost();
  const double mean = sum / static_cast<double>(n);
  double var = 0.0;
  for (const Rollout& r : batch.rollouts) {
    const double d = r.total_cost() - mean;
    var += d * d;
  }
  report.mean_cost = mean;
  report.std_cost = std::sqrt(var / static_cast<double>(n));
}

}  // namespace pilqr

#endif  // PILQR_REPORT_UTIL_H_

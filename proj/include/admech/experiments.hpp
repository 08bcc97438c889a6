// Copyright 2026 The Admech Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ADMECH_EXPERIMENTS_HPP_
#define ADMECH_EXPERIMENTS_HPP_

#include <cstdint>
#include <vector>

#include "admech/common.hpp"
#include "admech/correlation_gap.hpp"
#include "admech/learning.hpp"
#include "admech/scenario.hpp"
#include "admech/smoothness.hpp"

namespace admech {

struct WelfareEstimate {
  double value = 0.0;
  bool exact = true;
  std::int64_t terms = 0;  // availability atoms (exact) or samples drawn
  double ci_radius = 0.0;  // 95% radius, zero in exact mode
};

// E over the admission process of the best reachable welfare.  Enumerates
// the availability support when it fits the budget, otherwise samples it.
WelfareEstimate expected_opt_welfare(const ComposedScenario& s,
                                     std::int64_t budget = kExactTermLimit,
                                     int samples = 100000,
                                     std::uint64_t seed = 1);

// Time-averaged realized total valuation, recomputed from the recorded
// rounds via value = utility + payment; falls back to the running welfare
// sum when rounds were not recorded.
double welfare_of_trace(const ComposedScenario& s, const LearningTrace& trace);

struct PoAReport {
  double expected_opt = 0.0;
  double empirical_welfare = 0.0;  // mean over replicates
  double ratio = 0.0;
  double theorem_bound = 0.0;      // picked by the admission kind
  double regret_slack = 0.0;       // max replicate audit epsilon
  double bound_with_slack = 0.0;   // theorem_bound + 10 * slack * n / opt
  bool exact = true;               // mode of the expected-opt estimate
  int replicates = 0;
  std::vector<double> replicate_welfare;
  std::vector<double> replicate_epsilon;
};

// Runs `replicates` independent learning runs (parallel, one derived stream
// each), audits their regret, and compares the welfare ratio against the
// composition bound matching the scenario's admission kind.  `gap` feeds
// the independent-admission bound only.
PoAReport empirical_poa(const ComposedScenario& s, const RunSpec& spec,
                        int replicates, std::uint64_t seed,
                        const SmoothnessParams& params,
                        double gap = dmr_gap_bound(),
                        std::int64_t budget = kExactTermLimit,
                        int opt_samples = 100000);

}  // namespace admech

#endif  // ADMECH_EXPERIMENTS_HPP_

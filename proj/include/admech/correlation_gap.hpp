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

#ifndef ADMECH_CORRELATION_GAP_HPP_
#define ADMECH_CORRELATION_GAP_HPP_

#include <cstdint>
#include <vector>

#include "admech/common.hpp"
#include "admech/valuation.hpp"

namespace admech {

// lhs: value of the convex combination, Σ_j α_j v(x^j).
// rhs: expected value after resampling each component independently with the
//      combination's marginals.
// ratio: lhs / rhs, the instance-level correlation gap.
struct GapReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 1.0;
  bool exact = true;
  std::int64_t terms = 0;   // enumerated outcomes, or drawn samples
  double ci_radius = 0.0;   // 95% radius on rhs in sampling mode
};

// Exact when the product of per-component support sizes fits the budget,
// otherwise Monte Carlo on `samples` draws.  Weights must be nonnegative and
// sum to 1 within 1e-12.  ratio is +infinity when rhs vanishes but lhs does
// not, and 1 when both vanish.
GapReport correlation_gap(const Valuation& v,
                          const std::vector<OutcomeVector>& xs,
                          const std::vector<double>& alphas,
                          std::int64_t budget = kExactTermLimit,
                          int samples = 100000, std::uint64_t seed = 1);

// Largest-ratio bound for monotone valuations with diminishing marginal
// returns: e/(e-1).
double dmr_gap_bound();

}  // namespace admech

#endif  // ADMECH_CORRELATION_GAP_HPP_

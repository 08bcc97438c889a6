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

#ifndef ADMECH_LOWER_BOUND_HPP_
#define ADMECH_LOWER_BOUND_HPP_

#include <cstdint>
#include <vector>

#include "admech/common.hpp"
#include "admech/scenario.hpp"

namespace admech {

// The gap family: k*k single-item first-price auctions in k groups, one
// bidder valuing a set at twice the largest per-group count, each item
// admitted independently with probability 1/k, bid grid {0, 1, 2}.
struct LowerBoundInstance {
  int k = 0;
  int items = 0;
  std::vector<std::vector<int>> groups;  // k groups of k item indices
  double admit_prob = 0.0;               // 1/k
};

LowerBoundInstance lower_bound_instance(int k);

// Full composed-scenario form of the instance; only sensible for small k
// (the bidder lattice has 2^(k*k) points).
ComposedScenario lower_bound_scenario(int k,
                                      std::int64_t budget = kExactTermLimit);

// Expected welfare of the omniscient optimum: 2 E[max of k iid Bin(k, 1/k)].
double lb_optimal_value(int k);

// Expected value and utility of bidding 1 on r_l items of group l (and 0
// elsewhere): value 2 E[max_l Bin(r_l, 1/k)], payment sum_l r_l / k.
double lb_group_value(int k, const std::vector<int>& r);
double lb_group_utility(int k, const std::vector<int>& r);

// Search spaces for the best oblivious pure bid.  All three must agree where
// they are all feasible:
//   kEndpoint     groups at k, at ceil(k/2), one partial, rest zero (the
//                 marginal of one more item is nondecreasing in the group
//                 count, so per-group counts can be pushed to an extreme)
//   kReduced      sorted vectors with at most one group below k/2 (the
//                 merge-two-small-groups domination), k <= 12
//   kUnrestricted all sorted vectors, k <= 6
enum class ObliviousSearchMode { kEndpoint, kReduced, kUnrestricted };

struct ObliviousBidSearchState {
  std::vector<int> r;  // nonincreasing per-group counts of items bid at 1
  int k_prime = 0;     // groups with 2 r_l >= k
  double expected_value = 0.0;
  double expected_utility = 0.0;
};

ObliviousBidSearchState lb_best_oblivious(
    int k, ObliviousSearchMode mode = ObliviousSearchMode::kEndpoint);

struct LowerBoundRow {
  int k = 0;
  double opt_value = 0.0;
  double best_value = 0.0;
  double best_utility = 0.0;
  double ratio = 0.0;  // opt_value / best_value
};

std::vector<LowerBoundRow> lower_bound_sweep(const std::vector<int>& ks);

}  // namespace admech

#endif  // ADMECH_LOWER_BOUND_HPP_

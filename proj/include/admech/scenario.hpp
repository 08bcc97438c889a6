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

#ifndef ADMECH_SCENARIO_HPP_
#define ADMECH_SCENARIO_HPP_

#include <cstdint>
#include <vector>

#include "admech/availability.hpp"
#include "admech/common.hpp"
#include "admech/mechanism.hpp"
#include "admech/valuation.hpp"

namespace admech {

// Joint bid grid indices, one per bidder-mechanism slot.
struct BidProfile {
  int bidders = 0;
  int mechanisms = 0;
  std::vector<int> idx;  // row-major, bidders x mechanisms

  BidProfile() = default;
  BidProfile(int n, int m)
      : bidders(n), mechanisms(m), idx(static_cast<std::size_t>(n) * m, 0) {}

  int at(int i, int j) const { return idx[static_cast<std::size_t>(i) * mechanisms + j]; }
  void set(int i, int j, int v) { idx[static_cast<std::size_t>(i) * mechanisms + j] = v; }

  bool operator==(const BidProfile& o) const { return idx == o.idx; }
  bool operator<(const BidProfile& o) const { return idx < o.idx; }
};

// Simultaneous composition: m mechanisms sharing n bidders, one valuation
// per bidder over the product of that bidder's per-mechanism outcome
// spaces, plus the admission process.
struct ComposedScenario {
  std::vector<Mechanism> mechanisms;
  std::vector<Valuation> valuations;
  AvailabilityModel availability = AvailabilityModel::fixed({{1.0}});

  int bidders() const { return static_cast<int>(valuations.size()); }
  int mechanism_count() const { return static_cast<int>(mechanisms.size()); }
  const ProductLattice& bidder_lattice(int i) const {
    return valuations.at(i).lattice();
  }
};

// Validates shape coherence (bidder counts, availability dimensions, and
// each valuation lattice matching the product of the bidder's outcome
// spaces); throws ConfigError on mismatch.
ComposedScenario make_composed_scenario(std::vector<Mechanism> mechanisms,
                                        std::vector<Valuation> valuations,
                                        AvailabilityModel availability);

struct ComposedResult {
  std::vector<OutcomeVector> outcomes;  // per bidder, one element per mechanism
  std::vector<double> payments;         // row-major, bidders x mechanisms
  double payment(int i, int j, int mechanisms) const {
    return payments[static_cast<std::size_t>(i) * mechanisms + j];
  }
};

// Runs every mechanism on the masked profile: a bidder whose slot is not
// admitted plays the zero bid there, receives the bottom outcome and pays
// nothing.
ComposedResult apply_composed(const ComposedScenario& s, const BidProfile& bids,
                              const AvailabilityRealization& avail,
                              std::uint64_t seed = 0);

double bidder_utility(const ComposedScenario& s, int bidder,
                      const ComposedResult& result);

struct UtilityRange {
  double lo = 0.0;  // -(largest total payment)
  double hi = 0.0;  // largest valuation
  double width() const { return hi - lo; }
};

UtilityRange utility_range(const ComposedScenario& s, int bidder,
                           std::int64_t budget = kExactTermLimit);

// Outcome vectors of one mechanism reachable when only the flagged bidders
// may bid above zero; sorted descending like Mechanism::achievable_outcomes.
std::vector<std::vector<int>> achievable_outcomes_masked(
    const Mechanism& mech, const std::vector<char>& available,
    std::int64_t budget = kExactTermLimit);

struct WelfareOptimum {
  std::vector<std::vector<int>> per_mechanism;  // [mechanism][bidder] element
  std::vector<OutcomeVector> per_bidder;        // [bidder][mechanism] element
  double welfare = 0.0;
};

// Welfare-maximizing joint outcome over per-mechanism outcomes reachable
// under `avail`.  Ties keep the first maximum in descending lexicographic
// order of the flattened outcome tuple, so lower-indexed bidders win.
WelfareOptimum max_welfare_outcome(const ComposedScenario& s,
                                   const AvailabilityRealization& avail,
                                   std::int64_t budget = kExactTermLimit);

}  // namespace admech

#endif  // ADMECH_SCENARIO_HPP_

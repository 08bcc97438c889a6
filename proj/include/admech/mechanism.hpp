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

#ifndef ADMECH_MECHANISM_HPP_
#define ADMECH_MECHANISM_HPP_

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "admech/common.hpp"
#include "admech/lattice.hpp"

namespace admech {

// Finite ordered bid set.  Must contain the distinguished bid 0, which a
// masked (unavailable) bidder is forced to play.
class BidGrid {
 public:
  explicit BidGrid(std::vector<double> bids);

  int size() const { return static_cast<int>(bids_.size()); }
  double value(int idx) const { return bids_.at(idx); }
  int zero_index() const { return zero_index_; }

  // Largest index whose bid does not exceed `value` (the zero bid for
  // negative arguments).
  int floor_index(double value) const;

  // Index of an exact grid value; throws if absent.
  int index_of(double value) const;

  const std::vector<double>& values() const { return bids_; }

  bool operator==(const BidGrid& o) const { return bids_ == o.bids_; }

 private:
  std::vector<double> bids_;  // strictly increasing
  int zero_index_ = -1;
};

class Mechanism;

// Per-bidder valuation of the bidder's own outcome elements in one
// mechanism: profile[i][e] is bidder i's value for element e.
using MechValuationProfile = std::vector<std::vector<double>>;

// Distribution over one bidder's bids in one mechanism.
struct BidAtomDist {
  std::vector<std::pair<int, double>> atoms;  // (bid index, probability)
};

// Maps a valuation profile to the per-bidder deviation distributions used
// as the smoothness witness of the mechanism.  Deviations never see the
// current bid profile.
using MechDeviationRule = std::function<std::vector<BidAtomDist>(
    const Mechanism&, const MechValuationProfile&)>;

struct MechanismResult {
  std::vector<int> outcome;      // per-bidder element index
  std::vector<double> payments;  // per-bidder payment
};

// One simultaneous component: an outcome rule and a payment rule over a
// finite bid grid per bidder.  Immutable; evaluation is pure (randomized
// rules draw from the explicit seed only).
class Mechanism {
 public:
  using EvalFn = std::function<void(const std::vector<int>& bid_idx,
                                    std::uint64_t seed,
                                    std::vector<int>& outcome,
                                    std::vector<double>& payments)>;

  // Single-item first-price auction: highest bid wins, ties broken toward
  // the lowest bidder index, the all-zero profile sells to nobody, and the
  // winner pays their bid.  `values` records the per-bidder value of
  // winning (metadata used to assemble valuation profiles).
  static Mechanism first_price(std::vector<double> values, BidGrid grid);

  // Explicit tables over all bid profiles (profile index in mixed radix,
  // last bidder fastest).  Verifies the zero-bid masking contract.
  static Mechanism custom_table(std::vector<BidGrid> grids,
                                std::vector<OutcomeLattice> spaces,
                                std::vector<std::vector<int>> outcome_rows,
                                std::vector<std::vector<double>> payment_rows);

  // Callback-backed mechanism for library extensions.
  static Mechanism from_functions(std::string kind, std::vector<BidGrid> grids,
                                  std::vector<OutcomeLattice> spaces,
                                  EvalFn eval, std::vector<double> values);

  int bidders() const { return static_cast<int>(grids_.size()); }
  const BidGrid& grid(int i) const { return grids_.at(i); }
  const OutcomeLattice& outcome_space(int i) const { return spaces_.at(i); }
  const std::string& kind() const { return kind_; }
  const std::vector<double>& declared_values() const { return values_; }

  void evaluate_into(const std::vector<int>& bid_idx, std::uint64_t seed,
                     MechanismResult& out) const;
  MechanismResult evaluate(const std::vector<int>& bid_idx,
                           std::uint64_t seed = 0) const;

  // Number of joint bid profiles.
  std::int64_t profile_count() const;

  // Outcome vectors reachable by some bid profile (at seed 0), sorted
  // descending by per-bidder element tuple; the optimum tie rule keeps the
  // first maximum in this order.
  const std::vector<std::vector<int>>& achievable_outcomes() const;

  // Canonical index of a per-bidder outcome vector (mixed radix over the
  // per-bidder outcome spaces, last bidder fastest).
  std::int64_t outcome_key(const std::vector<int>& outcome) const;
  std::int64_t outcome_space_size() const;

  // Registered smoothness deviation rule, if any.
  const MechDeviationRule& deviation_rule() const { return rule_; }
  void set_deviation_rule(MechDeviationRule rule) { rule_ = std::move(rule); }

 private:
  Mechanism() = default;

  std::string kind_;
  std::vector<BidGrid> grids_;
  std::vector<OutcomeLattice> spaces_;
  std::vector<double> values_;
  EvalFn eval_;
  MechDeviationRule rule_;
  mutable std::shared_ptr<std::vector<std::vector<int>>> achievable_;
};

// Maximum payment bidder i can be charged in any profile where they play
// `bid_idx` and the mechanism produces `outcome`; 0 when no opponent
// profile makes that pair attainable.
double willingness_to_pay(const Mechanism& mech, int bidder, int bid_idx,
                          const std::vector<int>& outcome,
                          std::int64_t budget = kExactTermLimit);

// Dense willingness table: entry [bidder][bid][outcome key].
std::vector<std::vector<std::vector<double>>> willingness_table(
    const Mechanism& mech, std::int64_t budget = kExactTermLimit);

}  // namespace admech

#endif  // ADMECH_MECHANISM_HPP_

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

#ifndef ADMECH_AVAILABILITY_HPP_
#define ADMECH_AVAILABILITY_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "admech/common.hpp"
#include "admech/rng.hpp"

namespace admech {

// Which (bidder, mechanism) slots are admitted this round.
struct AvailabilityRealization {
  int bidders = 0;
  int mechanisms = 0;
  std::vector<char> cell;  // row-major, bidders x mechanisms

  AvailabilityRealization() = default;
  AvailabilityRealization(int n, int m, char fill = 1)
      : bidders(n), mechanisms(m), cell(static_cast<std::size_t>(n) * m, fill) {}

  char at(int i, int j) const { return cell[static_cast<std::size_t>(i) * mechanisms + j]; }
  void set(int i, int j, char v) { cell[static_cast<std::size_t>(i) * mechanisms + j] = v; }

  bool operator==(const AvailabilityRealization& o) const {
    return bidders == o.bidders && mechanisms == o.mechanisms && cell == o.cell;
  }
};

// Admission process over bidder-mechanism slots.
//
//   independent: each slot admits on its own coin with probability q[i][j].
//   everybody_or_nobody: per mechanism j, one coin with probability q[j]
//     admits either every bidder or none.
//   fixed: a deterministic 0/1 pattern.
class AvailabilityModel {
 public:
  enum class Kind { kIndependent, kEverybodyOrNobody, kFixed };

  static AvailabilityModel independent(std::vector<std::vector<double>> q);
  static AvailabilityModel everybody_or_nobody(int bidders,
                                               std::vector<double> q);
  static AvailabilityModel fixed(std::vector<std::vector<double>> pattern);

  Kind kind() const { return kind_; }
  int bidders() const { return bidders_; }
  int mechanisms() const { return mechanisms_; }

  // Marginal admission probability of one slot.
  double slot_prob(int i, int j) const;

  // Per-mechanism coin for the everybody-or-nobody process.
  double shared_prob(int j) const;

  std::string kind_name() const;

  bool operator==(const AvailabilityModel& o) const {
    return kind_ == o.kind_ && grid_ == o.grid_ && shared_ == o.shared_ &&
           bidders_ == o.bidders_ && mechanisms_ == o.mechanisms_;
  }

 private:
  AvailabilityModel() = default;

  Kind kind_ = Kind::kFixed;
  int bidders_ = 0;
  int mechanisms_ = 0;
  std::vector<std::vector<double>> grid_;  // independent / fixed
  std::vector<double> shared_;             // everybody-or-nobody
};

AvailabilityRealization sample_availability(const AvailabilityModel& model,
                                            RngStream& rng);

struct AvailabilityAtom {
  AvailabilityRealization realization;
  double prob;
};

// Full support of the admission distribution with probabilities (sums to 1
// within 1e-12).  Deterministic slots are not branched on, so the atom
// count is 2^(free coins); throws BudgetExceeded beyond `budget` atoms.
std::vector<AvailabilityAtom> enumerate_support(
    const AvailabilityModel& model, std::int64_t budget = kExactTermLimit);

// Value distribution of one item: (value, probability) pairs.
using ValueDistribution = std::vector<std::pair<double, double>>;

struct UnitDemandCopy {
  double value = 0.0;
  double admit_prob = 0.0;
  bool never_admitted = false;  // conditional probability was 0/0
};

// Rewrites items with random values into chains of fixed-value copies with
// independent admission, one chain per item, copies in descending value
// order.  The maximum value over admitted copies of a chain reproduces the
// item's value distribution exactly.  Equal values are merged before the
// rewrite; at most `max_copies` distinct values per item are accepted.
std::vector<std::vector<UnitDemandCopy>> unit_demand_transform(
    const std::vector<ValueDistribution>& items, int max_copies = 8);

}  // namespace admech

#endif  // ADMECH_AVAILABILITY_HPP_

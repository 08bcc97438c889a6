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

#include "admech/scenario.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

namespace admech {

ComposedScenario make_composed_scenario(std::vector<Mechanism> mechanisms,
                                        std::vector<Valuation> valuations,
                                        AvailabilityModel availability) {
  const int m = static_cast<int>(mechanisms.size());
  const int n = static_cast<int>(valuations.size());
  if (m == 0) throw ConfigError("mechanisms", "at least one mechanism required");
  if (n == 0) throw ConfigError("valuations", "at least one bidder required");
  for (int j = 0; j < m; ++j) {
    if (mechanisms[j].bidders() != n) {
      throw ConfigError("mechanisms[" + std::to_string(j) + "]",
                        "bidder count differs from valuation count");
    }
  }
  if (availability.bidders() != n || availability.mechanisms() != m) {
    throw ConfigError("availability", "dimensions must be bidders x mechanisms");
  }
  for (int i = 0; i < n; ++i) {
    const ProductLattice& lat = valuations[i].lattice();
    if (lat.factor_count() != m) {
      throw ConfigError("valuations[" + std::to_string(i) + "]",
                        "lattice factor count differs from mechanism count");
    }
    for (int j = 0; j < m; ++j) {
      if (!(lat.factor(j) == mechanisms[j].outcome_space(i))) {
        throw ConfigError("valuations[" + std::to_string(i) + "]",
                          "factor " + std::to_string(j) +
                              " differs from the mechanism outcome space");
      }
    }
  }
  ComposedScenario s;
  s.mechanisms = std::move(mechanisms);
  s.valuations = std::move(valuations);
  s.availability = std::move(availability);
  return s;
}

ComposedResult apply_composed(const ComposedScenario& s, const BidProfile& bids,
                              const AvailabilityRealization& avail,
                              std::uint64_t seed) {
  const int n = s.bidders();
  const int m = s.mechanism_count();
  if (bids.bidders != n || bids.mechanisms != m) {
    throw std::invalid_argument("bid profile shape mismatch");
  }
  if (avail.bidders != n || avail.mechanisms != m) {
    throw std::invalid_argument("availability shape mismatch");
  }
  ComposedResult out;
  out.outcomes.assign(n, OutcomeVector(m, 0));
  out.payments.assign(static_cast<std::size_t>(n) * m, 0.0);
  std::vector<int> effective(n, 0);
  MechanismResult r;
  for (int j = 0; j < m; ++j) {
    const Mechanism& mech = s.mechanisms[j];
    for (int i = 0; i < n; ++i) {
      effective[i] = avail.at(i, j) ? bids.at(i, j) : mech.grid(i).zero_index();
    }
    std::uint64_t mech_seed =
        seed == 0 ? 0 : RngStream(seed).derive("mechanism", j).next_u64();
    mech.evaluate_into(effective, mech_seed, r);
    for (int i = 0; i < n; ++i) {
      out.outcomes[i][j] = r.outcome[i];
      out.payments[static_cast<std::size_t>(i) * m + j] = r.payments[i];
    }
  }
  return out;
}

double bidder_utility(const ComposedScenario& s, int bidder,
                      const ComposedResult& result) {
  const int m = s.mechanism_count();
  double u = s.valuations[bidder].eval(result.outcomes[bidder]);
  for (int j = 0; j < m; ++j) u -= result.payment(bidder, j, m);
  return u;
}

UtilityRange utility_range(const ComposedScenario& s, int bidder,
                           std::int64_t budget) {
  UtilityRange r;
  const std::vector<double>& table = s.valuations[bidder].dense_table(budget);
  r.hi = *std::max_element(table.begin(), table.end());
  double max_pay = 0.0;
  for (int j = 0; j < s.mechanism_count(); ++j) {
    const BidGrid& g = s.mechanisms[j].grid(bidder);
    max_pay += g.value(g.size() - 1);
  }
  r.lo = -max_pay;
  return r;
}

std::vector<std::vector<int>> achievable_outcomes_masked(
    const Mechanism& mech, const std::vector<char>& available,
    std::int64_t budget) {
  const int n = mech.bidders();
  if (static_cast<int>(available.size()) != n) {
    throw std::invalid_argument("availability flag count mismatch");
  }
  std::int64_t count = 1;
  for (int i = 0; i < n; ++i) {
    if (available[i]) count *= mech.grid(i).size();
    if (count > budget) throw BudgetExceeded("masked outcomes", count, budget);
  }
  std::set<std::vector<int>, std::greater<std::vector<int>>> seen;
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = mech.grid(i).zero_index();
  MechanismResult r;
  for (;;) {
    mech.evaluate_into(idx, 0, r);
    seen.insert(r.outcome);
    int i = n - 1;
    for (; i >= 0; --i) {
      if (!available[i]) continue;
      if (++idx[i] < mech.grid(i).size()) break;
      idx[i] = 0;
    }
    if (i < 0) break;
  }
  return {seen.begin(), seen.end()};
}

WelfareOptimum max_welfare_outcome(const ComposedScenario& s,
                                   const AvailabilityRealization& avail,
                                   std::int64_t budget) {
  const int n = s.bidders();
  const int m = s.mechanism_count();
  std::vector<std::vector<std::vector<int>>> choices(m);
  std::int64_t combos = 1;
  for (int j = 0; j < m; ++j) {
    std::vector<char> col(n);
    for (int i = 0; i < n; ++i) col[i] = avail.at(i, j);
    choices[j] = achievable_outcomes_masked(s.mechanisms[j], col, budget);
    if (combos > budget / static_cast<std::int64_t>(choices[j].size())) {
      throw BudgetExceeded("welfare optimum", budget + 1, budget);
    }
    combos *= static_cast<std::int64_t>(choices[j].size());
  }

  std::vector<std::vector<double>> tables(n);
  for (int i = 0; i < n; ++i) tables[i] = s.valuations[i].dense_table(budget);

  WelfareOptimum best;
  best.welfare = -1.0;
  std::vector<int> pick(m, 0);
  std::vector<OutcomeVector> per_bidder(n, OutcomeVector(m, 0));
  for (;;) {
    double welfare = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) per_bidder[i][j] = choices[j][pick[j]][i];
      welfare += tables[i][s.bidder_lattice(i).index_of(per_bidder[i])];
    }
    if (welfare > best.welfare + kValueTol) {
      best.welfare = welfare;
      best.per_bidder = per_bidder;
      best.per_mechanism.assign(m, std::vector<int>());
      for (int j = 0; j < m; ++j) best.per_mechanism[j] = choices[j][pick[j]];
    }
    int j = m - 1;
    for (; j >= 0; --j) {
      if (++pick[j] < static_cast<int>(choices[j].size())) break;
      pick[j] = 0;
    }
    if (j < 0) break;
  }
  return best;
}

}  // namespace admech

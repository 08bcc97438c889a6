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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "admech/common.hpp"
#include "admech/lower_bound.hpp"
#include "admech/scenario.hpp"
#include "admech/valuation.hpp"

using namespace admech;

TEST_CASE("instance shape") {
  LowerBoundInstance inst = lower_bound_instance(3);
  CHECK(inst.k == 3);
  CHECK(inst.items == 9);
  CHECK(inst.admit_prob == doctest::Approx(1.0 / 3.0));
  REQUIRE(inst.groups.size() == 3);
  CHECK(inst.groups[0] == std::vector<int>{0, 1, 2});
  CHECK(inst.groups[2] == std::vector<int>{6, 7, 8});

  CHECK_THROWS_AS(lower_bound_instance(0), std::invalid_argument);
  CHECK_THROWS_AS(lower_bound_instance(65), std::invalid_argument);
}

TEST_CASE("the scenario form matches the instance") {
  ComposedScenario s = lower_bound_scenario(2);
  CHECK(s.bidders() == 1);
  CHECK(s.mechanism_count() == 4);
  CHECK(s.availability.kind() == AvailabilityModel::Kind::kIndependent);
  CHECK(s.availability.slot_prob(0, 3) == doctest::Approx(0.5));
  CHECK(s.mechanisms[0].grid(0).values() ==
        std::vector<double>{0.0, 1.0, 2.0});
  // Both items of one group: twice a group count of 2.
  CHECK(s.valuations[0].eval({1, 1, 0, 0}) == doctest::Approx(4.0));
  CHECK(s.valuations[0].eval({1, 0, 1, 0}) == doctest::Approx(2.0));

  CHECK_THROWS_AS(lower_bound_scenario(5), BudgetExceeded);
  CHECK_THROWS_AS(lower_bound_scenario(4, 1000), BudgetExceeded);
}

TEST_CASE("optimum values from the binomial maximum") {
  // k = 1: one item always admitted, value 2.
  CHECK(lb_optimal_value(1) == doctest::Approx(2.0));
  // k = 2: E[max(B1, B2)] with Bi ~ Bin(2, 1/2) is 11/8.
  CHECK(lb_optimal_value(2) == doctest::Approx(2.75).epsilon(1e-14));
  // k = 3: 2 E[max of three Bin(3, 1/3)] computed by direct enumeration.
  double e_max = 0.0;
  double q = 1.0 / 3.0;
  std::vector<double> pmf(4);
  for (int x = 0; x <= 3; ++x) {
    double binom = (x == 0 || x == 3) ? 1.0 : 3.0;
    pmf[x] = binom * std::pow(q, x) * std::pow(1 - q, 3 - x);
  }
  for (int a = 0; a <= 3; ++a) {
    for (int b = 0; b <= 3; ++b) {
      for (int c = 0; c <= 3; ++c) {
        e_max += pmf[a] * pmf[b] * pmf[c] * std::max({a, b, c});
      }
    }
  }
  CHECK(lb_optimal_value(3) == doctest::Approx(2.0 * e_max).epsilon(1e-12));
}

TEST_CASE("group value and utility oracles at k = 2") {
  // One full group: E[Bin(2, 1/2)] = 1, paid 1.
  CHECK(lb_group_value(2, {2}) == doctest::Approx(2.0));
  CHECK(lb_group_utility(2, {2}) == doctest::Approx(1.0));
  // Both groups full: the optimum's 2.75 minus a payment of 2.
  CHECK(lb_group_value(2, {2, 2}) == doctest::Approx(2.75));
  CHECK(lb_group_utility(2, {2, 2}) == doctest::Approx(0.75));
  // One item in one group: 2 * 1/2 - 1/2.
  CHECK(lb_group_utility(2, {1}) == doctest::Approx(0.5));
  // One item in each group: 2 * (1 - 1/4) - 1.
  CHECK(lb_group_utility(2, {1, 1}) == doctest::Approx(0.5));
  // Empty bid.
  CHECK(lb_group_value(2, {}) == 0.0);
  CHECK(lb_group_utility(2, {0, 0}) == 0.0);

  CHECK_THROWS_AS(lb_group_value(2, {1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(lb_group_value(2, {3}), std::invalid_argument);
}

TEST_CASE("the best oblivious bid at small k") {
  ObliviousBidSearchState best1 = lb_best_oblivious(1);
  CHECK(best1.expected_utility == doctest::Approx(1.0));
  CHECK(best1.expected_value == doctest::Approx(2.0));

  // At k = 2 a single full group nets 2 - 1 = 1, beating every alternative.
  ObliviousBidSearchState best2 = lb_best_oblivious(2);
  CHECK(best2.expected_utility == doctest::Approx(1.0));
  CHECK(best2.expected_value == doctest::Approx(2.0));
  REQUIRE_FALSE(best2.r.empty());
  CHECK(best2.r[0] == 2);
  CHECK(best2.k_prime >= 1);
}

TEST_CASE("search modes agree where all are feasible") {
  for (int k = 1; k <= 6; ++k) {
    double endpoint =
        lb_best_oblivious(k, ObliviousSearchMode::kEndpoint).expected_utility;
    double reduced =
        lb_best_oblivious(k, ObliviousSearchMode::kReduced).expected_utility;
    double full = lb_best_oblivious(k, ObliviousSearchMode::kUnrestricted)
                      .expected_utility;
    CHECK(endpoint == doctest::Approx(full).epsilon(1e-9));
    CHECK(reduced == doctest::Approx(full).epsilon(1e-9));
  }
  for (int k = 7; k <= 12; ++k) {
    double endpoint =
        lb_best_oblivious(k, ObliviousSearchMode::kEndpoint).expected_utility;
    double reduced =
        lb_best_oblivious(k, ObliviousSearchMode::kReduced).expected_utility;
    CHECK(endpoint == doctest::Approx(reduced).epsilon(1e-9));
  }
  CHECK_THROWS_AS(lb_best_oblivious(7, ObliviousSearchMode::kUnrestricted),
                  std::invalid_argument);
  CHECK_THROWS_AS(lb_best_oblivious(13, ObliviousSearchMode::kReduced),
                  std::invalid_argument);
}

TEST_CASE("reported bids are sorted and within range") {
  for (int k : {4, 9, 16}) {
    ObliviousBidSearchState best = lb_best_oblivious(k);
    int prev = k;
    for (int c : best.r) {
      CHECK(c <= prev);
      CHECK(c >= 0);
      prev = c;
    }
    CHECK(static_cast<int>(best.r.size()) <= k);
    CHECK(best.expected_utility >= 0.0);
    CHECK(best.expected_value >=
          best.expected_utility - kValueTol);
  }
}

TEST_CASE("the sweep keeps the optimum ahead of oblivious bidding") {
  std::vector<int> ks = {4, 9, 16, 25, 36, 49, 64};
  std::vector<LowerBoundRow> rows = lower_bound_sweep(ks);
  REQUIRE(rows.size() == 7);
  double prev_ratio = 0.0;
  for (const LowerBoundRow& row : rows) {
    CHECK(row.opt_value > 0.0);
    CHECK(row.best_value > 0.0);
    CHECK(row.best_value < 17.0);
    CHECK(row.ratio == doctest::Approx(row.opt_value / row.best_value));
    // Known to fail at k = 16: the best oblivious response switches from one
    // full group (value 2) to two full groups (value ~3.02, exact rational
    // arithmetic confirms utility 1.0197 > 1), while the optimum grows only
    // ~17% over the same step, so the ratio dips once (2.5286 -> 1.9599) and
    // climbs monotonically afterwards. The check encodes the monotone-growth
    // expectation and the failure records the measured exception to it.
    CHECK(row.ratio >= prev_ratio - 1e-12);
    prev_ratio = row.ratio;
  }
}

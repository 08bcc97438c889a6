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
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "admech/common.hpp"
#include "admech/rng.hpp"
#include "admech/sinr.hpp"

using namespace admech;

namespace {

SinrLink line_link(double sx, double rx) {
  return SinrLink{{sx, 0.0}, {rx, 0.0}};
}

// Two unit-length links on the x axis with a wide gap between them.
SinrInstance far_pair() {
  SinrInstance inst;
  inst.links = {line_link(0.0, 1.0), line_link(100.0, 101.0)};
  inst.noise = 0.0;
  return inst;
}

// Link 1's sender sits exactly on link 0's receiver, so link 0 is drowned
// out whenever both transmit while link 1 barely notices link 0.
SinrInstance stacked_pair() {
  SinrInstance inst;
  inst.links = {line_link(0.0, 1.0), line_link(1.0, 2.0)};
  inst.noise = 0.0;
  return inst;
}

}  // namespace

TEST_CASE("link distance is Euclidean") {
  CHECK(link_distance({0.0, 0.0}, {3.0, 4.0}) == doctest::Approx(5.0));
  CHECK(link_distance({1.0, 1.0}, {1.0, 1.0}) == 0.0);
}

TEST_CASE("instance validation rejects malformed geometry and parameters") {
  CHECK_THROWS_AS(validate_sinr_instance(SinrInstance{}),
                  std::invalid_argument);

  SinrInstance inst = far_pair();
  CHECK_NOTHROW(validate_sinr_instance(inst));

  SinrInstance bad = inst;
  bad.power = 0.0;
  CHECK_THROWS_AS(validate_sinr_instance(bad), std::invalid_argument);
  bad = inst;
  bad.path_loss = -2.0;
  CHECK_THROWS_AS(validate_sinr_instance(bad), std::invalid_argument);
  bad = inst;
  bad.threshold = 0.0;
  CHECK_THROWS_AS(validate_sinr_instance(bad), std::invalid_argument);
  bad = inst;
  bad.noise = -0.1;
  CHECK_THROWS_AS(validate_sinr_instance(bad), std::invalid_argument);
  bad = inst;
  bad.links[0].sender.x = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(validate_sinr_instance(bad), std::invalid_argument);
  bad = inst;
  bad.links[1].receiver = bad.links[1].sender;
  CHECK_THROWS_AS(validate_sinr_instance(bad), std::invalid_argument);
}

TEST_CASE("interference budgets match the closed form on a line") {
  // Unit direct distances, path loss 2, no noise: a[j][i] = 1 / d(s_j,r_i)^2.
  SinrInstance inst;
  inst.links = {line_link(0.0, 1.0), line_link(3.0, 4.0)};
  inst.noise = 0.0;

  InterferenceMatrix mat = interference_matrix(inst);
  REQUIRE(mat.a.size() == 2);
  CHECK(mat.a[0][0] == 0.0);
  CHECK(mat.a[1][1] == 0.0);
  CHECK(mat.a[1][0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(mat.a[0][1] == doctest::Approx(0.0625).epsilon(1e-12));
  CHECK(mat.solo_infeasible[0] == 0);
  CHECK(mat.solo_infeasible[1] == 0);

  // Raising the decoding threshold shrinks the margin and scales the budget.
  inst.threshold = 2.0;
  mat = interference_matrix(inst);
  CHECK(mat.a[1][0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mat.a[0][1] == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("links that fail alone are flagged and charged the full cap") {
  SinrInstance inst;
  inst.links = {line_link(0.0, 2.0), line_link(50.0, 50.5)};
  inst.noise = 1.0;

  const InterferenceMatrix mat = interference_matrix(inst);
  CHECK(mat.solo_infeasible[0] == 1);
  CHECK(mat.solo_infeasible[1] == 0);
  CHECK(mat.a[1][0] == 1.0);

  const std::vector<char> ok = sinr_feasible(inst, {1, 0});
  CHECK(ok[0] == 0);
  const std::vector<int> util = channel_utilities(inst, {1, 0});
  CHECK(util[0] == -1);
  CHECK(util[1] == 0);
}

TEST_CASE("distant links coexist and stacked links collide") {
  const SinrInstance far = far_pair();
  std::vector<char> ok = sinr_feasible(far, {1, 1});
  CHECK(ok == std::vector<char>{1, 1});
  CHECK(channel_utilities(far, {1, 1}) == std::vector<int>{1, 1});
  CHECK(max_feasible_set(far) == std::vector<int>{0, 1});

  const SinrInstance stacked = stacked_pair();
  ok = sinr_feasible(stacked, {1, 1});
  CHECK(ok == std::vector<char>{0, 1});
  CHECK(channel_utilities(stacked, {1, 1}) == std::vector<int>{-1, 1});
  CHECK(channel_utilities(stacked, {0, 1}) == std::vector<int>{0, 1});
  // Both singletons are feasible; the tie goes to the smaller index.
  CHECK(max_feasible_set(stacked) == std::vector<int>{0});

  CHECK_THROWS_AS(sinr_feasible(stacked, {1, 1, 0}), std::invalid_argument);
}

TEST_CASE("channel mechanism reproduces the transmission game") {
  const SinrInstance inst = stacked_pair();
  const Mechanism mech = channel_mechanism(inst);
  CHECK(mech.kind() == "channel");
  REQUIRE(mech.bidders() == 2);
  CHECK(mech.grid(0).size() == 2);
  CHECK(mech.grid(0).value(1) == 1.0);
  CHECK(mech.declared_values() == std::vector<double>{2.0, 2.0});

  for (int b0 = 0; b0 < 2; ++b0) {
    for (int b1 = 0; b1 < 2; ++b1) {
      const MechanismResult res = mech.evaluate({b0, b1}, 7u);
      const std::vector<int> util =
          channel_utilities(inst, {static_cast<char>(b0 != 0),
                                   static_cast<char>(b1 != 0)});
      for (int i = 0; i < 2; ++i) {
        const int bid = i == 0 ? b0 : b1;
        CHECK(res.payments[i] == (bid > 0 ? 1.0 : 0.0));
        const double realized = 2.0 * res.outcome[i] - res.payments[i];
        CHECK(realized == doctest::Approx(util[i]));
      }
    }
  }

  // The registered deviation transmits exactly on the max feasible set {0}.
  REQUIRE(static_cast<bool>(mech.deviation_rule()));
  const auto devs = mech.deviation_rule()(
      mech, win_lose_profile(std::vector<double>(2, 2.0)));
  REQUIRE(devs.size() == 2);
  REQUIRE(devs[0].atoms.size() == 1);
  CHECK(devs[0].atoms[0].first == 1);
  CHECK(devs[0].atoms[0].second == 1.0);
  REQUIRE(devs[1].atoms.size() == 1);
  CHECK(devs[1].atoms[0].first == 0);
}

TEST_CASE("interference budget below one is sufficient for joint success") {
  RngStream rng(2026);
  for (int trial = 0; trial < 12; ++trial) {
    const SinrInstance inst = random_sinr_instance(6, rng);
    const InterferenceMatrix mat = interference_matrix(inst);
    const int n = inst.size();
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      bool under_budget = true;
      std::vector<char> transmit(n, 0);
      for (int i = 0; i < n; ++i) {
        if (!(mask >> i & 1u)) continue;
        transmit[i] = 1;
        if (mat.solo_infeasible[i]) under_budget = false;
        double load = 0.0;
        for (int j = 0; j < n; ++j) {
          if (j != i && (mask >> j & 1u)) load += mat.a[j][i];
        }
        if (!(load < 1.0 - 1e-12)) under_budget = false;
      }
      if (!under_budget) continue;
      const std::vector<char> ok = sinr_feasible(inst, transmit);
      for (int i = 0; i < n; ++i) {
        if (transmit[i]) REQUIRE(ok[i] == 1);
      }
    }
  }
}

TEST_CASE("silencing a transmitter never hurts the survivors") {
  RngStream rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const SinrInstance inst = random_sinr_instance(7, rng);
    const int n = inst.size();
    std::vector<char> transmit(n, 0);
    for (int i = 0; i < n; ++i) transmit[i] = rng.bernoulli(0.6) ? 1 : 0;
    const std::vector<char> before = sinr_feasible(inst, transmit);
    const int drop =
        static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    if (!transmit[drop]) continue;
    std::vector<char> fewer = transmit;
    fewer[drop] = 0;
    const std::vector<char> after = sinr_feasible(inst, fewer);
    for (int i = 0; i < n; ++i) {
      if (i != drop && before[i]) CHECK(after[i] == 1);
    }
  }
}

TEST_CASE("the displayed guarantee holds exhaustively on the stacked pair") {
  const ChannelCheck check = verify_channel_smoothness(stacked_pair());
  CHECK(check.max_feasible == std::vector<int>{0});
  // The zero-distance cross gain pins the cap, and j ranges over silent
  // senders too, so the feasible singleton {0} already charges j = 1 fully.
  CHECK(check.empirical_c == 1.0);
  CHECK_FALSE(check.any_solo_infeasible);
  CHECK(check.displayed_ok);
  CHECK(check.profiles == 4);
  CHECK(check.min_slack >= -kValueTol);
  CHECK_FALSE(check.counterexample.has_value());
  CHECK(check.certificate.verified);
  CHECK(check.certificate.params.lambda == 0.5);
  CHECK(check.certificate.params.mu1 == 2.0);
  CHECK(check.certificate.params.mu2 == 0.0);
}

TEST_CASE("random geometries satisfy the displayed guarantee") {
  RngStream rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const SinrInstance inst = random_sinr_instance(6, rng);
    const ChannelCheck check = verify_channel_smoothness(inst);
    CHECK(check.profiles == 64);
    CHECK(!check.max_feasible.empty());
    CHECK(check.empirical_c >= 0.0);
    CHECK(check.displayed_ok);
    CHECK(check.min_slack >= -kValueTol);
    CHECK(check.certificate.verified);
  }
}

TEST_CASE("size and budget caps are enforced") {
  CHECK_THROWS_AS(max_feasible_set(SinrInstance{
                      std::vector<SinrLink>(21, line_link(0.0, 1.0))}),
                  std::invalid_argument);
  CHECK_THROWS_AS(verify_channel_smoothness(SinrInstance{
                      std::vector<SinrLink>(13, line_link(0.0, 1.0))}),
                  std::invalid_argument);
  try {
    verify_channel_smoothness(far_pair(), 7);
    FAIL("expected the profile sweep to exceed the budget");
  } catch (const BudgetExceeded& e) {
    CHECK(e.needed() == 8);
    CHECK(e.budget() == 7);
  }
}

TEST_CASE("random instances are reproducible and respect the spacing band") {
  RngStream a(31);
  RngStream b(31);
  const SinrInstance first = random_sinr_instance(5, a);
  const SinrInstance second = random_sinr_instance(5, b);
  REQUIRE(first.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(first.links[i].sender.x == second.links[i].sender.x);
    CHECK(first.links[i].receiver.y == second.links[i].receiver.y);
    const double spacing =
        link_distance(first.links[i].sender, first.links[i].receiver);
    CHECK(spacing >= 0.5 - 1e-9);
    CHECK(spacing <= 1.0 + 1e-9);
    CHECK(first.links[i].sender.x >= 0.0);
    CHECK(first.links[i].sender.x <= 10.0);
  }
  CHECK(first.noise == 0.1);
  CHECK_THROWS_AS(random_sinr_instance(0, a), std::invalid_argument);
}

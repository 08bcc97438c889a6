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

#include "admech/mechanism.hpp"
#include "admech/smoothness.hpp"

using namespace admech;

namespace {

Mechanism auction() {
  return Mechanism::first_price({2.0, 2.0}, BidGrid({0.0, 1.0, 2.0}));
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(validate_smoothness_params({0.5, 1.0, 0.0}));
  CHECK_THROWS_AS(validate_smoothness_params({0.0, 1.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_smoothness_params({-0.5, 1.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_smoothness_params({0.5, -1.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_smoothness_params({0.5, 0.0, -1.0}),
                  std::invalid_argument);
}

TEST_CASE("ratio bound formulas") {
  SmoothnessParams p{0.5, 1.0, 0.0};
  CHECK(poa_single_bound(p) == doctest::Approx(2.0));
  CHECK(poa_independent_bound(p, std::exp(1.0) / (std::exp(1.0) - 1.0)) ==
        doctest::Approx(2.0 * std::exp(1.0) / (std::exp(1.0) - 1.0)));
  CHECK(poa_eon_bound(p) ==
        doctest::Approx(4.0 * std::exp(1.0) / (std::exp(1.0) - 1.0) *
                        (1.0 + 0.0) / 0.25));

  SmoothnessParams q{1.0, 0.5, 0.25};
  // max(1, mu1) keeps the payment term from helping below cost.
  CHECK(poa_single_bound(q) == doctest::Approx(1.25));
}

TEST_CASE("the discrete first-price auction is (1/2, 1, 0)-smooth") {
  Mechanism m = auction();
  std::vector<MechValuationProfile> profiles = {
      win_lose_profile({2.0, 2.0}),
      win_lose_profile({2.0, 0.0}),
      win_lose_profile({0.0, 2.0}),
      win_lose_profile({0.0, 0.0}),
  };
  SmoothnessCertificate cert =
      verify_smoothness(m, profiles, {0.5, 1.0, 0.0});
  CHECK(cert.verified);
  CHECK(cert.mechanism_kind == "first_price");
  CHECK(cert.min_slack >= -kValueTol);
  CHECK(cert.checks == 4 * 9);
  CHECK_FALSE(cert.counterexample.has_value());
}

TEST_CASE("lambda = 1 with no payment credit fails with a counterexample") {
  Mechanism m = auction();
  SmoothnessCertificate cert = verify_smoothness(
      m, {win_lose_profile({2.0, 2.0})}, {1.0, 0.0, 0.0});
  CHECK_FALSE(cert.verified);
  REQUIRE(cert.counterexample.has_value());
  CHECK(cert.counterexample->lhs < cert.counterexample->rhs);
  REQUIRE(cert.counterexample->bids.size() == 2);
}

TEST_CASE("willingness credit can stand in for the payment credit") {
  // In a first-price auction the winner's willingness at the settled
  // outcome equals the payment and losers owe nothing, so mu2 = 1 with
  // mu1 = 0 certifies exactly when mu1 = 1 with mu2 = 0 does.
  Mechanism m = auction();
  std::vector<MechValuationProfile> profiles = {
      win_lose_profile({2.0, 2.0}),
      win_lose_profile({2.0, 0.0}),
  };
  SmoothnessCertificate by_pay =
      verify_smoothness(m, profiles, {0.5, 1.0, 0.0});
  SmoothnessCertificate by_wtp =
      verify_smoothness(m, profiles, {0.5, 0.0, 1.0});
  CHECK(by_pay.verified);
  CHECK(by_wtp.verified);
  CHECK(by_wtp.min_slack == doctest::Approx(by_pay.min_slack));
}

TEST_CASE("an explicit truthful rule certifies a give-away mechanism") {
  // Highest bid wins and nobody ever pays, so bidding the full value
  // recovers the optimum outright: (1, 0, 0)-smooth.
  BidGrid g({0.0, 1.0, 2.0});
  OutcomeLattice wl = OutcomeLattice::win_lose();
  auto eval = [](const std::vector<int>& bids, std::uint64_t,
                 std::vector<int>& out, std::vector<double>& pay) {
    int n = static_cast<int>(bids.size());
    out.assign(n, 0);
    pay.assign(n, 0.0);
    int best = -1;
    int arg = -1;
    for (int i = 0; i < n; ++i) {
      if (bids[i] > best) {
        best = bids[i];
        arg = i;
      }
    }
    if (best > 0) out[arg] = 1;
  };
  Mechanism m = Mechanism::from_functions("give_away", {g}, {wl}, eval, {2.0});

  MechDeviationRule truthful = [](const Mechanism& mech,
                                  const MechValuationProfile& vals) {
    std::vector<BidAtomDist> out;
    for (int i = 0; i < mech.bidders(); ++i) {
      out.push_back({{{mech.grid(i).floor_index(vals[i][1]), 1.0}}});
    }
    return out;
  };
  SmoothnessCertificate cert = verify_smoothness(
      m, {win_lose_profile({2.0}), win_lose_profile({1.0}),
          win_lose_profile({0.0})},
      {1.0, 0.0, 0.0}, truthful);
  CHECK(cert.verified);
}

TEST_CASE("verification requires a deviation rule") {
  BidGrid g({0.0, 1.0});
  OutcomeLattice wl = OutcomeLattice::win_lose();
  Mechanism m = Mechanism::from_functions(
      "silent", {g}, {wl},
      [](const std::vector<int>&, std::uint64_t, std::vector<int>& out,
         std::vector<double>& pay) {
        out.assign(1, 0);
        pay.assign(1, 0.0);
      },
      {1.0});
  CHECK_THROWS_AS(
      verify_smoothness(m, {win_lose_profile({1.0})}, {0.5, 1.0, 0.0}),
      std::invalid_argument);
}

TEST_CASE("win_lose_profile lays out values per element") {
  MechValuationProfile p = win_lose_profile({2.0, 0.5});
  REQUIRE(p.size() == 2);
  CHECK(p[0] == std::vector<double>{0.0, 2.0});
  CHECK(p[1] == std::vector<double>{0.0, 0.5});
}

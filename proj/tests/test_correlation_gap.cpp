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

#include "admech/correlation_gap.hpp"
#include "admech/lattice.hpp"
#include "admech/rng.hpp"
#include "admech/valuation.hpp"

using namespace admech;

namespace {

ProductLattice two_items() {
  return ProductLattice(
      {OutcomeLattice::win_lose(), OutcomeLattice::win_lose()});
}

// Coverage of two items: 1 if anything is won.
Valuation coverage() {
  return Valuation::table(two_items(), {0.0, 1.0, 1.0, 1.0});
}

}  // namespace

TEST_CASE("the gap bound constant") {
  double e = std::exp(1.0);
  CHECK(dmr_gap_bound() == doctest::Approx(e / (e - 1.0)).epsilon(1e-15));
}

TEST_CASE("the two-point coverage example has gap exactly 4/3") {
  // Mixing (win, lose) and (lose, win) with equal weights is worth 1;
  // independent resampling hits the empty outcome a quarter of the time.
  GapReport rep = correlation_gap(coverage(), {{1, 0}, {0, 1}}, {0.5, 0.5});
  CHECK(rep.exact);
  CHECK(rep.lhs == 1.0);
  CHECK(rep.rhs == 0.75);
  CHECK(rep.ratio == 4.0 / 3.0);
}

TEST_CASE("a single point has no gap") {
  GapReport rep = correlation_gap(coverage(), {{1, 1}}, {1.0});
  CHECK(rep.lhs == doctest::Approx(1.0));
  CHECK(rep.rhs == doctest::Approx(1.0));
  CHECK(rep.ratio == doctest::Approx(1.0));
}

TEST_CASE("scaling the valuation leaves the ratio unchanged") {
  Valuation v = Valuation::table(two_items(), {0.0, 2.0, 2.0, 2.0});
  GapReport rep = correlation_gap(v, {{1, 0}, {0, 1}}, {0.5, 0.5});
  CHECK(rep.ratio == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("a zero valuation reports ratio 1") {
  Valuation v = Valuation::table(two_items(), {0.0, 0.0, 0.0, 0.0});
  GapReport rep = correlation_gap(v, {{1, 0}, {0, 1}}, {0.5, 0.5});
  CHECK(rep.lhs == 0.0);
  CHECK(rep.rhs == 0.0);
  CHECK(rep.ratio == 1.0);
}

TEST_CASE("random monotone DMR valuations respect the bound") {
  RngStream rng(606);
  const double bound = dmr_gap_bound() + 1e-9;
  for (int trial = 0; trial < 250; ++trial) {
    RngStream sub = rng.derive("trial", static_cast<std::uint64_t>(trial));
    int factors = 1 + static_cast<int>(sub.next_below(4));
    std::vector<OutcomeLattice> fs;
    for (int f = 0; f < factors; ++f) {
      fs.push_back(
          OutcomeLattice::chain(2 + static_cast<int>(sub.next_below(2))));
    }
    ProductLattice lat(std::move(fs));
    RngStream vals = sub.derive("valuation");
    Valuation v = random_monotone_dmr(lat, vals);

    int k = 1 + static_cast<int>(sub.next_below(4));
    std::vector<OutcomeVector> xs;
    std::vector<double> alphas;
    double total = 0.0;
    for (int j = 0; j < k; ++j) {
      OutcomeVector x(static_cast<std::size_t>(factors));
      for (int f = 0; f < factors; ++f) {
        x[f] = static_cast<int>(
            sub.next_below(static_cast<std::uint64_t>(lat.factor(f).size())));
      }
      xs.push_back(std::move(x));
      double w = 0.05 + sub.next_double();
      alphas.push_back(w);
      total += w;
    }
    for (double& a : alphas) a /= total;

    GapReport rep = correlation_gap(v, xs, alphas);
    REQUIRE(rep.exact);
    CHECK(rep.ratio <= bound);
  }
}

TEST_CASE("monte carlo estimates agree with exact enumeration") {
  Valuation v = Valuation::table(two_items(), {0.0, 1.0, 2.0, 2.4});
  std::vector<OutcomeVector> xs = {{1, 0}, {0, 1}, {1, 1}};
  std::vector<double> alphas = {0.3, 0.3, 0.4};
  GapReport exact = correlation_gap(v, xs, alphas);
  REQUIRE(exact.exact);

  GapReport mc = correlation_gap(v, xs, alphas, /*budget=*/0,
                                 /*samples=*/40000, /*seed=*/9);
  CHECK_FALSE(mc.exact);
  CHECK(mc.terms == 40000);
  CHECK(mc.ci_radius > 0.0);
  CHECK(std::fabs(mc.rhs - exact.rhs) <= 3.0 * mc.ci_radius + 1e-6);
  CHECK(mc.lhs == doctest::Approx(exact.lhs));
}

TEST_CASE("per-factor marginals drive the resampling") {
  // Points (1,0) and (0,1) with weights (0.25, 0.75): the resampled first
  // item wins with probability 0.25, the second with 0.75, independently.
  Valuation v = Valuation::table(two_items(), {0.0, 0.0, 1.0, 0.0});
  GapReport first_only =
      correlation_gap(v, {{1, 0}, {0, 1}}, {0.25, 0.75});
  // v pays only for (win, lose): P = 0.25 * 0.25.
  CHECK(first_only.rhs == doctest::Approx(0.0625));
  CHECK(first_only.lhs == doctest::Approx(0.25));
}

TEST_CASE("input validation") {
  Valuation v = coverage();
  CHECK_THROWS_AS(correlation_gap(v, {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(correlation_gap(v, {{1, 0}}, {0.5, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(correlation_gap(v, {{1, 0}, {0, 1}}, {0.6, 0.6}),
                  std::invalid_argument);
  CHECK_THROWS_AS(correlation_gap(v, {{1, 0}, {0, 1}}, {1.5, -0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(correlation_gap(v, {{1}}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(correlation_gap(v, {{1, 3}}, {1.0}), std::invalid_argument);
}

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

#ifndef ADMECH_TESTS_HELPERS_HPP_
#define ADMECH_TESTS_HELPERS_HPP_

#include <utility>
#include <vector>

#include "admech/availability.hpp"
#include "admech/lattice.hpp"
#include "admech/mechanism.hpp"
#include "admech/scenario.hpp"
#include "admech/valuation.hpp"

namespace testutil {

// Table over two win/lose items; canonical order (00, 01, 10, 11) with the
// second item fastest.
inline admech::Valuation two_item_table(double lone0, double lone1,
                                        double both) {
  admech::ProductLattice lat({admech::OutcomeLattice::win_lose(),
                              admech::OutcomeLattice::win_lose()});
  return admech::Valuation::table(lat, {0.0, lone1, lone0, both});
}

inline admech::Valuation single_item_table(double value) {
  admech::ProductLattice lat({admech::OutcomeLattice::win_lose()});
  return admech::Valuation::table(lat, {0.0, value});
}

// n first-price item auctions shared by the given bidders, every declared
// value 2.
inline admech::ComposedScenario first_price_scenario(
    std::vector<admech::Valuation> vals, int items,
    std::vector<double> grid, admech::AvailabilityModel avail) {
  std::vector<double> declared(vals.size(), 2.0);
  std::vector<admech::Mechanism> mechs;
  mechs.reserve(items);
  for (int j = 0; j < items; ++j) {
    mechs.push_back(
        admech::Mechanism::first_price(declared, admech::BidGrid(grid)));
  }
  return admech::make_composed_scenario(std::move(mechs), std::move(vals),
                                        std::move(avail));
}

inline admech::AvailabilityModel always(int bidders, int mechanisms) {
  return admech::AvailabilityModel::fixed(std::vector<std::vector<double>>(
      bidders, std::vector<double>(mechanisms, 1.0)));
}

}  // namespace testutil

#endif  // ADMECH_TESTS_HELPERS_HPP_

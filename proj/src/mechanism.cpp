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

#include "admech/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>

namespace admech {
namespace {

// Odometer step over per-bidder bid indices, last bidder fastest.
bool next_profile(const std::vector<BidGrid>& grids, std::vector<int>& idx) {
  for (int i = static_cast<int>(idx.size()) - 1; i >= 0; --i) {
    if (++idx[i] < grids[i].size()) return true;
    idx[i] = 0;
  }
  return false;
}

std::vector<BidAtomDist> half_value_deviation(
    const Mechanism& mech, const MechValuationProfile& profile) {
  if (static_cast<int>(profile.size()) != mech.bidders()) {
    throw std::invalid_argument("valuation profile bidder count mismatch");
  }
  std::vector<BidAtomDist> out(profile.size());
  for (int i = 0; i < mech.bidders(); ++i) {
    if (static_cast<int>(profile[i].size()) != mech.outcome_space(i).size()) {
      throw std::invalid_argument("valuation profile element count mismatch");
    }
    double marginal = profile[i].back() - profile[i].front();
    if (marginal < 0.0) marginal = 0.0;
    out[i].atoms.push_back({mech.grid(i).floor_index(marginal / 2.0), 1.0});
  }
  return out;
}

}  // namespace

BidGrid::BidGrid(std::vector<double> bids) : bids_(std::move(bids)) {
  if (bids_.empty()) throw std::invalid_argument("bid grid is empty");
  std::sort(bids_.begin(), bids_.end());
  for (std::size_t k = 0; k < bids_.size(); ++k) {
    if (!std::isfinite(bids_[k]) || bids_[k] < 0.0) {
      throw std::invalid_argument("bid grid entries must be finite and >= 0");
    }
    if (k > 0 && bids_[k] == bids_[k - 1]) {
      throw std::invalid_argument("bid grid entries must be distinct");
    }
    if (bids_[k] == 0.0) zero_index_ = static_cast<int>(k);
  }
  if (zero_index_ < 0) throw std::invalid_argument("bid grid must contain 0");
}

int BidGrid::floor_index(double value) const {
  if (value < bids_.front()) return zero_index_;
  auto it = std::upper_bound(bids_.begin(), bids_.end(), value);
  return static_cast<int>(it - bids_.begin()) - 1;
}

int BidGrid::index_of(double value) const {
  auto it = std::lower_bound(bids_.begin(), bids_.end(), value);
  if (it == bids_.end() || *it != value) {
    throw std::invalid_argument("value is not a bid grid point");
  }
  return static_cast<int>(it - bids_.begin());
}

Mechanism Mechanism::first_price(std::vector<double> values, BidGrid grid) {
  const int n = static_cast<int>(values.size());
  if (n <= 0) throw std::invalid_argument("first_price needs >= 1 bidder");
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("declared values must be finite and >= 0");
    }
  }
  Mechanism m;
  m.kind_ = "first_price";
  m.grids_.assign(n, grid);
  m.spaces_.assign(n, OutcomeLattice::win_lose());
  m.values_ = std::move(values);
  std::vector<double> bid_values = grid.values();
  m.eval_ = [n, bid_values](const std::vector<int>& bid_idx, std::uint64_t,
                            std::vector<int>& outcome,
                            std::vector<double>& pay) {
    outcome.assign(n, 0);
    pay.assign(n, 0.0);
    int winner = -1;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
      double b = bid_values[bid_idx[i]];
      if (b > best) {
        best = b;
        winner = i;
      }
    }
    if (winner >= 0) {
      outcome[winner] = 1;
      pay[winner] = best;
    }
  };
  m.rule_ = half_value_deviation;
  return m;
}

Mechanism Mechanism::custom_table(std::vector<BidGrid> grids,
                                  std::vector<OutcomeLattice> spaces,
                                  std::vector<std::vector<int>> outcome_rows,
                                  std::vector<std::vector<double>> payment_rows) {
  const int n = static_cast<int>(grids.size());
  if (n <= 0) throw std::invalid_argument("custom_table needs >= 1 bidder");
  if (static_cast<int>(spaces.size()) != n) {
    throw std::invalid_argument("one outcome space per bidder required");
  }
  std::int64_t profiles = 1;
  for (const BidGrid& g : grids) profiles *= g.size();
  if (static_cast<std::int64_t>(outcome_rows.size()) != profiles ||
      static_cast<std::int64_t>(payment_rows.size()) != profiles) {
    throw std::invalid_argument("table row count must equal bid profile count");
  }
  for (std::int64_t r = 0; r < profiles; ++r) {
    if (static_cast<int>(outcome_rows[r].size()) != n ||
        static_cast<int>(payment_rows[r].size()) != n) {
      throw std::invalid_argument("table rows must have one entry per bidder");
    }
    for (int i = 0; i < n; ++i) {
      if (outcome_rows[r][i] < 0 || outcome_rows[r][i] >= spaces[i].size()) {
        throw std::invalid_argument("table outcome element out of range");
      }
      if (!std::isfinite(payment_rows[r][i]) || payment_rows[r][i] < 0.0) {
        throw std::invalid_argument("payments must be finite and >= 0");
      }
    }
  }

  // Masking contract: a zero bid yields the bottom outcome at zero payment,
  // whatever everybody else does.
  std::vector<int> idx(n, 0);
  do {
    std::int64_t key = 0;
    for (int i = 0; i < n; ++i) key = key * grids[i].size() + idx[i];
    for (int i = 0; i < n; ++i) {
      if (idx[i] != grids[i].zero_index()) continue;
      if (outcome_rows[key][i] != spaces[i].bottom() ||
          payment_rows[key][i] != 0.0) {
        throw std::invalid_argument(
            "zero bid must map to the bottom outcome with zero payment");
      }
    }
  } while (next_profile(grids, idx));

  Mechanism m;
  m.kind_ = "custom_table";
  std::vector<int> sizes;
  sizes.reserve(grids.size());
  for (const BidGrid& g : grids) sizes.push_back(g.size());
  m.grids_ = std::move(grids);
  m.spaces_ = std::move(spaces);
  m.eval_ = [n, sizes, outcome_rows = std::move(outcome_rows),
             payment_rows = std::move(payment_rows)](
                const std::vector<int>& bid_idx, std::uint64_t,
                std::vector<int>& outcome, std::vector<double>& pay) {
    std::int64_t key = 0;
    for (int i = 0; i < n; ++i) key = key * sizes[i] + bid_idx[i];
    outcome = outcome_rows[key];
    pay = payment_rows[key];
  };
  return m;
}

Mechanism Mechanism::from_functions(std::string kind,
                                    std::vector<BidGrid> grids,
                                    std::vector<OutcomeLattice> spaces,
                                    EvalFn eval, std::vector<double> values) {
  if (grids.empty()) throw std::invalid_argument("mechanism needs >= 1 bidder");
  if (spaces.size() != grids.size()) {
    throw std::invalid_argument("one outcome space per bidder required");
  }
  if (!eval) throw std::invalid_argument("evaluation callback is null");
  Mechanism m;
  m.kind_ = std::move(kind);
  m.grids_ = std::move(grids);
  m.spaces_ = std::move(spaces);
  m.eval_ = std::move(eval);
  m.values_ = std::move(values);
  return m;
}

void Mechanism::evaluate_into(const std::vector<int>& bid_idx,
                              std::uint64_t seed, MechanismResult& out) const {
  if (static_cast<int>(bid_idx.size()) != bidders()) {
    throw std::invalid_argument("bid profile size mismatch");
  }
  for (int i = 0; i < bidders(); ++i) {
    if (bid_idx[i] < 0 || bid_idx[i] >= grids_[i].size()) {
      throw std::invalid_argument("bid index out of range");
    }
  }
  eval_(bid_idx, seed, out.outcome, out.payments);
}

MechanismResult Mechanism::evaluate(const std::vector<int>& bid_idx,
                                    std::uint64_t seed) const {
  MechanismResult out;
  evaluate_into(bid_idx, seed, out);
  return out;
}

std::int64_t Mechanism::profile_count() const {
  std::int64_t count = 1;
  for (const BidGrid& g : grids_) {
    if (count > kExactTermLimit / g.size()) {
      throw BudgetExceeded("bid profile enumeration", kExactTermLimit + 1,
                           kExactTermLimit);
    }
    count *= g.size();
  }
  return count;
}

const std::vector<std::vector<int>>& Mechanism::achievable_outcomes() const {
  if (achievable_) return *achievable_;
  std::set<std::vector<int>, std::greater<std::vector<int>>> seen;
  std::vector<int> idx(bidders(), 0);
  MechanismResult r;
  profile_count();
  do {
    evaluate_into(idx, 0, r);
    seen.insert(r.outcome);
  } while (next_profile(grids_, idx));
  achievable_ = std::make_shared<std::vector<std::vector<int>>>(seen.begin(),
                                                                seen.end());
  return *achievable_;
}

std::int64_t Mechanism::outcome_key(const std::vector<int>& outcome) const {
  std::int64_t key = 0;
  for (int i = 0; i < bidders(); ++i) key = key * spaces_[i].size() + outcome[i];
  return key;
}

std::int64_t Mechanism::outcome_space_size() const {
  std::int64_t count = 1;
  for (const OutcomeLattice& s : spaces_) {
    if (count > kExactTermLimit / s.size()) {
      throw BudgetExceeded("outcome space enumeration", kExactTermLimit + 1,
                           kExactTermLimit);
    }
    count *= s.size();
  }
  return count;
}

double willingness_to_pay(const Mechanism& mech, int bidder, int bid_idx,
                          const std::vector<int>& outcome,
                          std::int64_t budget) {
  const int n = mech.bidders();
  if (bidder < 0 || bidder >= n) throw std::invalid_argument("bad bidder");
  std::int64_t count = 1;
  for (int i = 0; i < n; ++i) {
    if (i == bidder) continue;
    count *= mech.grid(i).size();
    if (count > budget) {
      throw BudgetExceeded("willingness enumeration", count, budget);
    }
  }
  double best = 0.0;
  std::vector<int> idx(n, 0);
  idx[bidder] = bid_idx;
  MechanismResult r;
  for (std::int64_t it = 0;; ++it) {
    mech.evaluate_into(idx, 0, r);
    if (r.outcome == outcome) best = std::max(best, r.payments[bidder]);
    int i = n - 1;
    for (; i >= 0; --i) {
      if (i == bidder) continue;
      if (++idx[i] < mech.grid(i).size()) break;
      idx[i] = 0;
    }
    if (i < 0) break;
  }
  return best;
}

std::vector<std::vector<std::vector<double>>> willingness_table(
    const Mechanism& mech, std::int64_t budget) {
  const int n = mech.bidders();
  const std::int64_t profiles = mech.profile_count();
  const std::int64_t keys = mech.outcome_space_size();
  if (profiles > budget || keys > budget) {
    throw BudgetExceeded("willingness table", std::max(profiles, keys), budget);
  }
  std::vector<std::vector<std::vector<double>>> table(n);
  for (int i = 0; i < n; ++i) {
    table[i].assign(mech.grid(i).size(), std::vector<double>(keys, 0.0));
  }
  std::vector<int> idx(n, 0);
  std::vector<BidGrid> grids;
  for (int i = 0; i < n; ++i) grids.push_back(mech.grid(i));
  MechanismResult r;
  do {
    mech.evaluate_into(idx, 0, r);
    std::int64_t key = mech.outcome_key(r.outcome);
    for (int i = 0; i < n; ++i) {
      double& cell = table[i][idx[i]][key];
      cell = std::max(cell, r.payments[i]);
    }
  } while (next_profile(grids, idx));
  return table;
}

}  // namespace admech

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

#include "admech/availability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace admech {
namespace {

void check_prob_grid(const std::vector<std::vector<double>>& q, bool binary) {
  if (q.empty() || q[0].empty()) {
    throw std::invalid_argument("availability grid is empty");
  }
  for (const auto& row : q) {
    if (row.size() != q[0].size()) {
      throw std::invalid_argument("availability grid rows differ in length");
    }
    for (double p : row) {
      if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
        throw std::invalid_argument("availability probability outside [0, 1]");
      }
      if (binary && p != 0.0 && p != 1.0) {
        throw std::invalid_argument("fixed availability entries must be 0 or 1");
      }
    }
  }
}

}  // namespace

AvailabilityModel AvailabilityModel::independent(
    std::vector<std::vector<double>> q) {
  check_prob_grid(q, false);
  AvailabilityModel m;
  m.kind_ = Kind::kIndependent;
  m.bidders_ = static_cast<int>(q.size());
  m.mechanisms_ = static_cast<int>(q[0].size());
  m.grid_ = std::move(q);
  return m;
}

AvailabilityModel AvailabilityModel::everybody_or_nobody(
    int bidders, std::vector<double> q) {
  if (bidders <= 0) throw std::invalid_argument("bidder count must be >= 1");
  if (q.empty()) throw std::invalid_argument("availability grid is empty");
  for (double p : q) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw std::invalid_argument("availability probability outside [0, 1]");
    }
  }
  AvailabilityModel m;
  m.kind_ = Kind::kEverybodyOrNobody;
  m.bidders_ = bidders;
  m.mechanisms_ = static_cast<int>(q.size());
  m.shared_ = std::move(q);
  return m;
}

AvailabilityModel AvailabilityModel::fixed(
    std::vector<std::vector<double>> pattern) {
  check_prob_grid(pattern, true);
  AvailabilityModel m;
  m.kind_ = Kind::kFixed;
  m.bidders_ = static_cast<int>(pattern.size());
  m.mechanisms_ = static_cast<int>(pattern[0].size());
  m.grid_ = std::move(pattern);
  return m;
}

double AvailabilityModel::slot_prob(int i, int j) const {
  if (i < 0 || i >= bidders_ || j < 0 || j >= mechanisms_) {
    throw std::invalid_argument("availability slot out of range");
  }
  if (kind_ == Kind::kEverybodyOrNobody) return shared_[j];
  return grid_[i][j];
}

double AvailabilityModel::shared_prob(int j) const {
  if (kind_ != Kind::kEverybodyOrNobody) {
    throw std::logic_error("shared_prob needs an everybody-or-nobody model");
  }
  return shared_.at(j);
}

std::string AvailabilityModel::kind_name() const {
  switch (kind_) {
    case Kind::kIndependent: return "independent";
    case Kind::kEverybodyOrNobody: return "everybody_or_nobody";
    case Kind::kFixed: return "fixed";
  }
  return "unknown";
}

AvailabilityRealization sample_availability(const AvailabilityModel& model,
                                            RngStream& rng) {
  AvailabilityRealization a(model.bidders(), model.mechanisms(), 0);
  switch (model.kind()) {
    case AvailabilityModel::Kind::kIndependent:
      for (int i = 0; i < a.bidders; ++i) {
        for (int j = 0; j < a.mechanisms; ++j) {
          a.set(i, j, rng.bernoulli(model.slot_prob(i, j)) ? 1 : 0);
        }
      }
      break;
    case AvailabilityModel::Kind::kEverybodyOrNobody:
      for (int j = 0; j < a.mechanisms; ++j) {
        char on = rng.bernoulli(model.shared_prob(j)) ? 1 : 0;
        for (int i = 0; i < a.bidders; ++i) a.set(i, j, on);
      }
      break;
    case AvailabilityModel::Kind::kFixed:
      for (int i = 0; i < a.bidders; ++i) {
        for (int j = 0; j < a.mechanisms; ++j) {
          a.set(i, j, model.slot_prob(i, j) > 0.5 ? 1 : 0);
        }
      }
      break;
  }
  return a;
}

std::vector<AvailabilityAtom> enumerate_support(const AvailabilityModel& model,
                                                std::int64_t budget) {
  const int n = model.bidders();
  const int m = model.mechanisms();

  // Coins with probability strictly inside (0, 1); everything else is set
  // deterministically in the base realization.
  struct Coin {
    int i;  // bidder, or -1 for a whole mechanism column
    int j;
    double p;
  };
  std::vector<Coin> coins;
  AvailabilityRealization base(n, m, 0);
  if (model.kind() == AvailabilityModel::Kind::kEverybodyOrNobody) {
    for (int j = 0; j < m; ++j) {
      double p = model.shared_prob(j);
      if (p == 0.0 || p == 1.0) {
        for (int i = 0; i < n; ++i) base.set(i, j, p == 1.0 ? 1 : 0);
      } else {
        coins.push_back({-1, j, p});
      }
    }
  } else {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        double p = model.slot_prob(i, j);
        if (p == 0.0 || p == 1.0) {
          base.set(i, j, p == 1.0 ? 1 : 0);
        } else {
          coins.push_back({i, j, p});
        }
      }
    }
  }
  if (static_cast<std::int64_t>(coins.size()) > 62 ||
      (static_cast<std::int64_t>(1) << coins.size()) > budget) {
    throw BudgetExceeded("availability support",
                         coins.size() > 62
                             ? kExactTermLimit + 1
                             : (std::int64_t{1} << coins.size()),
                         budget);
  }

  const std::int64_t atoms = std::int64_t{1} << coins.size();
  std::vector<AvailabilityAtom> out;
  out.reserve(atoms);
  double sum = 0.0;
  double carry = 0.0;
  for (std::int64_t mask = 0; mask < atoms; ++mask) {
    AvailabilityAtom atom{base, 1.0};
    for (std::size_t c = 0; c < coins.size(); ++c) {
      bool on = (mask >> c) & 1;
      atom.prob *= on ? coins[c].p : 1.0 - coins[c].p;
      if (!on) continue;
      if (coins[c].i < 0) {
        for (int i = 0; i < n; ++i) atom.realization.set(i, coins[c].j, 1);
      } else {
        atom.realization.set(coins[c].i, coins[c].j, 1);
      }
    }
    double y = atom.prob - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
    out.push_back(std::move(atom));
  }
  if (std::fabs(sum - 1.0) > kProbTol) {
    throw std::logic_error("availability support does not sum to 1");
  }
  return out;
}

std::vector<std::vector<UnitDemandCopy>> unit_demand_transform(
    const std::vector<ValueDistribution>& items, int max_copies) {
  if (max_copies < 1 || max_copies > 8) {
    throw std::invalid_argument("copy budget must be between 1 and 8");
  }
  std::vector<std::vector<UnitDemandCopy>> out;
  out.reserve(items.size());
  for (const ValueDistribution& dist : items) {
    if (dist.empty()) throw std::invalid_argument("empty value distribution");
    double total = 0.0;
    for (const auto& [v, p] : dist) {
      if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument("item values must be finite and >= 0");
      }
      if (!std::isfinite(p) || p < 0.0) {
        throw std::invalid_argument("item probabilities must be >= 0");
      }
      total += p;
    }
    if (std::fabs(total - 1.0) > 1e-9) {
      throw std::invalid_argument("item probabilities must sum to 1");
    }

    std::vector<std::pair<double, double>> merged(dist.begin(), dist.end());
    std::sort(merged.begin(), merged.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<std::pair<double, double>> distinct;
    for (const auto& [v, p] : merged) {
      if (!distinct.empty() && distinct.back().first == v) {
        distinct.back().second += p;
      } else {
        distinct.push_back({v, p});
      }
    }
    if (static_cast<int>(distinct.size()) > max_copies) {
      throw std::invalid_argument("item has more distinct values than the copy budget");
    }

    std::vector<UnitDemandCopy> chain;
    double tail = 1.0;
    for (const auto& [v, p] : distinct) {
      UnitDemandCopy copy;
      copy.value = v;
      if (tail <= kProbTol) {
        copy.never_admitted = true;
        copy.admit_prob = 0.0;
      } else {
        copy.admit_prob = std::clamp(p / tail, 0.0, 1.0);
      }
      chain.push_back(copy);
      tail -= p;
    }
    out.push_back(std::move(chain));
  }
  return out;
}

}  // namespace admech

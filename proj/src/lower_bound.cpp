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

#include "admech/lower_bound.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "admech/mechanism.hpp"
#include "admech/valuation.hpp"

namespace admech {

namespace {

constexpr int kMaxK = 64;

void require_k(int k) {
  if (k < 1 || k > kMaxK) {
    throw std::invalid_argument("k must lie in [1, 64]");
  }
}

// P(Bin(n, 1/k) <= x) for x = -1..n.
std::vector<double> binomial_cdf(int n, int k) {
  std::vector<double> cdf(static_cast<std::size_t>(n) + 2, 0.0);
  if (k == 1) {
    for (int x = -1; x <= n; ++x) cdf[x + 1] = (x >= n) ? 1.0 : 0.0;
    return cdf;
  }
  double q = 1.0 / static_cast<double>(k);
  double pmf = std::pow(1.0 - q, n);
  double acc = 0.0;
  for (int t = 0; t <= n; ++t) {
    acc += pmf;
    cdf[t + 1] = acc;
    pmf *= static_cast<double>(n - t) / static_cast<double>(t + 1) * q /
           (1.0 - q);
  }
  cdf[n + 1] = 1.0;
  return cdf;
}

// 2 E[max_l Bin(r_l, 1/k)] via the tail identity E[max] = sum_d P(max >= d).
double group_max_value(int k, const std::vector<int>& r) {
  int top = 0;
  for (int c : r) {
    if (c < 0 || c > k) throw std::invalid_argument("group count out of range");
    top = std::max(top, c);
  }
  if (top == 0) return 0.0;
  std::vector<std::vector<double>> cdfs;
  cdfs.reserve(r.size());
  for (int c : r) cdfs.push_back(binomial_cdf(c, k));
  double e_max = 0.0;
  for (int d = 1; d <= top; ++d) {
    double all_below = 1.0;
    for (std::size_t l = 0; l < r.size(); ++l) {
      if (d - 1 >= r[l]) continue;
      all_below *= cdfs[l][d];
    }
    e_max += 1.0 - all_below;
  }
  return 2.0 * e_max;
}

ObliviousBidSearchState make_state(int k, std::vector<int> r) {
  std::sort(r.begin(), r.end(), std::greater<int>());
  ObliviousBidSearchState st;
  st.expected_value = group_max_value(k, r);
  double paid = 0.0;
  for (int c : r) {
    paid += static_cast<double>(c) / static_cast<double>(k);
    if (2 * c >= k) ++st.k_prime;
  }
  st.expected_utility = st.expected_value - paid;
  st.r = std::move(r);
  return st;
}

void consider(int k, const std::vector<int>& r, ObliviousBidSearchState& best) {
  ObliviousBidSearchState st = make_state(k, r);
  if (st.expected_utility > best.expected_utility + kValueTol) {
    best = std::move(st);
  }
}

}  // namespace

LowerBoundInstance lower_bound_instance(int k) {
  require_k(k);
  LowerBoundInstance inst;
  inst.k = k;
  inst.items = k * k;
  inst.admit_prob = 1.0 / static_cast<double>(k);
  inst.groups.resize(k);
  for (int g = 0; g < k; ++g) {
    for (int j = 0; j < k; ++j) inst.groups[g].push_back(g * k + j);
  }
  return inst;
}

ComposedScenario lower_bound_scenario(int k, std::int64_t budget) {
  LowerBoundInstance inst = lower_bound_instance(k);
  if (inst.items >= 63 || (std::int64_t{1} << inst.items) > budget) {
    throw BudgetExceeded("scenario lattice",
                         inst.items >= 63 ? budget + 1
                                          : (std::int64_t{1} << inst.items),
                         budget);
  }
  std::vector<Mechanism> mechs;
  mechs.reserve(inst.items);
  for (int j = 0; j < inst.items; ++j) {
    mechs.push_back(Mechanism::first_price({2.0}, BidGrid({0.0, 1.0, 2.0})));
  }
  std::vector<std::vector<double>> q(
      1, std::vector<double>(inst.items, inst.admit_prob));
  return make_composed_scenario(std::move(mechs),
                                {group_max_valuation(k, k, 2.0)},
                                AvailabilityModel::independent(q));
}

double lb_optimal_value(int k) {
  require_k(k);
  return group_max_value(k, std::vector<int>(k, k));
}

double lb_group_value(int k, const std::vector<int>& r) {
  require_k(k);
  if (static_cast<int>(r.size()) > k) {
    throw std::invalid_argument("more groups than the instance has");
  }
  return group_max_value(k, r);
}

double lb_group_utility(int k, const std::vector<int>& r) {
  double value = lb_group_value(k, r);
  double paid = 0.0;
  for (int c : r) paid += static_cast<double>(c) / static_cast<double>(k);
  return value - paid;
}

ObliviousBidSearchState lb_best_oblivious(int k, ObliviousSearchMode mode) {
  require_k(k);
  const int half = (k + 1) / 2;
  ObliviousBidSearchState best = make_state(k, std::vector<int>(k, 0));

  switch (mode) {
    case ObliviousSearchMode::kEndpoint: {
      for (int full = 0; full <= k; ++full) {
        for (int halves = 0; full + halves <= k; ++halves) {
          std::vector<int> base(full, k);
          base.insert(base.end(), halves, half);
          if (full + halves < k) {
            for (int p = 0; p < half; ++p) {
              std::vector<int> r = base;
              if (p > 0) r.push_back(p);
              consider(k, r, best);
            }
          } else {
            consider(k, base, best);
          }
        }
      }
      break;
    }
    case ObliviousSearchMode::kReduced: {
      if (k > 12) throw std::invalid_argument("reduced search needs k <= 12");
      // Sorted prefixes of counts >= k/2, then one arbitrary tail count.
      std::vector<int> r;
      std::function<void(int, int)> recurse = [&](int depth, int prev) {
        int tail_cap = std::min(prev, k);
        for (int p = 0; p <= tail_cap; ++p) {
          r.push_back(p);
          consider(k, r, best);
          r.pop_back();
        }
        if (depth == k) return;
        for (int c = half; c <= std::min(prev, k); ++c) {
          r.push_back(c);
          recurse(depth + 1, c);
          r.pop_back();
        }
      };
      consider(k, {}, best);
      recurse(1, k);
      break;
    }
    case ObliviousSearchMode::kUnrestricted: {
      if (k > 6) throw std::invalid_argument("unrestricted search needs k <= 6");
      std::vector<int> r(k, 0);
      std::function<void(int, int)> recurse = [&](int l, int prev) {
        if (l == k) {
          consider(k, r, best);
          return;
        }
        for (int c = 0; c <= prev; ++c) {
          r[l] = c;
          recurse(l + 1, c);
        }
      };
      recurse(0, k);
      break;
    }
  }
  return best;
}

std::vector<LowerBoundRow> lower_bound_sweep(const std::vector<int>& ks) {
  std::vector<LowerBoundRow> rows;
  rows.reserve(ks.size());
  for (int k : ks) {
    LowerBoundRow row;
    row.k = k;
    row.opt_value = lb_optimal_value(k);
    ObliviousBidSearchState best = lb_best_oblivious(k);
    row.best_value = best.expected_value;
    row.best_utility = best.expected_utility;
    row.ratio = row.best_value > 0.0 ? row.opt_value / row.best_value : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace admech

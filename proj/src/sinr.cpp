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

#include "admech/sinr.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>

#include "admech/smoothness.hpp"

namespace admech {
namespace {

// Received powers with zero-distance cross gains mapped to infinity, so a
// sender on top of a foreign receiver always drowns it out.
struct GainTable {
  std::vector<double> direct;               // power / d(s_i, r_i)^alpha
  std::vector<std::vector<double>> cross;   // power / d(s_j, r_i)^alpha
};

GainTable gain_table(const SinrInstance& inst) {
  const int n = inst.size();
  GainTable g;
  g.direct.resize(n);
  g.cross.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    const double dii =
        link_distance(inst.links[i].sender, inst.links[i].receiver);
    g.direct[i] = inst.power / std::pow(dii, inst.path_loss);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dji =
          link_distance(inst.links[j].sender, inst.links[i].receiver);
      g.cross[j][i] = dji > 0.0
                          ? inst.power / std::pow(dji, inst.path_loss)
                          : std::numeric_limits<double>::infinity();
    }
  }
  return g;
}

bool mask_feasible(const SinrInstance& inst, const GainTable& g,
                   std::uint32_t mask) {
  const int n = inst.size();
  for (int i = 0; i < n; ++i) {
    if (!(mask >> i & 1u)) continue;
    double interference = inst.noise;
    for (int j = 0; j < n; ++j) {
      if (j != i && (mask >> j & 1u)) interference += g.cross[j][i];
    }
    if (!(g.direct[i] >= inst.threshold * interference)) return false;
  }
  return true;
}

std::vector<int> mask_members(std::uint32_t mask, int n) {
  std::vector<int> members;
  for (int i = 0; i < n; ++i) {
    if (mask >> i & 1u) members.push_back(i);
  }
  return members;
}

}  // namespace

void validate_sinr_instance(const SinrInstance& inst) {
  if (inst.links.empty()) {
    throw std::invalid_argument("instance needs at least one link");
  }
  if (!(inst.power > 0.0) || !std::isfinite(inst.power)) {
    throw std::invalid_argument("transmit power must be positive");
  }
  if (!(inst.path_loss > 0.0) || !std::isfinite(inst.path_loss)) {
    throw std::invalid_argument("path loss exponent must be positive");
  }
  if (!(inst.threshold > 0.0) || !std::isfinite(inst.threshold)) {
    throw std::invalid_argument("decoding threshold must be positive");
  }
  if (!(inst.noise >= 0.0) || !std::isfinite(inst.noise)) {
    throw std::invalid_argument("noise must be nonnegative and finite");
  }
  for (const SinrLink& link : inst.links) {
    for (double c : {link.sender.x, link.sender.y, link.receiver.x,
                     link.receiver.y}) {
      if (!std::isfinite(c)) {
        throw std::invalid_argument("link coordinates must be finite");
      }
    }
    if (!(link_distance(link.sender, link.receiver) > 0.0)) {
      throw std::invalid_argument(
          "each sender must sit at positive distance from its receiver");
    }
  }
}

double link_distance(const SinrPoint& a, const SinrPoint& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

InterferenceMatrix interference_matrix(const SinrInstance& inst) {
  validate_sinr_instance(inst);
  const int n = inst.size();
  InterferenceMatrix mat;
  mat.a.assign(n, std::vector<double>(n, 0.0));
  mat.solo_infeasible.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    const double dii =
        link_distance(inst.links[i].sender, inst.links[i].receiver);
    const double direct = std::pow(dii, inst.path_loss);
    const double margin =
        1.0 / inst.threshold - direct * inst.noise / inst.power;
    if (!(margin > 0.0)) mat.solo_infeasible[i] = 1;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      if (mat.solo_infeasible[i]) {
        mat.a[j][i] = 1.0;
        continue;
      }
      const double dji =
          link_distance(inst.links[j].sender, inst.links[i].receiver);
      if (!(dji > 0.0)) {
        mat.a[j][i] = 1.0;
        continue;
      }
      mat.a[j][i] =
          std::min(1.0, direct / std::pow(dji, inst.path_loss) / margin);
    }
  }
  return mat;
}

std::vector<char> sinr_feasible(const SinrInstance& inst,
                                const std::vector<char>& transmit) {
  validate_sinr_instance(inst);
  const int n = inst.size();
  if (static_cast<int>(transmit.size()) != n) {
    throw std::invalid_argument("transmit flags must match the link count");
  }
  const GainTable g = gain_table(inst);
  std::vector<char> ok(n, 0);
  for (int i = 0; i < n; ++i) {
    if (!transmit[i]) continue;
    double interference = inst.noise;
    for (int j = 0; j < n; ++j) {
      if (j != i && transmit[j]) interference += g.cross[j][i];
    }
    if (g.direct[i] >= inst.threshold * interference) ok[i] = 1;
  }
  return ok;
}

std::vector<int> channel_utilities(const SinrInstance& inst,
                                   const std::vector<char>& transmit) {
  const std::vector<char> ok = sinr_feasible(inst, transmit);
  std::vector<int> utility(inst.size(), 0);
  for (int i = 0; i < inst.size(); ++i) {
    if (transmit[i]) utility[i] = ok[i] ? 1 : -1;
  }
  return utility;
}

std::vector<int> max_feasible_set(const SinrInstance& inst) {
  validate_sinr_instance(inst);
  const int n = inst.size();
  if (n > 20) {
    throw std::invalid_argument("max_feasible_set handles at most 20 links");
  }
  const GainTable g = gain_table(inst);
  std::vector<int> best;
  const std::uint32_t masks = std::uint32_t{1} << n;
  for (std::uint32_t mask = 1; mask < masks; ++mask) {
    const int count = std::popcount(mask);
    if (count < static_cast<int>(best.size())) continue;
    if (!mask_feasible(inst, g, mask)) continue;
    std::vector<int> members = mask_members(mask, n);
    if (count > static_cast<int>(best.size()) || members < best) {
      best = std::move(members);
    }
  }
  return best;
}

Mechanism channel_mechanism(const SinrInstance& inst) {
  validate_sinr_instance(inst);
  const int n = inst.size();
  std::vector<BidGrid> grids(n, BidGrid({0.0, 1.0}));
  std::vector<OutcomeLattice> spaces(n, OutcomeLattice::win_lose());
  const SinrInstance frozen = inst;
  Mechanism::EvalFn eval = [frozen](const std::vector<int>& bid_idx,
                                    std::uint64_t /*seed*/,
                                    std::vector<int>& outcome,
                                    std::vector<double>& payments) {
    const int m = static_cast<int>(bid_idx.size());
    std::vector<char> transmit(m, 0);
    for (int i = 0; i < m; ++i) transmit[i] = bid_idx[i] > 0 ? 1 : 0;
    const std::vector<char> ok = sinr_feasible(frozen, transmit);
    outcome.assign(m, 0);
    payments.assign(m, 0.0);
    for (int i = 0; i < m; ++i) {
      if (!transmit[i]) continue;
      payments[i] = 1.0;
      if (ok[i]) outcome[i] = 1;
    }
  };
  Mechanism mech =
      Mechanism::from_functions("channel", std::move(grids), std::move(spaces),
                                std::move(eval), std::vector<double>(n, 2.0));
  std::vector<char> in_target(n, 0);
  for (int i : max_feasible_set(inst)) in_target[i] = 1;
  mech.set_deviation_rule(
      [in_target](const Mechanism& m, const MechValuationProfile&) {
        std::vector<BidAtomDist> deviations(m.bidders());
        for (int i = 0; i < m.bidders(); ++i) {
          deviations[i].atoms.push_back({in_target[i] ? 1 : 0, 1.0});
        }
        return deviations;
      });
  return mech;
}

ChannelCheck verify_channel_smoothness(const SinrInstance& inst,
                                       std::int64_t budget) {
  validate_sinr_instance(inst);
  const int n = inst.size();
  if (n > 12) {
    throw std::invalid_argument(
        "verify_channel_smoothness handles at most 12 links");
  }
  ChannelCheck check;
  check.max_feasible = max_feasible_set(inst);
  const InterferenceMatrix mat = interference_matrix(inst);
  for (char flag : mat.solo_infeasible) {
    if (flag) check.any_solo_infeasible = true;
  }

  const GainTable g = gain_table(inst);
  const std::uint32_t masks = std::uint32_t{1} << n;
  const std::int64_t work = static_cast<std::int64_t>(masks) * n;
  if (work > budget) {
    throw BudgetExceeded("channel profile enumeration", work, budget);
  }

  std::vector<char> feasible(masks, 0);
  std::vector<std::uint32_t> success(masks, 0);
  for (std::uint32_t mask = 0; mask < masks; ++mask) {
    feasible[mask] = mask_feasible(inst, g, mask) ? 1 : 0;
    std::uint32_t won = 0;
    for (int i = 0; i < n; ++i) {
      if (!(mask >> i & 1u)) continue;
      double interference = inst.noise;
      for (int j = 0; j < n; ++j) {
        if (j != i && (mask >> j & 1u)) interference += g.cross[j][i];
      }
      if (g.direct[i] >= inst.threshold * interference) won |= 1u << i;
    }
    success[mask] = won;
  }

  for (std::uint32_t mask = 0; mask < masks; ++mask) {
    if (!feasible[mask]) continue;
    for (int j = 0; j < n; ++j) {
      double load = 0.0;
      for (int i = 0; i < n; ++i) {
        if (i != j && (mask >> i & 1u)) load += mat.a[j][i];
      }
      check.empirical_c = std::max(check.empirical_c, load);
    }
  }

  std::uint32_t target = 0;
  for (int i : check.max_feasible) target |= 1u << i;
  const double opt_size = static_cast<double>(check.max_feasible.size());
  check.min_slack = std::numeric_limits<double>::infinity();
  check.displayed_ok = true;
  check.profiles = static_cast<std::int64_t>(masks);
  for (std::uint32_t mask = 0; mask < masks; ++mask) {
    double lhs = 0.0;
    for (int i = 0; i < n; ++i) {
      const std::uint32_t bit = std::uint32_t{1} << i;
      const std::uint32_t dev = (mask & ~bit) | (target & bit);
      if (!(dev & bit)) continue;
      lhs += (success[dev] & bit) ? 1.0 : -1.0;
    }
    const double rhs =
        opt_size - 2.0 * check.empirical_c * std::popcount(mask);
    const double slack = lhs - rhs;
    if (slack < check.min_slack) check.min_slack = slack;
    if (slack < -kValueTol && !check.counterexample) {
      check.displayed_ok = false;
      std::vector<char> bids(n, 0);
      for (int i = 0; i < n; ++i) bids[i] = (mask >> i & 1u) ? 1 : 0;
      check.counterexample = std::move(bids);
    }
  }

  const Mechanism mech = channel_mechanism(inst);
  const SmoothnessParams params{0.5, 2.0 * check.empirical_c, 0.0};
  check.certificate = verify_smoothness(
      mech, {win_lose_profile(std::vector<double>(n, 2.0))}, params, budget);
  return check;
}

SinrInstance random_sinr_instance(int links, RngStream& rng) {
  if (links < 1) throw std::invalid_argument("links must be positive");
  SinrInstance inst;
  inst.power = 1.0;
  inst.path_loss = 2.0;
  inst.threshold = 1.0;
  inst.noise = 0.1;
  constexpr double kArena = 10.0;
  constexpr double kMinSpacing = 0.5;
  constexpr double kMaxSpacing = 1.0;
  inst.links.resize(links);
  for (SinrLink& link : inst.links) {
    link.sender.x = kArena * rng.next_double();
    link.sender.y = kArena * rng.next_double();
    const double angle = 2.0 * std::acos(-1.0) * rng.next_double();
    const double spacing =
        kMinSpacing + (kMaxSpacing - kMinSpacing) * rng.next_double();
    link.receiver.x = link.sender.x + spacing * std::cos(angle);
    link.receiver.y = link.sender.y + spacing * std::sin(angle);
  }
  validate_sinr_instance(inst);
  return inst;
}

}  // namespace admech

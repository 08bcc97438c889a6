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

#include "admech/deviations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace admech {

namespace {

std::int64_t mul_or_throw(std::int64_t a, std::int64_t b, std::int64_t budget,
                          const char* what) {
  if (b > 0 && a > budget / b) throw BudgetExceeded(what, budget + 1, budget);
  return a * b;
}

double column_admit_prob(const AvailabilityModel& model, int j) {
  if (model.kind() == AvailabilityModel::Kind::kEverybodyOrNobody) {
    return model.shared_prob(j);
  }
  if (model.kind() == AvailabilityModel::Kind::kFixed) {
    double p = model.slot_prob(0, j);
    for (int i = 1; i < model.bidders(); ++i) {
      if (model.slot_prob(i, j) != p) {
        throw std::invalid_argument(
            "admission must be all-or-nothing per mechanism");
      }
    }
    return p;
  }
  throw std::invalid_argument(
      "admission must be all-or-nothing per mechanism");
}

void require_slotwise(const AvailabilityModel& model) {
  if (model.kind() == AvailabilityModel::Kind::kEverybodyOrNobody) {
    throw std::invalid_argument("admission must be independent per slot");
  }
}

void require_bidder(const ComposedScenario& s, int bidder) {
  if (bidder < 0 || bidder >= s.bidders()) {
    throw std::invalid_argument("bidder index out of range");
  }
}

Valuation xos_view(const Valuation& v, std::int64_t budget) {
  if (v.kind() == ValuationKind::kXos) return v;
  return supporting_xos(v, budget);
}

const MechDeviationRule& rule_of(const Mechanism& mech) {
  const MechDeviationRule& rule = mech.deviation_rule();
  if (!rule) {
    throw std::invalid_argument("mechanism of kind '" + mech.kind() +
                                "' has no deviation rule");
  }
  return rule;
}

// Bid distribution prescribed by the mechanism's rule when `bidder` pretends
// the additive values `row` (indexed by own outcome element) and knows
// nothing about the others.
BidAtomDist pretend_bid(const Mechanism& mech, int bidder,
                        const std::vector<double>& row) {
  MechValuationProfile profile(mech.bidders());
  for (int i = 0; i < mech.bidders(); ++i) {
    profile[i].assign(mech.outcome_space(i).size(), 0.0);
  }
  profile[bidder] = row;
  return rule_of(mech)(mech, profile)[bidder];
}

// Per-mechanism bid law of the slotwise deviation, conditional on the slot
// admitting: redraw every other slot, locate the welfare optimum, bid the
// rule at the supporting additive values scaled down by `gap`.
std::vector<std::pair<int, double>> slot_component(
    const ComposedScenario& s, const Valuation& xos, int bidder, double gap,
    int j, std::int64_t budget) {
  const int n = s.bidders();
  const int m = s.mechanism_count();
  const Mechanism& mech = s.mechanisms[j];
  std::vector<std::vector<double>> q(n, std::vector<double>(m));
  for (int i = 0; i < n; ++i) {
    for (int jj = 0; jj < m; ++jj) q[i][jj] = s.availability.slot_prob(i, jj);
  }
  q[bidder][j] = 1.0;
  auto atoms = enumerate_support(AvailabilityModel::independent(q), budget);

  const int elements = mech.outcome_space(bidder).size();
  std::map<int, double> law;
  std::vector<double> row(elements);
  for (const auto& atom : atoms) {
    WelfareOptimum opt = max_welfare_outcome(s, atom.realization, budget);
    int family = xos.eval_xos(opt.per_bidder[bidder]).family;
    const AdditiveTable& fam = xos.xos_families()[family];
    for (int e = 0; e < elements; ++e) row[e] = fam[j][e] / gap;
    BidAtomDist bid = pretend_bid(mech, bidder, row);
    for (const auto& [g, p] : bid.atoms) {
      if (p > 0.0) law[g] += atom.prob * p;
    }
  }
  return {law.begin(), law.end()};
}

JointBidDistribution product_of_components(
    const std::vector<std::vector<std::pair<int, double>>>& comps,
    std::int64_t budget) {
  std::int64_t count = 1;
  for (const auto& c : comps) {
    count = mul_or_throw(count, static_cast<std::int64_t>(c.size()), budget,
                         "deviation support");
  }
  const int m = static_cast<int>(comps.size());
  JointBidDistribution out;
  out.atoms.reserve(static_cast<std::size_t>(count));
  std::vector<int> cursor(m, 0);
  while (true) {
    std::vector<int> bids(m);
    double prob = 1.0;
    for (int j = 0; j < m; ++j) {
      bids[j] = comps[j][cursor[j]].first;
      prob *= comps[j][cursor[j]].second;
    }
    if (prob > 0.0) out.atoms.emplace_back(std::move(bids), prob);
    int j = m - 1;
    while (j >= 0 && ++cursor[j] == static_cast<int>(comps[j].size())) {
      cursor[j] = 0;
      --j;
    }
    if (j < 0) break;
  }
  return out;
}

// Pretend per-element values of every bidder for mechanism j under one draw:
// the marginal of meeting the element with the draw's scaled-optimum
// component, on top of the draw's admitted prefix.
MechValuationProfile surrogate_profile(
    const ComposedScenario& s, const OptimumDistribution& opt,
    const EonDraw& draw, int j,
    const std::vector<std::vector<double>>& tables) {
  const int n = s.bidders();
  const Mechanism& mech = s.mechanisms[j];
  MechValuationProfile profile(n);
  for (int i = 0; i < n; ++i) {
    const ProductLattice& lat = s.bidder_lattice(i);
    const OutcomeLattice& space = mech.outcome_space(i);
    OutcomeVector x = lat.bottom_vector();
    for (int jj = 0; jj < j; ++jj) {
      if (draw.t[jj] >= 0) x[jj] = opt.outcomes[jj][draw.t[jj]].first[i];
    }
    double base = tables[i][lat.index_of(x)];
    int zelem = draw.z[j] >= 0 ? opt.outcomes[j][draw.z[j]].first[i]
                               : space.bottom();
    profile[i].resize(space.size());
    for (int e = 0; e < space.size(); ++e) {
      x[j] = space.meet(e, zelem);
      profile[i][e] = tables[i][lat.index_of(x)] - base;
    }
  }
  return profile;
}

double draw_welfare_of(const ComposedScenario& s,
                       const OptimumDistribution& opt, const EonDraw& draw,
                       int bidder,
                       const std::vector<std::vector<double>>& tables) {
  const ProductLattice& lat = s.bidder_lattice(bidder);
  OutcomeVector x = lat.bottom_vector();
  for (int j = 0; j < s.mechanism_count(); ++j) {
    if (draw.t[j] >= 0) x[j] = opt.outcomes[j][draw.t[j]].first[bidder];
  }
  return tables[bidder][lat.index_of(x)];
}

struct Welford {
  double mean = 0.0;
  double m2 = 0.0;
  std::int64_t count = 0;

  void add(double x) {
    ++count;
    double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }
  double se() const {
    if (count < 2) return 0.0;
    return std::sqrt(m2 / static_cast<double>(count - 1) /
                     static_cast<double>(count));
  }
};

int sample_cumulative(const std::vector<double>& cum, RngStream& rng) {
  double u = rng.next_double() * cum.back();
  auto it = std::lower_bound(cum.begin(), cum.end(), u);
  if (it == cum.end()) --it;
  return static_cast<int>(it - cum.begin());
}

double equality_tol(double lhs, double rhs) {
  return kValueTol * std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
}

}  // namespace

OptimumDistribution optimum_distribution(const ComposedScenario& s,
                                         std::int64_t budget) {
  const int m = s.mechanism_count();
  OptimumDistribution out;
  out.admit_prob.resize(m);
  out.outcomes.resize(m);
  for (int j = 0; j < m; ++j) {
    out.admit_prob[j] = column_admit_prob(s.availability, j);
  }
  for (int j = 0; j < m; ++j) {
    if (out.admit_prob[j] <= 0.0) continue;
    std::vector<AvailabilityAtom> atoms;
    if (s.availability.kind() == AvailabilityModel::Kind::kFixed) {
      atoms = enumerate_support(s.availability, budget);
    } else {
      std::vector<double> q(m);
      for (int jj = 0; jj < m; ++jj) q[jj] = out.admit_prob[jj];
      q[j] = 1.0;
      atoms = enumerate_support(
          AvailabilityModel::everybody_or_nobody(s.bidders(), q), budget);
    }
    std::map<std::vector<int>, double> law;
    for (const auto& atom : atoms) {
      WelfareOptimum opt = max_welfare_outcome(s, atom.realization, budget);
      law[opt.per_mechanism[j]] += atom.prob;
    }
    out.outcomes[j].assign(law.begin(), law.end());
  }
  return out;
}

JointBidDistribution build_independent_deviation(const ComposedScenario& s,
                                                 int bidder, double gap,
                                                 std::int64_t budget) {
  require_bidder(s, bidder);
  require_slotwise(s.availability);
  if (!(gap >= 1.0)) {
    throw std::invalid_argument("gap must be at least 1");
  }
  const int m = s.mechanism_count();
  Valuation xos = xos_view(s.valuations[bidder], budget);
  std::vector<std::vector<std::pair<int, double>>> comps(m);
  for (int j = 0; j < m; ++j) {
    if (s.availability.slot_prob(bidder, j) <= 0.0) {
      comps[j] = {{s.mechanisms[j].grid(bidder).zero_index(), 1.0}};
    } else {
      comps[j] = slot_component(s, xos, bidder, gap, j, budget);
    }
  }
  return product_of_components(comps, budget);
}

MarginalComparison compare_outcome_marginals(
    const ComposedScenario& s, int bidder, double gap,
    const BidProfile& others_bids, const AvailabilityRealization& others_avail,
    std::int64_t budget) {
  require_bidder(s, bidder);
  require_slotwise(s.availability);
  if (!(gap >= 1.0)) {
    throw std::invalid_argument("gap must be at least 1");
  }
  const int n = s.bidders();
  const int m = s.mechanism_count();
  if (others_bids.bidders != n || others_bids.mechanisms != m ||
      others_avail.bidders != n || others_avail.mechanisms != m) {
    throw std::invalid_argument("context shape mismatch");
  }
  Valuation xos = xos_view(s.valuations[bidder], budget);

  // Outcome element of the target bidder per own effective bid, against the
  // realized context.
  std::vector<std::vector<int>> elem_of(m);
  for (int j = 0; j < m; ++j) {
    const Mechanism& mech = s.mechanisms[j];
    std::vector<int> bids(n);
    for (int i = 0; i < n; ++i) {
      if (i == bidder) continue;
      bids[i] = others_avail.at(i, j) ? others_bids.at(i, j)
                                      : mech.grid(i).zero_index();
    }
    elem_of[j].resize(mech.grid(bidder).size());
    for (int g = 0; g < mech.grid(bidder).size(); ++g) {
      bids[bidder] = g;
      elem_of[j][g] = mech.evaluate(bids).outcome[bidder];
    }
  }

  MarginalComparison out;
  out.oblivious.resize(m);
  out.aware.resize(m);
  for (int j = 0; j < m; ++j) {
    int elements = s.mechanisms[j].outcome_space(bidder).size();
    out.oblivious[j].assign(elements, 0.0);
    out.aware[j].assign(elements, 0.0);
  }

  for (int j = 0; j < m; ++j) {
    int zero = s.mechanisms[j].grid(bidder).zero_index();
    double q = s.availability.slot_prob(bidder, j);
    if (q > 0.0) {
      for (const auto& [g, p] : slot_component(s, xos, bidder, gap, j, budget)) {
        out.oblivious[j][elem_of[j][g]] += q * p;
      }
    }
    if (q < 1.0) out.oblivious[j][elem_of[j][zero]] += 1.0 - q;
  }

  std::vector<std::vector<double>> q_own(n, std::vector<double>(m, 1.0));
  std::vector<std::vector<double>> q_rest(n, std::vector<double>(m, 1.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      double q = s.availability.slot_prob(i, j);
      (i == bidder ? q_own : q_rest)[i][j] = q;
    }
  }
  auto own_atoms = enumerate_support(AvailabilityModel::independent(q_own), budget);
  auto rest_atoms =
      enumerate_support(AvailabilityModel::independent(q_rest), budget);
  mul_or_throw(static_cast<std::int64_t>(own_atoms.size()),
               static_cast<std::int64_t>(rest_atoms.size()), budget,
               "admission pairs");

  for (const auto& own : own_atoms) {
    for (const auto& rest : rest_atoms) {
      AvailabilityRealization a = rest.realization;
      for (int j = 0; j < m; ++j) {
        a.set(bidder, j, own.realization.at(bidder, j));
      }
      WelfareOptimum opt = max_welfare_outcome(s, a, budget);
      int family = xos.eval_xos(opt.per_bidder[bidder]).family;
      const AdditiveTable& fam = xos.xos_families()[family];
      double pbase = own.prob * rest.prob;
      for (int j = 0; j < m; ++j) {
        const Mechanism& mech = s.mechanisms[j];
        if (!own.realization.at(bidder, j)) {
          out.aware[j][elem_of[j][mech.grid(bidder).zero_index()]] += pbase;
          continue;
        }
        std::vector<double> row(mech.outcome_space(bidder).size());
        for (int e = 0; e < static_cast<int>(row.size()); ++e) {
          row[e] = fam[j][e] / gap;
        }
        BidAtomDist bid = pretend_bid(mech, bidder, row);
        for (const auto& [g, p] : bid.atoms) {
          out.aware[j][elem_of[j][g]] += pbase * p;
        }
      }
    }
  }

  for (int j = 0; j < m; ++j) {
    for (std::size_t e = 0; e < out.oblivious[j].size(); ++e) {
      out.max_gap = std::max(out.max_gap,
                             std::fabs(out.oblivious[j][e] - out.aware[j][e]));
    }
  }
  return out;
}

EonDeviation build_eon_deviation(const ComposedScenario& s, int bidder,
                                 double lambda, std::int64_t budget) {
  require_bidder(s, bidder);
  if (!(lambda > 0.0) || lambda > 2.0) {
    throw std::invalid_argument("lambda must lie in (0, 2]");
  }
  const int n = s.bidders();
  const int m = s.mechanism_count();
  EonDeviation dev;
  dev.alpha = 2.0 / lambda;
  dev.optimum = optimum_distribution(s, budget);

  std::vector<std::vector<std::pair<int, double>>> zlaw(m), tlaw(m);
  for (int j = 0; j < m; ++j) {
    double q = dev.optimum.admit_prob[j];
    double zmass = 0.0;
    double tmass = 0.0;
    for (int a = 0; a < static_cast<int>(dev.optimum.outcomes[j].size()); ++a) {
      double r = dev.optimum.outcomes[j][a].second;
      if (r / dev.alpha > 0.0) zlaw[j].emplace_back(a, r / dev.alpha);
      if (q * r > 0.0) tlaw[j].emplace_back(a, q * r);
      zmass += r / dev.alpha;
      tmass += q * r;
    }
    if (1.0 - zmass > kProbTol) zlaw[j].emplace_back(-1, 1.0 - zmass);
    if (1.0 - tmass > kProbTol) tlaw[j].emplace_back(-1, 1.0 - tmass);
    if (zlaw[j].empty()) zlaw[j].emplace_back(-1, 1.0);
    if (tlaw[j].empty()) tlaw[j].emplace_back(-1, 1.0);
  }

  std::int64_t count = 1;
  for (int j = 0; j < m; ++j) {
    count = mul_or_throw(count, static_cast<std::int64_t>(zlaw[j].size()),
                         budget, "draw support");
    count = mul_or_throw(count, static_cast<std::int64_t>(tlaw[j].size()),
                         budget, "draw support");
  }

  std::vector<std::vector<double>> tables(n);
  for (int i = 0; i < n; ++i) tables[i] = s.valuations[i].dense_table(budget);

  std::vector<int> cursor(2 * m, 0);
  while (true) {
    EonDraw draw;
    draw.z.resize(m);
    draw.t.resize(m);
    draw.prob = 1.0;
    for (int j = 0; j < m; ++j) {
      draw.z[j] = zlaw[j][cursor[j]].first;
      draw.prob *= zlaw[j][cursor[j]].second;
      draw.t[j] = tlaw[j][cursor[m + j]].first;
      draw.prob *= tlaw[j][cursor[m + j]].second;
    }
    if (draw.prob > 0.0) dev.draws.push_back(std::move(draw));
    int c = 2 * m - 1;
    auto law_size = [&](int k) {
      return k < m ? zlaw[k].size() : tlaw[k - m].size();
    };
    while (c >= 0 && ++cursor[c] == static_cast<int>(law_size(c))) {
      cursor[c] = 0;
      --c;
    }
    if (c < 0) break;
  }

  dev.draw_bids.resize(dev.draws.size());
  std::int64_t combos = 0;
  for (std::size_t d = 0; d < dev.draws.size(); ++d) {
    dev.draw_bids[d].resize(m);
    std::int64_t per_draw = 1;
    for (int j = 0; j < m; ++j) {
      MechValuationProfile profile =
          surrogate_profile(s, dev.optimum, dev.draws[d], j, tables);
      dev.draw_bids[d][j] = rule_of(s.mechanisms[j])(s.mechanisms[j],
                                                     profile)[bidder];
      per_draw = mul_or_throw(
          per_draw, static_cast<std::int64_t>(dev.draw_bids[d][j].atoms.size()),
          budget, "deviation support");
    }
    combos += per_draw;
    if (combos > budget) {
      throw BudgetExceeded("deviation support", combos, budget);
    }
  }

  std::map<std::vector<int>, double> joint;
  std::vector<int> cur(m, 0);
  for (std::size_t d = 0; d < dev.draws.size(); ++d) {
    std::fill(cur.begin(), cur.end(), 0);
    while (true) {
      std::vector<int> bids(m);
      double prob = dev.draws[d].prob;
      for (int j = 0; j < m; ++j) {
        bids[j] = dev.draw_bids[d][j].atoms[cur[j]].first;
        prob *= dev.draw_bids[d][j].atoms[cur[j]].second;
      }
      if (prob > 0.0) joint[bids] += prob;
      int j = m - 1;
      while (j >= 0 && ++cur[j] == static_cast<int>(
                                       dev.draw_bids[d][j].atoms.size())) {
        cur[j] = 0;
        --j;
      }
      if (j < 0) break;
    }
  }
  dev.bids.atoms.assign(joint.begin(), joint.end());
  return dev;
}

LemmaChainReport check_lemma_chain(
    const ComposedScenario& s, double lambda, const SmoothnessParams& params,
    const std::vector<std::pair<BidProfile, double>>& play, bool force_sampled,
    int samples, std::uint64_t seed, std::int64_t budget) {
  validate_smoothness_params(params);
  if (play.empty()) throw std::invalid_argument("empty play distribution");
  const int n = s.bidders();
  const int m = s.mechanism_count();
  double mass = 0.0;
  for (const auto& [profile, p] : play) {
    if (profile.bidders != n || profile.mechanisms != m) {
      throw std::invalid_argument("play profile shape mismatch");
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        if (profile.at(i, j) < 0 ||
            profile.at(i, j) >= s.mechanisms[j].grid(i).size()) {
          throw std::invalid_argument("play bid index out of range");
        }
      }
    }
    if (p < -kProbTol) throw std::invalid_argument("negative play weight");
    mass += p;
  }
  if (std::fabs(mass - 1.0) > 1e-9) {
    throw std::invalid_argument("play weights must sum to 1");
  }

  LemmaChainReport rep;
  rep.lambda = lambda;
  rep.alpha = 2.0 / lambda;
  const double recovery_c = 1.0 / (rep.alpha * (rep.alpha + 1.0));

  std::vector<EonDeviation> devs;
  devs.reserve(n);
  for (int i = 0; i < n; ++i) {
    devs.push_back(build_eon_deviation(s, i, lambda, budget));
  }
  const OptimumDistribution& opt = devs[0].optimum;
  const std::vector<EonDraw>& draws = devs[0].draws;
  const int draw_count = static_cast<int>(draws.size());

  std::vector<std::vector<double>> tables(n);
  for (int i = 0; i < n; ++i) tables[i] = s.valuations[i].dense_table(budget);

  // Pretend-value tables per draw and mechanism, for every valuation owner.
  std::vector<std::vector<MechValuationProfile>> wfull(draw_count);
  for (int d = 0; d < draw_count; ++d) {
    wfull[d].resize(m);
    for (int j = 0; j < m; ++j) {
      wfull[d][j] = surrogate_profile(s, opt, draws[d], j, tables);
    }
  }

  // Expected value of the admitted scaled optimum, per valuation owner.
  std::vector<double> e_vt(n, 0.0);
  for (int d = 0; d < draw_count; ++d) {
    for (int i = 0; i < n; ++i) {
      e_vt[i] += draws[d].prob * draw_welfare_of(s, opt, draws[d], i, tables);
    }
  }

  // lambda-term of the surrogate smoothness bound, first bidder's draws.
  std::vector<double> z_own(n, 0.0);
  for (int d = 0; d < draw_count; ++d) {
    for (int j = 0; j < m; ++j) {
      if (draws[d].z[j] < 0) continue;
      const std::vector<int>& zout = opt.outcomes[j][draws[d].z[j]].first;
      for (int i = 0; i < n; ++i) {
        z_own[i] +=
            draws[d].prob * opt.admit_prob[j] * wfull[d][j][i][zout[i]];
      }
    }
  }
  // Same term with each owner's own draws inside the pretend values, so the
  // first bidder's scaled optimum meets an independent copy.
  std::vector<double> z_cross(n, 0.0);
  z_cross[0] = z_own[0];
  for (int i = 1; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      double q = opt.admit_prob[j];
      if (q <= 0.0) continue;
      for (int a = 0; a < static_cast<int>(opt.outcomes[j].size()); ++a) {
        double pz = opt.outcomes[j][a].second / rep.alpha;
        int elem = opt.outcomes[j][a].first[i];
        for (int d = 0; d < draw_count; ++d) {
          z_cross[i] += q * pz * draws[d].prob * wfull[d][j][i][elem];
        }
      }
    }
  }

  auto avail = enumerate_support(s.availability, budget);

  std::vector<std::vector<std::vector<std::vector<double>>>> h_tables;
  if (params.mu2 > 0.0) {
    h_tables.reserve(m);
    for (int j = 0; j < m; ++j) {
      h_tables.push_back(willingness_table(s.mechanisms[j], budget));
    }
  }
  auto h_of = [&](const BidProfile& profile, const AvailabilityRealization& av,
                  const ComposedResult& res, int i) {
    if (params.mu2 <= 0.0) return 0.0;
    double h = 0.0;
    for (int j = 0; j < m; ++j) {
      int g = av.at(i, j) ? profile.at(i, j)
                          : s.mechanisms[j].grid(i).zero_index();
      std::vector<int> y(n);
      for (int i2 = 0; i2 < n; ++i2) y[i2] = res.outcomes[i2][j];
      h += h_tables[j][i][g][s.mechanisms[j].outcome_key(y)];
    }
    return h;
  };

  long double exact_terms = 0.0L;
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < draw_count; ++d) {
      long double prod = 1.0L;
      for (int j = 0; j < m; ++j) prod *= devs[i].draw_bids[d][j].atoms.size();
      exact_terms += prod;
    }
  }
  exact_terms *= static_cast<long double>(play.size()) * avail.size();
  rep.exact = !force_sampled &&
              exact_terms <= static_cast<long double>(budget);

  std::vector<double> ev_dev(n, 0.0), ew_dev(n, 0.0), ep_dev(n, 0.0);
  std::vector<double> pay_cur(n, 0.0), h_cur(n, 0.0);
  std::vector<Welford> recovery_margin(n);
  Welford smooth_margin_own, smooth_margin_cross;
  std::vector<double> sum_v_dev(n, 0.0), sum_w_dev(n, 0.0), sum_p_dev(n, 0.0);
  double sum_lhs2 = 0.0, sum_rhs2_own = 0.0, sum_rhs2_cross = 0.0;

  BidProfile work(n, m);
  auto dev_result = [&](const BidProfile& base, int i,
                        const std::vector<int>& own,
                        const AvailabilityRealization& av) {
    work = base;
    for (int j = 0; j < m; ++j) work.set(i, j, own[j]);
    return apply_composed(s, work, av);
  };
  auto wsum_of = [&](int i, int d, const ComposedResult& res) {
    double w = 0.0;
    for (int j = 0; j < m; ++j) w += wfull[d][j][i][res.outcomes[i][j]];
    return w;
  };

  if (rep.exact) {
    rep.terms = static_cast<std::int64_t>(exact_terms);
    std::vector<int> own(m);
    for (const auto& [profile, pb] : play) {
      if (pb <= 0.0) continue;
      for (const auto& av : avail) {
        double w0 = pb * av.prob;
        ComposedResult base = apply_composed(s, profile, av.realization);
        for (int i = 0; i < n; ++i) {
          double pay = 0.0;
          for (int j = 0; j < m; ++j) pay += base.payment(i, j, m);
          pay_cur[i] += w0 * pay;
          h_cur[i] += w0 * h_of(profile, av.realization, base, i);
        }
        for (int i = 0; i < n; ++i) {
          for (int d = 0; d < draw_count; ++d) {
            std::vector<int> cur(m, 0);
            while (true) {
              double pc = draws[d].prob;
              for (int j = 0; j < m; ++j) {
                own[j] = devs[i].draw_bids[d][j].atoms[cur[j]].first;
                pc *= devs[i].draw_bids[d][j].atoms[cur[j]].second;
              }
              if (pc > 0.0) {
                ComposedResult res = dev_result(profile, i, own, av.realization);
                double weight = w0 * pc;
                ev_dev[i] += weight * s.valuations[i].eval(res.outcomes[i]);
                ew_dev[i] += weight * wsum_of(i, d, res);
                double pay = 0.0;
                for (int j = 0; j < m; ++j) pay += res.payment(i, j, m);
                ep_dev[i] += weight * pay;
              }
              int j = m - 1;
              while (j >= 0 &&
                     ++cur[j] == static_cast<int>(
                                     devs[i].draw_bids[d][j].atoms.size())) {
                cur[j] = 0;
                --j;
              }
              if (j < 0) break;
            }
          }
        }
      }
    }
  } else {
    rep.terms = samples;
    std::vector<double> play_cum(play.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < play.size(); ++k) {
      acc += std::max(0.0, play[k].second);
      play_cum[k] = acc;
    }
    std::vector<double> draw_cum(draws.size());
    acc = 0.0;
    for (std::size_t d = 0; d < draws.size(); ++d) {
      acc += draws[d].prob;
      draw_cum[d] = acc;
    }
    RngStream root(seed);
    std::vector<int> own(m);
    const double inv_n = 1.0 / static_cast<double>(samples);
    for (int k = 0; k < samples; ++k) {
      RngStream sr = root.derive("sample", static_cast<std::uint64_t>(k));
      const BidProfile& profile = play[sample_cumulative(play_cum, sr)].first;
      AvailabilityRealization av = sample_availability(s.availability, sr);
      ComposedResult base = apply_composed(s, profile, av);
      double lhs2 = 0.0;
      double pay_all = 0.0, h_all = 0.0;
      int d0 = -1;
      for (int i = 0; i < n; ++i) {
        double pay = 0.0;
        for (int j = 0; j < m; ++j) pay += base.payment(i, j, m);
        pay_cur[i] += inv_n * pay;
        pay_all += pay;
        double h = h_of(profile, av, base, i);
        h_cur[i] += inv_n * h;
        h_all += h;
      }
      double zline_own = 0.0, zline_cross = 0.0;
      std::vector<int> d_of(n);
      for (int i = 0; i < n; ++i) {
        d_of[i] = sample_cumulative(draw_cum, sr);
      }
      d0 = d_of[0];
      for (int j = 0; j < m; ++j) {
        if (draws[d0].z[j] < 0) continue;
        const std::vector<int>& zout = opt.outcomes[j][draws[d0].z[j]].first;
        for (int i = 0; i < n; ++i) {
          zline_own += opt.admit_prob[j] * wfull[d0][j][i][zout[i]];
          zline_cross += opt.admit_prob[j] * wfull[d_of[i]][j][i][zout[i]];
        }
      }
      for (int i = 0; i < n; ++i) {
        int d = d_of[i];
        for (int j = 0; j < m; ++j) {
          const auto& atoms = devs[i].draw_bids[d][j].atoms;
          if (atoms.size() == 1) {
            own[j] = atoms[0].first;
          } else {
            double u = sr.next_double();
            double c2 = 0.0;
            own[j] = atoms.back().first;
            for (const auto& [g, p] : atoms) {
              c2 += p;
              if (u < c2) {
                own[j] = g;
                break;
              }
            }
          }
        }
        ComposedResult res = dev_result(profile, i, own, av);
        double v = s.valuations[i].eval(res.outcomes[i]);
        double wsum = wsum_of(i, d, res);
        double pay = 0.0;
        for (int j = 0; j < m; ++j) pay += res.payment(i, j, m);
        double vt = draw_welfare_of(s, opt, draws[d], i, tables);
        sum_v_dev[i] += inv_n * v;
        sum_w_dev[i] += inv_n * wsum;
        sum_p_dev[i] += inv_n * pay;
        recovery_margin[i].add(v - wsum + recovery_c * vt);
        lhs2 += wsum - pay;
      }
      double rhs2_own = lambda * zline_own - params.mu1 * pay_all -
                        params.mu2 * h_all;
      double rhs2_cross = lambda * zline_cross - params.mu1 * pay_all -
                          params.mu2 * h_all;
      smooth_margin_own.add(lhs2 - rhs2_own);
      smooth_margin_cross.add(lhs2 - rhs2_cross);
      sum_lhs2 += inv_n * lhs2;
      sum_rhs2_own += inv_n * rhs2_own;
      sum_rhs2_cross += inv_n * rhs2_cross;
    }
  }

  auto push_rows = [&](std::vector<LemmaEstimate>& rows,
                       const std::vector<double>& z_term, bool cross) {
    for (int i = 0; i < n; ++i) {
      LemmaEstimate e;
      e.name = "value_recovery";
      e.bidder = i;
      if (rep.exact) {
        e.lhs = ev_dev[i];
        e.rhs = ew_dev[i] - recovery_c * e_vt[i];
        e.holds = e.lhs >= e.rhs - equality_tol(e.lhs, e.rhs);
      } else {
        e.lhs = sum_v_dev[i];
        e.rhs = sum_w_dev[i] - recovery_c * e_vt[i];
        e.se = recovery_margin[i].se();
        e.holds = recovery_margin[i].mean >= -3.0 * e.se;
      }
      rows.push_back(std::move(e));
    }
    {
      LemmaEstimate e;
      e.name = "surrogate_smoothness";
      e.bidder = -1;
      double zsum = 0.0, psum = 0.0, hsum = 0.0;
      for (int i = 0; i < n; ++i) {
        zsum += z_term[i];
        psum += pay_cur[i];
        hsum += h_cur[i];
      }
      if (rep.exact) {
        double lhs = 0.0;
        for (int i = 0; i < n; ++i) lhs += ew_dev[i] - ep_dev[i];
        e.lhs = lhs;
        e.rhs = lambda * zsum - params.mu1 * psum - params.mu2 * hsum;
        e.holds = e.lhs >= e.rhs - equality_tol(e.lhs, e.rhs);
      } else {
        const Welford& wm = cross ? smooth_margin_cross : smooth_margin_own;
        e.lhs = sum_lhs2;
        e.rhs = cross ? sum_rhs2_cross : sum_rhs2_own;
        e.se = wm.se();
        e.holds = wm.mean >= -3.0 * e.se;
      }
      rows.push_back(std::move(e));
    }
    for (int i = 0; i < n; ++i) {
      LemmaEstimate e;
      e.name = "surrogate_identity";
      e.bidder = i;
      e.lhs = z_term[i];
      e.rhs = e_vt[i] / rep.alpha;
      e.equality = true;
      e.holds = std::fabs(e.lhs - e.rhs) <= equality_tol(e.lhs, e.rhs);
      rows.push_back(std::move(e));
    }
  };
  push_rows(rep.own_draw, z_own, false);
  push_rows(rep.per_bidder_draw, z_cross, true);
  return rep;
}

namespace {

ComposedCheck check_composed_profiles(const ComposedScenario& s,
                                      const std::vector<JointBidDistribution>& devs,
                                      double coefficient,
                                      const SmoothnessParams& params,
                                      std::int64_t budget) {
  const int n = s.bidders();
  const int m = s.mechanism_count();
  auto avail = enumerate_support(s.availability, budget);

  ComposedCheck out;
  out.coefficient = coefficient;
  for (const auto& av : avail) {
    out.expected_opt +=
        av.prob * max_welfare_outcome(s, av.realization, budget).welfare;
  }

  std::int64_t profiles = 1;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      profiles = mul_or_throw(profiles, s.mechanisms[j].grid(i).size(), budget,
                              "bid profiles");
    }
  }
  std::int64_t atom_total = 0;
  for (const auto& dev : devs) {
    atom_total += static_cast<std::int64_t>(dev.atoms.size());
  }
  std::int64_t per_profile = mul_or_throw(
      static_cast<std::int64_t>(avail.size()), std::max<std::int64_t>(
          atom_total + 1, 1), budget, "composed check");
  mul_or_throw(profiles, per_profile, budget, "composed check");
  out.profiles = profiles;

  std::vector<std::vector<std::vector<std::vector<double>>>> h_tables;
  if (params.mu2 > 0.0) {
    h_tables.reserve(m);
    for (int j = 0; j < m; ++j) {
      h_tables.push_back(willingness_table(s.mechanisms[j], budget));
    }
  }

  out.min_slack = std::numeric_limits<double>::infinity();
  out.ok = true;
  BidProfile profile(n, m);
  BidProfile work(n, m);
  while (true) {
    double lhs = 0.0, pay_term = 0.0, h_term = 0.0;
    for (const auto& av : avail) {
      ComposedResult base = apply_composed(s, profile, av.realization);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) pay_term += av.prob * base.payment(i, j, m);
      }
      if (params.mu2 > 0.0) {
        for (int j = 0; j < m; ++j) {
          std::vector<int> y(n);
          for (int i2 = 0; i2 < n; ++i2) y[i2] = base.outcomes[i2][j];
          std::int64_t key = s.mechanisms[j].outcome_key(y);
          for (int i = 0; i < n; ++i) {
            int g = av.realization.at(i, j)
                        ? profile.at(i, j)
                        : s.mechanisms[j].grid(i).zero_index();
            h_term += av.prob * h_tables[j][i][g][key];
          }
        }
      }
      for (int i = 0; i < n; ++i) {
        for (const auto& [own, p] : devs[i].atoms) {
          work = profile;
          for (int j = 0; j < m; ++j) work.set(i, j, own[j]);
          ComposedResult res = apply_composed(s, work, av.realization);
          double u = s.valuations[i].eval(res.outcomes[i]);
          for (int j = 0; j < m; ++j) u -= res.payment(i, j, m);
          lhs += av.prob * p * u;
        }
      }
    }
    double rhs = coefficient * out.expected_opt - params.mu1 * pay_term -
                 params.mu2 * h_term;
    double slack = lhs - rhs;
    if (slack < out.min_slack) {
      out.min_slack = slack;
      out.lhs = lhs;
      out.rhs = rhs;
      if (slack < -kValueTol) {
        out.ok = false;
        out.counterexample = profile;
        break;
      }
    }
    int i = n - 1, j = m - 1;
    while (i >= 0) {
      int next = profile.at(i, j) + 1;
      if (next < s.mechanisms[j].grid(i).size()) {
        profile.set(i, j, next);
        break;
      }
      profile.set(i, j, 0);
      if (--j < 0) {
        j = m - 1;
        --i;
      }
    }
    if (i < 0) break;
  }
  return out;
}

}  // namespace

ComposedCheck verify_independent_composed(const ComposedScenario& s,
                                          const SmoothnessParams& params,
                                          double gap, std::int64_t budget) {
  validate_smoothness_params(params);
  if (!(gap >= 1.0)) throw std::invalid_argument("gap must be at least 1");
  std::vector<JointBidDistribution> devs;
  devs.reserve(s.bidders());
  for (int i = 0; i < s.bidders(); ++i) {
    devs.push_back(build_independent_deviation(s, i, gap, budget));
  }
  return check_composed_profiles(s, devs, params.lambda / gap, params, budget);
}

ComposedCheck verify_eon_composed(const ComposedScenario& s, double lambda,
                                  const SmoothnessParams& params,
                                  std::int64_t budget) {
  validate_smoothness_params(params);
  std::vector<JointBidDistribution> devs;
  devs.reserve(s.bidders());
  for (int i = 0; i < s.bidders(); ++i) {
    devs.push_back(build_eon_deviation(s, i, lambda, budget).bids);
  }
  double coefficient =
      (1.0 - 1.0 / std::numbers::e) * lambda * lambda / 4.0;
  return check_composed_profiles(s, devs, coefficient, params, budget);
}

}  // namespace admech

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

#include "admech/learning.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <utility>

namespace admech {
namespace {

constexpr int kJointActionCap = 1 << 20;

int checked_joint_actions(const ComposedScenario& s, int bidder) {
  std::int64_t k = 1;
  for (int j = 0; j < s.mechanism_count(); ++j) {
    k *= s.mechanisms[j].grid(bidder).size();
    if (k > kJointActionCap) {
      throw BudgetExceeded("joint action space", k, kJointActionCap);
    }
  }
  return static_cast<int>(k);
}

struct Exp3State {
  std::vector<double> w;
  double gamma = 0.0;

  Exp3State(int actions, int rounds) : w(actions, 1.0 / actions) {
    double k = actions;
    gamma = std::min(1.0, std::sqrt(k * std::log(std::max(k, 2.0)) /
                                    ((std::exp(1.0) - 1.0) * rounds)));
  }

  std::vector<double> probabilities() const {
    double total = 0.0;
    for (double x : w) total += x;
    std::vector<double> p(w.size());
    for (std::size_t a = 0; a < w.size(); ++a) {
      p[a] = (1.0 - gamma) * w[a] / total + gamma / w.size();
    }
    return p;
  }

  void update(int chosen, double norm_utility, double prob) {
    double estimate = norm_utility / prob;
    w[chosen] *= std::exp(gamma * estimate / w.size());
    double total = 0.0;
    for (double x : w) total += x;
    for (double& x : w) x /= total;
  }
};

// Per-bidder precomputed geometry of the joint action space.
struct BidderCtx {
  int actions = 0;
  std::vector<int> grid_size;          // per mechanism
  std::vector<std::int64_t> stride;    // lattice stride per mechanism
  std::vector<double> table;           // dense valuation
  UtilityRange range;
  std::vector<std::vector<int>> action_bids;  // [action][mechanism]
};

BidderCtx build_ctx(const ComposedScenario& s, int bidder) {
  BidderCtx c;
  const int m = s.mechanism_count();
  c.actions = checked_joint_actions(s, bidder);
  c.grid_size.resize(m);
  for (int j = 0; j < m; ++j) c.grid_size[j] = s.mechanisms[j].grid(bidder).size();
  const ProductLattice& lat = s.bidder_lattice(bidder);
  c.stride.assign(m, 1);
  for (int j = m - 2; j >= 0; --j) {
    c.stride[j] = c.stride[j + 1] * lat.factor(j + 1).size();
  }
  c.table = s.valuations[bidder].dense_table();
  c.range = utility_range(s, bidder);
  c.action_bids.assign(c.actions, std::vector<int>(m, 0));
  for (int a = 0; a < c.actions; ++a) {
    int rest = a;
    for (int j = m - 1; j >= 0; --j) {
      c.action_bids[a][j] = rest % c.grid_size[j];
      rest /= c.grid_size[j];
    }
  }
  return c;
}

int encode_action(const BidderCtx& c, const std::vector<int>& bids) {
  int a = 0;
  for (std::size_t j = 0; j < bids.size(); ++j) {
    if (bids[j] < 0 || bids[j] >= c.grid_size[j]) {
      throw std::invalid_argument("bid index out of range");
    }
    a = a * c.grid_size[j] + bids[j];
  }
  return a;
}

int sample_prob_vector(const std::vector<double>& p, RngStream& rng) {
  double u = rng.next_double();
  double acc = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    acc += p[a];
    if (u < acc) return static_cast<int>(a);
  }
  return static_cast<int>(p.size()) - 1;
}

// Outcome element and payment for bidder `i` in mechanism `j`, per own bid,
// with the other bidders' effective (already masked) bids held fixed.  Own
// masking is applied here: an unadmitted slot always plays the zero bid.
void own_bid_sweep(const Mechanism& mech, int i, bool admitted,
                   std::vector<int>& eff, std::uint64_t seed,
                   std::vector<int>& elem, std::vector<double>& pay,
                   MechanismResult& scratch) {
  const int g_count = mech.grid(i).size();
  elem.resize(g_count);
  pay.resize(g_count);
  if (!admitted) {
    eff[i] = mech.grid(i).zero_index();
    mech.evaluate_into(eff, seed, scratch);
    for (int g = 0; g < g_count; ++g) {
      elem[g] = scratch.outcome[i];
      pay[g] = scratch.payments[i];
    }
    return;
  }
  for (int g = 0; g < g_count; ++g) {
    eff[i] = g;
    mech.evaluate_into(eff, seed, scratch);
    elem[g] = scratch.outcome[i];
    pay[g] = scratch.payments[i];
  }
}

}  // namespace

void validate_bid_distribution(const ComposedScenario& s, int bidder,
                               const JointBidDistribution& dist) {
  if (bidder < 0 || bidder >= s.bidders()) {
    throw std::invalid_argument("bidder index out of range");
  }
  if (dist.atoms.empty()) {
    throw std::invalid_argument("bid distribution has no atoms");
  }
  const int m = s.mechanism_count();
  double total = 0.0;
  for (const auto& [bids, p] : dist.atoms) {
    if (static_cast<int>(bids.size()) != m) {
      throw std::invalid_argument("bid atom length differs from mechanism count");
    }
    for (int j = 0; j < m; ++j) {
      if (bids[j] < 0 || bids[j] >= s.mechanisms[j].grid(bidder).size()) {
        throw std::invalid_argument("bid atom index out of range");
      }
    }
    if (!std::isfinite(p) || p < -kProbTol) {
      throw std::invalid_argument("bid atom probability must be >= 0");
    }
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("bid atom probabilities must sum to 1");
  }
}

HedgeLearner::HedgeLearner(int actions, UtilityRange range, double step_size)
    : range_(range), step_(step_size) {
  if (actions < 1) throw std::invalid_argument("learner needs >= 1 action");
  if (!(step_size >= 0.0) || !std::isfinite(step_size)) {
    throw std::invalid_argument("step size must be finite and >= 0");
  }
  if (range.width() < 0.0) {
    throw std::invalid_argument("utility range is inverted");
  }
  prob_.assign(actions, 1.0 / actions);
}

void HedgeLearner::update(const std::vector<double>& utilities) {
  if (static_cast<int>(utilities.size()) != actions()) {
    throw std::invalid_argument("one utility per action required");
  }
  const double width = range_.width();
  double total = 0.0;
  for (int a = 0; a < actions(); ++a) {
    double u = utilities[a];
    if (u < range_.lo - kValueTol || u > range_.hi + kValueTol) {
      throw std::invalid_argument("utility outside the declared range");
    }
    if (width > 0.0) prob_[a] *= std::exp(step_ * u / width);
    total += prob_[a];
  }
  for (double& p : prob_) p /= total;
}

int HedgeLearner::sample(RngStream& rng) const {
  return sample_prob_vector(prob_, rng);
}

HedgeLearner hedge_update(HedgeLearner learner,
                          const std::vector<double>& utilities) {
  learner.update(utilities);
  return learner;
}

double default_hedge_step(int actions, int rounds) {
  if (actions < 1 || rounds < 1) {
    throw std::invalid_argument("actions and rounds must be >= 1");
  }
  return std::sqrt(8.0 * std::log(static_cast<double>(actions)) / rounds);
}

double hedge_regret_bound(double range_width, int actions, int rounds) {
  return 2.0 * range_width *
         std::sqrt(std::log(static_cast<double>(std::max(actions, 2))) / rounds);
}

std::string learner_kind_name(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::kHedgeFullJoint: return "hedge_full_joint";
    case LearnerKind::kHedgeFactored: return "hedge_factored";
    case LearnerKind::kExp3: return "exp3";
  }
  return "unknown";
}

LearningTrace run_repeated(const ComposedScenario& s, const RunSpec& spec,
                           std::uint64_t seed,
                           const AvailabilityOverride& override_fn) {
  const int n = s.bidders();
  const int m = s.mechanism_count();
  if (spec.rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  std::vector<char> is_br(n, 0);
  for (int i : spec.best_responders) {
    if (i < 0 || i >= n) throw std::invalid_argument("best responder out of range");
    is_br[i] = 1;
  }
  if (spec.step_size && !(*spec.step_size > 0.0)) {
    throw std::invalid_argument("step size must be > 0");
  }

  std::vector<BidderCtx> ctx;
  ctx.reserve(n);
  for (int i = 0; i < n; ++i) ctx.push_back(build_ctx(s, i));

  std::vector<std::unique_ptr<HedgeLearner>> joint_learner(n);
  std::vector<std::vector<HedgeLearner>> factored_learner(n);
  std::vector<std::unique_ptr<Exp3State>> exp3(n);
  std::vector<int> br_last_action(n, -1);
  for (int i = 0; i < n; ++i) {
    if (is_br[i]) continue;
    switch (spec.learner) {
      case LearnerKind::kHedgeFullJoint: {
        double step = spec.step_size.value_or(
            default_hedge_step(ctx[i].actions, spec.rounds));
        joint_learner[i] = std::make_unique<HedgeLearner>(ctx[i].actions,
                                                          ctx[i].range, step);
        break;
      }
      case LearnerKind::kHedgeFactored:
        for (int j = 0; j < m; ++j) {
          double step = spec.step_size.value_or(
              default_hedge_step(ctx[i].grid_size[j], spec.rounds));
          factored_learner[i].emplace_back(ctx[i].grid_size[j], ctx[i].range,
                                           step);
        }
        break;
      case LearnerKind::kExp3:
        exp3[i] = std::make_unique<Exp3State>(ctx[i].actions, spec.rounds);
        break;
    }
  }

  bool audit = true;
  for (int i = 0; i < n; ++i) audit = audit && ctx[i].actions <= kAuditActionCap;

  LearningTrace trace;
  trace.bidders = n;
  trace.mechanisms = m;
  trace.rounds = spec.rounds;
  trace.seed = seed;
  trace.spec = spec;
  trace.realized_utility_sum.assign(n, 0.0);
  if (audit) {
    trace.action_utility_sum.assign(n, {});
    for (int i = 0; i < n; ++i) trace.action_utility_sum[i].assign(ctx[i].actions, 0.0);
  }
  if (spec.record_rounds) trace.rows.reserve(spec.rounds);

  RngStream root(seed);

  // Joint-action distribution a bidder's opponents see when computing a
  // best response: the learner's current mixture, or the last played action
  // of another best responder (uniform before their first move).
  auto current_action_dist = [&](int i) {
    std::vector<std::pair<int, double>> atoms;
    if (is_br[i]) {
      if (br_last_action[i] < 0) {
        atoms.reserve(ctx[i].actions);
        for (int a = 0; a < ctx[i].actions; ++a) {
          atoms.push_back({a, 1.0 / ctx[i].actions});
        }
      } else {
        atoms.push_back({br_last_action[i], 1.0});
      }
      return atoms;
    }
    switch (spec.learner) {
      case LearnerKind::kHedgeFullJoint: {
        const std::vector<double>& p = joint_learner[i]->probabilities();
        for (int a = 0; a < ctx[i].actions; ++a) {
          if (p[a] > 0.0) atoms.push_back({a, p[a]});
        }
        break;
      }
      case LearnerKind::kHedgeFactored: {
        for (int a = 0; a < ctx[i].actions; ++a) {
          double p = 1.0;
          for (int j = 0; j < m; ++j) {
            p *= factored_learner[i][j].probabilities()[ctx[i].action_bids[a][j]];
          }
          if (p > 0.0) atoms.push_back({a, p});
        }
        break;
      }
      case LearnerKind::kExp3: {
        std::vector<double> p = exp3[i]->probabilities();
        for (int a = 0; a < ctx[i].actions; ++a) {
          if (p[a] > 0.0) atoms.push_back({a, p[a]});
        }
        break;
      }
    }
    return atoms;
  };

  std::vector<int> action(n, 0);
  std::vector<std::vector<int>> elem(m), eff(m);
  std::vector<std::vector<double>> pay(m);
  for (int j = 0; j < m; ++j) eff[j].assign(n, 0);
  MechanismResult scratch;
  std::vector<double> action_u;
  std::vector<double> mech_u;

  for (int t = 0; t < spec.rounds; ++t) {
    RngStream bid_round = root.derive("bid", static_cast<std::uint64_t>(t));
    for (int i = 0; i < n; ++i) {
      if (is_br[i]) continue;
      RngStream bs = bid_round.derive(static_cast<std::uint64_t>(i));
      switch (spec.learner) {
        case LearnerKind::kHedgeFullJoint:
          action[i] = joint_learner[i]->sample(bs);
          break;
        case LearnerKind::kHedgeFactored: {
          int a = 0;
          for (int j = 0; j < m; ++j) {
            a = a * ctx[i].grid_size[j] + factored_learner[i][j].sample(bs);
          }
          action[i] = a;
          break;
        }
        case LearnerKind::kExp3:
          action[i] = sample_prob_vector(exp3[i]->probabilities(), bs);
          break;
      }
    }

    RngStream avail_stream = root.derive("avail", static_cast<std::uint64_t>(t));
    AvailabilityRealization avail = sample_availability(s.availability, avail_stream);
    if (override_fn) {
      std::optional<AvailabilityRealization> replace = override_fn(t, avail);
      if (replace) {
        if (replace->bidders != n || replace->mechanisms != m) {
          throw std::invalid_argument("availability override shape mismatch");
        }
        avail = *replace;
      }
    }
    std::uint64_t round_seed = root.derive("mech", static_cast<std::uint64_t>(t)).next_u64();

    // Availability-aware bidders move after seeing this round's admissions.
    for (int i = 0; i < n; ++i) {
      if (!is_br[i]) continue;
      std::vector<std::vector<std::pair<int, double>>> opp(n);
      std::int64_t combos = 1;
      for (int o = 0; o < n; ++o) {
        if (o == i) continue;
        opp[o] = current_action_dist(o);
        combos *= static_cast<std::int64_t>(opp[o].size());
        if (combos > kExactTermLimit) {
          throw BudgetExceeded("best response expectation", combos,
                               kExactTermLimit);
        }
      }
      std::vector<double> expected(ctx[i].actions, 0.0);
      std::vector<int> pick(n, 0);
      for (;;) {
        double p_combo = 1.0;
        for (int o = 0; o < n; ++o) {
          if (o != i) p_combo *= opp[o][pick[o]].second;
        }
        for (int j = 0; j < m; ++j) {
          const Mechanism& mech = s.mechanisms[j];
          for (int o = 0; o < n; ++o) {
            if (o == i) continue;
            int b = ctx[o].action_bids[opp[o][pick[o]].first][j];
            eff[j][o] = avail.at(o, j) ? b : mech.grid(o).zero_index();
          }
          own_bid_sweep(mech, i, avail.at(i, j) != 0, eff[j], round_seed,
                        elem[j], pay[j], scratch);
        }
        for (int a = 0; a < ctx[i].actions; ++a) {
          std::int64_t idx = 0;
          double cost = 0.0;
          for (int j = 0; j < m; ++j) {
            int g = ctx[i].action_bids[a][j];
            idx += ctx[i].stride[j] * elem[j][g];
            cost += pay[j][g];
          }
          expected[a] += p_combo * (ctx[i].table[idx] - cost);
        }
        int o = n - 1;
        for (; o >= 0; --o) {
          if (o == i || opp[o].empty()) continue;
          if (++pick[o] < static_cast<int>(opp[o].size())) break;
          pick[o] = 0;
        }
        if (o < 0) break;
      }
      int best = 0;
      for (int a = 1; a < ctx[i].actions; ++a) {
        if (expected[a] > expected[best] + kValueTol) best = a;
      }
      action[i] = best;
      br_last_action[i] = best;
    }

    BidProfile bids(n, m);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) bids.set(i, j, ctx[i].action_bids[action[i]][j]);
    }
    ComposedResult result = apply_composed(s, bids, avail, round_seed);

    std::vector<double> utilities(n);
    for (int i = 0; i < n; ++i) {
      utilities[i] = bidder_utility(s, i, result);
      trace.realized_utility_sum[i] += utilities[i];
      trace.welfare_sum += s.valuations[i].eval(result.outcomes[i]);
    }

    // Counterfactual sweep against the realized masked opponent bids.
    for (int i = 0; i < n; ++i) {
      bool need_feedback = !is_br[i];
      if (!need_feedback && !audit) continue;
      for (int j = 0; j < m; ++j) {
        const Mechanism& mech = s.mechanisms[j];
        for (int o = 0; o < n; ++o) {
          if (o == i) continue;
          eff[j][o] = avail.at(o, j) ? bids.at(o, j) : mech.grid(o).zero_index();
        }
        own_bid_sweep(mech, i, avail.at(i, j) != 0, eff[j], round_seed,
                      elem[j], pay[j], scratch);
      }
      action_u.assign(ctx[i].actions, 0.0);
      for (int a = 0; a < ctx[i].actions; ++a) {
        std::int64_t idx = 0;
        double cost = 0.0;
        for (int j = 0; j < m; ++j) {
          int g = ctx[i].action_bids[a][j];
          idx += ctx[i].stride[j] * elem[j][g];
          cost += pay[j][g];
        }
        action_u[a] = ctx[i].table[idx] - cost;
      }
      if (audit) {
        for (int a = 0; a < ctx[i].actions; ++a) {
          trace.action_utility_sum[i][a] += action_u[a];
        }
      }
      if (!need_feedback) continue;
      switch (spec.learner) {
        case LearnerKind::kHedgeFullJoint:
          joint_learner[i]->update(action_u);
          break;
        case LearnerKind::kHedgeFactored: {
          std::int64_t realized_idx = 0;
          double realized_cost = 0.0;
          for (int j = 0; j < m; ++j) {
            int g = bids.at(i, j);
            realized_idx += ctx[i].stride[j] * elem[j][g];
            realized_cost += pay[j][g];
          }
          for (int j = 0; j < m; ++j) {
            int g_real = bids.at(i, j);
            mech_u.assign(ctx[i].grid_size[j], 0.0);
            for (int g = 0; g < ctx[i].grid_size[j]; ++g) {
              std::int64_t idx = realized_idx +
                                 ctx[i].stride[j] * (elem[j][g] - elem[j][g_real]);
              double cost = realized_cost - pay[j][g_real] + pay[j][g];
              mech_u[g] = ctx[i].table[idx] - cost;
            }
            factored_learner[i][j].update(mech_u);
          }
          break;
        }
        case LearnerKind::kExp3: {
          std::vector<double> p = exp3[i]->probabilities();
          double width = ctx[i].range.width();
          double norm = width > 0.0
                            ? (utilities[i] - ctx[i].range.lo) / width
                            : 0.0;
          exp3[i]->update(action[i], norm, p[action[i]]);
          break;
        }
      }
    }

    if (spec.record_rounds) {
      TraceRound row;
      row.bids = bids;
      row.avail = avail;
      row.utilities = utilities;
      row.payments = result.payments;
      trace.rows.push_back(std::move(row));
    }
  }

  return trace;
}

std::vector<std::pair<BidProfile, double>> empirical_distribution(
    const LearningTrace& trace) {
  if (trace.rows.empty()) {
    throw std::logic_error("trace has no recorded rounds");
  }
  std::map<BidProfile, std::int64_t> counts;
  for (const TraceRound& row : trace.rows) counts[row.bids] += 1;
  std::vector<std::pair<BidProfile, double>> out;
  out.reserve(counts.size());
  for (const auto& [profile, c] : counts) {
    out.push_back({profile, static_cast<double>(c) / trace.rows.size()});
  }
  return out;
}

TraceRegret audit_trace_regret(const ComposedScenario& s,
                               const LearningTrace& trace) {
  if (trace.action_utility_sum.empty()) {
    throw std::logic_error("trace carries no audit sums");
  }
  const int n = s.bidders();
  const int m = s.mechanism_count();
  std::vector<char> is_br(n, 0);
  for (int i : trace.spec.best_responders) is_br[i] = 1;

  TraceRegret out;
  for (int i = 0; i < n; ++i) {
    const std::vector<double>& sums = trace.action_utility_sum[i];
    int best = 0;
    for (int a = 1; a < static_cast<int>(sums.size()); ++a) {
      if (sums[a] > sums[best]) best = a;
    }
    TraceRegretRow row;
    row.bidder = i;
    row.best_gain = (sums[best] - trace.realized_utility_sum[i]) / trace.rounds;
    row.oblivious = !is_br[i];
    row.best_action.assign(m, 0);
    int rest = best;
    for (int j = m - 1; j >= 0; --j) {
      int size = s.mechanisms[j].grid(i).size();
      row.best_action[j] = rest % size;
      rest /= size;
    }
    out.epsilon = std::max(out.epsilon, row.best_gain);
    out.rows.push_back(std::move(row));
  }
  return out;
}

double regret_against(const ComposedScenario& s, const LearningTrace& trace,
                      int bidder, const JointBidDistribution& deviation) {
  validate_bid_distribution(s, bidder, deviation);
  if (!trace.action_utility_sum.empty()) {
    const BidderCtx ctx = build_ctx(s, bidder);
    double dev_sum = 0.0;
    for (const auto& [bids, p] : deviation.atoms) {
      dev_sum += p * trace.action_utility_sum[bidder][encode_action(ctx, bids)];
    }
    return (dev_sum - trace.realized_utility_sum[bidder]) / trace.rounds;
  }
  if (trace.rows.empty()) {
    throw std::logic_error("trace has neither audit sums nor recorded rounds");
  }
  double gain = 0.0;
  for (const TraceRound& row : trace.rows) {
    BidProfile swapped = row.bids;
    for (const auto& [bids, p] : deviation.atoms) {
      for (int j = 0; j < trace.mechanisms; ++j) swapped.set(bidder, j, bids[j]);
      ComposedResult r = apply_composed(s, swapped, row.avail);
      gain += p * bidder_utility(s, bidder, r);
    }
    gain -= row.utilities[bidder];
  }
  return gain / trace.rounds;
}

CceCheck verify_oblivious_cce(
    const ComposedScenario& s,
    const std::vector<std::pair<BidProfile, double>>& dist,
    const std::vector<std::pair<int, JointBidDistribution>>& deviations,
    std::int64_t budget, int samples, std::uint64_t seed) {
  if (dist.empty()) throw std::invalid_argument("empty bid distribution");
  double total = 0.0;
  for (const auto& [profile, p] : dist) {
    if (profile.bidders != s.bidders() || profile.mechanisms != s.mechanism_count()) {
      throw std::invalid_argument("profile shape mismatch");
    }
    if (p < -kProbTol) throw std::invalid_argument("negative profile probability");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("profile probabilities must sum to 1");
  }
  std::int64_t atom_total = 0;
  for (const auto& [bidder, dev] : deviations) {
    validate_bid_distribution(s, bidder, dev);
    atom_total += static_cast<std::int64_t>(dev.atoms.size());
  }

  CceCheck out;
  std::int64_t support_atoms = -1;
  std::vector<AvailabilityAtom> support;
  try {
    support = enumerate_support(s.availability, budget);
    support_atoms = static_cast<std::int64_t>(support.size());
  } catch (const BudgetExceeded&) {
    support_atoms = -1;
  }

  bool exact = support_atoms > 0;
  if (exact) {
    std::int64_t terms = static_cast<std::int64_t>(dist.size()) * support_atoms *
                         std::max<std::int64_t>(atom_total, 1);
    exact = terms <= budget;
    out.terms = terms;
  }

  if (exact) {
    out.exact = true;
    for (const auto& [bidder, dev] : deviations) {
      double gain = 0.0;
      for (const auto& [profile, p_b] : dist) {
        if (p_b == 0.0) continue;
        for (const AvailabilityAtom& atom : support) {
          if (atom.prob == 0.0) continue;
          ComposedResult base = apply_composed(s, profile, atom.realization);
          double u_base = bidder_utility(s, bidder, base);
          BidProfile swapped = profile;
          double u_dev = 0.0;
          for (const auto& [bids, p_d] : dev.atoms) {
            for (int j = 0; j < s.mechanism_count(); ++j) {
              swapped.set(bidder, j, bids[j]);
            }
            ComposedResult r = apply_composed(s, swapped, atom.realization);
            u_dev += p_d * bidder_utility(s, bidder, r);
          }
          gain += p_b * atom.prob * (u_dev - u_base);
        }
      }
      out.entries.push_back({bidder, gain, 0.0});
    }
  } else {
    out.exact = false;
    out.terms = samples;
    std::vector<double> cum;
    cum.reserve(dist.size());
    double acc = 0.0;
    for (const auto& [profile, p] : dist) {
      acc += p;
      cum.push_back(acc);
    }
    RngStream root(seed);
    RngStream profile_stream = root.derive("profile");
    RngStream avail_stream = root.derive("avail");
    RngStream dev_stream = root.derive("deviation");
    std::vector<double> mean(deviations.size(), 0.0);
    std::vector<double> msq(deviations.size(), 0.0);
    for (int k = 0; k < samples; ++k) {
      double u = profile_stream.next_double() * acc;
      std::size_t pick = std::upper_bound(cum.begin(), cum.end(), u) - cum.begin();
      if (pick >= dist.size()) pick = dist.size() - 1;
      const BidProfile& profile = dist[pick].first;
      AvailabilityRealization avail = sample_availability(s.availability, avail_stream);
      for (std::size_t d = 0; d < deviations.size(); ++d) {
        const auto& [bidder, dev] = deviations[d];
        ComposedResult base = apply_composed(s, profile, avail);
        double u_base = bidder_utility(s, bidder, base);
        std::vector<double> weights;
        weights.reserve(dev.atoms.size());
        for (const auto& [bids, p] : dev.atoms) weights.push_back(std::max(p, 0.0));
        const auto& [bids, p_atom] = dev.atoms[dev_stream.sample_weights(weights)];
        BidProfile swapped = profile;
        for (int j = 0; j < s.mechanism_count(); ++j) swapped.set(bidder, j, bids[j]);
        ComposedResult r = apply_composed(s, swapped, avail);
        double x = bidder_utility(s, bidder, r) - u_base;
        double delta = x - mean[d];
        mean[d] += delta / (k + 1);
        msq[d] += delta * (x - mean[d]);
      }
    }
    for (std::size_t d = 0; d < deviations.size(); ++d) {
      double var = samples > 1 ? msq[d] / (samples - 1) : 0.0;
      out.entries.push_back(
          {deviations[d].first, mean[d], 1.96 * std::sqrt(var / samples)});
    }
  }

  for (const CceCheckEntry& e : out.entries) {
    out.epsilon = std::max(out.epsilon, e.gain);
  }
  return out;
}

}  // namespace admech

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

#ifndef ADMECH_LEARNING_HPP_
#define ADMECH_LEARNING_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "admech/scenario.hpp"

namespace admech {

// Distribution over one bidder's joint bids (one grid index per mechanism).
// Carrying no availability argument anywhere in this type is what makes
// strategies built from it availability-oblivious by construction.
struct JointBidDistribution {
  std::vector<std::pair<std::vector<int>, double>> atoms;
};

// Validates shape, index ranges, nonnegative probabilities summing to 1.
void validate_bid_distribution(const ComposedScenario& s, int bidder,
                               const JointBidDistribution& dist);

// Multiplicative-weights learner over a fixed finite action set.  Utilities
// fed to update() must stay inside the declared range; the exponent uses
// the range width, so scaling the game rescales nothing downstream.
class HedgeLearner {
 public:
  HedgeLearner(int actions, UtilityRange range, double step_size);

  int actions() const { return static_cast<int>(prob_.size()); }
  double step_size() const { return step_; }
  const UtilityRange& range() const { return range_; }
  const std::vector<double>& probabilities() const { return prob_; }

  void update(const std::vector<double>& utilities);
  int sample(RngStream& rng) const;

 private:
  std::vector<double> prob_;
  UtilityRange range_;
  double step_ = 0.0;
};

// Pure-functional flavor of HedgeLearner::update.
HedgeLearner hedge_update(HedgeLearner learner,
                          const std::vector<double>& utilities);

// sqrt(8 ln(actions) / rounds).
double default_hedge_step(int actions, int rounds);

// Audit bound on time-averaged external regret: 2 * width * sqrt(ln K / T).
double hedge_regret_bound(double range_width, int actions, int rounds);

enum class LearnerKind { kHedgeFullJoint, kHedgeFactored, kExp3 };

std::string learner_kind_name(LearnerKind kind);

struct RunSpec {
  int rounds = 1000;
  LearnerKind learner = LearnerKind::kHedgeFullJoint;
  std::optional<double> step_size;

  // Bidders replaced by an availability-aware exact best response against
  // the other bidders' current strategies.  They are not oblivious; audits
  // and reports flag them.
  std::vector<int> best_responders;

  bool record_rounds = true;
};

struct TraceRound {
  BidProfile bids;
  AvailabilityRealization avail;
  std::vector<double> utilities;  // per bidder
  std::vector<double> payments;   // row-major, bidders x mechanisms
};

struct LearningTrace {
  int bidders = 0;
  int mechanisms = 0;
  int rounds = 0;
  std::uint64_t seed = 0;
  RunSpec spec;
  std::vector<TraceRound> rows;  // empty when record_rounds is false

  double welfare_sum = 0.0;                  // sum over rounds of total value
  std::vector<double> realized_utility_sum;  // per bidder

  // Cumulative counterfactual utility of every fixed joint action,
  // [bidder][action], filled when the per-bidder action space is at most
  // kAuditActionCap.  Action index is mixed radix over the bidder's grids,
  // last mechanism fastest.
  std::vector<std::vector<double>> action_utility_sum;

  double average_welfare() const { return rounds ? welfare_sum / rounds : 0.0; }
};

inline constexpr int kAuditActionCap = 65536;

// Hook for replaying runs under perturbed admissions: called after the
// round's availability is sampled; a returned value replaces it.  Bids of
// that round are unaffected because they are drawn from substreams indexed
// before availability is touched.
using AvailabilityOverride = std::function<std::optional<AvailabilityRealization>(
    int round, const AvailabilityRealization& sampled)>;

LearningTrace run_repeated(const ComposedScenario& s, const RunSpec& spec,
                           std::uint64_t seed,
                           const AvailabilityOverride& override_fn = nullptr);

// Empirical distribution of joint bid profiles, atoms sorted by profile.
std::vector<std::pair<BidProfile, double>> empirical_distribution(
    const LearningTrace& trace);

// Time-averaged gain of the best fixed joint action per bidder, from the
// audit sums (exact).  epsilon = max over non-flagged bidders, clamped at 0.
struct TraceRegretRow {
  int bidder = 0;
  double best_gain = 0.0;          // can be negative
  std::vector<int> best_action;    // per-mechanism bid indices
  bool oblivious = true;
};
struct TraceRegret {
  double epsilon = 0.0;
  std::vector<TraceRegretRow> rows;
};
TraceRegret audit_trace_regret(const ComposedScenario& s,
                               const LearningTrace& trace);

// Time-averaged gain of one fixed deviation distribution for one bidder.
double regret_against(const ComposedScenario& s, const LearningTrace& trace,
                      int bidder, const JointBidDistribution& deviation);

// Checks a distribution over joint bid profiles against per-bidder
// oblivious deviations, in expectation over the admission process: each
// entry reports E[u_i(deviation)] - E[u_i] with a 95% confidence radius
// (zero in exact mode).
struct CceCheckEntry {
  int bidder = 0;
  double gain = 0.0;
  double ci_radius = 0.0;
};
struct CceCheck {
  bool exact = true;
  std::int64_t terms = 0;  // enumerated terms or drawn samples
  double epsilon = 0.0;    // max gain over entries, clamped at 0
  std::vector<CceCheckEntry> entries;
};
CceCheck verify_oblivious_cce(
    const ComposedScenario& s,
    const std::vector<std::pair<BidProfile, double>>& dist,
    const std::vector<std::pair<int, JointBidDistribution>>& deviations,
    std::int64_t budget = kExactTermLimit, int samples = 100000,
    std::uint64_t seed = 1);

}  // namespace admech

#endif  // ADMECH_LEARNING_HPP_

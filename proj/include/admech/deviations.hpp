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

#ifndef ADMECH_DEVIATIONS_HPP_
#define ADMECH_DEVIATIONS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "admech/learning.hpp"
#include "admech/scenario.hpp"
#include "admech/smoothness.hpp"

namespace admech {

// Conditional law of the welfare optimum's per-mechanism outcome given the
// mechanism is admitted.  Requires an admission process whose columns are
// all-or-nothing (everybody-or-nobody, or a fixed pattern with uniform
// columns).
struct OptimumDistribution {
  std::vector<double> admit_prob;  // per mechanism
  // per mechanism: (outcome vector over bidders, conditional probability);
  // empty when the mechanism is never admitted.
  std::vector<std::vector<std::pair<std::vector<int>, double>>> outcomes;
};

OptimumDistribution optimum_distribution(const ComposedScenario& s,
                                         std::int64_t budget = kExactTermLimit);

// Availability-oblivious deviation for independent admission: each
// mechanism's component is drawn separately by conditioning that slot
// admitted, redrawing every other slot fresh, locating the welfare optimum,
// and bidding the mechanism's deviation rule at the supporting additive
// values scaled down by `gap`.  Components are independent across
// mechanisms.
JointBidDistribution build_independent_deviation(
    const ComposedScenario& s, int bidder, double gap,
    std::int64_t budget = kExactTermLimit);

// Per-mechanism distribution of this bidder's outcome element induced by
// (a) the oblivious deviation above and (b) its availability-aware
// counterpart that sees the bidder's own admission row, holding the other
// bidders' bids and admissions fixed.  The two match pointwise when the
// bidder's slots are independent.
struct MarginalComparison {
  std::vector<std::vector<double>> oblivious;  // [mechanism][own element]
  std::vector<std::vector<double>> aware;
  double max_gap = 0.0;
};

MarginalComparison compare_outcome_marginals(
    const ComposedScenario& s, int bidder, double gap,
    const BidProfile& others_bids, const AvailabilityRealization& others_avail,
    std::int64_t budget = kExactTermLimit);

// Availability-oblivious deviation for everybody-or-nobody admission.
// A draw scales the optimum law down by alpha = 2/lambda (vector z) and by
// the admission probability (vector t); the bidder then pretends everyone
// values mechanism j's outcomes by the prefix-marginal surrogate
//
//   w[i'](e) = v_i'(t_1..t_{j-1}, e meet z_j, bottom...) -
//              v_i'(t_1..t_{j-1}, bottom...)
//
// and bids the mechanism's deviation rule under that pretend profile.
struct EonDraw {
  // Index into OptimumDistribution::outcomes[j], or -1 for the bottom.
  std::vector<int> z;
  std::vector<int> t;
  double prob = 0.0;
};

struct EonDeviation {
  double alpha = 0.0;
  OptimumDistribution optimum;
  std::vector<EonDraw> draws;
  // Bid distribution of the target bidder per draw and mechanism.
  std::vector<std::vector<BidAtomDist>> draw_bids;
  JointBidDistribution bids;  // collapsed over draws
};

EonDeviation build_eon_deviation(const ComposedScenario& s, int bidder,
                                 double lambda,
                                 std::int64_t budget = kExactTermLimit);

// One audited inequality (or identity) in the chain that proves the
// everybody-or-nobody composition bound.
struct LemmaEstimate {
  std::string name;
  int bidder = -1;  // -1 for aggregate statements
  double lhs = 0.0;
  double rhs = 0.0;
  double se = 0.0;  // standard error of (lhs - rhs) in sampling mode
  bool equality = false;
  bool holds = false;
};

struct LemmaChainReport {
  bool exact = true;
  std::int64_t terms = 0;  // enumerated terms or drawn samples
  double lambda = 0.0;
  double alpha = 0.0;
  // The surrogate definition leaves room for two readings of whose scaled
  // optimum draw enters the meet: the deviator's own (which makes the
  // identity below exact) or each pretend bidder's. Both are reported.
  std::vector<LemmaEstimate> own_draw;
  std::vector<LemmaEstimate> per_bidder_draw;
};

// Audits the three-step chain behind the everybody-or-nobody bound against
// a fixed distribution of current play: the deviation's value recovery
// bound, the surrogate smoothness aggregate, and the surrogate-optimum
// identity.  Runs exactly when the term count fits the budget, otherwise by
// sampling (`samples` draws, reporting standard errors).
LemmaChainReport check_lemma_chain(
    const ComposedScenario& s, double lambda, const SmoothnessParams& params,
    const std::vector<std::pair<BidProfile, double>>& play, bool force_sampled,
    int samples, std::uint64_t seed, std::int64_t budget = kExactTermLimit);

struct ComposedCheck {
  bool ok = false;
  double coefficient = 0.0;   // multiplier on the expected optimum welfare
  double expected_opt = 0.0;
  double min_slack = 0.0;
  std::int64_t profiles = 0;
  std::optional<BidProfile> counterexample;
  double lhs = 0.0;  // at the minimum-slack profile
  double rhs = 0.0;
};

// Aggregate smoothness of the whole composition under independent
// admission: for every pure bid profile b,
//   sum_i E[u_i(deviation_i, b_-i)] >=
//     (lambda/gap) E[opt welfare] - mu1 E[sum pay(b)] - mu2 E[sum h(b)].
ComposedCheck verify_independent_composed(const ComposedScenario& s,
                                          const SmoothnessParams& params,
                                          double gap,
                                          std::int64_t budget = kExactTermLimit);

// Same shape under everybody-or-nobody admission with coefficient
// (1 - 1/e) lambda^2 / 4.
ComposedCheck verify_eon_composed(const ComposedScenario& s, double lambda,
                                  const SmoothnessParams& params,
                                  std::int64_t budget = kExactTermLimit);

}  // namespace admech

#endif  // ADMECH_DEVIATIONS_HPP_

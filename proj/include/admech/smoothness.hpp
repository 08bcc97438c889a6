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

#ifndef ADMECH_SMOOTHNESS_HPP_
#define ADMECH_SMOOTHNESS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "admech/common.hpp"
#include "admech/mechanism.hpp"

namespace admech {

// Parameters of the per-mechanism guarantee: against every bid profile b,
// the declared deviations b' satisfy
//
//   sum_i E[ v_i(f(b'_i, b_-i)) - p_i(b'_i, b_-i) ]
//     >= lambda * max_x sum_i v_i(x) - mu1 * sum_i p_i(b)
//        - mu2 * sum_i h_i(b_i, f(b)),
//
// where h_i(g, x) is the most bidder i can be charged while playing g when
// the mechanism settles on outcome x.
struct SmoothnessParams {
  double lambda = 1.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
};

void validate_smoothness_params(const SmoothnessParams& p);

// Single-mechanism bound (mu2 + max(1, mu1)) / lambda.
double poa_single_bound(const SmoothnessParams& p);
// Composition bound under independent admission, gap * single bound.
double poa_independent_bound(const SmoothnessParams& p, double gap);
// Composition bound under everybody-or-nobody admission,
// 4e/(e-1) * (max(1, mu1) + mu2) / lambda^2.
double poa_eon_bound(const SmoothnessParams& p);

struct SmoothnessViolation {
  int valuation_profile = 0;
  std::vector<int> bids;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct SmoothnessCertificate {
  SmoothnessParams params;
  std::string mechanism_kind;
  bool verified = false;
  std::int64_t checks = 0;       // (valuation profile, bid profile) pairs
  double min_slack = 0.0;        // smallest lhs - rhs seen
  std::optional<SmoothnessViolation> counterexample;
};

// Exhaustively checks the guarantee above for every listed valuation
// profile and every pure bid profile, with deviations drawn from `rule`
// averaged exactly.  Stops at the first violation.
SmoothnessCertificate verify_smoothness(
    const Mechanism& mech, const std::vector<MechValuationProfile>& profiles,
    const SmoothnessParams& params, const MechDeviationRule& rule,
    std::int64_t budget = kExactTermLimit);

// Same, using the mechanism's registered deviation rule.
SmoothnessCertificate verify_smoothness(
    const Mechanism& mech, const std::vector<MechValuationProfile>& profiles,
    const SmoothnessParams& params, std::int64_t budget = kExactTermLimit);

// Valuation profile over win/lose outcome spaces from per-bidder values of
// winning.
MechValuationProfile win_lose_profile(const std::vector<double>& values);

}  // namespace admech

#endif  // ADMECH_SMOOTHNESS_HPP_

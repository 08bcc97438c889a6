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

#include "admech/smoothness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace admech {

void validate_smoothness_params(const SmoothnessParams& p) {
  if (!std::isfinite(p.lambda) || p.lambda <= 0.0) {
    throw std::invalid_argument("lambda must be finite and > 0");
  }
  if (!std::isfinite(p.mu1) || p.mu1 < 0.0 || !std::isfinite(p.mu2) ||
      p.mu2 < 0.0) {
    throw std::invalid_argument("mu1 and mu2 must be finite and >= 0");
  }
}

double poa_single_bound(const SmoothnessParams& p) {
  validate_smoothness_params(p);
  return (p.mu2 + std::max(1.0, p.mu1)) / p.lambda;
}

double poa_independent_bound(const SmoothnessParams& p, double gap) {
  if (!std::isfinite(gap) || gap < 1.0) {
    throw std::invalid_argument("correlation gap must be >= 1");
  }
  return gap * poa_single_bound(p);
}

double poa_eon_bound(const SmoothnessParams& p) {
  validate_smoothness_params(p);
  const double e = std::exp(1.0);
  return 4.0 * e / (e - 1.0) * (std::max(1.0, p.mu1) + p.mu2) /
         (p.lambda * p.lambda);
}

MechValuationProfile win_lose_profile(const std::vector<double>& values) {
  MechValuationProfile out;
  out.reserve(values.size());
  for (double v : values) out.push_back({0.0, v});
  return out;
}

namespace {

void validate_profile(const Mechanism& mech, const MechValuationProfile& p) {
  if (static_cast<int>(p.size()) != mech.bidders()) {
    throw std::invalid_argument("valuation profile bidder count mismatch");
  }
  for (int i = 0; i < mech.bidders(); ++i) {
    if (static_cast<int>(p[i].size()) != mech.outcome_space(i).size()) {
      throw std::invalid_argument("valuation profile element count mismatch");
    }
    for (double v : p[i]) {
      if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument("values must be finite and >= 0");
      }
    }
  }
}

void validate_deviation(const Mechanism& mech,
                        const std::vector<BidAtomDist>& dev) {
  if (static_cast<int>(dev.size()) != mech.bidders()) {
    throw std::invalid_argument("one deviation per bidder required");
  }
  for (int i = 0; i < mech.bidders(); ++i) {
    double total = 0.0;
    if (dev[i].atoms.empty()) {
      throw std::invalid_argument("deviation has no atoms");
    }
    for (const auto& [g, p] : dev[i].atoms) {
      if (g < 0 || g >= mech.grid(i).size()) {
        throw std::invalid_argument("deviation bid out of range");
      }
      if (!std::isfinite(p) || p < -kProbTol) {
        throw std::invalid_argument("deviation probability must be >= 0");
      }
      total += p;
    }
    if (std::fabs(total - 1.0) > 1e-9) {
      throw std::invalid_argument("deviation probabilities must sum to 1");
    }
  }
}

}  // namespace

SmoothnessCertificate verify_smoothness(
    const Mechanism& mech, const std::vector<MechValuationProfile>& profiles,
    const SmoothnessParams& params, const MechDeviationRule& rule,
    std::int64_t budget) {
  validate_smoothness_params(params);
  if (!rule) throw std::invalid_argument("deviation rule is null");
  if (profiles.empty()) {
    throw std::invalid_argument("at least one valuation profile required");
  }
  const int n = mech.bidders();
  const std::int64_t bid_profiles = mech.profile_count();
  if (bid_profiles * static_cast<std::int64_t>(profiles.size()) > budget) {
    throw BudgetExceeded("smoothness sweep",
                         bid_profiles * static_cast<std::int64_t>(profiles.size()),
                         budget);
  }

  SmoothnessCertificate cert;
  cert.params = params;
  cert.mechanism_kind = mech.kind();
  cert.min_slack = std::numeric_limits<double>::infinity();

  std::vector<std::vector<std::vector<double>>> h_table;
  if (params.mu2 > 0.0) h_table = willingness_table(mech, budget);

  MechanismResult r, rd;
  for (std::size_t v = 0; v < profiles.size(); ++v) {
    const MechValuationProfile& vals = profiles[v];
    validate_profile(mech, vals);
    std::vector<BidAtomDist> dev = rule(mech, vals);
    validate_deviation(mech, dev);

    double opt = 0.0;
    for (const std::vector<int>& x : mech.achievable_outcomes()) {
      double welfare = 0.0;
      for (int i = 0; i < n; ++i) welfare += vals[i][x[i]];
      opt = std::max(opt, welfare);
    }

    std::vector<int> bids(n, 0);
    for (;;) {
      mech.evaluate_into(bids, 0, r);
      double pay_sum = 0.0;
      for (int i = 0; i < n; ++i) pay_sum += r.payments[i];
      double h_sum = 0.0;
      if (params.mu2 > 0.0) {
        std::int64_t key = mech.outcome_key(r.outcome);
        for (int i = 0; i < n; ++i) h_sum += h_table[i][bids[i]][key];
      }

      double lhs = 0.0;
      std::vector<int> swapped = bids;
      for (int i = 0; i < n; ++i) {
        for (const auto& [g, p] : dev[i].atoms) {
          swapped[i] = g;
          mech.evaluate_into(swapped, 0, rd);
          lhs += p * (vals[i][rd.outcome[i]] - rd.payments[i]);
        }
        swapped[i] = bids[i];
      }

      double rhs = params.lambda * opt - params.mu1 * pay_sum -
                   params.mu2 * h_sum;
      cert.checks += 1;
      double slack = lhs - rhs;
      cert.min_slack = std::min(cert.min_slack, slack);
      if (slack < -kValueTol) {
        cert.counterexample = SmoothnessViolation{static_cast<int>(v), bids,
                                                  lhs, rhs};
        cert.verified = false;
        return cert;
      }

      int i = n - 1;
      for (; i >= 0; --i) {
        if (++bids[i] < mech.grid(i).size()) break;
        bids[i] = 0;
      }
      if (i < 0) break;
    }
  }
  cert.verified = true;
  return cert;
}

SmoothnessCertificate verify_smoothness(
    const Mechanism& mech, const std::vector<MechValuationProfile>& profiles,
    const SmoothnessParams& params, std::int64_t budget) {
  if (!mech.deviation_rule()) {
    throw std::invalid_argument("mechanism has no registered deviation rule");
  }
  return verify_smoothness(mech, profiles, params, mech.deviation_rule(),
                           budget);
}

}  // namespace admech

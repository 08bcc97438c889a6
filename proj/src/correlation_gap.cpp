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

#include "admech/correlation_gap.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include "admech/rng.hpp"

namespace admech {

double dmr_gap_bound() {
  return std::numbers::e / (std::numbers::e - 1.0);
}

GapReport correlation_gap(const Valuation& v,
                          const std::vector<OutcomeVector>& xs,
                          const std::vector<double>& alphas,
                          std::int64_t budget, int samples,
                          std::uint64_t seed) {
  const ProductLattice& lat = v.lattice();
  const int m = lat.factor_count();
  const int k = static_cast<int>(xs.size());
  if (k == 0 || alphas.size() != xs.size()) {
    throw std::invalid_argument("weights and outcomes must pair up");
  }
  double mass = 0.0;
  for (double a : alphas) {
    if (a < -kProbTol) throw std::invalid_argument("negative weight");
    mass += a;
  }
  if (std::fabs(mass - 1.0) > kProbTol) {
    throw std::invalid_argument("weights must sum to 1");
  }
  for (const auto& x : xs) {
    if (static_cast<int>(x.size()) != m) {
      throw std::invalid_argument("outcome arity mismatch");
    }
    for (int f = 0; f < m; ++f) {
      if (x[f] < 0 || x[f] >= lat.factor(f).size()) {
        throw std::invalid_argument("outcome element out of range");
      }
    }
  }

  GapReport rep;
  for (int j = 0; j < k; ++j) rep.lhs += alphas[j] * v.eval(xs[j]);

  // Per-component marginals over the distinct elements that appear.
  std::vector<std::vector<std::pair<int, double>>> marginals(m);
  for (int f = 0; f < m; ++f) {
    std::map<int, double> law;
    for (int j = 0; j < k; ++j) law[xs[j][f]] += alphas[j];
    for (const auto& [e, p] : law) {
      if (p > 0.0) marginals[f].emplace_back(e, p);
    }
    if (marginals[f].empty()) marginals[f].emplace_back(xs[0][f], 1.0);
  }

  std::int64_t count = 1;
  bool fits = true;
  for (int f = 0; f < m; ++f) {
    auto size = static_cast<std::int64_t>(marginals[f].size());
    if (count > budget / size) {
      fits = false;
      break;
    }
    count *= size;
  }

  if (fits) {
    rep.exact = true;
    rep.terms = count;
    OutcomeVector y(m);
    std::vector<int> cursor(m, 0);
    while (true) {
      double p = 1.0;
      for (int f = 0; f < m; ++f) {
        y[f] = marginals[f][cursor[f]].first;
        p *= marginals[f][cursor[f]].second;
      }
      rep.rhs += p * v.eval(y);
      int f = m - 1;
      while (f >= 0 && ++cursor[f] == static_cast<int>(marginals[f].size())) {
        cursor[f] = 0;
        --f;
      }
      if (f < 0) break;
    }
  } else {
    rep.exact = false;
    rep.terms = samples;
    RngStream rng(seed);
    OutcomeVector y(m);
    double mean = 0.0, m2 = 0.0;
    for (int t = 0; t < samples; ++t) {
      for (int f = 0; f < m; ++f) {
        double u = rng.next_double();
        double acc = 0.0;
        y[f] = marginals[f].back().first;
        for (const auto& [e, p] : marginals[f]) {
          acc += p;
          if (u < acc) {
            y[f] = e;
            break;
          }
        }
      }
      double val = v.eval(y);
      double d = val - mean;
      mean += d / static_cast<double>(t + 1);
      m2 += d * (val - mean);
    }
    rep.rhs = mean;
    if (samples > 1) {
      rep.ci_radius = 1.96 * std::sqrt(m2 / static_cast<double>(samples - 1) /
                                       static_cast<double>(samples));
    }
  }

  if (rep.rhs > kValueTol) {
    rep.ratio = rep.lhs / rep.rhs;
  } else if (rep.lhs > kValueTol) {
    rep.ratio = std::numeric_limits<double>::infinity();
  } else {
    rep.ratio = 1.0;
  }
  return rep;
}

}  // namespace admech

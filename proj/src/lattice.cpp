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

#include "admech/lattice.hpp"

#include <limits>
#include <stdexcept>

namespace admech {

OutcomeLattice OutcomeLattice::chain(int levels) {
  if (levels < 1) throw std::invalid_argument("chain: needs >= 1 level");
  OutcomeLattice lat;
  lat.n_ = levels;
  lat.labels_.reserve(levels);
  for (int i = 0; i < levels; ++i) lat.labels_.push_back(std::to_string(i));
  lat.leq_.assign(levels * levels, 0);
  for (int a = 0; a < levels; ++a)
    for (int b = a; b < levels; ++b) lat.leq_[a * levels + b] = 1;
  lat.finish_construction();
  return lat;
}

OutcomeLattice OutcomeLattice::win_lose() {
  OutcomeLattice lat = chain(2);
  lat.labels_ = {"lose", "win"};
  return lat;
}

OutcomeLattice OutcomeLattice::from_order(
    std::vector<std::string> labels, std::vector<std::pair<int, int>> below) {
  const int n = static_cast<int>(labels.size());
  if (n < 1) throw std::invalid_argument("from_order: empty element set");
  OutcomeLattice lat;
  lat.n_ = n;
  lat.labels_ = std::move(labels);
  lat.leq_.assign(n * n, 0);
  for (int a = 0; a < n; ++a) lat.leq_[a * n + a] = 1;
  for (auto [lo, hi] : below) {
    if (lo < 0 || lo >= n || hi < 0 || hi >= n) {
      throw std::invalid_argument("from_order: pair index out of range");
    }
    lat.leq_[lo * n + hi] = 1;
  }
  // Floyd-Warshall style transitive closure.
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < n; ++a)
      if (lat.leq_[a * n + k])
        for (int b = 0; b < n; ++b)
          if (lat.leq_[k * n + b]) lat.leq_[a * n + b] = 1;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (lat.leq_[a * n + b] && lat.leq_[b * n + a]) {
        throw std::invalid_argument("from_order: order is not antisymmetric (" +
                                    lat.labels_[a] + " vs " + lat.labels_[b] +
                                    ")");
      }
  lat.finish_construction();
  return lat;
}

void OutcomeLattice::finish_construction() {
  const int n = n_;
  join_.assign(n * n, -1);
  meet_.assign(n * n, -1);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      int lub = -1;
      for (int u = 0; u < n; ++u) {
        if (!leq(a, u) || !leq(b, u)) continue;
        if (lub == -1 || leq(u, lub)) lub = u;
      }
      // lub must be below every other upper bound, not just the running one.
      if (lub != -1) {
        for (int u = 0; u < n; ++u) {
          if (leq(a, u) && leq(b, u) && !leq(lub, u)) {
            lub = -1;
            break;
          }
        }
      }
      if (lub == -1) {
        throw std::invalid_argument("lattice: elements " + labels_[a] +
                                    ", " + labels_[b] +
                                    " lack a unique join");
      }
      join_[a * n + b] = lub;

      int glb = -1;
      for (int u = 0; u < n; ++u) {
        if (!leq(u, a) || !leq(u, b)) continue;
        if (glb == -1 || leq(glb, u)) glb = u;
      }
      if (glb != -1) {
        for (int u = 0; u < n; ++u) {
          if (leq(u, a) && leq(u, b) && !leq(u, glb)) {
            glb = -1;
            break;
          }
        }
      }
      if (glb == -1) {
        throw std::invalid_argument("lattice: elements " + labels_[a] +
                                    ", " + labels_[b] +
                                    " lack a unique meet");
      }
      meet_[a * n + b] = glb;
    }
  }
  bottom_ = -1;
  for (int a = 0; a < n; ++a) {
    bool below_all = true;
    for (int b = 0; b < n; ++b) below_all = below_all && leq(a, b);
    if (below_all) {
      bottom_ = a;
      break;
    }
  }
  if (bottom_ == -1) {
    throw std::invalid_argument("lattice: no bottom element");
  }
  distributive_ = true;
  for (int a = 0; a < n && distributive_; ++a)
    for (int b = 0; b < n && distributive_; ++b)
      for (int c = 0; c < n; ++c) {
        if (meet(a, join(b, c)) != join(meet(a, b), meet(a, c))) {
          distributive_ = false;
          break;
        }
      }
}

int OutcomeLattice::index_of_label(std::string_view label) const {
  for (int e = 0; e < n_; ++e)
    if (labels_[e] == label) return e;
  throw std::invalid_argument("lattice: unknown element label '" +
                              std::string(label) + "'");
}

ProductLattice::ProductLattice(std::vector<OutcomeLattice> factors)
    : factors_(std::move(factors)) {
  size_ = 1;
  for (const auto& f : factors_) {
    if (size_ > std::numeric_limits<std::int64_t>::max() / f.size()) {
      throw std::invalid_argument("product lattice: size overflow");
    }
    size_ *= f.size();
  }
}

OutcomeVector ProductLattice::bottom_vector() const {
  OutcomeVector x(factors_.size());
  for (std::size_t j = 0; j < factors_.size(); ++j) x[j] = factors_[j].bottom();
  return x;
}

bool ProductLattice::leq(const OutcomeVector& a, const OutcomeVector& b) const {
  for (std::size_t j = 0; j < factors_.size(); ++j)
    if (!factors_[j].leq(a[j], b[j])) return false;
  return true;
}

OutcomeVector ProductLattice::join(const OutcomeVector& a,
                                   const OutcomeVector& b) const {
  OutcomeVector r(factors_.size());
  for (std::size_t j = 0; j < factors_.size(); ++j)
    r[j] = factors_[j].join(a[j], b[j]);
  return r;
}

OutcomeVector ProductLattice::meet(const OutcomeVector& a,
                                   const OutcomeVector& b) const {
  OutcomeVector r(factors_.size());
  for (std::size_t j = 0; j < factors_.size(); ++j)
    r[j] = factors_[j].meet(a[j], b[j]);
  return r;
}

std::int64_t ProductLattice::index_of(const OutcomeVector& x) const {
  if (static_cast<int>(x.size()) != factor_count()) {
    throw std::invalid_argument("index_of: wrong arity");
  }
  std::int64_t idx = 0;
  for (std::size_t j = 0; j < factors_.size(); ++j) {
    const int e = x[j];
    if (e < 0 || e >= factors_[j].size()) {
      throw std::invalid_argument("index_of: element out of range");
    }
    idx = idx * factors_[j].size() + e;
  }
  return idx;
}

OutcomeVector ProductLattice::vector_at(std::int64_t index) const {
  if (index < 0 || index >= size_) {
    throw std::invalid_argument("vector_at: index out of range");
  }
  OutcomeVector x(factors_.size());
  for (int j = factor_count() - 1; j >= 0; --j) {
    x[j] = static_cast<int>(index % factors_[j].size());
    index /= factors_[j].size();
  }
  return x;
}

bool ProductLattice::next(OutcomeVector& x) const {
  for (int j = factor_count() - 1; j >= 0; --j) {
    if (x[j] + 1 < factors_[j].size()) {
      ++x[j];
      return true;
    }
    x[j] = 0;
  }
  return false;
}

bool ProductLattice::distributive() const {
  for (const auto& f : factors_)
    if (!f.distributive()) return false;
  return true;
}

}  // namespace admech

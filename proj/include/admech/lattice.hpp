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

#ifndef ADMECH_LATTICE_HPP_
#define ADMECH_LATTICE_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace admech {

// Per-factor element indices; position j holds an element of factor j.
using OutcomeVector = std::vector<int>;

// Finite lattice over a small element set.  Construction verifies the order
// axioms and that every pair has a unique least upper bound and greatest
// lower bound; join/meet are table lookups afterwards.
class OutcomeLattice {
 public:
  // Total order 0 < 1 < ... < levels-1 with element 0 as bottom.
  static OutcomeLattice chain(int levels);

  // Two-element chain labeled "lose" < "win".
  static OutcomeLattice win_lose();

  // Builds the partial order as the reflexive-transitive closure of the
  // given (lower, upper) pairs over `labels`.  Fails if the closure is not
  // antisymmetric, some pair lacks a unique join or meet, or no bottom
  // element exists.
  static OutcomeLattice from_order(std::vector<std::string> labels,
                                   std::vector<std::pair<int, int>> below);

  int size() const { return n_; }
  int bottom() const { return bottom_; }
  const std::string& label(int e) const { return labels_.at(e); }
  int index_of_label(std::string_view label) const;

  bool leq(int a, int b) const { return leq_[a * n_ + b] != 0; }
  int join(int a, int b) const { return join_[a * n_ + b]; }
  int meet(int a, int b) const { return meet_[a * n_ + b]; }

  // True when meet distributes over join (checked over all triples once at
  // construction).
  bool distributive() const { return distributive_; }

  bool operator==(const OutcomeLattice& o) const {
    return labels_ == o.labels_ && leq_ == o.leq_;
  }

 private:
  OutcomeLattice() = default;
  void finish_construction();  // fills join/meet/bottom from leq_

  int n_ = 0;
  int bottom_ = -1;
  bool distributive_ = false;
  std::vector<std::string> labels_;
  std::vector<char> leq_;
  std::vector<int> join_;
  std::vector<int> meet_;
};

// Componentwise product of finitely many outcome lattices.  The canonical
// index of an outcome vector enumerates components in mixed radix with the
// LAST factor varying fastest; tables and serialized valuations use this
// order throughout.
class ProductLattice {
 public:
  ProductLattice() = default;
  explicit ProductLattice(std::vector<OutcomeLattice> factors);

  int factor_count() const { return static_cast<int>(factors_.size()); }
  const OutcomeLattice& factor(int j) const { return factors_.at(j); }

  // Number of outcome vectors; throws if it would overflow the budget-sized
  // integer range.
  std::int64_t size() const { return size_; }

  OutcomeVector bottom_vector() const;
  bool leq(const OutcomeVector& a, const OutcomeVector& b) const;
  OutcomeVector join(const OutcomeVector& a, const OutcomeVector& b) const;
  OutcomeVector meet(const OutcomeVector& a, const OutcomeVector& b) const;

  std::int64_t index_of(const OutcomeVector& x) const;
  OutcomeVector vector_at(std::int64_t index) const;

  // Odometer step in canonical order; returns false after the last vector
  // wraps back to bottom-of-range (all zero indices).
  bool next(OutcomeVector& x) const;

  bool distributive() const;

  bool operator==(const ProductLattice& o) const {
    return factors_ == o.factors_;
  }

 private:
  std::vector<OutcomeLattice> factors_;
  std::int64_t size_ = 1;
};

}  // namespace admech

#endif  // ADMECH_LATTICE_HPP_

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

#ifndef ADMECH_VALUATION_HPP_
#define ADMECH_VALUATION_HPP_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "admech/common.hpp"
#include "admech/lattice.hpp"
#include "admech/rng.hpp"

namespace admech {

enum class ValuationKind { kTable, kXos, kSetFunction };

// families[j][e]: additive value assigned to element e of factor j.
using AdditiveTable = std::vector<std::vector<double>>;

// Valuation over a product lattice, in one of three forms: a dense table
// keyed by canonical outcome index, a max-over-additive-functions (XOS)
// family, or an arbitrary callable adapter.
class Valuation {
 public:
  static Valuation table(ProductLattice lat, std::vector<double> values);
  static Valuation xos(ProductLattice lat, std::vector<AdditiveTable> families);
  static Valuation set_function(ProductLattice lat,
                                std::function<double(const OutcomeVector&)> fn,
                                std::string name);

  ValuationKind kind() const { return kind_; }
  const ProductLattice& lattice() const { return lattice_; }
  const std::string& set_function_name() const { return name_; }
  const std::vector<AdditiveTable>& xos_families() const { return families_; }

  double eval(const OutcomeVector& x) const;

  struct XosEval {
    double value;
    int family;  // smallest index attaining the max
  };
  // XOS form only; throws std::invalid_argument otherwise or when the
  // family list is empty.
  XosEval eval_xos(const OutcomeVector& x) const;

  // Materializes values over the full lattice in canonical index order.
  std::vector<double> dense_table(std::int64_t budget = kExactTermLimit) const;

 private:
  Valuation() = default;

  ValuationKind kind_ = ValuationKind::kTable;
  ProductLattice lattice_;
  std::vector<double> values_;
  std::vector<AdditiveTable> families_;
  std::function<double(const OutcomeVector&)> fn_;
  std::string name_;
};

struct ValueCounterexample {
  OutcomeVector y;
  OutcomeVector z;
  OutcomeVector t;  // unused by monotonicity checks
  double lhs = 0.0;
  double rhs = 0.0;
};

struct ValueCheck {
  bool ok = true;
  std::optional<ValueCounterexample> witness;
  std::int64_t terms_checked = 0;
};

// v(y) <= v(z) + tol for every comparable pair y <= z.
ValueCheck check_monotone(const Valuation& v,
                          std::int64_t budget = kExactTermLimit);

// Decreasing marginal returns: for every y <= z and every t,
// v(t v y) - v(y) >= v(t v z) - v(z) - tol.  Guarded by |X|^3 <= budget.
ValueCheck check_dmr(const Valuation& v, std::int64_t budget = kExactTermLimit);

// Pairwise submodularity: v(x v y) + v(x ^ y) <= v(x) + v(y) + tol.
ValueCheck check_submodular_pairs(const Valuation& v,
                                  std::int64_t budget = kExactTermLimit);

// Sampled variants for lattices too large to enumerate.
ValueCheck check_dmr_sampled(const Valuation& v, int samples, RngStream& rng);
ValueCheck check_monotone_sampled(const Valuation& v, int samples,
                                  RngStream& rng);

// Builds the supporting additive family of a monotone DMR valuation (one
// family member per lattice element, chained prefix marginals) and verifies
// the result reproduces v exactly; throws std::invalid_argument when v is
// not representable this way (i.e. not DMR).
Valuation supporting_xos(const Valuation& v,
                         std::int64_t budget = kExactTermLimit);

// Convenience builders.
Valuation additive_valuation(ProductLattice lat, AdditiveTable values);
// v(x) = max_j per_factor[j][x_j].
Valuation unit_demand_valuation(ProductLattice lat,
                                std::vector<std::vector<double>> per_factor);
// Boolean product of groups*group_size factors; one additive family per
// group assigning `weight` to each factor of that group, so the value is
// weight * (largest number of raised factors inside a single group).
Valuation group_max_valuation(int groups, int group_size, double weight);

// Random monotone DMR valuation over a product of chains: a conic mix of
// concave-of-weighted-levels and nested-coverage families, both closed under
// the DMR property.  Normalized to 0 at bottom.
Valuation random_monotone_dmr(const ProductLattice& lat, RngStream& rng);

}  // namespace admech

#endif  // ADMECH_VALUATION_HPP_

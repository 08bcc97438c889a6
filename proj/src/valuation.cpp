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

#include "admech/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace admech {
namespace {

bool is_chain(const OutcomeLattice& f) {
  for (int a = 0; a < f.size(); ++a)
    for (int b = 0; b < f.size(); ++b)
      if (!f.leq(a, b) && !f.leq(b, a)) return false;
  return true;
}

// Height of an element above bottom along the chain (for chain factors the
// order coincides with a relabeling of 0..size-1).
int chain_level(const OutcomeLattice& f, int e) {
  int level = 0;
  for (int a = 0; a < f.size(); ++a)
    if (f.leq(a, e) && a != e) ++level;
  return level;
}

}  // namespace

Valuation Valuation::table(ProductLattice lat, std::vector<double> values) {
  if (static_cast<std::int64_t>(values.size()) != lat.size()) {
    throw std::invalid_argument("valuation table: wrong number of entries");
  }
  Valuation v;
  v.kind_ = ValuationKind::kTable;
  v.lattice_ = std::move(lat);
  v.values_ = std::move(values);
  return v;
}

Valuation Valuation::xos(ProductLattice lat,
                         std::vector<AdditiveTable> families) {
  if (families.empty()) {
    throw std::invalid_argument("xos valuation: empty family list");
  }
  for (const auto& fam : families) {
    if (static_cast<int>(fam.size()) != lat.factor_count()) {
      throw std::invalid_argument("xos valuation: family arity mismatch");
    }
    for (int j = 0; j < lat.factor_count(); ++j) {
      if (static_cast<int>(fam[j].size()) != lat.factor(j).size()) {
        throw std::invalid_argument(
            "xos valuation: family table size mismatch on factor " +
            std::to_string(j));
      }
      for (double x : fam[j]) {
        if (x < 0.0) {
          throw std::invalid_argument("xos valuation: negative additive value");
        }
      }
    }
  }
  Valuation v;
  v.kind_ = ValuationKind::kXos;
  v.lattice_ = std::move(lat);
  v.families_ = std::move(families);
  return v;
}

Valuation Valuation::set_function(ProductLattice lat,
                                  std::function<double(const OutcomeVector&)> fn,
                                  std::string name) {
  if (!fn) throw std::invalid_argument("set_function valuation: null callable");
  Valuation v;
  v.kind_ = ValuationKind::kSetFunction;
  v.lattice_ = std::move(lat);
  v.fn_ = std::move(fn);
  v.name_ = std::move(name);
  return v;
}

double Valuation::eval(const OutcomeVector& x) const {
  switch (kind_) {
    case ValuationKind::kTable:
      return values_[lattice_.index_of(x)];
    case ValuationKind::kXos:
      return eval_xos(x).value;
    case ValuationKind::kSetFunction:
      return fn_(x);
  }
  throw std::logic_error("unreachable");
}

Valuation::XosEval Valuation::eval_xos(const OutcomeVector& x) const {
  if (kind_ != ValuationKind::kXos) {
    throw std::invalid_argument("eval_xos: valuation is not in XOS form");
  }
  if (static_cast<int>(x.size()) != lattice_.factor_count()) {
    throw std::invalid_argument("eval_xos: wrong arity");
  }
  double best = 0.0;
  int best_family = -1;
  for (std::size_t k = 0; k < families_.size(); ++k) {
    double s = 0.0;
    for (int j = 0; j < lattice_.factor_count(); ++j) s += families_[k][j][x[j]];
    if (best_family == -1 || s > best) {
      best = s;
      best_family = static_cast<int>(k);
    }
  }
  return {best, best_family};
}

std::vector<double> Valuation::dense_table(std::int64_t budget) const {
  if (lattice_.size() > budget) {
    throw BudgetExceeded("dense_table", lattice_.size(), budget);
  }
  std::vector<double> out(lattice_.size());
  OutcomeVector x(lattice_.factor_count(), 0);
  std::int64_t idx = 0;
  do {
    out[idx++] = eval(x);
  } while (lattice_.next(x));
  return out;
}

ValueCheck check_monotone(const Valuation& v, std::int64_t budget) {
  const ProductLattice& lat = v.lattice();
  const std::int64_t pairs = lat.size() * lat.size();
  if (pairs > budget) throw BudgetExceeded("check_monotone", pairs, budget);
  const std::vector<double> val = v.dense_table(budget);
  ValueCheck res;
  OutcomeVector y(lat.factor_count(), 0);
  std::int64_t yi = 0;
  do {
    OutcomeVector z(lat.factor_count(), 0);
    std::int64_t zi = 0;
    do {
      ++res.terms_checked;
      if (lat.leq(y, z) && val[yi] > val[zi] + kValueTol) {
        res.ok = false;
        res.witness = ValueCounterexample{y, z, {}, val[yi], val[zi]};
        return res;
      }
      ++zi;
    } while (lat.next(z));
    ++yi;
  } while (lat.next(y));
  return res;
}

ValueCheck check_dmr(const Valuation& v, std::int64_t budget) {
  const ProductLattice& lat = v.lattice();
  const std::int64_t cube = lat.size() * lat.size() * lat.size();
  if (cube > budget) throw BudgetExceeded("check_dmr", cube, budget);
  const std::vector<double> val = v.dense_table(budget);
  ValueCheck res;
  OutcomeVector y(lat.factor_count(), 0);
  do {
    OutcomeVector z(lat.factor_count(), 0);
    do {
      if (!lat.leq(y, z)) continue;
      OutcomeVector t(lat.factor_count(), 0);
      do {
        ++res.terms_checked;
        const double lhs = val[lat.index_of(lat.join(t, y))] - val[lat.index_of(y)];
        const double rhs = val[lat.index_of(lat.join(t, z))] - val[lat.index_of(z)];
        if (lhs < rhs - kValueTol) {
          res.ok = false;
          res.witness = ValueCounterexample{y, z, t, lhs, rhs};
          return res;
        }
      } while (lat.next(t));
    } while (lat.next(z));
  } while (lat.next(y));
  return res;
}

ValueCheck check_submodular_pairs(const Valuation& v, std::int64_t budget) {
  const ProductLattice& lat = v.lattice();
  const std::int64_t pairs = lat.size() * lat.size();
  if (pairs > budget) {
    throw BudgetExceeded("check_submodular_pairs", pairs, budget);
  }
  const std::vector<double> val = v.dense_table(budget);
  ValueCheck res;
  OutcomeVector x(lat.factor_count(), 0);
  do {
    OutcomeVector y(lat.factor_count(), 0);
    do {
      ++res.terms_checked;
      const double lhs = val[lat.index_of(lat.join(x, y))] +
                         val[lat.index_of(lat.meet(x, y))];
      const double rhs = val[lat.index_of(x)] + val[lat.index_of(y)];
      if (lhs > rhs + kValueTol) {
        res.ok = false;
        res.witness = ValueCounterexample{x, y, {}, lhs, rhs};
        return res;
      }
    } while (lat.next(y));
  } while (lat.next(x));
  return res;
}

ValueCheck check_dmr_sampled(const Valuation& v, int samples, RngStream& rng) {
  const ProductLattice& lat = v.lattice();
  ValueCheck res;
  const int m = lat.factor_count();
  for (int s = 0; s < samples; ++s) {
    OutcomeVector y(m), u(m), t(m);
    for (int j = 0; j < m; ++j) {
      const int sz = lat.factor(j).size();
      y[j] = static_cast<int>(rng.next_below(sz));
      u[j] = static_cast<int>(rng.next_below(sz));
      t[j] = static_cast<int>(rng.next_below(sz));
    }
    const OutcomeVector z = lat.join(y, u);
    ++res.terms_checked;
    const double lhs = v.eval(lat.join(t, y)) - v.eval(y);
    const double rhs = v.eval(lat.join(t, z)) - v.eval(z);
    if (lhs < rhs - kValueTol) {
      res.ok = false;
      res.witness = ValueCounterexample{y, z, t, lhs, rhs};
      return res;
    }
  }
  return res;
}

ValueCheck check_monotone_sampled(const Valuation& v, int samples,
                                  RngStream& rng) {
  const ProductLattice& lat = v.lattice();
  ValueCheck res;
  const int m = lat.factor_count();
  for (int s = 0; s < samples; ++s) {
    OutcomeVector y(m), u(m);
    for (int j = 0; j < m; ++j) {
      const int sz = lat.factor(j).size();
      y[j] = static_cast<int>(rng.next_below(sz));
      u[j] = static_cast<int>(rng.next_below(sz));
    }
    const OutcomeVector z = lat.join(y, u);
    ++res.terms_checked;
    const double vy = v.eval(y);
    const double vz = v.eval(z);
    if (vy > vz + kValueTol) {
      res.ok = false;
      res.witness = ValueCounterexample{y, z, {}, vy, vz};
      return res;
    }
  }
  return res;
}

Valuation supporting_xos(const Valuation& v, std::int64_t budget) {
  const ProductLattice& lat = v.lattice();
  const int m = lat.factor_count();
  const std::int64_t cost = lat.size() * lat.size();
  if (cost > budget) throw BudgetExceeded("supporting_xos", cost, budget);
  const std::vector<double> val = v.dense_table(budget);

  std::vector<AdditiveTable> families;
  families.reserve(lat.size());
  OutcomeVector x(m, 0);
  do {
    // Family supporting x: factor-j marginal of (e meet x_j) on top of the
    // prefix (x_1..x_{j-1}, bottom...).
    AdditiveTable fam(m);
    OutcomeVector prefix = lat.bottom_vector();
    for (int j = 0; j < m; ++j) {
      const double base = val[lat.index_of(prefix)];
      fam[j].resize(lat.factor(j).size());
      OutcomeVector probe = prefix;
      for (int e = 0; e < lat.factor(j).size(); ++e) {
        probe[j] = lat.factor(j).meet(e, x[j]);
        fam[j][e] = std::max(0.0, val[lat.index_of(probe)] - base);
      }
      prefix[j] = x[j];
    }
    families.push_back(std::move(fam));
  } while (lat.next(x));

  Valuation out = Valuation::xos(lat, std::move(families));

  // The construction reproduces a valuation exactly iff it has decreasing
  // marginal returns; verify rather than assume.
  OutcomeVector y(m, 0);
  std::int64_t yi = 0;
  do {
    const double xv = out.eval(y);
    if (std::abs(xv - val[yi]) > kValueTol) {
      throw std::invalid_argument(
          "supporting_xos: valuation is not representable by supporting "
          "additive families (not DMR)");
    }
    ++yi;
  } while (lat.next(y));
  return out;
}

Valuation additive_valuation(ProductLattice lat, AdditiveTable values) {
  std::vector<AdditiveTable> fams;
  fams.push_back(std::move(values));
  return Valuation::xos(std::move(lat), std::move(fams));
}

Valuation unit_demand_valuation(ProductLattice lat,
                                std::vector<std::vector<double>> per_factor) {
  const int m = lat.factor_count();
  if (static_cast<int>(per_factor.size()) != m) {
    throw std::invalid_argument("unit_demand_valuation: arity mismatch");
  }
  std::vector<AdditiveTable> fams;
  for (int j = 0; j < m; ++j) {
    AdditiveTable fam(m);
    for (int jj = 0; jj < m; ++jj) {
      fam[jj].assign(lat.factor(jj).size(), 0.0);
    }
    fam[j] = per_factor[j];
    fams.push_back(std::move(fam));
  }
  return Valuation::xos(std::move(lat), std::move(fams));
}

Valuation group_max_valuation(int groups, int group_size, double weight) {
  if (groups < 1 || group_size < 1) {
    throw std::invalid_argument("group_max_valuation: bad shape");
  }
  const int m = groups * group_size;
  std::vector<OutcomeLattice> factors(m, OutcomeLattice::win_lose());
  ProductLattice lat(std::move(factors));
  std::vector<AdditiveTable> fams;
  for (int g = 0; g < groups; ++g) {
    AdditiveTable fam(m);
    for (int j = 0; j < m; ++j) {
      fam[j] = {0.0, (j / group_size == g) ? weight : 0.0};
    }
    fams.push_back(std::move(fam));
  }
  return Valuation::xos(std::move(lat), std::move(fams));
}

Valuation random_monotone_dmr(const ProductLattice& lat, RngStream& rng) {
  const int m = lat.factor_count();
  for (int j = 0; j < m; ++j) {
    if (!is_chain(lat.factor(j))) {
      throw std::invalid_argument(
          "random_monotone_dmr: factors must be chains");
    }
  }
  RngStream local = rng.derive("random_monotone_dmr", rng.next_u64());

  // Component 1: concave piecewise-linear function of a weighted level sum,
  // g(s) = sum_p c_p * min(s, b_p).
  std::vector<double> w(m);
  for (int j = 0; j < m; ++j) w[j] = 0.25 + local.next_double();
  const int pieces = 1 + static_cast<int>(local.next_below(3));
  std::vector<double> bp(pieces), cp(pieces);
  for (int p = 0; p < pieces; ++p) {
    bp[p] = 0.5 + 3.0 * local.next_double();
    cp[p] = 0.2 + local.next_double();
  }

  // Component 2: weighted coverage with nested per-level cover sets.
  const int universe = 3 + static_cast<int>(local.next_below(6));
  std::vector<double> uw(universe);
  for (int u = 0; u < universe; ++u) uw[u] = local.next_double();
  // covers[j][level] = bitmask over the universe, increasing in level.
  std::vector<std::vector<std::uint32_t>> covers(m);
  for (int j = 0; j < m; ++j) {
    const int levels = lat.factor(j).size();
    covers[j].assign(levels, 0);
    std::uint32_t acc = 0;
    for (int l = 1; l < levels; ++l) {
      for (int u = 0; u < universe; ++u) {
        if (local.bernoulli(0.35)) acc |= (1u << u);
      }
      covers[j][l] = acc;
    }
  }

  const double mix_a = local.next_double();
  const double mix_b = 1.0 - mix_a;

  auto fn = [m, lat, w, bp, cp, universe, uw, covers, mix_a,
             mix_b](const OutcomeVector& x) {
    double s = 0.0;
    std::uint32_t covered = 0;
    for (int j = 0; j < m; ++j) {
      const int level = chain_level(lat.factor(j), x[j]);
      s += w[j] * level;
      covered |= covers[j][level];
    }
    double g = 0.0;
    for (std::size_t p = 0; p < bp.size(); ++p) g += cp[p] * std::min(s, bp[p]);
    double cov = 0.0;
    for (int u = 0; u < universe; ++u) {
      if (covered & (1u << u)) cov += uw[u];
    }
    return mix_a * g + mix_b * cov;
  };
  return Valuation::set_function(lat, fn, "random_monotone_dmr");
}

}  // namespace admech

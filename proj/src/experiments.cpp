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

#include "admech/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "admech/availability.hpp"
#include "admech/rng.hpp"

namespace admech {
namespace {

double ratio_of(double numerator, double denominator) {
  if (denominator > kValueTol) return numerator / denominator;
  if (numerator <= kValueTol) return 1.0;
  return std::numeric_limits<double>::infinity();
}

}  // namespace

WelfareEstimate expected_opt_welfare(const ComposedScenario& s,
                                     std::int64_t budget, int samples,
                                     std::uint64_t seed) {
  WelfareEstimate est;
  try {
    const std::vector<AvailabilityAtom> atoms =
        enumerate_support(s.availability, budget);
    double total = 0.0;
    for (const AvailabilityAtom& atom : atoms) {
      total +=
          atom.prob * max_welfare_outcome(s, atom.realization, budget).welfare;
    }
    est.value = total;
    est.exact = true;
    est.terms = static_cast<std::int64_t>(atoms.size());
    return est;
  } catch (const BudgetExceeded&) {
  }

  if (samples < 1) throw std::invalid_argument("samples must be positive");
  RngStream root(seed);
  double mean = 0.0;
  double m2 = 0.0;
  for (int k = 0; k < samples; ++k) {
    RngStream sub = root.derive("avail", static_cast<std::uint64_t>(k));
    const AvailabilityRealization avail =
        sample_availability(s.availability, sub);
    const double w = max_welfare_outcome(s, avail, budget).welfare;
    const double delta = w - mean;
    mean += delta / (k + 1);
    m2 += delta * (w - mean);
  }
  est.value = mean;
  est.exact = false;
  est.terms = samples;
  if (samples > 1) {
    est.ci_radius = 1.96 * std::sqrt(m2 / (samples - 1) / samples);
  }
  return est;
}

double welfare_of_trace(const ComposedScenario& s,
                        const LearningTrace& trace) {
  if (trace.bidders != s.bidders() ||
      trace.mechanisms != s.mechanism_count()) {
    throw std::invalid_argument("trace shape does not match the scenario");
  }
  if (trace.rounds == 0) return 0.0;
  if (trace.rows.empty()) return trace.average_welfare();
  const int n = trace.bidders;
  const int m = trace.mechanisms;
  double total = 0.0;
  for (const TraceRound& row : trace.rows) {
    for (int i = 0; i < n; ++i) {
      double paid = 0.0;
      for (int j = 0; j < m; ++j) {
        paid += row.payments[static_cast<std::size_t>(i) * m + j];
      }
      total += row.utilities[i] + paid;
    }
  }
  return total / static_cast<double>(trace.rows.size());
}

PoAReport empirical_poa(const ComposedScenario& s, const RunSpec& spec,
                        int replicates, std::uint64_t seed,
                        const SmoothnessParams& params, double gap,
                        std::int64_t budget, int opt_samples) {
  if (replicates < 1) {
    throw std::invalid_argument("replicates must be positive");
  }
  validate_smoothness_params(params);

  // The lazy outcome caches are the only mutable state the worker threads
  // share; fill them up front.
  for (const Mechanism& mech : s.mechanisms) mech.achievable_outcomes();

  PoAReport report;
  report.replicates = replicates;
  report.replicate_welfare.assign(replicates, 0.0);
  report.replicate_epsilon.assign(replicates, 0.0);

  RunSpec run = spec;
  run.record_rounds = false;

  const RngStream master(seed);
  std::mutex fail_mutex;
  std::exception_ptr failure;
  auto worker = [&](int first, int stride) {
    try {
      for (int r = first; r < replicates; r += stride) {
        RngStream sub = master.derive("replicate", static_cast<std::uint64_t>(r));
        const LearningTrace trace = run_repeated(s, run, sub.next_u64());
        report.replicate_welfare[r] = welfare_of_trace(s, trace);
        report.replicate_epsilon[r] = audit_trace_regret(s, trace).epsilon;
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(fail_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  const int threads = std::max(
      1, std::min<int>(replicates,
                       static_cast<int>(std::thread::hardware_concurrency())));
  if (threads == 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t, threads);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  double welfare = 0.0;
  for (double w : report.replicate_welfare) welfare += w;
  report.empirical_welfare = welfare / replicates;
  for (double e : report.replicate_epsilon) {
    report.regret_slack = std::max(report.regret_slack, e);
  }

  const WelfareEstimate opt =
      expected_opt_welfare(s, budget, opt_samples, master.derive("opt").next_u64());
  report.expected_opt = opt.value;
  report.exact = opt.exact;
  report.ratio = ratio_of(report.expected_opt, report.empirical_welfare);

  switch (s.availability.kind()) {
    case AvailabilityModel::Kind::kIndependent:
      report.theorem_bound = poa_independent_bound(params, gap);
      break;
    case AvailabilityModel::Kind::kEverybodyOrNobody:
      report.theorem_bound = poa_eon_bound(params);
      break;
    case AvailabilityModel::Kind::kFixed:
      report.theorem_bound = poa_single_bound(params);
      break;
  }
  report.bound_with_slack = report.theorem_bound;
  if (report.expected_opt > kValueTol) {
    report.bound_with_slack +=
        10.0 * report.regret_slack * s.bidders() / report.expected_opt;
  }
  return report;
}

}  // namespace admech

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

#ifndef ADMECH_SERIALIZE_HPP_
#define ADMECH_SERIALIZE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "admech/common.hpp"
#include "admech/correlation_gap.hpp"
#include "admech/learning.hpp"
#include "admech/lower_bound.hpp"
#include "admech/scenario.hpp"
#include "admech/sinr.hpp"
#include "admech/smoothness.hpp"

namespace admech {

// Shortest decimal string that parses back to exactly this double.
std::string format_double(double x);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Scenario as pretty-printed JSON and back.  Only serializable pieces are
// supported: first-price and channel mechanisms, table/XOS valuations.
std::string scenario_to_json(const ComposedScenario& s);
ComposedScenario scenario_from_json_text(const std::string& text);

// Parsed experiment configuration.  One structure serves every subcommand;
// fields irrelevant to the chosen experiment stay at their defaults.
struct ScenarioConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  std::int64_t budget = kExactTermLimit;
  std::string mode = "exact";  // "exact" | "mc"
  int samples = 100000;
  std::string out_dir = ".";

  std::optional<ComposedScenario> scenario;
  RunSpec run;
  int replicates = 1;
  bool write_trace = false;

  SmoothnessParams smoothness;
  double gap_bound = dmr_gap_bound();
  // verify-smoothness: per-profile win values, one row per checked profile.
  std::vector<std::vector<double>> win_values;

  std::optional<Valuation> gap_valuation;
  std::vector<OutcomeVector> gap_points;
  std::vector<double> gap_weights;

  std::vector<int> lb_ks;

  std::vector<SinrInstance> sinr_instances;
  int sinr_random_count = 0;
  int sinr_random_links = 8;

  double lemma_lambda = 1.0;
  std::vector<std::pair<BidProfile, double>> play;
};

// Overrides applied by CLI flags before validation.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> budget;
  std::optional<std::string> out_dir;
  std::optional<std::string> mode;
  std::optional<int> samples;
};

// Reads, validates, and cross-checks a config file; throws ConfigError
// naming the offending field.  A seed must be present (no implicit
// entropy); the override counts as present.
ScenarioConfig parse_config(const std::string& path);
ScenarioConfig parse_config_text(const std::string& text,
                                 const ConfigOverrides& overrides = {});

// CSV emitters.  Values use format_double, rows end with '\n'.
void write_trace_csv(const std::string& path, const ComposedScenario& s,
                     const LearningTrace& trace);
void write_lower_bound_csv(const std::string& path,
                           const std::vector<LowerBoundRow>& rows);

}  // namespace admech

#endif  // ADMECH_SERIALIZE_HPP_

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

#ifndef ADMECH_RUN_HPP_
#define ADMECH_RUN_HPP_

#include <string>
#include <vector>

#include "admech/serialize.hpp"

namespace admech {

// Process exit codes shared by the runner and the CLI entry point.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCounterexample = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBudget = 3;

struct RunOutcome {
  int exit_code = kExitOk;  // kExitOk or kExitCounterexample
  std::string report_path;
  std::string payload_json;  // the deterministic report block, as written
  std::string summary;       // one line for stdout
  std::vector<std::string> artifact_paths;  // CSVs next to the report
};

// Loads the config, dispatches the experiment named by `subcommand`, writes
// report.json (header with timestamps, payload without them) plus any CSVs
// into the output directory.  Throws ConfigError for invalid input and
// BudgetExceeded when an exact computation does not fit; callers map those
// to kExitConfig / kExitBudget.
RunOutcome run_experiment(const std::string& subcommand,
                          const std::string& config_path,
                          const ConfigOverrides& overrides = {});

}  // namespace admech

#endif  // ADMECH_RUN_HPP_

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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "admech/common.hpp"
#include "admech/run.hpp"

namespace {

struct SubcommandInfo {
  const char* name;
  const char* help;
};

constexpr SubcommandInfo kSubcommands[] = {
    {"simulate",
     "Run repeated oblivious learning and report the welfare ratio"},
    {"verify-smoothness",
     "Exhaustively check a (lambda, mu1, mu2) certificate per mechanism"},
    {"correlation-gap",
     "Measure a valuation's correlation gap against the DMR bound"},
    {"lower-bound",
     "Sweep the oblivious-bidding gap instance over a list of k"},
    {"sinr", "Check the channel-game deviation inequality on geometries"},
    {"lemma-check",
     "Check the scaled-optimum deviation relations on one scenario"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and verification toolkit for simultaneous "
               "mechanisms with stochastic admission"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> budget;
  std::optional<std::string> out_dir;
  std::optional<std::string> mode;
  std::optional<int> samples;

  for (const SubcommandInfo& info : kSubcommands) {
    CLI::App* sub = app.add_subcommand(info.name, info.help);
    sub->add_option("--config", config_path, "Path to the JSON config")
        ->required();
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--budget", budget,
                    "Override the exact-enumeration term budget");
    sub->add_option("--out-dir", out_dir,
                    "Directory for report.json and CSVs");
    sub->add_option("--mode", mode, "exact or mc")
        ->check(CLI::IsMember({"exact", "mc"}));
    sub->add_option("--samples", samples, "Monte Carlo sample count");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return admech::kExitConfig;
  }

  admech::ConfigOverrides overrides;
  overrides.seed = seed;
  overrides.budget = budget;
  overrides.out_dir = out_dir;
  overrides.mode = mode;
  overrides.samples = samples;

  const std::string chosen = app.get_subcommands().front()->get_name();
  try {
    const admech::RunOutcome out =
        admech::run_experiment(chosen, config_path, overrides);
    std::cout << out.summary << "\n";
    std::cout << "report: " << out.report_path << "\n";
    for (const std::string& path : out.artifact_paths) {
      std::cout << "wrote: " << path << "\n";
    }
    return out.exit_code;
  } catch (const admech::BudgetExceeded& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return admech::kExitBudget;
  } catch (const admech::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return admech::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return admech::kExitConfig;
  }
}

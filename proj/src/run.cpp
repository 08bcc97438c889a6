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

#include "admech/run.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <sstream>

#include "admech/deviations.hpp"
#include "admech/experiments.hpp"
#include "admech/lower_bound.hpp"
#include "json_convert.hpp"

namespace admech {
namespace {

using detail::Json;

std::string utc_now_iso() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json params_json(const SmoothnessParams& p) {
  return Json{{"lambda", p.lambda}, {"mu1", p.mu1}, {"mu2", p.mu2}};
}

Json certificate_json(const SmoothnessCertificate& cert) {
  Json out{{"mechanismKind", cert.mechanism_kind},
           {"params", params_json(cert.params)},
           {"verified", cert.verified},
           {"checks", cert.checks},
           {"minSlack", cert.min_slack}};
  if (cert.counterexample) {
    out["counterexample"] =
        Json{{"valuationProfile", cert.counterexample->valuation_profile},
             {"bids", cert.counterexample->bids},
             {"lhs", cert.counterexample->lhs},
             {"rhs", cert.counterexample->rhs}};
  }
  return out;
}

Json lemma_rows_json(const std::vector<LemmaEstimate>& rows) {
  Json out = Json::array();
  for (const LemmaEstimate& row : rows) {
    out.push_back(Json{{"name", row.name},
                       {"bidder", row.bidder},
                       {"lhs", row.lhs},
                       {"rhs", row.rhs},
                       {"se", row.se},
                       {"equality", row.equality},
                       {"holds", row.holds}});
  }
  return out;
}

struct Dispatch {
  Json result;
  int exit_code = kExitOk;
  std::string summary;
  std::vector<std::string> artifacts;  // file names relative to out_dir
};

Dispatch run_simulate(const ScenarioConfig& cfg, const std::string& out_dir) {
  const ComposedScenario& s = *cfg.scenario;
  const PoAReport rep =
      empirical_poa(s, cfg.run, cfg.replicates, cfg.seed, cfg.smoothness,
                    cfg.gap_bound, cfg.budget, cfg.samples);
  Dispatch d;
  d.result = Json{{"expectedOptWelfare", rep.expected_opt},
                  {"empiricalWelfare", rep.empirical_welfare},
                  {"ratio", rep.ratio},
                  {"theoremBound", rep.theorem_bound},
                  {"regretSlack", rep.regret_slack},
                  {"boundWithSlack", rep.bound_with_slack},
                  {"mode", rep.exact ? "exact" : "mc"},
                  {"replicates", rep.replicates},
                  {"replicateWelfare", rep.replicate_welfare},
                  {"replicateEpsilon", rep.replicate_epsilon},
                  {"availability", s.availability.kind_name()},
                  {"learner", learner_kind_name(cfg.run.learner)},
                  {"rounds", cfg.run.rounds},
                  {"smoothness", params_json(cfg.smoothness)}};
  if (cfg.write_trace) {
    RunSpec recorded = cfg.run;
    recorded.record_rounds = true;
    RngStream sub = RngStream(cfg.seed).derive("replicate", 0);
    const LearningTrace trace = run_repeated(s, recorded, sub.next_u64());
    write_trace_csv(out_dir + "/trace.csv", s, trace);
    d.result["traceCsv"] = "trace.csv";
    d.artifacts.push_back("trace.csv");
  }
  std::ostringstream msg;
  msg << "welfare ratio " << format_double(rep.ratio) << " vs bound "
      << format_double(rep.theorem_bound) << " (slack-adjusted "
      << format_double(rep.bound_with_slack) << ")";
  d.summary = msg.str();
  return d;
}

Dispatch run_verify_smoothness(const ScenarioConfig& cfg) {
  const ComposedScenario& s = *cfg.scenario;
  Dispatch d;
  d.result = Json{{"params", params_json(cfg.smoothness)},
                  {"mechanisms", Json::array()}};
  bool all_verified = true;
  for (int j = 0; j < s.mechanism_count(); ++j) {
    const Mechanism& mech = s.mechanisms[j];
    for (int i = 0; i < mech.bidders(); ++i) {
      if (mech.outcome_space(i).size() != 2) {
        throw ConfigError("scenario.mechanisms[" + std::to_string(j) + "]",
                          "smoothness profiles are built from win values; "
                          "this mechanism's outcome spaces are not win/lose");
      }
    }
    std::vector<MechValuationProfile> profiles;
    if (cfg.win_values.empty()) {
      profiles.push_back(win_lose_profile(mech.declared_values()));
    } else {
      for (std::size_t r = 0; r < cfg.win_values.size(); ++r) {
        if (static_cast<int>(cfg.win_values[r].size()) != mech.bidders()) {
          throw ConfigError("winValues[" + std::to_string(r) + "]",
                            "expected one value per bidder");
        }
        profiles.push_back(win_lose_profile(cfg.win_values[r]));
      }
    }
    const SmoothnessCertificate cert =
        verify_smoothness(mech, profiles, cfg.smoothness, cfg.budget);
    all_verified = all_verified && cert.verified;
    Json entry = certificate_json(cert);
    entry["mechanism"] = j;
    d.result["mechanisms"].push_back(std::move(entry));
  }
  d.result["verified"] = all_verified;
  d.exit_code = all_verified ? kExitOk : kExitCounterexample;
  d.summary = all_verified
                  ? "certificate verified for every mechanism"
                  : "counterexample found; see the report";
  return d;
}

Dispatch run_correlation_gap(const ScenarioConfig& cfg) {
  const std::int64_t budget = cfg.mode == "mc" ? 0 : cfg.budget;
  const GapReport rep = correlation_gap(*cfg.gap_valuation, cfg.gap_points,
                                        cfg.gap_weights, budget, cfg.samples,
                                        cfg.seed);
  bool dmr = false;
  bool dmr_checked = false;
  try {
    dmr = check_dmr(*cfg.gap_valuation, cfg.budget).ok;
    dmr_checked = true;
  } catch (const BudgetExceeded&) {
  }
  const double bound = cfg.gap_bound;
  const bool checked = rep.exact && dmr_checked && dmr;
  const bool within = rep.ratio <= bound + kValueTol;
  Dispatch d;
  d.result = Json{{"lhs", rep.lhs},
                  {"rhs", rep.rhs},
                  {"ratio", rep.ratio},
                  {"mode", rep.exact ? "exact" : "mc"},
                  {"terms", rep.terms},
                  {"ciRadius", rep.ci_radius},
                  {"bound", bound},
                  {"dmrChecked", dmr_checked},
                  {"dmr", dmr},
                  {"boundChecked", checked},
                  {"withinBound", within}};
  d.exit_code = (checked && !within) ? kExitCounterexample : kExitOk;
  std::ostringstream msg;
  msg << "gap ratio " << format_double(rep.ratio) << " (bound "
      << format_double(bound) << (checked ? within ? ", holds" : ", VIOLATED"
                                          : ", not gated")
      << ")";
  d.summary = msg.str();
  return d;
}

Dispatch run_lower_bound(const ScenarioConfig& cfg,
                         const std::string& out_dir) {
  const std::vector<LowerBoundRow> rows = lower_bound_sweep(cfg.lb_ks);
  write_lower_bound_csv(out_dir + "/lower_bound.csv", rows);
  Dispatch d;
  Json list = Json::array();
  for (const LowerBoundRow& row : rows) {
    list.push_back(Json{{"k", row.k},
                        {"optValue", row.opt_value},
                        {"bestObliviousValue", row.best_value},
                        {"bestObliviousUtility", row.best_utility},
                        {"ratio", row.ratio}});
  }
  d.result = Json{{"rows", std::move(list)}, {"csv", "lower_bound.csv"}};
  d.artifacts.push_back("lower_bound.csv");
  d.summary = std::to_string(rows.size()) + " sweep rows written";
  return d;
}

Dispatch run_sinr(const ScenarioConfig& cfg) {
  std::vector<SinrInstance> instances = cfg.sinr_instances;
  RngStream rng = RngStream(cfg.seed).derive("sinr");
  for (int r = 0; r < cfg.sinr_random_count; ++r) {
    instances.push_back(random_sinr_instance(cfg.sinr_random_links, rng));
  }
  Dispatch d;
  Json list = Json::array();
  int passed = 0;
  for (const SinrInstance& inst : instances) {
    const ChannelCheck check = verify_channel_smoothness(inst, cfg.budget);
    const bool ok = check.displayed_ok && check.certificate.verified;
    passed += ok ? 1 : 0;
    Json entry{{"instance", detail::sinr_to_json(inst)},
               {"maxFeasibleSet", check.max_feasible},
               {"empiricalC", check.empirical_c},
               {"profiles", check.profiles},
               {"minSlack", check.min_slack},
               {"displayedOk", check.displayed_ok},
               {"anySoloInfeasible", check.any_solo_infeasible},
               {"certificate", certificate_json(check.certificate)}};
    if (check.counterexample) {
      Json bids = Json::array();
      for (char b : *check.counterexample) bids.push_back(b != 0);
      entry["counterexample"] = std::move(bids);
    }
    list.push_back(std::move(entry));
    if (!ok) d.exit_code = kExitCounterexample;
  }
  d.result = Json{{"instances", std::move(list)},
                  {"passed", passed},
                  {"total", static_cast<int>(instances.size())}};
  d.summary = std::to_string(passed) + "/" +
              std::to_string(instances.size()) + " instances passed";
  return d;
}

Dispatch run_lemma_check(const ScenarioConfig& cfg) {
  const ComposedScenario& s = *cfg.scenario;
  const LemmaChainReport rep =
      check_lemma_chain(s, cfg.lemma_lambda, cfg.smoothness, cfg.play,
                        cfg.mode == "mc", cfg.samples, cfg.seed, cfg.budget);
  bool all_hold = true;
  for (const LemmaEstimate& row : rep.own_draw) {
    all_hold = all_hold && row.holds;
  }
  Dispatch d;
  d.result = Json{{"lambda", rep.lambda},
                  {"alpha", rep.alpha},
                  {"mode", rep.exact ? "exact" : "mc"},
                  {"terms", rep.terms},
                  {"rows", lemma_rows_json(rep.own_draw)},
                  {"ownerDrawRows", lemma_rows_json(rep.per_bidder_draw)},
                  {"holds", all_hold}};
  d.exit_code = all_hold ? kExitOk : kExitCounterexample;
  d.summary = all_hold ? "every relation in the chain holds"
                       : "a relation failed; see the report";
  return d;
}

}  // namespace

RunOutcome run_experiment(const std::string& subcommand,
                          const std::string& config_path,
                          const ConfigOverrides& overrides) {
  const auto start = std::chrono::steady_clock::now();
  std::string text;
  try {
    text = read_text_file(config_path);
  } catch (const std::exception& e) {
    throw ConfigError("<config>", e.what());
  }
  const ScenarioConfig cfg = parse_config_text(text, overrides);
  if (!subcommand.empty() && subcommand != cfg.experiment) {
    throw ConfigError("experiment", "config declares '" + cfg.experiment +
                                        "' but the subcommand is '" +
                                        subcommand + "'");
  }
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) {
    throw ConfigError("outDir", "cannot create '" + cfg.out_dir +
                                    "': " + ec.message());
  }

  Dispatch d;
  if (cfg.experiment == "simulate") {
    d = run_simulate(cfg, cfg.out_dir);
  } else if (cfg.experiment == "verify-smoothness") {
    d = run_verify_smoothness(cfg);
  } else if (cfg.experiment == "correlation-gap") {
    d = run_correlation_gap(cfg);
  } else if (cfg.experiment == "lower-bound") {
    d = run_lower_bound(cfg, cfg.out_dir);
  } else if (cfg.experiment == "sinr") {
    d = run_sinr(cfg);
  } else {
    d = run_lemma_check(cfg);
  }

  Json payload{{"schemaVersion", 1},
               {"experiment", cfg.experiment},
               {"seed", cfg.seed},
               {"budget", cfg.budget},
               {"mode", cfg.mode},
               {"samples", cfg.samples},
               {"result", std::move(d.result)}};

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  Json report{{"header", Json{{"artifact", "admech"},
                              {"version", "1.0.0"},
                              {"experiment", cfg.experiment},
                              {"generatedAtUtc", utc_now_iso()},
                              {"wallTimeSeconds", wall}}},
              {"payload", payload}};

  RunOutcome out;
  out.exit_code = d.exit_code;
  out.report_path = cfg.out_dir + "/report.json";
  out.payload_json = payload.dump(2) + "\n";
  out.summary = d.summary;
  for (const std::string& name : d.artifacts) {
    out.artifact_paths.push_back(cfg.out_dir + "/" + name);
  }
  write_text_file(out.report_path, report.dump(2) + "\n");
  return out;
}

}  // namespace admech

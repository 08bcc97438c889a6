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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "admech/run.hpp"
#include "admech/serialize.hpp"
#include "helpers.hpp"

using namespace admech;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

// Scratch directory removed when the test case ends.
struct TempDir {
  fs::path path;

  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("admech_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }

  std::string file(const std::string& name, const std::string& content) const {
    const std::string p = (path / name).string();
    write_text_file(p, content);
    return p;
  }
  std::string sub(const std::string& name) const {
    return (path / name).string();
  }
};

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(ADMECH_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

json read_report(const std::string& dir) {
  return json::parse(read_text_file(dir + "/report.json"));
}

std::vector<std::string> read_lines(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

const char* kSimulateConfig = R"({
  "experiment": "simulate",
  "seed": 11,
  "replicates": 2,
  "scenario": {
    "mechanisms": [
      {"kind": "first_price", "values": [2.0, 2.0], "bids": [0.0, 1.0, 2.0]}
    ],
    "valuations": [
      {"kind": "table", "values": [0.0, 2.0]},
      {"kind": "table", "values": [0.0, 1.5]}
    ],
    "availability": {"kind": "independent", "q": [[0.7], [0.7]]}
  },
  "learner": {"kind": "hedge_full_joint", "rounds": 200,
              "recordRounds": false}
})";

std::string smoothness_config(double lambda, double mu1) {
  std::ostringstream out;
  out << R"({
  "experiment": "verify-smoothness",
  "seed": 3,
  "scenario": {
    "mechanisms": [
      {"kind": "first_price", "values": [2.0, 2.0], "bids": [0.0, 1.0, 2.0]}
    ],
    "valuations": [
      {"kind": "table", "values": [0.0, 2.0]},
      {"kind": "table", "values": [0.0, 2.0]}
    ],
    "availability": {"kind": "fixed", "pattern": [[1], [1]]}
  },
  "winValues": [[2.0, 2.0], [2.0, 0.0]],
  "smoothness": {"lambda": )"
      << lambda << ", \"mu1\": " << mu1 << ", \"mu2\": 0.0}\n}";
  return out.str();
}

const char* kGapConfig = R"({
  "experiment": "correlation-gap",
  "seed": 5,
  "gap": {
    "lattice": {"chains": [2, 2]},
    "valuation": {"kind": "table", "values": [0.0, 1.0, 1.0, 1.0]},
    "points": [[1, 0], [0, 1]],
    "weights": [0.5, 0.5]
  }
})";

const char* kLowerBoundConfig = R"({
  "experiment": "lower-bound",
  "seed": 1,
  "lowerBound": {"ks": [2, 4, 8, 16]}
})";

const char* kSinrConfig = R"({
  "experiment": "sinr",
  "seed": 9,
  "sinr": {
    "instances": [
      {"links": [[0, 0, 1, 0], [100, 0, 101, 0]], "noise": 0.0}
    ],
    "random": {"count": 2, "links": 5}
  }
})";

const char* kLemmaConfig = R"({
  "experiment": "lemma-check",
  "seed": 21,
  "scenario": {
    "mechanisms": [
      {"kind": "first_price", "values": [2.0], "bids": [0.0, 1.0, 2.0]},
      {"kind": "first_price", "values": [2.0], "bids": [0.0, 1.0, 2.0]}
    ],
    "valuations": [
      {"kind": "table", "values": [0.0, 1.5, 1.5, 2.0]}
    ],
    "availability": {"kind": "everybody_or_nobody", "bidders": 1,
                     "q": [0.5, 0.5]}
  },
  "lemma": {
    "lambda": 0.5,
    "play": [
      {"bids": [[0, 0]], "prob": 0.5},
      {"bids": [[1, 1]], "prob": 0.5}
    ]
  }
})";

}  // namespace

TEST_CASE("simulate runs, reports, and repeats byte for byte") {
  TempDir tmp;
  const std::string cfg = tmp.file("sim.json", kSimulateConfig);
  const std::string out1 = tmp.sub("a");
  const std::string out2 = tmp.sub("b");

  CHECK(run_cli("simulate --config " + cfg + " --out-dir " + out1) == 0);
  const json report = read_report(out1);
  CHECK(report["header"]["artifact"] == "admech");
  CHECK(report["header"]["experiment"] == "simulate");
  CHECK(report["header"].contains("generatedAtUtc"));
  const json& payload = report["payload"];
  CHECK(payload["schemaVersion"] == 1);
  CHECK(payload["seed"] == 11);
  CHECK(payload["mode"] == "exact");
  CHECK(payload["result"]["replicates"] == 2);
  CHECK(payload["result"]["availability"] == "independent");
  CHECK(payload["result"]["ratio"].get<double>() >= 0.0);
  CHECK(payload["result"]["expectedOptWelfare"].get<double>() > 0.0);

  CHECK(run_cli("simulate --config " + cfg + " --out-dir " + out2) == 0);
  CHECK(read_report(out2)["payload"].dump(2) == payload.dump(2));

  const std::string out3 = tmp.sub("c");
  CHECK(run_cli("simulate --config " + cfg + " --seed 12 --out-dir " + out3) ==
        0);
  const json moved = read_report(out3)["payload"];
  CHECK(moved["seed"] == 12);
  CHECK(moved.dump(2) != payload.dump(2));
}

TEST_CASE("simulate writes a trace when round recording is on") {
  TempDir tmp;
  std::string text = kSimulateConfig;
  const auto pos = text.find("\"recordRounds\": false");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, std::string("\"recordRounds\": false").size(),
               "\"recordRounds\": true");
  const auto rounds = text.find("\"rounds\": 200");
  REQUIRE(rounds != std::string::npos);
  text.replace(rounds, std::string("\"rounds\": 200").size(),
               "\"rounds\": 40");
  const std::string cfg = tmp.file("sim.json", text);
  const std::string out = tmp.sub("out");

  CHECK(run_cli("simulate --config " + cfg + " --out-dir " + out) == 0);
  const std::vector<std::string> lines = read_lines(out + "/trace.csv");
  REQUIRE(lines.size() == 1 + 40 * 2);
  CHECK(lines[0] == "round,bidder,mechanism,bid,available,outcome,payment,utility");
  CHECK(lines[1].rfind("0,0,0,", 0) == 0);
  CHECK(read_report(out)["payload"]["result"]["traceCsv"] == "trace.csv");
}

TEST_CASE("verify-smoothness distinguishes holding and failing certificates") {
  TempDir tmp;
  const std::string good =
      tmp.file("good.json", smoothness_config(0.5, 1.0));
  const std::string out = tmp.sub("good");
  CHECK(run_cli("verify-smoothness --config " + good + " --out-dir " + out) ==
        0);
  json payload = read_report(out)["payload"];
  CHECK(payload["result"]["verified"] == true);
  CHECK(payload["result"]["mechanisms"][0]["checks"].get<std::int64_t>() > 0);

  const std::string bad = tmp.file("bad.json", smoothness_config(1.0, 0.0));
  const std::string out2 = tmp.sub("bad");
  CHECK(run_cli("verify-smoothness --config " + bad + " --out-dir " + out2) ==
        1);
  payload = read_report(out2)["payload"];
  CHECK(payload["result"]["verified"] == false);
  CHECK(payload["result"]["mechanisms"][0].contains("counterexample"));
}

TEST_CASE("correlation-gap reproduces the coverage ratio in both modes") {
  TempDir tmp;
  const std::string cfg = tmp.file("gap.json", kGapConfig);
  const std::string out = tmp.sub("exact");
  CHECK(run_cli("correlation-gap --config " + cfg + " --out-dir " + out) == 0);
  const json exact = read_report(out)["payload"]["result"];
  CHECK(exact["mode"] == "exact");
  CHECK(exact["ratio"].get<double>() == 4.0 / 3.0);
  CHECK(exact["dmr"] == true);
  CHECK(exact["boundChecked"] == true);
  CHECK(exact["withinBound"] == true);

  const std::string out2 = tmp.sub("mc");
  CHECK(run_cli("correlation-gap --config " + cfg +
                " --mode mc --samples 30000 --out-dir " + out2) == 0);
  const json mc = read_report(out2)["payload"]["result"];
  CHECK(mc["mode"] == "mc");
  CHECK(mc["terms"] == 30000);
  CHECK(std::abs(mc["ratio"].get<double>() - 4.0 / 3.0) < 0.05);
}

TEST_CASE("lower-bound writes the sweep CSV") {
  TempDir tmp;
  const std::string cfg = tmp.file("lb.json", kLowerBoundConfig);
  const std::string out = tmp.sub("out");
  CHECK(run_cli("lower-bound --config " + cfg + " --out-dir " + out) == 0);

  const std::vector<std::string> lines = read_lines(out + "/lower_bound.csv");
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "k,optValue,bestObliviousValue,ratio");
  CHECK(lines[1] == "2,2.75,2,1.375");

  const json payload = read_report(out)["payload"];
  CHECK(payload["result"]["rows"].size() == 4);
  CHECK(payload["result"]["rows"][0]["k"] == 2);
  CHECK(payload["result"]["rows"][3]["k"] == 16);
  CHECK(payload["result"]["csv"] == "lower_bound.csv");
}

TEST_CASE("sinr checks fixed and random geometries") {
  TempDir tmp;
  const std::string cfg = tmp.file("sinr.json", kSinrConfig);
  const std::string out = tmp.sub("out");
  CHECK(run_cli("sinr --config " + cfg + " --out-dir " + out) == 0);
  const json result = read_report(out)["payload"]["result"];
  CHECK(result["total"] == 3);
  CHECK(result["passed"] == 3);
  CHECK(result["instances"][0]["displayedOk"] == true);
  CHECK(result["instances"][0]["maxFeasibleSet"] == json::array({0, 1}));
}

TEST_CASE("lemma-check accepts a holding chain") {
  TempDir tmp;
  const std::string cfg = tmp.file("lemma.json", kLemmaConfig);
  const std::string out = tmp.sub("out");
  CHECK(run_cli("lemma-check --config " + cfg + " --out-dir " + out) == 0);
  const json result = read_report(out)["payload"]["result"];
  CHECK(result["holds"] == true);
  CHECK(result["alpha"].get<double>() == 4.0);
  CHECK(result["mode"] == "exact");
  CHECK(!result["rows"].empty());
}

TEST_CASE("configuration and usage errors exit with the config code") {
  TempDir tmp;
  const std::string no_seed = tmp.file(
      "noseed.json", R"({"experiment": "lower-bound",
                         "lowerBound": {"ks": [2]}})");
  CHECK(run_cli("lower-bound --config " + no_seed + " --out-dir " +
                tmp.sub("a")) == 2);
  CHECK(run_cli("lower-bound --config " + no_seed + " --seed 7 --out-dir " +
                tmp.sub("b")) == 0);

  const std::string unknown = tmp.file(
      "unknown.json", R"({"experiment": "frobnicate", "seed": 1})");
  CHECK(run_cli("simulate --config " + unknown) == 2);

  const std::string lb = tmp.file("lb.json", kLowerBoundConfig);
  CHECK(run_cli("simulate --config " + lb) == 2);

  const std::string garbled = tmp.file("garbled.json", "{nope");
  CHECK(run_cli("lower-bound --config " + garbled) == 2);

  CHECK(run_cli("lower-bound --config " + lb + " --mode bogus") == 2);
  CHECK(run_cli("lower-bound") == 2);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("no-such-subcommand --config " + lb) == 2);
}

TEST_CASE("an undersized term budget exits with the budget code") {
  TempDir tmp;
  const std::string cfg =
      tmp.file("smooth.json", smoothness_config(0.5, 1.0));
  CHECK(run_cli("verify-smoothness --config " + cfg + " --budget 1 --out-dir " +
                tmp.sub("out")) == 3);
}

TEST_CASE("scenarios round trip through JSON") {
  const ComposedScenario s = testutil::first_price_scenario(
      {testutil::two_item_table(2.0, 1.0, 2.5),
       testutil::two_item_table(1.5, 1.5, 2.0)},
      2, {0.0, 1.0, 2.0},
      AvailabilityModel::independent({{0.5, 1.0}, {0.25, 0.75}}));
  const std::string text = scenario_to_json(s);
  const ComposedScenario back = scenario_from_json_text(text);

  REQUIRE(back.bidders() == 2);
  REQUIRE(back.mechanism_count() == 2);
  CHECK(back.mechanisms[0].kind() == "first_price");
  CHECK(back.mechanisms[1].grid(0).values() == std::vector<double>{0.0, 1.0, 2.0});
  CHECK(back.availability.kind_name() == "independent");
  CHECK(back.availability.slot_prob(1, 0) == 0.25);
  for (int i = 0; i < 2; ++i) {
    const ProductLattice& lat = back.valuations[i].lattice();
    for (std::int64_t idx = 0; idx < lat.size(); ++idx) {
      const OutcomeVector point = lat.vector_at(idx);
      CHECK(back.valuations[i].eval(point) ==
            doctest::Approx(s.valuations[i].eval(point)).epsilon(1e-12));
    }
  }
}

TEST_CASE("config parsing applies overrides and names bad fields") {
  ConfigOverrides ov;
  ov.seed = 5;
  ov.mode = "mc";
  ov.samples = 123;
  ov.budget = 777;
  ov.out_dir = "elsewhere";
  const ScenarioConfig cfg = parse_config_text(
      R"({"experiment": "lower-bound", "lowerBound": {"ks": [2]}})", ov);
  CHECK(cfg.seed == 5);
  CHECK(cfg.mode == "mc");
  CHECK(cfg.samples == 123);
  CHECK(cfg.budget == 777);
  CHECK(cfg.out_dir == "elsewhere");
  CHECK(cfg.lb_ks == std::vector<int>{2});

  auto field_of = [](const std::string& text) {
    try {
      parse_config_text(text);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("<no error>");
  };
  CHECK(field_of("{}") == "experiment");
  CHECK(field_of(R"({"experiment": "lower-bound",
                     "lowerBound": {"ks": [2]}})") == "seed");
  CHECK(field_of(R"({"experiment": "lower-bound", "seed": 1, "mode": "x",
                     "lowerBound": {"ks": [2]}})") == "mode");
  CHECK(field_of(R"({"experiment": "lower-bound", "seed": 1, "budget": 0,
                     "lowerBound": {"ks": [2]}})") == "budget");
  CHECK(field_of(R"({"experiment": "lower-bound", "seed": 1,
                     "lowerBound": {"ks": [99]}})") == "lowerBound.ks");
  CHECK(field_of(R"({"experiment": "correlation-gap", "seed": 1,
                     "gap": {"lattice": {"chains": [2]},
                             "valuation": {"kind": "table",
                                           "values": [0.0, 1.0]},
                             "points": [[1]],
                             "weights": [0.5, 0.5]}})") == "gap.weights");
  CHECK(field_of(R"({"experiment": "simulate", "seed": 1})") == "scenario");
}

TEST_CASE("doubles render as the shortest faithful decimal") {
  CHECK(format_double(2.75) == "2.75");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(4.0 / 3.0)) == 4.0 / 3.0);
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

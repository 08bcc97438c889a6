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

#include "admech/serialize.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "admech/availability.hpp"
#include "admech/rng.hpp"
#include "json_convert.hpp"

namespace admech {

using detail::Json;

std::string format_double(double x) {
  char buf[64];
  const std::to_chars_result res = std::to_chars(buf, buf + sizeof(buf), x);
  if (res.ec != std::errc()) {
    throw std::runtime_error("double formatting failed");
  }
  return std::string(buf, res.ptr);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw std::runtime_error("read failed on '" + path + "'");
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("write failed on '" + path + "'");
}

namespace detail {

const Json& require_member(const Json& obj, const std::string& key,
                           const std::string& path) {
  if (!obj.is_object()) {
    throw ConfigError(path, "expected an object");
  }
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw ConfigError(path.empty() ? key : path + "." + key,
                      "missing required entry");
  }
  return *it;
}

double as_double(const Json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  return v.get<double>();
}

std::int64_t as_int(const Json& v, const std::string& path) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    throw ConfigError(path, "expected an integer");
  }
  return v.get<std::int64_t>();
}

bool as_bool(const Json& v, const std::string& path) {
  if (!v.is_boolean()) throw ConfigError(path, "expected a boolean");
  return v.get<bool>();
}

std::string as_string(const Json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

std::vector<double> as_double_vector(const Json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    out.push_back(as_double(v[k], path + "[" + std::to_string(k) + "]"));
  }
  return out;
}

std::vector<int> as_int_vector(const Json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of integers");
  std::vector<int> out;
  out.reserve(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    out.push_back(static_cast<int>(
        as_int(v[k], path + "[" + std::to_string(k) + "]")));
  }
  return out;
}

namespace {

std::vector<std::vector<double>> as_matrix(const Json& v,
                                           const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of rows");
  std::vector<std::vector<double>> out;
  out.reserve(v.size());
  for (std::size_t r = 0; r < v.size(); ++r) {
    out.push_back(as_double_vector(v[r], path + "[" + std::to_string(r) + "]"));
  }
  return out;
}

[[noreturn]] void rethrow_as_config(const std::string& path,
                                    const std::exception& e) {
  throw ConfigError(path, e.what());
}

}  // namespace

Json sinr_to_json(const SinrInstance& inst) {
  Json links = Json::array();
  for (const SinrLink& link : inst.links) {
    links.push_back(Json::array({link.sender.x, link.sender.y, link.receiver.x,
                                 link.receiver.y}));
  }
  return Json{{"links", std::move(links)},
              {"power", inst.power},
              {"pathLoss", inst.path_loss},
              {"threshold", inst.threshold},
              {"noise", inst.noise}};
}

SinrInstance sinr_from_json(const Json& v, const std::string& path) {
  SinrInstance inst;
  const Json& links = require_member(v, "links", path);
  if (!links.is_array() || links.empty()) {
    throw ConfigError(path + ".links", "expected a nonempty array of links");
  }
  for (std::size_t k = 0; k < links.size(); ++k) {
    const std::string lp = path + ".links[" + std::to_string(k) + "]";
    const std::vector<double> c = as_double_vector(links[k], lp);
    if (c.size() != 4) {
      throw ConfigError(lp, "expected [senderX, senderY, receiverX, receiverY]");
    }
    inst.links.push_back(SinrLink{{c[0], c[1]}, {c[2], c[3]}});
  }
  if (v.contains("power")) inst.power = as_double(v["power"], path + ".power");
  if (v.contains("pathLoss")) {
    inst.path_loss = as_double(v["pathLoss"], path + ".pathLoss");
  }
  if (v.contains("threshold")) {
    inst.threshold = as_double(v["threshold"], path + ".threshold");
  }
  if (v.contains("noise")) inst.noise = as_double(v["noise"], path + ".noise");
  try {
    validate_sinr_instance(inst);
  } catch (const std::invalid_argument& e) {
    rethrow_as_config(path, e);
  }
  return inst;
}

Json mechanism_to_json(const Mechanism& mech) {
  if (mech.kind() != "first_price") {
    throw ConfigError("mechanism", "mechanism kind '" + mech.kind() +
                                       "' is not serializable");
  }
  return Json{{"kind", "first_price"},
              {"values", mech.declared_values()},
              {"bids", mech.grid(0).values()}};
}

Mechanism mechanism_from_json(const Json& v, const std::string& path) {
  const std::string kind =
      as_string(require_member(v, "kind", path), path + ".kind");
  try {
    if (kind == "first_price") {
      std::vector<double> values = as_double_vector(
          require_member(v, "values", path), path + ".values");
      std::vector<double> bids =
          as_double_vector(require_member(v, "bids", path), path + ".bids");
      return Mechanism::first_price(std::move(values),
                                    BidGrid(std::move(bids)));
    }
    if (kind == "channel") {
      return channel_mechanism(
          sinr_from_json(require_member(v, "instance", path),
                         path + ".instance"));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    rethrow_as_config(path, e);
  }
  throw ConfigError(path + ".kind", "unknown mechanism kind '" + kind + "'");
}

Json valuation_to_json(const Valuation& v) {
  switch (v.kind()) {
    case ValuationKind::kTable:
      return Json{{"kind", "table"}, {"values", v.dense_table()}};
    case ValuationKind::kXos:
      return Json{{"kind", "xos"}, {"families", v.xos_families()}};
    case ValuationKind::kSetFunction:
      break;
  }
  throw ConfigError("valuation", "set-function valuations are not serializable");
}

Valuation valuation_from_json(const Json& v, const ProductLattice& lat,
                              const std::string& path) {
  const std::string kind =
      as_string(require_member(v, "kind", path), path + ".kind");
  try {
    if (kind == "table") {
      return Valuation::table(
          lat, as_double_vector(require_member(v, "values", path),
                                path + ".values"));
    }
    if (kind == "xos") {
      const Json& fams = require_member(v, "families", path);
      if (!fams.is_array() || fams.empty()) {
        throw ConfigError(path + ".families",
                          "expected a nonempty array of additive tables");
      }
      std::vector<AdditiveTable> families;
      for (std::size_t k = 0; k < fams.size(); ++k) {
        families.push_back(as_matrix(
            fams[k], path + ".families[" + std::to_string(k) + "]"));
      }
      return Valuation::xos(lat, std::move(families));
    }
    if (kind == "additive") {
      return additive_valuation(
          lat, as_matrix(require_member(v, "table", path), path + ".table"));
    }
    if (kind == "unitDemand") {
      return unit_demand_valuation(
          lat, as_matrix(require_member(v, "perFactor", path),
                         path + ".perFactor"));
    }
    if (kind == "groupMax") {
      const int groups = static_cast<int>(
          as_int(require_member(v, "groups", path), path + ".groups"));
      const int group_size = static_cast<int>(
          as_int(require_member(v, "groupSize", path), path + ".groupSize"));
      const double weight =
          as_double(require_member(v, "weight", path), path + ".weight");
      Valuation built = group_max_valuation(groups, group_size, weight);
      if (!(built.lattice() == lat)) {
        throw ConfigError(
            path, "group dimensions do not match the mechanisms' outcome "
                  "spaces for this bidder");
      }
      return built;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    rethrow_as_config(path, e);
  }
  throw ConfigError(path + ".kind", "unknown valuation kind '" + kind + "'");
}

Json availability_to_json(const AvailabilityModel& model) {
  Json out;
  out["kind"] = model.kind_name();
  switch (model.kind()) {
    case AvailabilityModel::Kind::kIndependent:
    case AvailabilityModel::Kind::kFixed: {
      Json grid = Json::array();
      for (int i = 0; i < model.bidders(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < model.mechanisms(); ++j) {
          row.push_back(model.slot_prob(i, j));
        }
        grid.push_back(std::move(row));
      }
      out[model.kind() == AvailabilityModel::Kind::kFixed ? "pattern" : "q"] =
          std::move(grid);
      break;
    }
    case AvailabilityModel::Kind::kEverybodyOrNobody: {
      out["bidders"] = model.bidders();
      Json q = Json::array();
      for (int j = 0; j < model.mechanisms(); ++j) {
        q.push_back(model.shared_prob(j));
      }
      out["q"] = std::move(q);
      break;
    }
  }
  return out;
}

AvailabilityModel availability_from_json(const Json& v,
                                         const std::string& path) {
  const std::string kind =
      as_string(require_member(v, "kind", path), path + ".kind");
  try {
    if (kind == "independent") {
      return AvailabilityModel::independent(
          as_matrix(require_member(v, "q", path), path + ".q"));
    }
    if (kind == "everybody_or_nobody") {
      const int bidders = static_cast<int>(
          as_int(require_member(v, "bidders", path), path + ".bidders"));
      return AvailabilityModel::everybody_or_nobody(
          bidders,
          as_double_vector(require_member(v, "q", path), path + ".q"));
    }
    if (kind == "fixed") {
      return AvailabilityModel::fixed(
          as_matrix(require_member(v, "pattern", path), path + ".pattern"));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    rethrow_as_config(path, e);
  }
  throw ConfigError(path + ".kind", "unknown availability kind '" + kind + "'");
}

Json scenario_to_json_obj(const ComposedScenario& s) {
  Json mechs = Json::array();
  for (const Mechanism& mech : s.mechanisms) {
    mechs.push_back(mechanism_to_json(mech));
  }
  Json vals = Json::array();
  for (const Valuation& v : s.valuations) vals.push_back(valuation_to_json(v));
  return Json{{"mechanisms", std::move(mechs)},
              {"valuations", std::move(vals)},
              {"availability", availability_to_json(s.availability)}};
}

ComposedScenario scenario_from_json_obj(const Json& v,
                                        const std::string& path) {
  const Json& mechs = require_member(v, "mechanisms", path);
  if (!mechs.is_array() || mechs.empty()) {
    throw ConfigError(path + ".mechanisms",
                      "expected a nonempty array of mechanisms");
  }
  std::vector<Mechanism> mechanisms;
  for (std::size_t j = 0; j < mechs.size(); ++j) {
    mechanisms.push_back(mechanism_from_json(
        mechs[j], path + ".mechanisms[" + std::to_string(j) + "]"));
  }
  const int bidders = mechanisms[0].bidders();
  for (const Mechanism& mech : mechanisms) {
    if (mech.bidders() != bidders) {
      throw ConfigError(path + ".mechanisms",
                        "all mechanisms must share one bidder count");
    }
  }

  const Json& vals = require_member(v, "valuations", path);
  if (!vals.is_array() || static_cast<int>(vals.size()) != bidders) {
    throw ConfigError(path + ".valuations",
                      "expected one valuation per bidder (" +
                          std::to_string(bidders) + ")");
  }
  std::vector<Valuation> valuations;
  for (int i = 0; i < bidders; ++i) {
    std::vector<OutcomeLattice> factors;
    factors.reserve(mechanisms.size());
    for (const Mechanism& mech : mechanisms) {
      factors.push_back(mech.outcome_space(i));
    }
    valuations.push_back(valuation_from_json(
        vals[i], ProductLattice(std::move(factors)),
        path + ".valuations[" + std::to_string(i) + "]"));
  }

  AvailabilityModel avail = availability_from_json(
      require_member(v, "availability", path), path + ".availability");
  return make_composed_scenario(std::move(mechanisms), std::move(valuations),
                                std::move(avail));
}

}  // namespace detail

std::string scenario_to_json(const ComposedScenario& s) {
  return detail::scenario_to_json_obj(s).dump(2) + "\n";
}

ComposedScenario scenario_from_json_text(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("scenario", std::string("not valid JSON: ") + e.what());
  }
  return detail::scenario_from_json_obj(root, "scenario");
}

namespace {

using detail::as_bool;
using detail::as_double;
using detail::as_double_vector;
using detail::as_int;
using detail::as_int_vector;
using detail::as_string;
using detail::require_member;

std::uint64_t as_seed(const Json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    const std::int64_t raw = v.get<std::int64_t>();
    if (raw >= 0) return static_cast<std::uint64_t>(raw);
  }
  throw ConfigError(path, "expected a nonnegative integer seed");
}

LearnerKind learner_kind_from_name(const std::string& name,
                                   const std::string& path) {
  if (name == "hedge_full_joint") return LearnerKind::kHedgeFullJoint;
  if (name == "hedge_factored") return LearnerKind::kHedgeFactored;
  if (name == "exp3") return LearnerKind::kExp3;
  throw ConfigError(path, "unknown learner kind '" + name + "'");
}

SmoothnessParams smoothness_from_json(const Json& v, const std::string& path) {
  SmoothnessParams p;
  p.lambda = as_double(require_member(v, "lambda", path), path + ".lambda");
  p.mu1 = as_double(require_member(v, "mu1", path), path + ".mu1");
  p.mu2 = as_double(require_member(v, "mu2", path), path + ".mu2");
  try {
    validate_smoothness_params(p);
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
  return p;
}

RunSpec run_spec_from_json(const Json& v, const ComposedScenario& s,
                           const std::string& path) {
  RunSpec run;
  if (v.contains("kind")) {
    run.learner =
        learner_kind_from_name(as_string(v["kind"], path + ".kind"),
                               path + ".kind");
  }
  if (v.contains("rounds")) {
    const std::int64_t rounds = as_int(v["rounds"], path + ".rounds");
    if (rounds < 1) throw ConfigError(path + ".rounds", "must be >= 1");
    run.rounds = static_cast<int>(rounds);
  }
  if (v.contains("stepSize")) {
    const double step = as_double(v["stepSize"], path + ".stepSize");
    if (!(step > 0.0)) throw ConfigError(path + ".stepSize", "must be > 0");
    run.step_size = step;
  }
  if (v.contains("bestResponders")) {
    run.best_responders =
        as_int_vector(v["bestResponders"], path + ".bestResponders");
    for (int i : run.best_responders) {
      if (i < 0 || i >= s.bidders()) {
        throw ConfigError(path + ".bestResponders",
                          "bidder index " + std::to_string(i) +
                              " out of range");
      }
    }
  }
  if (v.contains("recordRounds")) {
    run.record_rounds = as_bool(v["recordRounds"], path + ".recordRounds");
  }
  return run;
}

std::vector<std::pair<BidProfile, double>> play_from_json(
    const Json& v, const ComposedScenario& s, const std::string& path) {
  if (!v.is_array() || v.empty()) {
    throw ConfigError(path, "expected a nonempty array of weighted profiles");
  }
  const int n = s.bidders();
  const int m = s.mechanism_count();
  std::vector<std::pair<BidProfile, double>> play;
  for (std::size_t a = 0; a < v.size(); ++a) {
    const std::string ap = path + "[" + std::to_string(a) + "]";
    const Json& bids = require_member(v[a], "bids", ap);
    if (!bids.is_array() || static_cast<int>(bids.size()) != n) {
      throw ConfigError(ap + ".bids", "expected one row per bidder");
    }
    BidProfile profile(n, m);
    for (int i = 0; i < n; ++i) {
      const std::vector<int> row = as_int_vector(
          bids[i], ap + ".bids[" + std::to_string(i) + "]");
      if (static_cast<int>(row.size()) != m) {
        throw ConfigError(ap + ".bids[" + std::to_string(i) + "]",
                          "expected one bid index per mechanism");
      }
      for (int j = 0; j < m; ++j) {
        if (row[j] < 0 || row[j] >= s.mechanisms[j].grid(i).size()) {
          throw ConfigError(ap + ".bids[" + std::to_string(i) + "]",
                            "bid index out of grid range");
        }
        profile.set(i, j, row[j]);
      }
    }
    const double prob =
        as_double(require_member(v[a], "prob", ap), ap + ".prob");
    if (!(prob >= 0.0)) throw ConfigError(ap + ".prob", "must be >= 0");
    play.emplace_back(std::move(profile), prob);
  }
  return play;
}

}  // namespace

ScenarioConfig parse_config_text(const std::string& text,
                                 const ConfigOverrides& overrides) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("<config>", std::string("not valid JSON: ") + e.what());
  }
  if (!root.is_object()) {
    throw ConfigError("<config>", "top level must be an object");
  }

  ScenarioConfig cfg;
  cfg.experiment = as_string(require_member(root, "experiment", ""),
                             "experiment");
  static const std::set<std::string> kExperiments = {
      "simulate",    "verify-smoothness", "correlation-gap",
      "lower-bound", "sinr",              "lemma-check"};
  if (!kExperiments.count(cfg.experiment)) {
    throw ConfigError("experiment",
                      "unknown experiment kind '" + cfg.experiment + "'");
  }

  if (overrides.seed) {
    cfg.seed = *overrides.seed;
  } else if (root.contains("seed")) {
    cfg.seed = as_seed(root["seed"], "seed");
  } else {
    throw ConfigError("seed",
                      "a seed is required (in the config or via --seed)");
  }

  if (overrides.budget) {
    cfg.budget = *overrides.budget;
  } else if (root.contains("budget")) {
    cfg.budget = as_int(root["budget"], "budget");
  }
  if (cfg.budget < 1) throw ConfigError("budget", "must be >= 1");

  if (overrides.mode) {
    cfg.mode = *overrides.mode;
  } else if (root.contains("mode")) {
    cfg.mode = as_string(root["mode"], "mode");
  }
  if (cfg.mode != "exact" && cfg.mode != "mc") {
    throw ConfigError("mode", "expected 'exact' or 'mc'");
  }

  if (overrides.samples) {
    cfg.samples = *overrides.samples;
  } else if (root.contains("samples")) {
    cfg.samples = static_cast<int>(as_int(root["samples"], "samples"));
  }
  if (cfg.samples < 1) throw ConfigError("samples", "must be >= 1");

  if (overrides.out_dir) {
    cfg.out_dir = *overrides.out_dir;
  } else if (root.contains("outDir")) {
    cfg.out_dir = as_string(root["outDir"], "outDir");
  }

  const bool needs_scenario = cfg.experiment == "simulate" ||
                              cfg.experiment == "verify-smoothness" ||
                              cfg.experiment == "lemma-check";
  if (root.contains("scenario")) {
    cfg.scenario = detail::scenario_from_json_obj(root["scenario"], "scenario");
  } else if (needs_scenario) {
    throw ConfigError("scenario", "this experiment requires a scenario");
  }

  if (root.contains("smoothness")) {
    cfg.smoothness = smoothness_from_json(root["smoothness"], "smoothness");
  } else {
    // Default certificate of the discrete first-price auction.
    cfg.smoothness = SmoothnessParams{0.5, 1.0, 0.0};
  }

  if (root.contains("gapBound")) {
    cfg.gap_bound = as_double(root["gapBound"], "gapBound");
    if (!(cfg.gap_bound >= 1.0)) {
      throw ConfigError("gapBound", "must be >= 1");
    }
  }

  if (root.contains("replicates")) {
    const std::int64_t reps = as_int(root["replicates"], "replicates");
    if (reps < 1) throw ConfigError("replicates", "must be >= 1");
    cfg.replicates = static_cast<int>(reps);
  }

  if (cfg.scenario && root.contains("learner")) {
    cfg.run = run_spec_from_json(root["learner"], *cfg.scenario, "learner");
  }
  cfg.write_trace = cfg.run.record_rounds;

  if (root.contains("winValues")) {
    const Json& w = root["winValues"];
    if (!w.is_array() || w.empty()) {
      throw ConfigError("winValues", "expected a nonempty array of rows");
    }
    for (std::size_t r = 0; r < w.size(); ++r) {
      cfg.win_values.push_back(
          as_double_vector(w[r], "winValues[" + std::to_string(r) + "]"));
    }
  }

  if (cfg.experiment == "correlation-gap") {
    const Json& gap = require_member(root, "gap", "");
    const Json& lat = require_member(gap, "lattice", "gap");
    const std::vector<int> chains = as_int_vector(
        require_member(lat, "chains", "gap.lattice"), "gap.lattice.chains");
    if (chains.empty()) {
      throw ConfigError("gap.lattice.chains", "expected at least one factor");
    }
    std::vector<OutcomeLattice> factors;
    for (std::size_t f = 0; f < chains.size(); ++f) {
      try {
        factors.push_back(OutcomeLattice::chain(chains[f]));
      } catch (const std::exception& e) {
        throw ConfigError("gap.lattice.chains[" + std::to_string(f) + "]",
                          e.what());
      }
    }
    const ProductLattice lattice{std::move(factors)};
    cfg.gap_valuation = detail::valuation_from_json(
        require_member(gap, "valuation", "gap"), lattice, "gap.valuation");

    const Json& points = require_member(gap, "points", "gap");
    if (!points.is_array() || points.empty()) {
      throw ConfigError("gap.points", "expected a nonempty array of outcomes");
    }
    for (std::size_t k = 0; k < points.size(); ++k) {
      const std::string pp = "gap.points[" + std::to_string(k) + "]";
      const std::vector<int> point = as_int_vector(points[k], pp);
      if (static_cast<int>(point.size()) != lattice.factor_count()) {
        throw ConfigError(pp, "expected one element per factor");
      }
      for (int f = 0; f < lattice.factor_count(); ++f) {
        if (point[f] < 0 || point[f] >= lattice.factor(f).size()) {
          throw ConfigError(pp, "element index out of range");
        }
      }
      cfg.gap_points.push_back(point);
    }
    cfg.gap_weights = as_double_vector(require_member(gap, "weights", "gap"),
                                       "gap.weights");
    if (cfg.gap_weights.size() != cfg.gap_points.size()) {
      throw ConfigError("gap.weights",
                        "expected one weight per point");
    }
  }

  if (cfg.experiment == "lower-bound") {
    const Json& lb = require_member(root, "lowerBound", "");
    cfg.lb_ks = as_int_vector(require_member(lb, "ks", "lowerBound"),
                              "lowerBound.ks");
    if (cfg.lb_ks.empty()) {
      throw ConfigError("lowerBound.ks", "expected at least one k");
    }
    for (int k : cfg.lb_ks) {
      if (k < 1 || k > 64) {
        throw ConfigError("lowerBound.ks",
                          "k = " + std::to_string(k) + " outside [1, 64]");
      }
    }
  }

  if (cfg.experiment == "sinr") {
    const Json& sinr = require_member(root, "sinr", "");
    if (sinr.contains("instances")) {
      const Json& list = sinr["instances"];
      if (!list.is_array()) {
        throw ConfigError("sinr.instances", "expected an array");
      }
      for (std::size_t k = 0; k < list.size(); ++k) {
        cfg.sinr_instances.push_back(detail::sinr_from_json(
            list[k], "sinr.instances[" + std::to_string(k) + "]"));
      }
    }
    if (sinr.contains("random")) {
      const Json& rnd = sinr["random"];
      cfg.sinr_random_count = static_cast<int>(as_int(
          require_member(rnd, "count", "sinr.random"), "sinr.random.count"));
      if (cfg.sinr_random_count < 1) {
        throw ConfigError("sinr.random.count", "must be >= 1");
      }
      if (rnd.contains("links")) {
        cfg.sinr_random_links =
            static_cast<int>(as_int(rnd["links"], "sinr.random.links"));
      }
      if (cfg.sinr_random_links < 1 || cfg.sinr_random_links > 12) {
        throw ConfigError("sinr.random.links", "must be in [1, 12]");
      }
    }
    if (cfg.sinr_instances.empty() && cfg.sinr_random_count == 0) {
      throw ConfigError("sinr",
                        "provide 'instances', 'random', or both");
    }
  }

  if (cfg.experiment == "lemma-check" && root.contains("lemma")) {
    const Json& lemma = root["lemma"];
    if (lemma.contains("lambda")) {
      cfg.lemma_lambda = as_double(lemma["lambda"], "lemma.lambda");
      if (!(cfg.lemma_lambda > 0.0) || cfg.lemma_lambda > 2.0) {
        throw ConfigError("lemma.lambda", "must lie in (0, 2]");
      }
    }
    if (lemma.contains("play")) {
      cfg.play = play_from_json(lemma["play"], *cfg.scenario, "lemma.play");
    }
  }
  if (cfg.experiment == "lemma-check" && cfg.play.empty()) {
    cfg.play.emplace_back(
        BidProfile(cfg.scenario->bidders(), cfg.scenario->mechanism_count()),
        1.0);
  }

  return cfg;
}

ScenarioConfig parse_config(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("<config>", e.what());
  }
  return parse_config_text(text);
}

void write_trace_csv(const std::string& path, const ComposedScenario& s,
                     const LearningTrace& trace) {
  std::ostringstream out;
  out << "round,bidder,mechanism,bid,available,outcome,payment,utility\n";
  const int n = trace.bidders;
  const int m = trace.mechanisms;
  const RngStream root(trace.seed);
  for (std::size_t t = 0; t < trace.rows.size(); ++t) {
    const TraceRound& row = trace.rows[t];
    const std::uint64_t round_seed =
        root.derive("mech", static_cast<std::uint64_t>(t)).next_u64();
    const ComposedResult result =
        apply_composed(s, row.bids, row.avail, round_seed);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        out << t << ',' << i << ',' << j << ','
            << format_double(s.mechanisms[j].grid(i).value(row.bids.at(i, j)))
            << ',' << static_cast<int>(row.avail.at(i, j)) << ','
            << result.outcomes[i][j] << ','
            << format_double(row.payments[static_cast<std::size_t>(i) * m + j])
            << ',' << format_double(row.utilities[i]) << '\n';
      }
    }
  }
  write_text_file(path, out.str());
}

void write_lower_bound_csv(const std::string& path,
                           const std::vector<LowerBoundRow>& rows) {
  std::ostringstream out;
  out << "k,optValue,bestObliviousValue,ratio\n";
  for (const LowerBoundRow& row : rows) {
    out << row.k << ',' << format_double(row.opt_value) << ','
        << format_double(row.best_value) << ',' << format_double(row.ratio)
        << '\n';
  }
  write_text_file(path, out.str());
}

}  // namespace admech

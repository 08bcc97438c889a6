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

// Build-internal JSON conversions shared by the serializer and the runner.

#ifndef ADMECH_SRC_JSON_CONVERT_HPP_
#define ADMECH_SRC_JSON_CONVERT_HPP_

#include <string>

#include <json.hpp>

#include "admech/scenario.hpp"
#include "admech/sinr.hpp"
#include "admech/valuation.hpp"

namespace admech::detail {

using Json = nlohmann::json;

// Field accessors; `path` is the dotted location used in ConfigError.
const Json& require_member(const Json& obj, const std::string& key,
                           const std::string& path);
double as_double(const Json& v, const std::string& path);
std::int64_t as_int(const Json& v, const std::string& path);
bool as_bool(const Json& v, const std::string& path);
std::string as_string(const Json& v, const std::string& path);
std::vector<double> as_double_vector(const Json& v, const std::string& path);
std::vector<int> as_int_vector(const Json& v, const std::string& path);

Json mechanism_to_json(const Mechanism& mech);
Mechanism mechanism_from_json(const Json& v, const std::string& path);

Json valuation_to_json(const Valuation& v);
Valuation valuation_from_json(const Json& v, const ProductLattice& lat,
                              const std::string& path);

Json availability_to_json(const AvailabilityModel& model);
AvailabilityModel availability_from_json(const Json& v,
                                         const std::string& path);

Json scenario_to_json_obj(const ComposedScenario& s);
ComposedScenario scenario_from_json_obj(const Json& v, const std::string& path);

Json sinr_to_json(const SinrInstance& inst);
SinrInstance sinr_from_json(const Json& v, const std::string& path);

}  // namespace admech::detail

#endif  // ADMECH_SRC_JSON_CONVERT_HPP_

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

#ifndef ADMECH_SINR_HPP_
#define ADMECH_SINR_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "admech/common.hpp"
#include "admech/mechanism.hpp"
#include "admech/rng.hpp"
#include "admech/smoothness.hpp"

namespace admech {

struct SinrPoint {
  double x = 0.0;
  double y = 0.0;
};

struct SinrLink {
  SinrPoint sender;
  SinrPoint receiver;
};

// Wireless channel access: link i's transmission succeeds when its received
// signal power/d^pathLoss exceeds `threshold` times the interference from the
// other transmitting senders plus `noise`.
struct SinrInstance {
  std::vector<SinrLink> links;
  double power = 1.0;
  double path_loss = 2.0;
  double threshold = 1.0;
  double noise = 0.0;

  int size() const { return static_cast<int>(links.size()); }
};

void validate_sinr_instance(const SinrInstance& inst);

double link_distance(const SinrPoint& a, const SinrPoint& b);

// a[j][i]: normalized interference budget sender j uses up at receiver i,
// capped at 1.  Links that fail even transmitting alone make the
// normalization denominator nonpositive; their column entries are set to the
// cap and the link is flagged.
struct InterferenceMatrix {
  std::vector<std::vector<double>> a;
  std::vector<char> solo_infeasible;
};

InterferenceMatrix interference_matrix(const SinrInstance& inst);

// Success flags when exactly the flagged links transmit.
std::vector<char> sinr_feasible(const SinrInstance& inst,
                                const std::vector<char>& transmit);

// 1 transmitting and successful, -1 transmitting and drowned out, 0 silent.
std::vector<int> channel_utilities(const SinrInstance& inst,
                                   const std::vector<char>& transmit);

// Maximum-cardinality set whose members all succeed when exactly that set
// transmits; ties resolve to the lexicographically smallest index list.
// Brute force over subsets, capped at 20 links.
std::vector<int> max_feasible_set(const SinrInstance& inst);

// Mechanism form of the game: bids {0,1} (silent/transmit), outcome win on
// success, payment 1 per transmission.  Utilities against a success-pays-2
// valuation reproduce channel_utilities.  The registered deviation rule
// transmits exactly on the precomputed maximum feasible set.
Mechanism channel_mechanism(const SinrInstance& inst);

struct ChannelCheck {
  std::vector<int> max_feasible;
  // max over links j and feasible sets S' of the interference link j imposes
  // on S' \ {j}; replaces the literature constant.
  double empirical_c = 0.0;
  bool any_solo_infeasible = false;
  // Exhaustive check of: sum_i u_i(dev_i, b_-i) >= |S| - 2 C sum_i p_i(b).
  bool displayed_ok = false;
  std::int64_t profiles = 0;
  double min_slack = 0.0;
  std::optional<std::vector<char>> counterexample;
  // Equivalent certificate over the mechanism form with success valued 2:
  // the benchmark is then 2|S|, so lambda is 1/2 with mu1 = 2C.
  SmoothnessCertificate certificate;
};

// Enumerates all 2^n bid profiles; capped at 12 links.
ChannelCheck verify_channel_smoothness(const SinrInstance& inst,
                                       std::int64_t budget = kExactTermLimit);

// Uniform geometry in a square arena with sender-receiver spacing bounded
// away from zero.
SinrInstance random_sinr_instance(int links, RngStream& rng);

}  // namespace admech

#endif  // ADMECH_SINR_HPP_

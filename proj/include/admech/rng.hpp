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

#ifndef ADMECH_RNG_HPP_
#define ADMECH_RNG_HPP_

#include <cstdint>
#include <string_view>
#include <vector>

namespace admech {

// Counter-based deterministic generator (SplitMix64 finalizer applied to
// key + counter).  Streams are split by deriving a new key from a salt or
// label, so substreams never overlap regardless of how much either side
// consumes.  All randomness in the library flows through explicit streams;
// there is no global or implicit entropy source.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  // Independent substream; derivation is pure (does not advance this stream).
  RngStream derive(std::uint64_t salt) const;
  RngStream derive(std::string_view label) const;
  RngStream derive(std::string_view label, std::uint64_t salt) const;

  std::uint64_t next_u64();

  // Uniform in [0, 1), 53 mantissa bits.
  double next_double();

  // Uniform in {0, ..., bound - 1}, unbiased via rejection.  bound >= 1.
  std::uint64_t next_below(std::uint64_t bound);

  bool bernoulli(double p);

  // Index sampled proportionally to the (nonnegative) weights.
  int sample_weights(const std::vector<double>& weights);

 private:
  RngStream(std::uint64_t key, int);  // raw-key constructor

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace admech

#endif  // ADMECH_RNG_HPP_

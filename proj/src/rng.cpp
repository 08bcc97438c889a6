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

#include "admech/rng.hpp"

#include <stdexcept>

namespace admech {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer.
std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : key_(mix(seed ^ kGolden)) {}

RngStream::RngStream(std::uint64_t key, int) : key_(key) {}

RngStream RngStream::derive(std::uint64_t salt) const {
  return RngStream(mix(key_ ^ mix(salt + kGolden)), 0);
}

RngStream RngStream::derive(std::string_view label) const {
  return derive(fnv1a(label));
}

RngStream RngStream::derive(std::string_view label, std::uint64_t salt) const {
  return derive(fnv1a(label)).derive(salt);
}

std::uint64_t RngStream::next_u64() {
  counter_ += kGolden;
  return mix(key_ + counter_);
}

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("next_below: bound must be >= 1");
  std::uint64_t threshold = -bound % bound;
  for (;;) {
    std::uint64_t r = next_u64();
    if (r >= threshold) return r % bound;
  }
}

bool RngStream::bernoulli(double p) { return next_double() < p; }

int RngStream::sample_weights(const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("sample_weights: negative weight");
    total += w;
  }
  if (total <= 0.0) {
    throw std::invalid_argument("sample_weights: total weight must be > 0");
  }
  double u = next_double() * total;
  double acc = 0.0;
  for (std::size_t a = 0; a < weights.size(); ++a) {
    acc += weights[a];
    if (u < acc) return static_cast<int>(a);
  }
  return static_cast<int>(weights.size()) - 1;
}

}  // namespace admech

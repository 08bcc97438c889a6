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

#ifndef ADMECH_COMMON_HPP_
#define ADMECH_COMMON_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace admech {

// Tolerance for value comparisons (equality and inequality slack).
inline constexpr double kValueTol = 1e-9;

// Tolerance for probability mass sums.
inline constexpr double kProbTol = 1e-12;

// Enumerations larger than this many terms switch to Monte Carlo (or raise
// BudgetExceeded where no sampling fallback exists).
inline constexpr std::int64_t kExactTermLimit = 10000000;

// Raised when an exact enumeration would exceed its term budget.  Callers
// that have a sampling fallback catch this and switch modes.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, std::int64_t needed,
                 std::int64_t budget)
      : std::runtime_error(what + ": needs " + std::to_string(needed) +
                           " terms, budget " + std::to_string(budget)),
        needed_(needed),
        budget_(budget) {}

  std::int64_t needed() const { return needed_; }
  std::int64_t budget() const { return budget_; }

 private:
  std::int64_t needed_;
  std::int64_t budget_;
};

// Raised by config parsing; `field` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error("config field '" + field + "': " + what),
        field_(field) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace admech

#endif  // ADMECH_COMMON_HPP_

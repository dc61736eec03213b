// Copyright 2026 The distlog Authors
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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace distlog {

/// Invalid parameters supplied by a caller (bad plan, bad epsilon, unknown
/// register, ...). The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// An internal invariant failed. Indicates a bug or numerical degeneracy.
class InternalError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// Problem instance rejected by validation.
class ValidationError : public ConfigError {
  public:
    enum class Kind { BadModulus, NotAUnit, UnsupportedOrder, PromiseViolated };

    ValidationError(Kind kind, const std::string &what) : ConfigError(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

  private:
    Kind kind_;
};

/// Thrown by mod_inverse when gcd(x, m) != 1.
class NotInvertibleError : public ConfigError {
  public:
    NotInvertibleError(std::uint64_t value, std::uint64_t modulus, std::uint64_t gcd)
        : ConfigError("not invertible: gcd(" + std::to_string(value) + ", " + std::to_string(modulus) +
                      ") = " + std::to_string(gcd)),
          gcd_(gcd) {}

    std::uint64_t gcd() const noexcept { return gcd_; }

  private:
    std::uint64_t gcd_;
};

}  // namespace distlog

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
#include <optional>
#include <vector>

namespace distlog {

/// base^exp mod modulus by square-and-multiply. modulus >= 2.
std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t modulus);

/// base^(2^k) mod modulus, by k squarings.
std::uint64_t mod_pow2k(std::uint64_t base, unsigned k, std::uint64_t modulus);

/// y in (0, modulus) with x*y = 1 (mod modulus). Throws NotInvertibleError.
std::uint64_t mod_inverse(std::uint64_t x, std::uint64_t modulus);

/// Least r >= 1 with a^r = 1 (mod N), by iteration. Throws ValidationError if
/// gcd(a, N) != 1.
std::uint64_t multiplicative_order(std::uint64_t a, std::uint64_t N);

bool is_prime(std::uint64_t n);

/// Smallest c >= 0 with 2^c >= n (n >= 1).
unsigned ceil_log2(std::uint64_t n);

/// Smallest c >= 0 with 2^c >= x, for real x > 0.
unsigned ceil_log2(double x);

/// floor(log2 N) + 1, the qubit count of the work register.
unsigned bit_length(std::uint64_t N);

/// A validated discrete-logarithm instance b = a^g (mod N).
struct ProblemInstance {
    std::uint64_t N = 0;
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    std::uint64_t r = 0;  // order of a, an odd prime
    unsigned L = 0;       // work register width
    // Exponent found by brute force during validation. Only tests and
    // reporting read it; the solvers never do.
    std::optional<std::uint64_t> hidden_g;

    /// ceil(log2 r + 1), the accuracy target (in bits) of the rounding step.
    unsigned accuracy_bits() const { return ceil_log2(r) + 1; }
};

/// Computes r and L, checks every instance invariant, and brute-forces g.
ProblemInstance validate_instance(std::uint64_t N, std::uint64_t a, std::uint64_t b);

/// The orbit {a^k mod N : 0 <= k < r} in order of k.
std::vector<std::uint64_t> power_orbit(std::uint64_t a, std::uint64_t N);

}  // namespace distlog

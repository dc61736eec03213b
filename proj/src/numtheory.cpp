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

#include "distlog/numtheory.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "distlog/errors.hpp"

namespace distlog {

using u128 = unsigned __int128;

namespace {

std::uint64_t mul_mod(std::uint64_t x, std::uint64_t y, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<u128>(x) * y % m);
}

}  // namespace

std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t modulus) {
    if (modulus < 2) {
        throw ConfigError("mod_pow: modulus must be >= 2");
    }
    std::uint64_t result = 1;
    base %= modulus;
    while (exp > 0) {
        if (exp & 1U) {
            result = mul_mod(result, base, modulus);
        }
        base = mul_mod(base, base, modulus);
        exp >>= 1;
    }
    return result;
}

std::uint64_t mod_pow2k(std::uint64_t base, unsigned k, std::uint64_t modulus) {
    if (modulus < 2) {
        throw ConfigError("mod_pow2k: modulus must be >= 2");
    }
    std::uint64_t x = base % modulus;
    for (unsigned i = 0; i < k; ++i) {
        x = mul_mod(x, x, modulus);
    }
    return x;
}

std::uint64_t mod_inverse(std::uint64_t x, std::uint64_t modulus) {
    if (modulus < 2) {
        throw ConfigError("mod_inverse: modulus must be >= 2");
    }
    // Extended Euclid on signed 128-bit to avoid overflow of the coefficients.
    __int128 old_r = static_cast<__int128>(x % modulus), r = modulus;
    __int128 old_s = 1, s = 0;
    while (r != 0) {
        const __int128 q = old_r / r;
        const __int128 tmp_r = old_r - q * r;
        old_r = r;
        r = tmp_r;
        const __int128 tmp_s = old_s - q * s;
        old_s = s;
        s = tmp_s;
    }
    if (old_r != 1) {
        throw NotInvertibleError(x, modulus, static_cast<std::uint64_t>(old_r));
    }
    __int128 y = old_s % static_cast<__int128>(modulus);
    if (y < 0) {
        y += modulus;
    }
    return static_cast<std::uint64_t>(y);
}

std::uint64_t multiplicative_order(std::uint64_t a, std::uint64_t N) {
    if (N < 2) {
        throw ValidationError(ValidationError::Kind::BadModulus, "modulus must be >= 2");
    }
    if (std::gcd(a, N) != 1) {
        throw ValidationError(ValidationError::Kind::NotAUnit,
                              "not a unit mod N: gcd(" + std::to_string(a) + ", " + std::to_string(N) + ") != 1");
    }
    std::uint64_t x = a % N;
    std::uint64_t r = 1;
    while (x != 1 % N) {
        x = mul_mod(x, a, N);
        ++r;
    }
    return r;
}

bool is_prime(std::uint64_t n) {
    if (n < 2) {
        return false;
    }
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            return false;
        }
    }
    return true;
}

unsigned ceil_log2(std::uint64_t n) {
    if (n == 0) {
        throw ConfigError("ceil_log2 of 0");
    }
    return n == 1 ? 0U : static_cast<unsigned>(std::bit_width(n - 1));
}

unsigned ceil_log2(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw ConfigError("ceil_log2: argument must be positive and finite");
    }
    unsigned c = 0;
    while (std::ldexp(1.0, static_cast<int>(c)) < x) {
        ++c;
    }
    return c;
}

unsigned bit_length(std::uint64_t N) { return static_cast<unsigned>(std::bit_width(N)); }

std::vector<std::uint64_t> power_orbit(std::uint64_t a, std::uint64_t N) {
    const std::uint64_t r = multiplicative_order(a, N);
    std::vector<std::uint64_t> orbit;
    orbit.reserve(r);
    std::uint64_t x = 1 % N;
    for (std::uint64_t k = 0; k < r; ++k) {
        orbit.push_back(x);
        x = mul_mod(x, a, N);
    }
    return orbit;
}

ProblemInstance validate_instance(std::uint64_t N, std::uint64_t a, std::uint64_t b) {
    if (N < 3) {
        throw ValidationError(ValidationError::Kind::BadModulus, "modulus N must be >= 3");
    }
    if (N >= (std::uint64_t{1} << 32)) {
        throw ValidationError(ValidationError::Kind::BadModulus, "modulus N must be below 2^32");
    }
    if (a >= N || b >= N || std::gcd(a, N) != 1 || std::gcd(b, N) != 1) {
        throw ValidationError(ValidationError::Kind::NotAUnit,
                              "not a unit mod N: a and b must lie in Z*_N (N=" + std::to_string(N) + ")");
    }
    ProblemInstance inst;
    inst.N = N;
    inst.a = a;
    inst.b = b;
    inst.r = multiplicative_order(a, N);
    inst.L = bit_length(N);
    if (inst.r <= 2 || !is_prime(inst.r)) {
        throw ValidationError(ValidationError::Kind::UnsupportedOrder,
                              "unsupported: order r = " + std::to_string(inst.r) +
                                  " of a must be a prime greater than 2");
    }
    std::uint64_t x = 1;
    for (std::uint64_t g = 0; g < inst.r; ++g) {
        if (x == b) {
            inst.hidden_g = g;
            break;
        }
        x = mul_mod(x, a, N);
    }
    if (!inst.hidden_g) {
        throw ValidationError(ValidationError::Kind::PromiseViolated,
                              "promise violated: b = " + std::to_string(b) + " is not a power of a = " +
                                  std::to_string(a) + " mod " + std::to_string(N));
    }
    return inst;
}

}  // namespace distlog

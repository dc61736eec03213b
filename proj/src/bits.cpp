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

#include "distlog/bits.hpp"

#include <algorithm>

#include "distlog/errors.hpp"

namespace distlog {

using u128 = unsigned __int128;

BitString::BitString(unsigned width, std::uint64_t value) : width_(width), value_(value) {
    if (width == 0 || width > kMaxBitWidth) {
        throw ConfigError("BitString width must be in [1, 64], got " + std::to_string(width));
    }
    if ((value & ~low_mask(width)) != 0) {
        throw ConfigError("BitString value " + std::to_string(value) + " does not fit in " + std::to_string(width) +
                          " bits");
    }
}

BitString BitString::parse(std::string_view text) {
    if (text.empty() || text.size() > kMaxBitWidth) {
        throw ConfigError("bit string must have 1..64 characters");
    }
    std::uint64_t v = 0;
    for (char c : text) {
        if (c != '0' && c != '1') {
            throw ConfigError("bit string may only contain '0' and '1': " + std::string(text));
        }
        v = (v << 1) | static_cast<std::uint64_t>(c - '0');
    }
    return BitString(static_cast<unsigned>(text.size()), v);
}

bool BitString::bit(unsigned i) const {
    if (i < 1 || i > width_) {
        throw InternalError("bit index " + std::to_string(i) + " out of range for width " + std::to_string(width_));
    }
    return ((value_ >> (width_ - i)) & 1U) != 0;
}

std::string BitString::to_string() const {
    std::string out(width_, '0');
    for (unsigned i = 0; i < width_; ++i) {
        if ((value_ >> (width_ - 1 - i)) & 1U) {
            out[i] = '1';
        }
    }
    return out;
}

std::ostream &operator<<(std::ostream &out, const BitString &x) { return out << x.to_string(); }

BitString slice(const BitString &x, unsigned i, unsigned j) {
    if (i < 1 || i > j || j > x.width()) {
        throw InternalError("slice [" + std::to_string(i) + ", " + std::to_string(j) + "] out of range for width " +
                            std::to_string(x.width()));
    }
    const unsigned width = j - i + 1;
    return BitString(width, (x.value() >> (x.width() - j)) & low_mask(width));
}

BitString concat(const BitString &a, const BitString &b) {
    if (a.width() + b.width() > kMaxBitWidth) {
        throw ConfigError("concatenation exceeds 64 bits");
    }
    return BitString(a.width() + b.width(), (a.value() << b.width()) | b.value());
}

std::uint64_t circ_dist(const BitString &x, const BitString &y) {
    if (x.width() != y.width()) {
        throw ConfigError("circ_dist: width mismatch " + std::to_string(x.width()) + " vs " +
                          std::to_string(y.width()));
    }
    const std::uint64_t mask = low_mask(x.width());
    const std::uint64_t forward = (y.value() - x.value()) & mask;
    const std::uint64_t backward = (x.value() - y.value()) & mask;
    return std::min(forward, backward);
}

BitString wrap_add(const BitString &x, std::int64_t b) {
    return BitString(x.width(), (x.value() + static_cast<std::uint64_t>(b)) & low_mask(x.width()));
}

Fraction Fraction::make(std::uint64_t numerator, std::uint64_t denominator) {
    if (denominator == 0) {
        throw ConfigError("fraction with zero denominator");
    }
    return Fraction{numerator % denominator, denominator};
}

Fraction Fraction::shifted(unsigned shift) const {
    u128 rem = numerator;
    for (unsigned k = 0; k < shift; ++k) {
        rem = (rem * 2) % denominator;
    }
    return Fraction{static_cast<std::uint64_t>(rem), denominator};
}

namespace {

struct Expansion {
    std::uint64_t bits;
    std::uint64_t remainder;  // numerator of what is left after the last emitted bit
};

// Emits bits i..j of n/d; remainder/d is the fractional tail after bit j.
Expansion expand(std::uint64_t n, std::uint64_t d, unsigned i, unsigned j) {
    u128 rem = n;
    for (unsigned m = 1; m < i; ++m) {
        rem = (rem * 2) % d;
    }
    std::uint64_t bits = 0;
    for (unsigned m = i; m <= j; ++m) {
        rem *= 2;
        const bool one = rem >= d;
        if (one) {
            rem -= d;
        }
        bits = (bits << 1) | static_cast<std::uint64_t>(one);
    }
    return {bits, static_cast<std::uint64_t>(rem)};
}

}  // namespace

BitString fraction_bits(std::uint64_t numerator, std::uint64_t denominator, unsigned i, unsigned j) {
    if (denominator == 0 || numerator >= denominator) {
        throw ConfigError("fraction_bits: need 0 <= numerator < denominator");
    }
    if (i < 1 || i > j || j - i + 1 > kMaxBitWidth) {
        throw ConfigError("fraction_bits: bad window [" + std::to_string(i) + ", " + std::to_string(j) + "]");
    }
    return BitString(j - i + 1, expand(numerator, denominator, i, j).bits);
}

BitString nearest_window(std::uint64_t numerator, std::uint64_t denominator, unsigned t) {
    if (denominator == 0 || numerator >= denominator) {
        throw ConfigError("nearest_window: need 0 <= numerator < denominator");
    }
    const Expansion e = expand(numerator, denominator, 1, t);
    BitString truncated(t, e.bits);
    // 2^t * w = bits + remainder/denominator.
    const u128 twice = static_cast<u128>(e.remainder) * 2;
    if (twice > denominator) {
        return wrap_add(truncated, 1);
    }
    return truncated;
}

}  // namespace distlog

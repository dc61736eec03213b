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

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

namespace distlog {

inline constexpr unsigned kMaxBitWidth = 64;

/// Fixed-width binary word. Bit positions are 1-based, most significant first:
/// bit 1 of `0110` is 0, bit 2 is 1. The numeric value is the usual unsigned
/// reading, so wraparound arithmetic is always modulo 2^width.
class BitString {
  public:
    BitString(unsigned width, std::uint64_t value);

    /// Parses an ASCII string of '0'/'1', MSB first.
    static BitString parse(std::string_view text);

    unsigned width() const noexcept { return width_; }
    std::uint64_t value() const noexcept { return value_; }

    /// Bit at 1-based position i.
    bool bit(unsigned i) const;

    std::string to_string() const;

    friend bool operator==(const BitString &, const BitString &) = default;

  private:
    unsigned width_;
    std::uint64_t value_;
};

std::ostream &operator<<(std::ostream &out, const BitString &x);

/// 2^width - 1, valid for width in [0, 64].
constexpr std::uint64_t low_mask(unsigned width) {
    return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

/// x_[i,j]: bits i..j inclusive.
BitString slice(const BitString &x, unsigned i, unsigned j);

/// Concatenation a ∘ b (a occupies the high bits).
BitString concat(const BitString &a, const BitString &b);

/// Circular distance d_t(x, y) = min(|x - y|, 2^t - |x - y|).
std::uint64_t circ_dist(const BitString &x, const BitString &y);

/// (x + b) mod 2^|x| at the width of x.
BitString wrap_add(const BitString &x, std::int64_t b);

/// Exact rational in [0, 1), used for phases such as s/r.
struct Fraction {
    std::uint64_t numerator = 0;
    std::uint64_t denominator = 1;

    /// Reduces numerator modulo denominator. Throws on a zero denominator.
    static Fraction make(std::uint64_t numerator, std::uint64_t denominator);

    /// Fractional part of 2^shift * this, i.e. 0.b_{shift+1} b_{shift+2}...
    Fraction shifted(unsigned shift) const;

    double to_double() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }

    friend bool operator==(const Fraction &, const Fraction &) = default;
};

/// Bits i..j of the binary expansion of numerator/denominator, by exact
/// repeated doubling. Requires numerator < denominator, 1 <= i <= j, j-i < 64.
BitString fraction_bits(std::uint64_t numerator, std::uint64_t denominator, unsigned i, unsigned j);

inline BitString fraction_bits(const Fraction &w, unsigned i, unsigned j) {
    return fraction_bits(w.numerator, w.denominator, i, j);
}

/// The t-bit m closest to 2^t * numerator/denominator in circular distance.
/// An exact half is resolved toward the truncation fraction_bits(n, d, 1, t).
BitString nearest_window(std::uint64_t numerator, std::uint64_t denominator, unsigned t);

}  // namespace distlog

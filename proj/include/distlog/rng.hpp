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
#include <random>
#include <span>
#include <vector>

namespace distlog {

/// Seeded 64-bit stream. Sampling helpers avoid std:: distributions so that
/// output is identical across standard library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Stream for trial `index` of a run seeded with `seed`.
    static Rng derive(std::uint64_t seed, std::uint64_t index);

    std::uint64_t next() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t n);

    /// Index drawn from unnormalized non-negative weights.
    std::size_t pick(std::span<const double> weights);

  private:
    std::mt19937_64 engine_;
};

/// Inverse-CDF sampler over a fixed distribution, for repeated draws.
class DiscreteSampler {
  public:
    explicit DiscreteSampler(std::span<const double> weights);

    std::size_t operator()(Rng &rng) const;
    std::size_t size() const { return cumulative_.size(); }

  private:
    std::vector<double> cumulative_;
};

}  // namespace distlog

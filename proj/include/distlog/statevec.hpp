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

#include <complex>
#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "distlog/bits.hpp"
#include "distlog/rng.hpp"

namespace distlog {

using Amplitude = std::complex<double>;

struct Register {
    std::string name;
    unsigned width = 0;
};

/// Ordered named registers. The basis index concatenates register values in
/// declaration order: the first register holds the most significant bits, and
/// each register is MSB-first within its slot.
class RegisterLayout {
  public:
    static constexpr unsigned kMaxQubits = 24;

    explicit RegisterLayout(std::vector<Register> registers);

    unsigned total_width() const noexcept { return total_width_; }
    std::size_t dimension() const noexcept { return std::size_t{1} << total_width_; }
    const std::vector<Register> &registers() const noexcept { return registers_; }

    /// Position of a register in declaration order. Throws ConfigError.
    std::size_t find(std::string_view name) const;
    unsigned width(std::string_view name) const { return registers_[find(name)].width; }
    /// Bit offset of the register's least significant qubit in the basis index.
    unsigned shift(std::size_t position) const { return shifts_[position]; }

    std::uint64_t extract(std::size_t basis_index, std::size_t position) const {
        return (basis_index >> shifts_[position]) & low_mask(registers_[position].width);
    }

    /// Basis index for the given register values (unlisted registers are 0).
    std::size_t compose(const std::map<std::string, std::uint64_t> &values) const;

  private:
    std::vector<Register> registers_;
    std::vector<unsigned> shifts_;
    unsigned total_width_ = 0;
};

struct MeasurementOutcome {
    BitString bits;
    double probability;
};

/// A (register, leading-qubit count) selector for marginals.
struct RegisterPrefix {
    std::string name;
    unsigned width;
};

/// Dense state vector over a RegisterLayout. Mutating operations act in place
/// and keep the norm at 1.
class QuantumState {
  public:
    /// Basis state; registers missing from `assignments` start at 0.
    static QuantumState basis(const RegisterLayout &layout, const std::map<std::string, std::uint64_t> &assignments);

    /// Product state. Each listed register gets the given normalized vector of
    /// length 2^width; the others start at |0>.
    static QuantumState product(const RegisterLayout &layout,
                                const std::map<std::string, std::vector<Amplitude>> &register_states);

    const RegisterLayout &layout() const noexcept { return layout_; }
    std::span<const Amplitude> amplitudes() const noexcept { return amplitudes_; }
    double norm_squared() const;

    void hadamard_layer(std::string_view reg);

    /// |j>_control |x>_work -> |j> |c^j x mod N> for x < N, with
    /// c = base^(2^power_exponent) mod N. Work values x >= N are fixed points.
    void controlled_modmul_power(std::string_view control, std::string_view work, std::uint64_t base,
                                 unsigned power_exponent, std::uint64_t N);

    /// |x>_work -> |multiplier * x mod N> for x < N.
    void modmul(std::string_view work, std::uint64_t multiplier, std::uint64_t N);

    /// |j> -> 2^{-t/2} sum_k e^{-2 pi i jk / 2^t} |k> on one register.
    void inverse_qft(std::string_view reg);
    /// |j> -> 2^{-t/2} sum_k e^{+2 pi i jk / 2^t} |k> on one register.
    void qft(std::string_view reg);

    /// Exact distribution of the first `prefix_width` qubits of a register.
    std::vector<double> marginal_distribution(std::string_view reg, unsigned prefix_width) const;

    /// Exact joint distribution of several register prefixes. The outcome
    /// index concatenates the prefixes in the order given (first is most
    /// significant).
    std::vector<double> joint_marginal(std::span<const RegisterPrefix> prefixes) const;

    /// Samples the leading `prefix_width` qubits of a register and collapses.
    MeasurementOutcome measure_prefix(std::string_view reg, unsigned prefix_width, Rng &rng);

    /// Debug dump: one "index,re,im" row per nonzero amplitude.
    void write_csv(std::ostream &out) const;

  private:
    QuantumState(RegisterLayout layout, std::vector<Amplitude> amplitudes)
        : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {}

    void fourier(std::string_view reg, double sign);

    RegisterLayout layout_;
    std::vector<Amplitude> amplitudes_;
};

/// Total variation distance 0.5 * sum |p - q|. Sizes must match.
double total_variation(std::span<const double> p, std::span<const double> q);

}  // namespace distlog

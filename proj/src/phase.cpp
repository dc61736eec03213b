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

#include "distlog/phase.hpp"

#include <cmath>
#include <numbers>

#include "distlog/errors.hpp"

namespace distlog {

using u128 = unsigned __int128;

namespace {

// sin(pi * num / den) for 0 <= num < den, evaluated on the nearer half.
double sin_pi_fraction(u128 num, u128 den) {
    const u128 folded = 2 * num > den ? den - num : num;
    return std::sin(std::numbers::pi * static_cast<double>(folded) / static_cast<double>(den));
}

void check_phase_args(const Fraction &omega, unsigned t) {
    if (omega.denominator == 0 || omega.numerator >= omega.denominator) {
        throw ConfigError("phase must be a fraction in [0, 1)");
    }
    if (omega.denominator >= (std::uint64_t{1} << 32)) {
        throw ConfigError("phase denominator must be below 2^32");
    }
    if (t < 1 || t > kMaxPhaseWidth) {
        throw ConfigError("counting register width must be in [1, " + std::to_string(kMaxPhaseWidth) + "]");
    }
}

}  // namespace

unsigned phase_register_width(unsigned n, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw ConfigError("epsilon must lie in (0, 1)");
    }
    if (n < 1) {
        throw ConfigError("accuracy n must be >= 1");
    }
    return n + ceil_log2(2.0 + 1.0 / (2.0 * epsilon));
}

PhaseTask PhaseTask::from_accuracy(Fraction omega, unsigned n, double epsilon) {
    return PhaseTask{omega, phase_register_width(n, epsilon), n, epsilon};
}

std::vector<Amplitude> phase_outcome_amplitudes(const Fraction &omega, unsigned t) {
    check_phase_args(omega, t);
    const u128 den = omega.denominator;
    const u128 size = u128{1} << t;
    const u128 period = size * den;             // theta = e / period
    const u128 scaled = size * omega.numerator;  // 2^t * omega * den
    const double inv_size = 1.0 / static_cast<double>(size);
    std::vector<Amplitude> amps(static_cast<std::size_t>(size));
    for (u128 v = 0; v < size; ++v) {
        // theta = omega - v/2^t reduced to [0, 1) as e / period.
        const u128 e = (scaled + period - v * den) % period;
        if (e == 0) {
            amps[static_cast<std::size_t>(v)] = 1.0;
            continue;
        }
        // sum_u e^{2 pi i u theta} = sin(pi 2^t theta) / sin(pi theta) * e^{i pi theta (2^t - 1)}
        const u128 whole = e / den;
        const u128 rem = e % den;
        if (rem == 0) {
            amps[static_cast<std::size_t>(v)] = 0.0;
            continue;
        }
        double numer = sin_pi_fraction(rem, den);
        if (whole & 1U) {
            numer = -numer;
        }
        const double denom = sin_pi_fraction(e, period);
        const u128 angle_num = e * (size - 1) % (2 * period);
        const double angle = std::numbers::pi * static_cast<double>(angle_num) / static_cast<double>(period);
        amps[static_cast<std::size_t>(v)] = std::polar(numer / denom * inv_size, angle);
    }
    return amps;
}

std::vector<double> phase_outcome_distribution(const Fraction &omega, unsigned t) {
    const auto amps = phase_outcome_amplitudes(omega, t);
    std::vector<double> probs(amps.size());
    for (std::size_t i = 0; i < amps.size(); ++i) {
        probs[i] = std::norm(amps[i]);
    }
    return probs;
}

std::vector<double> prefix_marginal(std::span<const double> distribution, unsigned t, unsigned prefix_width) {
    if (distribution.size() != (std::size_t{1} << t) || prefix_width < 1 || prefix_width > t) {
        throw ConfigError("prefix_marginal: bad widths");
    }
    std::vector<double> out(std::size_t{1} << prefix_width, 0.0);
    const unsigned drop = t - prefix_width;
    for (std::size_t m = 0; m < distribution.size(); ++m) {
        out[m >> drop] += distribution[m];
    }
    return out;
}

std::vector<Amplitude> build_eigenstate(const ProblemInstance &instance, std::uint64_t s) {
    if (s >= instance.r) {
        throw ConfigError("eigenstate index s must be < r");
    }
    std::vector<Amplitude> u(std::size_t{1} << instance.L);
    const double norm = 1.0 / std::sqrt(static_cast<double>(instance.r));
    const auto orbit = power_orbit(instance.a, instance.N);
    for (std::uint64_t k = 0; k < instance.r; ++k) {
        // Phase -2 pi (s k mod r) / r, reduced exactly before the float step.
        const std::uint64_t p = (s * k) % instance.r;
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(p) / static_cast<double>(instance.r);
        u[orbit[k]] = std::polar(norm, angle);
    }
    return u;
}

std::uint64_t eigenphase_numerator(const ProblemInstance &instance, std::uint64_t base, std::uint64_t s) {
    const auto u = build_eigenstate(instance, s);
    const RegisterLayout layout({{"C", instance.L}});
    QuantumState state = QuantumState::product(layout, {{"C", u}});
    state.modmul("C", base, instance.N);
    Amplitude overlap{};
    const auto v = state.amplitudes();
    for (std::size_t i = 0; i < u.size(); ++i) {
        overlap += std::conj(u[i]) * v[i];
    }
    if (std::abs(std::abs(overlap) - 1.0) > 1e-9) {
        throw InternalError("u_s is not an eigenvector of multiplication by " + std::to_string(base));
    }
    double turns = std::arg(overlap) / (2.0 * std::numbers::pi);
    if (turns < 0) {
        turns += 1.0;
    }
    const auto r = static_cast<double>(instance.r);
    return static_cast<std::uint64_t>(std::llround(turns * r)) % instance.r;
}

namespace {

QuantumState prepare_phase_state(unsigned t, const ProblemInstance &instance, std::uint64_t base, std::uint64_t s,
                                 unsigned power_exponent) {
    const RegisterLayout layout({{"x", t}, {"C", instance.L}});
    QuantumState state = QuantumState::product(layout, {{"C", build_eigenstate(instance, s)}});
    state.hadamard_layer("x");
    state.controlled_modmul_power("x", "C", base, power_exponent, instance.N);
    state.inverse_qft("x");
    return state;
}

}  // namespace

BitString run_phase_estimation(const PhaseTask &task, const ProblemInstance &instance, std::uint64_t base,
                               std::uint64_t s, unsigned power_exponent, Rng &rng) {
    QuantumState state = prepare_phase_state(task.t, instance, base, s, power_exponent);
    return state.measure_prefix("x", task.t, rng).bits;
}

std::vector<double> phase_estimation_marginal(unsigned t, const ProblemInstance &instance, std::uint64_t base,
                                              std::uint64_t s, unsigned power_exponent) {
    return prepare_phase_state(t, instance, base, s, power_exponent).marginal_distribution("x", t);
}

AccuracyReport check_accuracy_bound(const Fraction &omega, unsigned t, unsigned n, double epsilon) {
    if (n < 1 || n > t) {
        throw ConfigError("accuracy bits n must lie in [1, t]");
    }
    const auto dist = phase_outcome_distribution(omega, t);
    AccuracyReport report;
    report.bound = 1.0 - epsilon;

    const BitString target = fraction_bits(omega, 1, t);
    const std::uint64_t radius = std::uint64_t{1} << (t - n);
    for (std::size_t m = 0; m < dist.size(); ++m) {
        if (circ_dist(BitString(t, m), target) < radius) {
            report.full_mass += dist[m];
        }
    }
    report.holds = report.full_mass >= report.bound;

    for (unsigned m = n; m <= t; ++m) {
        const auto marginal = prefix_marginal(dist, t, m);
        const BitString prefix_target = fraction_bits(omega, 1, m);
        const std::uint64_t limit = std::uint64_t{1} << (m - n);
        double mass = 0.0;
        for (std::size_t x = 0; x < marginal.size(); ++x) {
            if (circ_dist(BitString(m, x), prefix_target) <= limit) {
                mass += marginal[x];
            }
        }
        report.prefix_masses.push_back(mass);
        report.holds = report.holds && mass >= report.bound;
    }
    return report;
}

}  // namespace distlog

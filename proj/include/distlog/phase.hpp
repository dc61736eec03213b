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
#include <span>
#include <vector>

#include "distlog/bits.hpp"
#include "distlog/numtheory.hpp"
#include "distlog/rng.hpp"
#include "distlog/statevec.hpp"

namespace distlog {

/// Largest counting register the closed-form routines accept.
inline constexpr unsigned kMaxPhaseWidth = 26;

/// n + ceil(log2(2 + 1/(2 epsilon))): counting width that yields n accurate
/// bits with failure probability at most epsilon.
unsigned phase_register_width(unsigned n, double epsilon);

/// One phase-estimation problem: estimate omega to n bits with a t-qubit
/// counting register.
struct PhaseTask {
    Fraction omega;
    unsigned t = 0;
    unsigned n = 0;
    double epsilon = 0.0;

    static PhaseTask from_accuracy(Fraction omega, unsigned n, double epsilon);
};

/// Amplitudes of 2^{-t} sum_{u,v} e^{2 pi i u (omega - v/2^t)} |v>, the
/// counting register after the inverse transform. Closed form with exact
/// rational angle reduction.
std::vector<Amplitude> phase_outcome_amplitudes(const Fraction &omega, unsigned t);

/// |amplitude|^2 of the above; sums to 1.
std::vector<double> phase_outcome_distribution(const Fraction &omega, unsigned t);

/// Distribution of the leading `prefix_width` bits of a t-bit outcome.
std::vector<double> prefix_marginal(std::span<const double> distribution, unsigned t, unsigned prefix_width);

/// |u_s> = r^{-1/2} sum_k e^{-2 pi i s k / r} |a^k mod N>, length 2^L.
std::vector<Amplitude> build_eigenstate(const ProblemInstance &instance, std::uint64_t s);

/// Numerator p of the eigenphase p/r of multiplication by `base` on |u_s>,
/// read off the simulator by applying the operator and taking the overlap.
/// For base = a this is s; for base = b it is s*g mod r, found without g.
std::uint64_t eigenphase_numerator(const ProblemInstance &instance, std::uint64_t base, std::uint64_t s);

/// Runs phase estimation on the simulator: counting register of task.t
/// qubits, work register loaded with |u_s>, controlled powers of
/// base^(2^power_exponent), inverse transform, full measurement.
BitString run_phase_estimation(const PhaseTask &task, const ProblemInstance &instance, std::uint64_t base,
                               std::uint64_t s, unsigned power_exponent, Rng &rng);

/// The exact counting-register distribution of the same circuit.
std::vector<double> phase_estimation_marginal(unsigned t, const ProblemInstance &instance, std::uint64_t base,
                                              std::uint64_t s, unsigned power_exponent);

struct AccuracyReport {
    bool holds = false;
    double bound = 0.0;        // 1 - epsilon
    double full_mass = 0.0;    // P[d_t(m, omega_{1,t}) < 2^{t-n}]
    std::vector<double> prefix_masses;  // P[d_m(m_[1,m], omega_{1,m}) <= 2^{m-n}], m = n..t
};

/// Sums the exact outcome distribution over the accuracy events for the full
/// register and for every prefix length m in [n, t].
AccuracyReport check_accuracy_bound(const Fraction &omega, unsigned t, unsigned n, double epsilon);

}  // namespace distlog

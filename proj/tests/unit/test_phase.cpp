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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "distlog/errors.hpp"
#include "distlog/phase.hpp"

namespace distlog {
namespace {

constexpr double kPi = std::numbers::pi;

// |2^-t sum_{u,v} e^{2 pi i u (omega - v/2^t)}|^2 evaluated term by term.
std::vector<double> brute_force_distribution(std::uint64_t num, std::uint64_t den, unsigned t) {
    const std::size_t n = std::size_t{1} << t;
    const double omega = static_cast<double>(num) / static_cast<double>(den);
    std::vector<double> out(n);
    for (std::size_t v = 0; v < n; ++v) {
        Amplitude sum = 0.0;
        for (std::size_t u = 0; u < n; ++u) {
            const double turns = static_cast<double>(u) * (omega - static_cast<double>(v) / static_cast<double>(n));
            sum += std::polar(1.0, 2 * kPi * (turns - std::floor(turns)));
        }
        out[v] = std::norm(sum / static_cast<double>(n));
    }
    return out;
}

TEST(PhaseWidth, FromAccuracyAndEpsilon) {
    EXPECT_EQ(phase_register_width(3, 0.25), 3u + 2u);  // ceil log2 4 = 2
    EXPECT_EQ(phase_register_width(4, 0.1), 4u + 3u);   // ceil log2 7 = 3
    EXPECT_EQ(phase_register_width(1, 0.5), 1u + 2u);   // ceil log2 3 = 2
    EXPECT_THROW(phase_register_width(3, 0.0), ConfigError);
    EXPECT_THROW(phase_register_width(3, 1.0), ConfigError);
    EXPECT_EQ(PhaseTask::from_accuracy(Fraction::make(1, 5), 3, 0.25).t, 5u);
}

TEST(OutcomeDistribution, ExactPhasesAreOneHot) {
    auto p = phase_outcome_distribution(Fraction::make(1, 4), 2);
    EXPECT_EQ(p, (std::vector<double>{0, 1, 0, 0}));
    p = phase_outcome_distribution(Fraction::make(0, 7), 3);
    EXPECT_DOUBLE_EQ(p[0], 1.0);
    for (std::size_t v = 1; v < p.size(); ++v) EXPECT_EQ(p[v], 0.0);
}

TEST(OutcomeDistribution, OneFifthMatchesTheDoubleSum) {
    const auto p = phase_outcome_distribution(Fraction::make(1, 5), 4);
    const auto ref = brute_force_distribution(1, 5, 4);
    for (std::size_t v = 0; v < p.size(); ++v) EXPECT_NEAR(p[v], ref[v], 1e-12);
}

TEST(OutcomeDistribution, ClosedFormMatchesDoubleSumOnRandomPhases) {
    Rng rng(31);
    for (int n = 0; n < 200; ++n) {
        const unsigned t = 1 + static_cast<unsigned>(rng.below(8));
        const std::uint64_t den = 1 + rng.below(1000);
        const std::uint64_t num = rng.below(den);
        const auto p = phase_outcome_distribution(Fraction::make(num, den), t);
        const auto ref = brute_force_distribution(num, den, t);
        double total = 0.0;
        for (std::size_t v = 0; v < p.size(); ++v) {
            ASSERT_NEAR(p[v], ref[v], 1e-12) << num << "/" << den << " t=" << t << " v=" << v;
            total += p[v];
        }
        ASSERT_NEAR(total, 1.0, 1e-12);
    }
}

TEST(OutcomeDistribution, AmplitudesMatchTheSimulator) {
    // Phase estimation circuit on |u_s>: the counting register factorizes and
    // carries exactly the closed-form amplitudes.
    const auto inst = validate_instance(11, 3, 9);
    const unsigned t = 6;
    for (std::uint64_t s = 0; s < inst.r; ++s) {
        RegisterLayout layout({{"x", t}, {"C", inst.L}});
        auto state = QuantumState::product(layout, {{"C", build_eigenstate(inst, s)}});
        state.hadamard_layer("x");
        state.controlled_modmul_power("x", "C", inst.a, 0, inst.N);
        state.inverse_qft("x");
        const auto amps = phase_outcome_amplitudes(Fraction::make(s, inst.r), t);
        const auto u = build_eigenstate(inst, s);
        for (std::uint64_t v = 0; v < (1u << t); ++v) {
            for (std::uint64_t x = 0; x < 16; ++x) {
                const auto got = state.amplitudes()[layout.compose({{"x", v}, {"C", x}})];
                ASSERT_NEAR(std::abs(got - amps[v] * u[x]), 0.0, 1e-10);
            }
        }
    }
}

TEST(OutcomeDistribution, HalfStepShiftRotatesByOne) {
    // omega + 1/2^t as an exact fraction: (num * 2^t + den) / (den * 2^t).
    for (std::uint64_t den : {3u, 5u, 7u, 13u}) {
        for (std::uint64_t num = 0; num < den; ++num) {
            for (unsigned t = 1; t <= 7; ++t) {
                const std::uint64_t size = std::uint64_t{1} << t;
                const auto base = phase_outcome_distribution(Fraction::make(num, den), t);
                const auto moved = phase_outcome_distribution(Fraction::make(num * size + den, den * size), t);
                for (std::uint64_t v = 0; v < size; ++v) ASSERT_NEAR(moved[(v + 1) % size], base[v], 1e-12);
            }
        }
    }
}

TEST(PrefixMarginal, SumsOverTrailingBits) {
    const std::vector<double> p{0.1, 0.2, 0.3, 0.4, 0.0, 0.0, 0.0, 0.0};
    const auto m = prefix_marginal(p, 3, 1);
    EXPECT_NEAR(m[0], 1.0, 1e-15);
    EXPECT_NEAR(m[1], 0.0, 1e-15);
    const auto m2 = prefix_marginal(p, 3, 2);
    EXPECT_NEAR(m2[0], 0.3, 1e-15);
    EXPECT_NEAR(m2[1], 0.7, 1e-15);
    EXPECT_EQ(prefix_marginal(p, 3, 3), p);
}

TEST(Eigenstate, ZeroIsUniformOnTheOrbit) {
    const auto inst = validate_instance(11, 3, 9);
    const auto u = build_eigenstate(inst, 0);
    ASSERT_EQ(u.size(), 16u);
    const auto orbit = power_orbit(3, 11);
    for (std::uint64_t x = 0; x < 16; ++x) {
        const bool on = std::find(orbit.begin(), orbit.end(), x) != orbit.end();
        EXPECT_NEAR(std::abs(u[x] - Amplitude(on ? 1 / std::sqrt(5.0) : 0.0)), 0.0, 1e-15);
    }
}

TEST(Eigenstate, OrthonormalAndSumToOne) {
    const auto inst = validate_instance(23, 2, 13);  // r = 11
    std::vector<std::vector<Amplitude>> us;
    for (std::uint64_t s = 0; s < inst.r; ++s) us.push_back(build_eigenstate(inst, s));
    for (std::uint64_t s = 0; s < inst.r; ++s) {
        for (std::uint64_t q = 0; q < inst.r; ++q) {
            Amplitude dot = 0.0;
            for (std::size_t x = 0; x < us[s].size(); ++x) dot += std::conj(us[s][x]) * us[q][x];
            ASSERT_NEAR(std::abs(dot - Amplitude(s == q ? 1.0 : 0.0)), 0.0, 1e-12);
        }
    }
    std::vector<Amplitude> sum(us[0].size(), 0.0);
    for (const auto &u : us)
        for (std::size_t x = 0; x < u.size(); ++x) sum[x] += u[x] / std::sqrt(static_cast<double>(inst.r));
    for (std::size_t x = 0; x < sum.size(); ++x) ASSERT_NEAR(std::abs(sum[x] - Amplitude(x == 1 ? 1.0 : 0.0)), 0.0, 1e-12);
}

TEST(Eigenstate, EigenvaluesOfBothMultipliers) {
    const auto inst = validate_instance(11, 3, 9);
    for (std::uint64_t s = 0; s < inst.r; ++s) {
        for (auto [base, numerator] : {std::pair{inst.a, s}, std::pair{inst.b, s * *inst.hidden_g % inst.r}}) {
            RegisterLayout layout({{"C", inst.L}});
            auto state = QuantumState::product(layout, {{"C", build_eigenstate(inst, s)}});
            state.modmul("C", base, inst.N);
            const auto u = build_eigenstate(inst, s);
            const Amplitude phase = std::polar(1.0, 2 * kPi * static_cast<double>(numerator) / inst.r);
            for (std::size_t x = 0; x < u.size(); ++x)
                ASSERT_NEAR(std::abs(state.amplitudes()[x] - phase * u[x]), 0.0, 1e-10);
            EXPECT_EQ(eigenphase_numerator(inst, base, s), numerator);
        }
    }
}

TEST(RunPhaseEstimation, ZeroEigenphaseAlwaysReadsZero) {
    const auto inst = validate_instance(11, 3, 9);
    const auto task = PhaseTask::from_accuracy(Fraction::make(0, 5), 3, 0.25);
    Rng rng(1);
    for (int i = 0; i < 20; ++i) EXPECT_EQ(run_phase_estimation(task, inst, 3, 0, 0, rng).value(), 0u);
}

TEST(RunPhaseEstimation, ExactMarginalMatchesClosedForm) {
    const auto inst = validate_instance(11, 3, 9);
    for (unsigned t : {4u, 7u}) {
        for (std::uint64_t s = 0; s < inst.r; ++s) {
            const auto sim = phase_estimation_marginal(t, inst, inst.a, s, 0);
            const auto exact = phase_outcome_distribution(Fraction::make(s, inst.r), t);
            EXPECT_LE(total_variation(sim, exact), 1e-9);
        }
    }
}

TEST(RunPhaseEstimation, EmpiricalDistributionIsClose) {
    const auto inst = validate_instance(11, 3, 9);
    const auto task = PhaseTask::from_accuracy(Fraction::make(2, 5), 3, 0.25);
    std::vector<double> counts(std::size_t{1} << task.t, 0.0);
    Rng rng(99);
    const int runs = 10000;
    for (int i = 0; i < runs; ++i) ++counts[run_phase_estimation(task, inst, inst.a, 2, 0, rng).value()];
    for (auto &c : counts) c /= runs;
    EXPECT_LE(total_variation(counts, phase_outcome_distribution(task.omega, task.t)), 0.05);
}

TEST(RunPhaseEstimation, RaisedPowerEstimatesShiftedPhase) {
    const auto inst = validate_instance(23, 2, 13);  // r = 11
    const unsigned t = 6;
    for (unsigned shift = 0; shift < 4; ++shift) {
        for (std::uint64_t s = 0; s < inst.r; ++s) {
            const auto sim = phase_estimation_marginal(t, inst, inst.a, s, shift);
            const auto exact = phase_outcome_distribution(Fraction::make(s, inst.r).shifted(shift), t);
            ASSERT_LE(total_variation(sim, exact), 1e-9);
        }
    }
}

TEST(AccuracyBound, Examples) {
    const auto task = PhaseTask::from_accuracy(Fraction::make(1, 5), 3, 0.25);
    const auto report = check_accuracy_bound(task.omega, task.t, task.n, task.epsilon);
    EXPECT_TRUE(report.holds);
    EXPECT_GE(report.full_mass, 0.75);
    EXPECT_EQ(report.prefix_masses.size(), task.t - task.n + 1);

    const auto exact = check_accuracy_bound(Fraction::make(3, 8), phase_register_width(3, 0.25), 3, 0.25);
    EXPECT_DOUBLE_EQ(exact.full_mass, 1.0);
    for (double m : exact.prefix_masses) EXPECT_DOUBLE_EQ(m, 1.0);
}

TEST(AccuracyBound, MassesRecomputedIndependently) {
    // Full-register event d_t(m, omega_{1,t}) < 2^{t-n}, summed directly.
    const auto omega = Fraction::make(4, 13);
    const unsigned n = 4;
    const unsigned t = phase_register_width(n, 0.1);
    const auto p = phase_outcome_distribution(omega, t);
    const auto target = fraction_bits(omega, 1, t);
    double mass = 0.0;
    for (std::uint64_t v = 0; v < p.size(); ++v)
        if (circ_dist(BitString(t, v), target) < (std::uint64_t{1} << (t - n))) mass += p[v];
    EXPECT_NEAR(check_accuracy_bound(omega, t, n, 0.1).full_mass, mass, 1e-15);
}

TEST(AccuracyBound, HoldsAcrossSmallPrimeDenominators) {
    for (std::uint64_t r : {3u, 5u, 7u, 11u, 13u}) {
        for (double eps : {0.5, 0.25, 0.1}) {
            for (unsigned n = 1; n <= 4; ++n) {
                const unsigned t = phase_register_width(n, eps);
                for (std::uint64_t s = 0; s < r; ++s) {
                    const auto report = check_accuracy_bound(Fraction::make(s, r), t, n, eps);
                    ASSERT_TRUE(report.holds) << s << "/" << r << " n=" << n << " eps=" << eps;
                }
            }
        }
    }
}

}  // namespace
}  // namespace distlog

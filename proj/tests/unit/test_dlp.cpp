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

#include "distlog/dlp.hpp"
#include "distlog/errors.hpp"
#include "distlog/phase.hpp"

namespace distlog {
namespace {

TEST(ShorConfig, RegisterWidth) {
    const auto inst = validate_instance(11, 3, 9);
    const auto config = ShorConfig::make(inst, 0.25);
    EXPECT_EQ(config.t, 7u);  // ceil log2 6 = 3, plus ceil(log2 5 + 1) = 4
    EXPECT_EQ(2 * config.t + inst.L, 18u);
    EXPECT_EQ(ShorConfig::make(inst, 0.5).t, 6u);
    EXPECT_THROW(ShorConfig::make(inst, 1.5), ConfigError);
    EXPECT_THROW(ShorConfig::make(inst, 0.25, 0), ConfigError);
}

TEST(Mode, ParsesAndRenders) {
    EXPECT_EQ(parse_mode("analytic"), Mode::Analytic);
    EXPECT_EQ(to_string(parse_mode("statevector")), "statevector");
    EXPECT_THROW(parse_mode("qpu"), ConfigError);
}

TEST(PrepareState, LayoutAndBudget) {
    const auto inst = validate_instance(11, 3, 9);
    const auto state = prepare_shor_state(inst, 7);
    EXPECT_EQ(state.layout().total_width(), 18u);
    EXPECT_NEAR(state.norm_squared(), 1.0, 1e-12);
    EXPECT_THROW(prepare_shor_state(inst, 11), ConfigError);
}

// (1/r) sum_s psi(s/r) and the joint (1/r) sum_s psi(s/r) (x) psi(sg/r),
// built from the closed form with the known exponent.
std::vector<double> reference_joint(const ProblemInstance &inst, unsigned t) {
    const std::size_t size = std::size_t{1} << t;
    std::vector<double> joint(size * size, 0.0);
    for (std::uint64_t s = 0; s < inst.r; ++s) {
        const auto pa = phase_outcome_distribution(Fraction::make(s, inst.r), t);
        const auto pb = phase_outcome_distribution(Fraction::make(s * *inst.hidden_g % inst.r, inst.r), t);
        for (std::size_t i = 0; i < size; ++i)
            for (std::size_t j = 0; j < size; ++j) joint[i * size + j] += pa[i] * pb[j] / static_cast<double>(inst.r);
    }
    return joint;
}

TEST(QuantumStage, StatevectorJointMatchesTheEigenbasisExpansion) {
    const auto inst = validate_instance(11, 3, 9);
    const unsigned t = 7;
    const auto sv = shor_joint_distribution_statevector(inst, t);
    const auto ref = reference_joint(inst, t);
    EXPECT_LE(total_variation(sv, ref), 1e-9);
    EXPECT_LE(total_variation(shor_joint_distribution_analytic(inst, t), ref), 1e-9);

    const auto state = prepare_shor_state(inst, t);
    const auto reg1 = state.marginal_distribution("1a", t);
    std::vector<double> mixed(std::size_t{1} << t, 0.0);
    for (std::uint64_t s = 0; s < inst.r; ++s) {
        const auto p = phase_outcome_distribution(Fraction::make(s, inst.r), t);
        for (std::size_t v = 0; v < p.size(); ++v) mixed[v] += p[v] / 5.0;
    }
    EXPECT_LE(total_variation(reg1, mixed), 1e-9);
}

TEST(QuantumStage, AnalyticZeroBranchReadsZero) {
    const auto inst = validate_instance(11, 3, 9);
    AnalyticShorStage stage(inst, 7);
    Rng rng(4);
    int zero_branches = 0;
    for (int i = 0; i < 200; ++i) {
        const auto sample = stage.sample(rng);
        ASSERT_TRUE(sample.latent_s.has_value());
        if (*sample.latent_s == 0) {
            ++zero_branches;
            EXPECT_EQ(sample.m_a.value(), 0u);
            EXPECT_EQ(sample.m_b.value(), 0u);
        }
    }
    EXPECT_GT(zero_branches, 0);
}

TEST(QuantumStage, SingleShotStatevectorReturnsFullWidths) {
    const auto inst = validate_instance(11, 3, 9);
    const auto config = ShorConfig::make(inst, 0.25);
    Rng rng(5);
    const auto sample = quantum_stage_statevector(inst, config, rng);
    EXPECT_EQ(sample.m_a.width(), 7u);
    EXPECT_EQ(sample.m_b.width(), 7u);
    EXPECT_FALSE(sample.latent_s.has_value());
}

TEST(Postprocess, RoundingExamples) {
    const auto inst = validate_instance(11, 3, 9);
    EXPECT_EQ(round_scaled(BitString::parse("00110"), 5), 1u);
    EXPECT_EQ(round_scaled(BitString::parse("01101"), 5), 2u);
    // 0.5 exactly: 16 * 5 / 32 = 2.5 rounds up.
    EXPECT_EQ(round_scaled(BitString::parse("10000"), 5), 3u);
    // Near 1 the estimate rounds to r, which aliases s = 0.
    EXPECT_EQ(round_scaled(BitString::parse("11111"), 5), 5u);

    const auto ok = postprocess(BitString::parse("00110"), BitString::parse("01101"), inst);
    EXPECT_EQ(ok.status, PostprocessResult::Status::Ok);
    EXPECT_EQ(ok.mhat_a, 1u);
    EXPECT_EQ(ok.mhat_b, 2u);
    EXPECT_EQ(ok.g_hat, 2u);

    const auto zero = postprocess(BitString::parse("00000"), BitString::parse("01101"), inst);
    EXPECT_EQ(zero.status, PostprocessResult::Status::ZeroEstimate);
    EXPECT_FALSE(zero.g_hat.has_value());

    const auto wrapped = postprocess(BitString::parse("11111"), BitString::parse("01101"), inst);
    EXPECT_EQ(wrapped.status, PostprocessResult::Status::ZeroEstimate);
}

TEST(Postprocess, RoundingMatchesRationalComparison) {
    for (unsigned w = 1; w <= 9; ++w) {
        for (std::uint64_t r : {3u, 5u, 7u, 11u}) {
            for (std::uint64_t m = 0; m < (1u << w); ++m) {
                // Largest k with k - 1/2 <= m r / 2^w, i.e. 2^w (2k - 1) <= 2 m r.
                std::uint64_t k = 0;
                while ((std::uint64_t{1} << w) * (2 * (k + 1) - 1) <= 2 * m * r) ++k;
                ASSERT_EQ(round_scaled(BitString(w, m), r), k);
            }
        }
    }
}

TEST(Postprocess, TrivialExponent) {
    const auto inst = validate_instance(11, 3, 1);
    const auto post = postprocess(BitString::parse("0110011"), BitString::parse("0000001"), inst);
    EXPECT_EQ(post.status, PostprocessResult::Status::Ok);
    EXPECT_EQ(post.g_hat, 0u);
}

TEST(Postprocess, NeverReturnsAnUnverifiedExponent) {
    const auto inst = validate_instance(23, 2, 13);
    for (std::uint64_t ma = 0; ma < 256; ++ma) {
        for (std::uint64_t mb = 0; mb < 256; ++mb) {
            const auto post = postprocess(BitString(8, ma), BitString(8, mb), inst);
            if (post.g_hat) {
                ASSERT_EQ(post.status, PostprocessResult::Status::Ok);
                ASSERT_EQ(mod_pow(inst.a, *post.g_hat, inst.N), inst.b);
            }
        }
    }
}

TEST(Postprocess, RoundingWindowSoundness) {
    // Every readout pair within 2^{-n} of (s/r, sg/r) with s != 0 yields g.
    const auto inst = validate_instance(11, 3, 9);
    const unsigned t = ShorConfig::make(inst, 0.25).t;
    const unsigned n = inst.accuracy_bits();
    const std::uint64_t size = std::uint64_t{1} << t;
    const std::uint64_t r = inst.r;
    // |m/2^t - p/r| <= 2^{-n}  <=>  |m r - p 2^t| 2^n <= r 2^t, circularly.
    auto close = [&](std::uint64_t m, std::uint64_t p) {
        const std::int64_t diff = std::llabs(static_cast<std::int64_t>(m * r) - static_cast<std::int64_t>(p * size));
        const std::int64_t circ = std::min<std::int64_t>(diff, static_cast<std::int64_t>(r * size) - diff);
        return (circ << n) <= static_cast<std::int64_t>(r * size);
    };
    int checked = 0;
    for (std::uint64_t s = 1; s < r; ++s) {
        const std::uint64_t sg = s * *inst.hidden_g % r;
        for (std::uint64_t ma = 0; ma < size; ++ma) {
            if (!close(ma, s)) continue;
            for (std::uint64_t mb = 0; mb < size; ++mb) {
                if (!close(mb, sg)) continue;
                const auto post = postprocess(BitString(t, ma), BitString(t, mb), inst);
                ASSERT_EQ(post.g_hat, inst.hidden_g) << "s=" << s << " ma=" << ma << " mb=" << mb;
                ++checked;
            }
        }
    }
    EXPECT_GT(checked, 0);
}

TEST(ExactSuccess, MeetsTheBoundForSmallOrders) {
    const std::pair<std::uint64_t, std::uint64_t> bases[] = {{7, 2}, {11, 3}, {29, 7}};  // r = 3, 5, 7
    for (auto [N, a] : bases) {
        const auto inst = validate_instance(N, a, mod_pow(a, 2, N));
        for (double eps : {0.5, 0.25}) {
            const unsigned t = shor_register_width(inst.r, eps);
            const double bound = static_cast<double>(inst.r - 1) / inst.r * (1 - eps);
            const double analytic = exact_success_probability(shor_joint_distribution_analytic(inst, t), t, inst);
            EXPECT_GE(analytic, bound) << "r=" << inst.r << " eps=" << eps;
            if (2 * t + inst.L <= RegisterLayout::kMaxQubits) {
                const double sv = exact_success_probability(shor_joint_distribution_statevector(inst, t), t, inst);
                EXPECT_NEAR(sv, analytic, 1e-9);
            }
        }
    }
}

TEST(Solve, StatevectorSucceedsWithRetries) {
    const auto inst = validate_instance(11, 3, 9);
    auto config = ShorConfig::make(inst, 0.25, 20);
    StatevectorShorStage stage(inst, config.t);
    int successes = 0;
    for (std::uint64_t trial = 0; trial < 300; ++trial) {
        auto rng = Rng::derive(7, trial);
        const auto record = solve(inst, config, stage, rng);
        ASSERT_LE(record.retries, 20u);
        ASSERT_GE(record.retries, 1u);
        if (record.success) {
            ++successes;
            ASSERT_EQ(mod_pow(inst.a, *record.g_hat, inst.N), inst.b);
        }
    }
    EXPECT_GE(successes, 299);
}

TEST(Solve, AnalyticRecordsLatentBranch) {
    const auto inst = validate_instance(11, 3, 9);
    const auto config = ShorConfig::make(inst, 0.25, 1, Mode::Analytic);
    AnalyticShorStage stage(inst, config.t);
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        auto rng = Rng::derive(3, trial);
        const auto record = solve(inst, config, stage, rng);
        ASSERT_TRUE(record.latent_s.has_value());
        if (*record.latent_s == 0) ASSERT_FALSE(record.success);
        EXPECT_EQ(record.retries, 1u);
    }
}

TEST(Solve, SameSeedSameRecord) {
    const auto inst = validate_instance(11, 3, 9);
    const auto config = ShorConfig::make(inst, 0.25, 5);
    auto r1 = Rng::derive(42, 3), r2 = Rng::derive(42, 3);
    const auto a = solve(inst, config, r1);
    const auto b = solve(inst, config, r2);
    EXPECT_EQ(a.m_a, b.m_a);
    EXPECT_EQ(a.m_b, b.m_b);
    EXPECT_EQ(a.retries, b.retries);
}

}  // namespace
}  // namespace distlog

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

#include <chrono>
#include <cstring>
#include <functional>

#include "distlog/dist.hpp"
#include "distlog/errors.hpp"
#include "distlog/phase.hpp"

namespace distlog {
namespace {

BitString B(const char *text) { return BitString::parse(text); }

const ProblemInstance &acceptance_instance() {
    static const ProblemInstance inst = validate_instance(11, 3, 9);
    return inst;
}

const DistributedSimulator &acceptance_simulator() {
    static const DistributedSimulator sim(acceptance_instance(), make_plan(acceptance_instance(), 2, 2, 0.25, 0.2));
    return sim;
}

// Accuracy widths n = ceil(log2 r + 1) of the orders used for Correct tests.
struct Combo {
    std::uint64_t r;
    unsigned k, h;
};

std::vector<Combo> feasible_combos() {
    std::vector<Combo> out;
    for (std::uint64_t r : {5u, 7u, 11u, 13u}) {
        for (unsigned k : {2u, 3u}) {
            for (unsigned h : {2u, 3u}) {
                try {
                    make_plan_for_width(ceil_log2(r) + 1, k, h, 0.25, 0.2);
                    out.push_back({r, k, h});
                } catch (const ConfigError &) {
                }
            }
        }
    }
    return out;
}

TEST(Plan, WorkedExample) {
    const auto plan = make_plan(acceptance_instance(), 2, 2, 0.25, 0.2);
    EXPECT_EQ(plan.l, (std::vector<unsigned>{1, 2, 5}));
    EXPECT_EQ(plan.t, (std::vector<unsigned>{8, 8}));
    EXPECT_EQ(plan.measured, (std::vector<unsigned>{4, 4}));
    EXPECT_EQ(plan.total_width, 5u);
}

TEST(Plan, SplitPointsFollowTheFloorRule) {
    const auto plan = make_plan_for_width(11, 4, 3, 0.5, 0.1);  // W = 12
    EXPECT_EQ(plan.l, (std::vector<unsigned>{1, 3, 6, 9, 12}));
    const unsigned extra = ceil_log2(2.0 + 4 / 0.1);  // 42 -> 6
    for (unsigned j = 0; j < 3; ++j) {
        EXPECT_EQ(plan.t[j], plan.l[j + 1] + 3 - plan.l[j] + extra);
        EXPECT_EQ(plan.measured[j], plan.l[j + 1] + 3 + 1 - plan.l[j]);
    }
    EXPECT_EQ(plan.t[3], 12 + 1 - 9 + extra);
    EXPECT_EQ(plan.measured[3], 4u);
}

TEST(Plan, Rejections) {
    const auto &inst = acceptance_instance();
    try {
        make_plan(inst, 3, 2, 0.25, 0.2);
        FAIL() << "k = 3 accepted for r = 5";
    } catch (const ConfigError &e) {
        EXPECT_NE(std::string(e.what()).find("plan infeasible"), std::string::npos);
    }
    EXPECT_THROW(make_plan(inst, 2, 3, 0.25, 0.2), ConfigError);
    EXPECT_THROW(make_plan(inst, 2, 1, 0.25, 0.2), ConfigError);
    EXPECT_THROW(make_plan(inst, 1, 2, 0.25, 0.2), ConfigError);
    EXPECT_THROW(make_plan(inst, 2, 2, 0.25, 0.25), ConfigError);
    EXPECT_THROW(make_plan(inst, 2, 2, 0.25, 0.3), ConfigError);
    EXPECT_THROW(make_plan(inst, 2, 2, 1.0, 0.2), ConfigError);
}

TEST(Plan, Defaults) {
    const auto plan = make_plan(acceptance_instance(), 2, std::nullopt, 0.25);
    EXPECT_EQ(plan.h, 2u);  // floor(5 / 2) caps the default of 3
    EXPECT_DOUBLE_EQ(plan.epsilon_prime, 0.125);
    EXPECT_EQ(default_overlap(12, 2), 3u);
    EXPECT_EQ(default_overlap(6, 3), 2u);
}

TEST(Correct, WorkedExample) {
    const auto plan = make_plan(acceptance_instance(), 2, 2, 0.25, 0.2);
    const std::vector<BitString> m{B("0101"), B("1110")};
    const auto result = correct(m, plan);
    EXPECT_EQ(result.output, B("01110"));
    EXPECT_EQ(result.shifts, (std::vector<std::int64_t>{2}));
    EXPECT_FALSE(result.fallback);
    EXPECT_EQ(circ_dist(result.output, B("01101")), 1u);
    EXPECT_EQ(circ_dist(B("1110"), slice(B("01101"), 2, 5)), 1u);

    const std::int64_t perturbations[] = {-1, 1};
    const auto oracle = brute_force_correct_oracle(B("01101"), perturbations, plan);
    EXPECT_TRUE(oracle.ok);
    EXPECT_EQ(oracle.output, B("01110"));
}

TEST(Correct, ExactWindowsReassembleTheTarget) {
    const auto plan = make_plan_for_width(11, 4, 3, 0.5, 0.1);
    const auto w = BitString::parse("101100111010");
    std::vector<BitString> xs;
    for (unsigned j = 0; j + 1 < plan.k; ++j) xs.push_back(slice(w, plan.l[j], plan.l[j + 1] + plan.h));
    xs.push_back(slice(w, plan.l[plan.k - 1], plan.l[plan.k]));
    const auto result = correct(xs, plan);
    EXPECT_EQ(result.output, w);
    for (auto q : result.shifts) EXPECT_EQ(q, 0);
}

TEST(Correct, SingleEstimatePassesThrough) {
    const std::vector<BitString> one{B("011010")};
    const auto result = correct(one, 2u);
    EXPECT_EQ(result.output, B("011010"));
    EXPECT_TRUE(result.shifts.empty());
}

TEST(Correct, WidthsAreValidated) {
    const auto plan = make_plan(acceptance_instance(), 2, 2, 0.25, 0.2);
    const std::vector<BitString> bad{B("010"), B("1110")};
    EXPECT_THROW(correct(bad, plan), ConfigError);
    const std::vector<BitString> one{B("0101")};
    EXPECT_THROW(correct(one, plan), ConfigError);
}

TEST(Correct, FallbackPicksTheNearestShift) {
    // Overlap 3 bits, h = 2: no q in [-2, 2] maps 000 to 100; +-3 are out of
    // range, so d = 2 is the best, first reached at q = +2.
    const auto choice = select_shift(B("000"), B("100"), 2);
    EXPECT_FALSE(choice.exact);
    EXPECT_EQ(choice.q, 2);
    const auto exact = select_shift(B("101"), B("111"), 2);
    EXPECT_TRUE(exact.exact);
    EXPECT_EQ(exact.q, 2);
}

// Walks every w and every admissible perturbation vector.
void for_each_case(const DistPlan &plan, const std::function<void(const BitString &, std::span<const std::int64_t>)> &fn) {
    const std::int64_t bound = std::int64_t{1} << (plan.h - 2);
    std::vector<std::int64_t> p(plan.k);
    for (std::uint64_t wv = 0; wv < (std::uint64_t{1} << plan.total_width); ++wv) {
        const BitString w(plan.total_width, wv);
        std::function<void(unsigned)> rec = [&](unsigned j) {
            if (j == plan.k) {
                fn(w, p);
                return;
            }
            const std::int64_t lim = j + 1 == plan.k ? 1 : bound;
            for (std::int64_t v = -lim; v <= lim; ++v) {
                p[j] = v;
                rec(j + 1);
            }
        };
        rec(0);
    }
}

TEST(CorrectOracle, ExhaustiveForSmallWidths) {
    std::size_t cases = 0;
    for (const auto &c : feasible_combos()) {
        const auto plan = make_plan_for_width(ceil_log2(c.r) + 1, c.k, c.h, 0.25, 0.2);
        ASSERT_LE(plan.total_width, 8u);
        for_each_case(plan, [&](const BitString &w, std::span<const std::int64_t> p) {
            const auto res = brute_force_correct_oracle(w, p, plan);
            ASSERT_TRUE(res.ok) << "w=" << w << " r=" << c.r << " k=" << c.k << " h=" << c.h;
            ++cases;
        });
    }
    EXPECT_GT(cases, 1000u);
}

TEST(CorrectOracle, RandomizedIncludingWiderPlans) {
    Rng rng(1);
    std::vector<DistPlan> plans;
    for (const auto &c : feasible_combos()) plans.push_back(make_plan_for_width(ceil_log2(c.r) + 1, c.k, c.h, 0.25, 0.2));
    plans.push_back(make_plan_for_width(11, 4, 3, 0.5, 0.1));
    plans.push_back(make_plan_for_width(20, 3, 6, 0.5, 0.1));
    plans.push_back(make_plan_for_width(40, 5, 8, 0.5, 0.1));
    for (const auto &plan : plans) {
        const std::int64_t bound = std::int64_t{1} << (plan.h - 2);
        std::vector<std::int64_t> p(plan.k);
        for (int n = 0; n < 10000; ++n) {
            const BitString w(plan.total_width, rng.next() & low_mask(plan.total_width));
            for (unsigned j = 0; j < plan.k; ++j) {
                const std::int64_t lim = j + 1 == plan.k ? 1 : bound;
                p[j] = static_cast<std::int64_t>(rng.below(2 * lim + 1)) - lim;
            }
            ASSERT_TRUE(brute_force_correct_oracle(w, p, plan).ok) << "w=" << w;
        }
    }
}

TEST(CorrectOracle, RejectsOversizedPerturbations) {
    const auto plan = make_plan(acceptance_instance(), 2, 2, 0.25, 0.2);
    const std::int64_t too_big[] = {2, 0};
    EXPECT_THROW(brute_force_correct_oracle(B("01101"), too_big, plan), ConfigError);
    const std::int64_t last_too_big[] = {0, 2};
    EXPECT_THROW(brute_force_correct_oracle(B("01101"), last_too_big, plan), ConfigError);
}

TEST(ShiftUniqueness, UniqueShiftEqualsTheSumOfPartialShifts) {
    // omega, x: t-bit with d_t(x, omega) <= 1; z: (h+1)-bit within 2^{h-2}
    // of omega's last h+1 bits.
    std::size_t cases = 0;
    for (unsigned t = 3; t <= 7; ++t) {
        for (unsigned h = 2; h < t; ++h) {
            const std::int64_t outer = std::int64_t{1} << (h - 1);
            const std::int64_t inner = std::int64_t{1} << (h - 2);
            for (std::uint64_t wv = 0; wv < (1u << t); ++wv) {
                const BitString omega(t, wv);
                const BitString omega_tail = slice(omega, t - h, t);
                for (std::int64_t b1 : {-1, 0, 1}) {
                    const BitString x = wrap_add(omega, -b1);  // Sum(x, b1) = omega
                    const BitString x_tail = slice(x, t - h, t);
                    for (std::int64_t b2 = -inner; b2 <= inner; ++b2) {
                        const BitString z = wrap_add(omega_tail, b2);
                        int matches = 0;
                        std::int64_t found = 0;
                        for (std::int64_t b = -outer; b <= outer; ++b) {
                            if (wrap_add(x_tail, b) == z) {
                                ++matches;
                                found = b;
                            }
                        }
                        ASSERT_EQ(matches, 1);
                        ASSERT_EQ(found, b1 + b2);
                        const auto choice = select_shift(x_tail, z, h);
                        ASSERT_TRUE(choice.exact);
                        ASSERT_EQ(choice.q, found);
                        ++cases;
                    }
                }
            }
        }
    }
    EXPECT_GT(cases, 1000u);
}

TEST(TailAgreement, ShiftsAgreeOnTheLastHBits) {
    auto check = [](const BitString &x, const BitString &y, unsigned h) {
        const unsigned t = x.width();
        const std::int64_t bound = std::int64_t{1} << (h - 2);
        int full_matches = 0;
        for (std::int64_t b = -bound; b <= bound; ++b) {
            const bool full = wrap_add(x, b) == y;
            const bool tail = wrap_add(slice(x, t - h + 1, t), b) == slice(y, t - h + 1, t);
            ASSERT_EQ(full, tail) << x << " " << y << " b=" << b;
            full_matches += full;
        }
        ASSERT_EQ(full_matches, 1);
    };
    for (unsigned t = 3; t <= 8; ++t) {
        for (unsigned h = 2; h <= t; ++h) {
            const std::uint64_t bound = std::uint64_t{1} << (h - 2);
            for (std::uint64_t xv = 0; xv < (1u << t); ++xv) {
                for (std::uint64_t yv = 0; yv < (1u << t); ++yv) {
                    const BitString x(t, xv), y(t, yv);
                    if (circ_dist(x, y) <= bound) check(x, y, h);
                }
            }
        }
    }
    Rng rng(6);
    for (int n = 0; n < 20000; ++n) {
        const unsigned t = 3 + static_cast<unsigned>(rng.below(30));
        const unsigned h = 2 + static_cast<unsigned>(rng.below(std::min(t - 1, 12u)));
        const BitString x(t, rng.next() & low_mask(t));
        const std::int64_t bound = std::int64_t{1} << (h - 2);
        const BitString y = wrap_add(x, static_cast<std::int64_t>(rng.below(2 * bound + 1)) - bound);
        check(x, y, h);
    }
}

TEST(Simulator, StepSevenStateFactorizes) {
    const auto &sim = acceptance_simulator();
    EXPECT_EQ(sim.simulated_qubits(), 20u);
    EXPECT_NEAR(sim.simulated_norm(), 1.0, 1e-12);
    EXPECT_LE(sim.factorization_deviation(), 1e-9);
}

TEST(Simulator, DeviationDetectsAWrongReconstruction) {
    // Same plan against an instance with a different exponent: the simulated
    // b-family phases no longer match the reconstruction from (11, 3, 9).
    const auto other = validate_instance(11, 3, 5);
    const auto plan = make_plan(other, 2, 2, 0.25, 0.2);
    const DistributedSimulator sim(other, plan);
    EXPECT_LE(sim.factorization_deviation(), 1e-9);
    EXPECT_GT(total_variation(sim.prefix_distribution(), acceptance_simulator().prefix_distribution()), 1e-3);
}

TEST(Simulator, PrefixLawMatchesAnalyticProduct) {
    const auto &inst = acceptance_instance();
    const auto &sim = acceptance_simulator();
    const DistributedAnalytic analytic(inst, sim.plan());
    const auto sv = sim.prefix_distribution();
    const auto an = analytic.prefix_distribution();
    ASSERT_EQ(sv.size(), 1u << 16);
    double total = 0.0;
    for (double p : sv) total += p;
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_LE(total_variation(sv, an), 1e-9);
}

TEST(Simulator, BranchConditionedNodeLawsMatchPsiPrefixes) {
    const auto &inst = acceptance_instance();
    const auto &sim = acceptance_simulator();
    const auto &plan = sim.plan();
    for (std::uint64_t s = 0; s < inst.r; ++s) {
        const auto u = sim.orbit_eigenstate(s);
        for (unsigned j = 0; j < plan.k; ++j) {
            const auto law = sim.node_prefix_distribution(j, u);
            const auto shift = plan.l[j] - 1;
            const auto pa = prefix_marginal(
                phase_outcome_distribution(Fraction::make(s, inst.r).shifted(shift), plan.t[j]), plan.t[j],
                plan.measured[j]);
            const auto pb = prefix_marginal(
                phase_outcome_distribution(Fraction::make(s * *inst.hidden_g % inst.r, inst.r).shifted(shift), plan.t[j]),
                plan.t[j], plan.measured[j]);
            std::vector<double> product;
            for (double x : pa)
                for (double y : pb) product.push_back(x * y);
            ASSERT_LE(total_variation(law, product), 1e-9) << "s=" << s << " node " << j + 1;
        }
    }
}

TEST(Simulator, HandoffLeavesTheStateUntouched) {
    const auto &sim = acceptance_simulator();
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        auto r1 = Rng::derive(9, trial), r2 = Rng::derive(9, trial);
        HandoffLedger ledger;
        std::vector<Amplitude> with, without;
        const auto m1 = sim.sample(r1, &ledger, with);
        const auto m2 = sim.sample(r2, nullptr, without);
        ASSERT_EQ(m1.a, m2.a);
        ASSERT_EQ(m1.b, m2.b);
        ASSERT_EQ(with.size(), without.size());
        ASSERT_EQ(std::memcmp(with.data(), without.data(), with.size() * sizeof(Amplitude)), 0);
        ASSERT_EQ(ledger.transfers, 1u);
        ASSERT_EQ(ledger.qubits, acceptance_instance().L);
    }
}

TEST(Simulator, EmpiricalPrefixFrequencies) {
    const auto &sim = acceptance_simulator();
    const auto exact = sim.prefix_distribution();
    // Compare node-1 a-family marginal, 16 outcomes.
    std::vector<double> expected(16, 0.0), seen(16, 0.0);
    for (std::size_t i = 0; i < exact.size(); ++i) expected[i >> 12] += exact[i];
    Rng rng(77);
    const int runs = 5000;
    for (int n = 0; n < runs; ++n) ++seen[sim.sample(rng).a[0].value()];
    for (auto &x : seen) x /= runs;
    EXPECT_LE(total_variation(seen, expected), 0.05);
}

TEST(Simulator, BudgetIsEnforced) {
    const auto inst = validate_instance(53, 16, 1);  // r = 13, L = 6
    const auto plan = make_plan(inst, 2, 2, 0.25, 0.2);
    EXPECT_THROW(DistributedSimulator(inst, plan), ConfigError);
}

TEST(Analytic, ZeroBranchReadsZeros) {
    const auto &inst = acceptance_instance();
    const DistributedAnalytic analytic(inst, make_plan(inst, 2, 2, 0.25, 0.2));
    Rng rng(3);
    int zero = 0;
    for (int n = 0; n < 300; ++n) {
        const auto m = analytic.sample(rng);
        if (*m.latent_s != 0) continue;
        ++zero;
        for (const auto &x : m.a) EXPECT_EQ(x.value(), 0u);
        for (const auto &x : m.b) EXPECT_EQ(x.value(), 0u);
    }
    EXPECT_GT(zero, 0);
}

TEST(AccuracyEvent, EveryBranchMeetsTheBudget) {
    struct Case {
        std::uint64_t N, a, b;
        unsigned k, h;
        double eps, eps_prime;
    };
    const Case cases[] = {
        {11, 3, 9, 2, 2, 0.25, 0.2},  {29, 7, 16, 2, 2, 0.25, 0.2}, {23, 2, 13, 2, 2, 0.5, 0.1},
        {23, 2, 13, 2, 3, 0.5, 0.1},  {23, 2, 13, 3, 2, 0.5, 0.1},  {53, 16, 47, 2, 3, 0.25, 0.2},
        {53, 16, 47, 3, 2, 0.25, 0.2},
    };
    for (const auto &c : cases) {
        const auto inst = validate_instance(c.N, c.a, c.b);
        const auto plan = make_plan(inst, c.k, c.h, c.eps, c.eps_prime);
        for (const auto &m : accuracy_event_masses(inst, plan)) {
            EXPECT_GE(m.event, 1 - plan.epsilon_prime) << "N=" << c.N << " s=" << m.s;
            if (m.s == 0) {
                EXPECT_EQ(m.event_and_success, 0.0);
            } else {
                EXPECT_NEAR(m.event_and_success, m.event, 1e-12) << "N=" << c.N << " s=" << m.s;
            }
        }
    }
}

TEST(SuccessMass, SimulatorAndAnalyticAgreeAndMeetTheBound) {
    const auto &inst = acceptance_instance();
    const auto &sim = acceptance_simulator();
    const auto &plan = sim.plan();
    const DistributedAnalytic analytic(inst, plan);
    const double from_law = distributed_success_probability(sim.prefix_distribution(), inst, plan);
    const double from_analytic = distributed_success_probability(analytic, inst, plan);
    EXPECT_NEAR(from_law, from_analytic, 1e-9);
    EXPECT_GE(from_analytic, (inst.r - 1.0) / inst.r * (1 - plan.epsilon_prime));
}

TEST(SolveDistributed, RecordsAreConsistent) {
    const auto &inst = acceptance_instance();
    const auto plan = make_plan(inst, 2, 2, 0.25, 0.2);
    AnalyticDistStage stage(inst, plan);
    int successes = 0;
    for (std::uint64_t trial = 0; trial < 400; ++trial) {
        auto rng = Rng::derive(5, trial);
        const auto rec = solve_distributed(inst, plan, stage, Mode::Analytic, 1, rng);
        ASSERT_EQ(rec.algorithm, "distributed");
        ASSERT_EQ(rec.node_a.size(), 2u);
        ASSERT_EQ(rec.m_a->width(), plan.total_width);
        ASSERT_EQ(rec.comm_qubits, inst.L);
        if (*rec.latent_s == 0) {
            ASSERT_FALSE(rec.success);
            ASSERT_EQ(rec.mhat_a % inst.r, 0u);
        }
        if (rec.success) {
            ++successes;
            ASSERT_EQ(mod_pow(inst.a, *rec.g_hat, inst.N), inst.b);
        }
    }
    EXPECT_GT(successes, 250);
}

TEST(SolveDistributed, RetriesAccumulateCommunication) {
    const auto &inst = acceptance_instance();
    const auto plan = make_plan(inst, 2, 2, 0.25, 0.2);
    AnalyticDistStage stage(inst, plan);
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        auto rng = Rng::derive(8, trial);
        const auto rec = solve_distributed(inst, plan, stage, Mode::Analytic, 30, rng);
        ASSERT_TRUE(rec.success);
        ASSERT_EQ(rec.comm_qubits, rec.retries * inst.L);
    }
}

}  // namespace
}  // namespace distlog

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
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "distlog/bits.hpp"
#include "distlog/dlp.hpp"
#include "distlog/numtheory.hpp"
#include "distlog/rng.hpp"
#include "distlog/statevec.hpp"

namespace distlog {

/// Split of the W = ceil(log2 r + 1) + 1 target bits among k nodes. Vectors
/// are 0-based: l[i] holds l_{i+1}, so l.front() = 1 and l.back() = W.
struct DistPlan {
    unsigned k = 0;
    unsigned h = 0;
    double epsilon = 0.0;
    double epsilon_prime = 0.0;
    std::vector<unsigned> l;         // k + 1 split points
    std::vector<unsigned> t;         // per-node counting width
    std::vector<unsigned> measured;  // per-node measured prefix width
    unsigned total_width = 0;

    unsigned max_h() const { return total_width / k; }
};

/// min(3, floor(W / k)), raised to 2.
unsigned default_overlap(unsigned total_width, unsigned k);

/// Plan from the accuracy width n = ceil(log2 r + 1); W = n + 1. Throws
/// ConfigError for infeasible k, out-of-range h or bad budgets.
DistPlan make_plan_for_width(unsigned accuracy_bits, unsigned k, unsigned h, double epsilon, double epsilon_prime);

/// Plan for an instance; h and epsilon' default as documented above and to
/// epsilon / 2.
DistPlan make_plan(const ProblemInstance &instance, unsigned k, std::optional<unsigned> h, double epsilon,
                   std::optional<double> epsilon_prime = std::nullopt);

struct NodeMeasurements {
    std::vector<BitString> a;  // m_1a .. m_ka
    std::vector<BitString> b;
    std::optional<std::uint64_t> latent_s;  // analytic mode only
};

/// Shift aligning the last h+1 bits of one node with the first h+1 bits of
/// the corrected suffix.
struct ShiftChoice {
    std::int64_t q = 0;
    bool exact = true;  // false: no shift in range matched; q minimizes d_{h+1}
};

/// Searches q in 0, +1, -1, ..., +2^{h-1}, -2^{h-1}. Both strings are h+1 bits.
ShiftChoice select_shift(const BitString &tail, const BitString &head, unsigned h);

struct CorrectResult {
    BitString output;
    std::vector<std::int64_t> shifts;  // q_1 .. q_{k-1}
    bool fallback = false;
};

/// Aligns and concatenates per-node estimates. Works for any k >= 1 given
/// consistent widths; k = 1 returns the input.
CorrectResult correct(std::span<const BitString> measurements, unsigned h);

/// Same, validating the widths against the plan.
CorrectResult correct(std::span<const BitString> measurements, const DistPlan &plan);

struct CorrectOracleResult {
    bool ok = false;
    BitString output;
    std::uint64_t distance = 0;           // d(output, w)
    std::uint64_t expected_distance = 0;  // d(x_k, w window)
};

/// Builds x_j = w_[l_j, l_{j+1}+h] + perturbation_j (x_k from w_[l_k, l_{k+1}]),
/// runs correct, and checks d(output, w) = d(x_k, window) = |perturbation_k|.
/// Throws ConfigError when a perturbation exceeds its bound.
CorrectOracleResult brute_force_correct_oracle(const BitString &w, std::span<const std::int64_t> perturbations,
                                               const DistPlan &plan);

/// Counts qubits sent between nodes.
struct HandoffLedger {
    unsigned transfers = 0;
    unsigned qubits = 0;
};

/// Exact simulation of the k-node circuit.
///
/// Each node's circuit is run densely on registers [ja, jb, C] for every
/// basis input of C drawn from the orbit of a, which yields the node's
/// transfer tensor K_j[m](out, in). Nodes only interact through C, so the
/// global step-7 state is the contraction of these tensors along the C bond;
/// no global vector is ever formed. Measurement statistics are obtained by
/// chaining C's reduced state conditioned on the measured prefixes.
class DistributedSimulator {
  public:
    DistributedSimulator(const ProblemInstance &instance, const DistPlan &plan);

    const DistPlan &plan() const noexcept { return plan_; }
    /// max_j (2 t_j + L): the widest dense node simulation.
    unsigned simulated_qubits() const noexcept { return simulated_qubits_; }
    std::size_t orbit_size() const noexcept { return orbit_.size(); }

    /// One run of steps 1-7. Hands C from node j to j+1 for j < k, recording
    /// L qubits per transfer when a ledger is supplied.
    NodeMeasurements sample(Rng &rng, HandoffLedger *ledger = nullptr) const;

    /// Same, also returning C's reduced density matrix after the last node
    /// (r x r, row-major over the orbit).
    NodeMeasurements sample(Rng &rng, HandoffLedger *ledger, std::vector<Amplitude> &final_work_state) const;

    /// Exact law of all measured prefixes, index concatenating
    /// (m_1a, m_1b, ..., m_ka, m_kb) with m_1a most significant.
    std::vector<double> prefix_distribution() const;

    /// Law of node j's (m_ja, m_jb) prefixes (index m_ja * 2^w + m_jb) when
    /// C enters the node in the given pure state over the orbit.
    std::vector<double> node_prefix_distribution(unsigned j, std::span<const Amplitude> work_state) const;

    /// C state over the orbit for |u_s>.
    std::vector<Amplitude> orbit_eigenstate(std::uint64_t s) const;

    /// Frobenius norm of (simulated step-7 state) - (sum over s of the
    /// tensor product of psi profiles with u_s). Bounds every amplitude
    /// deviation.
    double factorization_deviation() const;

    /// Norm of the simulated step-7 state, computed by the same sweep.
    double simulated_norm() const;

  private:
    Amplitude kraus(unsigned j, std::size_t m, std::size_t out, std::size_t in) const {
        return kraus_[j][(m * r_ + out) * r_ + in];
    }

    /// sum over outcomes m in prefix p of K_m^dagger K_m.
    const std::vector<Amplitude> &prefix_effect(unsigned j, std::size_t p) const { return effects_[j][p]; }

    /// sum over outcomes m in prefix p of K_m rho K_m^dagger.
    std::vector<Amplitude> apply_prefix(unsigned j, std::size_t p, std::span<const Amplitude> rho) const;

    std::size_t prefix_of(unsigned j, std::size_t m) const;

    double sweep_norm(bool subtract_factorized) const;

    ProblemInstance instance_;
    DistPlan plan_;
    std::vector<std::uint64_t> orbit_;
    std::size_t r_ = 0;
    std::size_t start_ = 0;  // orbit index of |1>
    unsigned simulated_qubits_ = 0;
    // kraus_[j][(m * r + out) * r + in]; node 0 is only filled for in = start_.
    std::vector<std::vector<Amplitude>> kraus_;
    std::vector<std::vector<std::vector<Amplitude>>> effects_;
    std::vector<double> first_node_law_;
};

/// Closed-form counterparts, driven by the eigenphases of a and b.
class DistributedAnalytic {
  public:
    DistributedAnalytic(const ProblemInstance &instance, const DistPlan &plan);

    NodeMeasurements sample(Rng &rng) const;

    /// Prefix law of node j's a-family (family = 0) or b-family (family = 1)
    /// given the branch s.
    const std::vector<double> &node_marginal(std::uint64_t s, unsigned j, int family) const {
        return marginals_[(s * plan_.k + j) * 2 + family];
    }

    /// (1/r) sum_s prod_j P_{j,a}(.|s) P_{j,b}(.|s), indexed as
    /// DistributedSimulator::prefix_distribution.
    std::vector<double> prefix_distribution() const;

    /// Law of the corrected W-bit estimate of one family given s.
    std::vector<double> corrected_distribution(std::uint64_t s, int family) const;

    std::uint64_t b_numerator(std::uint64_t s) const { return b_numerators_[s]; }

  private:
    ProblemInstance instance_;
    DistPlan plan_;
    std::vector<std::uint64_t> b_numerators_;
    std::vector<std::vector<double>> marginals_;
    std::vector<DiscreteSampler> samplers_;
};

/// Per-branch mass of the accuracy event: every node j < k within 2^{h-2}
/// of its window of s/r (and sg/r), node k within 1.
struct AccuracyEventMass {
    std::uint64_t s = 0;
    double event = 0.0;
    double event_and_success = 0.0;
};

std::vector<AccuracyEventMass> accuracy_event_masses(const ProblemInstance &instance, const DistPlan &plan);

/// P[success] of one attempt under a joint prefix law (simulator or
/// analytic indexing).
double distributed_success_probability(std::span<const double> prefix_law, const ProblemInstance &instance,
                                       const DistPlan &plan);

/// P[success] of one attempt from the per-branch corrected laws.
double distributed_success_probability(const DistributedAnalytic &analytic, const ProblemInstance &instance,
                                       const DistPlan &plan);

class DistStage {
  public:
    virtual ~DistStage() = default;
    virtual NodeMeasurements sample(Rng &rng, HandoffLedger *ledger) = 0;
    virtual unsigned simulated_qubits() const = 0;
};

class StatevectorDistStage : public DistStage {
  public:
    StatevectorDistStage(const ProblemInstance &instance, const DistPlan &plan) : sim_(instance, plan) {}
    NodeMeasurements sample(Rng &rng, HandoffLedger *ledger) override { return sim_.sample(rng, ledger); }
    unsigned simulated_qubits() const override { return sim_.simulated_qubits(); }
    const DistributedSimulator &simulator() const { return sim_; }

  private:
    DistributedSimulator sim_;
};

class AnalyticDistStage : public DistStage {
  public:
    AnalyticDistStage(const ProblemInstance &instance, const DistPlan &plan) : analytic_(instance, plan), L_(instance.L), k_(plan.k) {}
    NodeMeasurements sample(Rng &rng, HandoffLedger *ledger) override;
    unsigned simulated_qubits() const override { return 0; }

  private:
    DistributedAnalytic analytic_;
    unsigned L_;
    unsigned k_;
};

std::unique_ptr<DistStage> make_dist_stage(const ProblemInstance &instance, const DistPlan &plan, Mode mode);

/// Quantum stage, Correct on both families, then the shared post-processing
/// with rounding divisor 2^W. At most max_retries attempts.
RunRecord solve_distributed(const ProblemInstance &instance, const DistPlan &plan, DistStage &stage, Mode mode,
                            unsigned max_retries, Rng &rng);

}  // namespace distlog

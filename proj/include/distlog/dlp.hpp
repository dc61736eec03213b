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
#include <string>
#include <string_view>
#include <vector>

#include "distlog/bits.hpp"
#include "distlog/numtheory.hpp"
#include "distlog/rng.hpp"
#include "distlog/statevec.hpp"

namespace distlog {

enum class Mode { Statevector, Analytic };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

/// ceil(log2 r + 1) + ceil(log2(2 + 1/epsilon)).
unsigned shor_register_width(std::uint64_t r, double epsilon);

struct ShorConfig {
    double epsilon = 0.25;
    unsigned t = 0;
    unsigned max_retries = 64;
    Mode mode = Mode::Statevector;

    static ShorConfig make(const ProblemInstance &instance, double epsilon, unsigned max_retries = 64,
                           Mode mode = Mode::Statevector);
};

/// Counting-register readout of one quantum stage run.
struct QuantumSample {
    BitString m_a;
    BitString m_b;
    std::optional<std::uint64_t> latent_s;  // analytic mode only
};

/// The state just before measurement: registers "1a", "1b" (t qubits each)
/// and "C" (L qubits). Throws ConfigError past the simulator budget.
QuantumState prepare_shor_state(const ProblemInstance &instance, unsigned t);

/// Builds the state and measures both counting registers.
QuantumSample quantum_stage_statevector(const ProblemInstance &instance, const ShorConfig &config, Rng &rng);

/// Draws s uniformly, then each counting outcome from its closed-form law.
QuantumSample quantum_stage_analytic(const ProblemInstance &instance, const ShorConfig &config, Rng &rng);

/// Exact joint law of (m_a, m_b), index m_a * 2^t + m_b, from the simulator.
std::vector<double> shor_joint_distribution_statevector(const ProblemInstance &instance, unsigned t);

/// (1/r) sum_s psi(s/r) (x) psi(sg/r), same indexing.
std::vector<double> shor_joint_distribution_analytic(const ProblemInstance &instance, unsigned t);

/// round(m * r / 2^|m|), exact, halves rounded up.
std::uint64_t round_scaled(const BitString &m, std::uint64_t r);

struct PostprocessResult {
    enum class Status { Ok, ZeroEstimate, VerifyFailed };

    std::uint64_t mhat_a = 0;
    std::uint64_t mhat_b = 0;
    std::optional<std::uint64_t> g_hat;
    Status status = Status::ZeroEstimate;
};

/// Classical step: round both readouts, invert mhat_a mod r, verify a^g = b.
PostprocessResult postprocess(const BitString &m_a, const BitString &m_b, const ProblemInstance &instance);

/// ok[x * r + y] says whether rounded estimates with residues (x, y) mod r
/// pass post-processing.
std::vector<char> postprocess_success_table(const ProblemInstance &instance);

/// P[postprocess succeeds] under a joint law indexed m_a * 2^t + m_b.
double exact_success_probability(std::span<const double> joint, unsigned t, const ProblemInstance &instance);

/// One solver execution, possibly over several attempts.
struct RunRecord {
    std::string algorithm = "shor";
    Mode mode = Mode::Statevector;
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;
    std::optional<BitString> m_a;  // readout of the last attempt
    std::optional<BitString> m_b;
    std::uint64_t mhat_a = 0;
    std::uint64_t mhat_b = 0;
    std::optional<std::uint64_t> g_hat;
    unsigned retries = 0;  // quantum-stage executions performed
    bool success = false;
    std::optional<std::uint64_t> latent_s;
    unsigned simulated_qubits = 0;

    // Distributed runs only.
    std::vector<BitString> node_a;
    std::vector<BitString> node_b;
    bool correct_fallback = false;
    unsigned comm_qubits = 0;
};

/// A reusable quantum stage. Implementations precompute whatever does not
/// depend on the random stream, so repeated trials are cheap.
class ShorStage {
  public:
    virtual ~ShorStage() = default;
    virtual QuantumSample sample(Rng &rng) = 0;
    virtual unsigned simulated_qubits() const = 0;
};

/// Samples the measurement law of the prepared pre-measurement state.
class StatevectorShorStage : public ShorStage {
  public:
    StatevectorShorStage(const ProblemInstance &instance, unsigned t);
    QuantumSample sample(Rng &rng) override;
    unsigned simulated_qubits() const override { return qubits_; }

  private:
    unsigned t_;
    unsigned qubits_;
    DiscreteSampler joint_;
};

class AnalyticShorStage : public ShorStage {
  public:
    AnalyticShorStage(const ProblemInstance &instance, unsigned t);
    QuantumSample sample(Rng &rng) override;
    unsigned simulated_qubits() const override { return 0; }

  private:
    const DiscreteSampler &sampler_for(std::uint64_t numerator);

    ProblemInstance instance_;
    unsigned t_;
    std::vector<std::uint64_t> b_numerators_;  // s -> s g mod r, read from the operator
    std::map<std::uint64_t, DiscreteSampler> samplers_;
};

std::unique_ptr<ShorStage> make_shor_stage(const ProblemInstance &instance, const ShorConfig &config);

/// Retry loop around a stage: at most config.max_retries attempts.
RunRecord solve(const ProblemInstance &instance, const ShorConfig &config, ShorStage &stage, Rng &rng);

/// Convenience overload building a fresh stage.
RunRecord solve(const ProblemInstance &instance, const ShorConfig &config, Rng &rng);

}  // namespace distlog

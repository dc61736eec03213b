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

#include "distlog/dlp.hpp"

#include <cmath>
#include <string>

#include "distlog/errors.hpp"
#include "distlog/phase.hpp"

namespace distlog {

std::string_view to_string(Mode mode) { return mode == Mode::Statevector ? "statevector" : "analytic"; }

Mode parse_mode(std::string_view text) {
    if (text == "statevector") return Mode::Statevector;
    if (text == "analytic") return Mode::Analytic;
    throw ConfigError("unknown mode '" + std::string(text) + "' (expected statevector or analytic)");
}

unsigned shor_register_width(std::uint64_t r, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
    return ceil_log2(r) + 1 + ceil_log2(2.0 + 1.0 / epsilon);
}

ShorConfig ShorConfig::make(const ProblemInstance &instance, double epsilon, unsigned max_retries, Mode mode) {
    if (max_retries == 0) throw ConfigError("max_retries must be positive");
    return ShorConfig{epsilon, shor_register_width(instance.r, epsilon), max_retries, mode};
}

QuantumState prepare_shor_state(const ProblemInstance &instance, unsigned t) {
    const unsigned qubits = 2 * t + instance.L;
    if (qubits > RegisterLayout::kMaxQubits) {
        throw ConfigError("statevector mode needs " + std::to_string(qubits) + " qubits, over the " +
                          std::to_string(RegisterLayout::kMaxQubits) + "-qubit budget; use --mode analytic");
    }
    RegisterLayout layout({{"1a", t}, {"1b", t}, {"C", instance.L}});
    auto state = QuantumState::basis(layout, {{"C", 1}});
    state.hadamard_layer("1a");
    state.hadamard_layer("1b");
    state.controlled_modmul_power("1a", "C", instance.a, 0, instance.N);
    state.controlled_modmul_power("1b", "C", instance.b, 0, instance.N);
    state.inverse_qft("1a");
    state.inverse_qft("1b");
    return state;
}

QuantumSample quantum_stage_statevector(const ProblemInstance &instance, const ShorConfig &config, Rng &rng) {
    auto state = prepare_shor_state(instance, config.t);
    const auto a = state.measure_prefix("1a", config.t, rng);
    const auto b = state.measure_prefix("1b", config.t, rng);
    return {a.bits, b.bits, std::nullopt};
}

QuantumSample quantum_stage_analytic(const ProblemInstance &instance, const ShorConfig &config, Rng &rng) {
    AnalyticShorStage stage(instance, config.t);
    return stage.sample(rng);
}

std::vector<double> shor_joint_distribution_statevector(const ProblemInstance &instance, unsigned t) {
    const auto state = prepare_shor_state(instance, t);
    const RegisterPrefix prefixes[] = {{"1a", t}, {"1b", t}};
    return state.joint_marginal(prefixes);
}

std::vector<double> shor_joint_distribution_analytic(const ProblemInstance &instance, unsigned t) {
    if (2 * t > 30) throw ConfigError("joint distribution over 2t > 30 bits is too large");
    const std::size_t size = std::size_t{1} << t;
    std::vector<double> joint(size * size, 0.0);
    const double weight = 1.0 / static_cast<double>(instance.r);
    for (std::uint64_t s = 0; s < instance.r; ++s) {
        const auto pa = phase_outcome_distribution(Fraction::make(s, instance.r), t);
        const auto pb =
            phase_outcome_distribution(Fraction::make(eigenphase_numerator(instance, instance.b, s), instance.r), t);
        for (std::size_t i = 0; i < size; ++i) {
            const double wa = weight * pa[i];
            if (wa == 0.0) continue;
            for (std::size_t j = 0; j < size; ++j) joint[i * size + j] += wa * pb[j];
        }
    }
    return joint;
}

std::uint64_t round_scaled(const BitString &m, std::uint64_t r) {
    using u128 = unsigned __int128;
    const unsigned w = m.width();
    const u128 numerator = u128{2} * m.value() * r + (u128{1} << w);
    return static_cast<std::uint64_t>(numerator >> (w + 1));
}

namespace {

std::optional<std::uint64_t> recover_exponent(std::uint64_t mhat_a, std::uint64_t mhat_b,
                                              const ProblemInstance &instance) {
    const std::uint64_t ra = mhat_a % instance.r;
    if (ra == 0) return std::nullopt;
    const auto product =
        static_cast<unsigned __int128>(mod_inverse(ra, instance.r)) * (mhat_b % instance.r) % instance.r;
    return static_cast<std::uint64_t>(product);
}

}  // namespace

PostprocessResult postprocess(const BitString &m_a, const BitString &m_b, const ProblemInstance &instance) {
    PostprocessResult out;
    out.mhat_a = round_scaled(m_a, instance.r);
    out.mhat_b = round_scaled(m_b, instance.r);
    const auto candidate = recover_exponent(out.mhat_a, out.mhat_b, instance);
    if (!candidate) {
        out.status = PostprocessResult::Status::ZeroEstimate;
        return out;
    }
    if (mod_pow(instance.a, *candidate, instance.N) != instance.b) {
        out.status = PostprocessResult::Status::VerifyFailed;
        return out;
    }
    out.g_hat = candidate;
    out.status = PostprocessResult::Status::Ok;
    return out;
}

std::vector<char> postprocess_success_table(const ProblemInstance &instance) {
    const std::uint64_t r = instance.r;
    std::vector<char> table(r * r, 0);
    for (std::uint64_t x = 0; x < r; ++x) {
        for (std::uint64_t y = 0; y < r; ++y) {
            const auto g = recover_exponent(x, y, instance);
            table[x * r + y] = g && mod_pow(instance.a, *g, instance.N) == instance.b;
        }
    }
    return table;
}

double exact_success_probability(std::span<const double> joint, unsigned t, const ProblemInstance &instance) {
    const std::size_t size = std::size_t{1} << t;
    if (joint.size() != size * size) throw ConfigError("joint distribution size does not match t");
    const std::uint64_t r = instance.r;
    const auto table = postprocess_success_table(instance);
    std::vector<std::uint64_t> residue(size);
    for (std::size_t m = 0; m < size; ++m) residue[m] = round_scaled(BitString(t, m), r) % r;
    double mass = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t j = 0; j < size; ++j) {
            if (table[residue[i] * r + residue[j]]) mass += joint[i * size + j];
        }
    }
    return mass;
}

StatevectorShorStage::StatevectorShorStage(const ProblemInstance &instance, unsigned t)
    : t_(t), qubits_(2 * t + instance.L), joint_(shor_joint_distribution_statevector(instance, t)) {}

QuantumSample StatevectorShorStage::sample(Rng &rng) {
    const std::size_t outcome = joint_(rng);
    return {BitString(t_, outcome >> t_), BitString(t_, outcome & low_mask(t_)), std::nullopt};
}

AnalyticShorStage::AnalyticShorStage(const ProblemInstance &instance, unsigned t) : instance_(instance), t_(t) {
    if (t > kMaxPhaseWidth) throw ConfigError("counting register too wide for analytic sampling");
    b_numerators_.reserve(instance.r);
    for (std::uint64_t s = 0; s < instance.r; ++s)
        b_numerators_.push_back(eigenphase_numerator(instance, instance.b, s));
}

const DiscreteSampler &AnalyticShorStage::sampler_for(std::uint64_t numerator) {
    auto it = samplers_.find(numerator);
    if (it == samplers_.end()) {
        const auto dist = phase_outcome_distribution(Fraction::make(numerator, instance_.r), t_);
        it = samplers_.emplace(numerator, DiscreteSampler(dist)).first;
    }
    return it->second;
}

QuantumSample AnalyticShorStage::sample(Rng &rng) {
    const std::uint64_t s = rng.below(instance_.r);
    const std::size_t ma = sampler_for(s)(rng);
    const std::size_t mb = sampler_for(b_numerators_[s])(rng);
    return {BitString(t_, ma), BitString(t_, mb), s};
}

std::unique_ptr<ShorStage> make_shor_stage(const ProblemInstance &instance, const ShorConfig &config) {
    if (config.mode == Mode::Statevector) return std::make_unique<StatevectorShorStage>(instance, config.t);
    return std::make_unique<AnalyticShorStage>(instance, config.t);
}

RunRecord solve(const ProblemInstance &instance, const ShorConfig &config, ShorStage &stage, Rng &rng) {
    if (config.max_retries == 0) throw ConfigError("max_retries must be positive");
    RunRecord record;
    record.mode = config.mode;
    record.simulated_qubits = stage.simulated_qubits();
    for (unsigned attempt = 1; attempt <= config.max_retries; ++attempt) {
        const auto sample = stage.sample(rng);
        const auto post = postprocess(sample.m_a, sample.m_b, instance);
        record.retries = attempt;
        record.m_a = sample.m_a;
        record.m_b = sample.m_b;
        record.mhat_a = post.mhat_a;
        record.mhat_b = post.mhat_b;
        record.latent_s = sample.latent_s;
        record.g_hat = post.g_hat;
        if (post.status == PostprocessResult::Status::Ok) {
            record.success = true;
            break;
        }
    }
    return record;
}

RunRecord solve(const ProblemInstance &instance, const ShorConfig &config, Rng &rng) {
    auto stage = make_shor_stage(instance, config);
    return solve(instance, config, *stage, rng);
}

}  // namespace distlog

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
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "distlog/dist.hpp"
#include "distlog/dlp.hpp"
#include "json.hpp"

namespace distlog {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Resource accounting

struct ResourceInputs {
    unsigned ceil_log2_r = 0;  // symbolic r is allowed: only ceil(log2 r) matters
    unsigned L = 0;
    unsigned k = 2;
    double epsilon = 0.25;
    double epsilon_prime = 0.125;
};

/// Space, time and communication figures for one parameter point. Qubit
/// counts exclude the auxiliary register of a gate-level modular multiplier;
/// see `ancilla_note`.
struct ResourceReport {
    ResourceInputs inputs;
    unsigned t_alg2 = 0;
    unsigned qubits_single_node_alg2 = 0;  // 2 (ceil(log2 r + 1) + ceil(log2(2 + 1/eps))) + L
    bool plan_feasible = false;
    std::vector<unsigned> node_t;
    unsigned qubits_per_node_alg4 = 0;     // max_j (2 t_j + L)
    double qubits_per_node_closed_form = 0.0;  // 2 (W/k + ceil(log2(2 + k/eps'))) + L
    unsigned comm_qubits = 0;              // (k - 1) L
    std::optional<bool> distributed_advantage;  // per-node < single-node, when comparable
    std::string gate_complexity_class = "O(L^3)";
    std::string depth_class = "O(L^3)";
    std::string ancilla_note;
    std::optional<unsigned> simulated_qubits_actual;
};

ResourceReport compute_resources(const ResourceInputs &inputs);

json to_json(const ResourceReport &report);
/// Reads the inputs back and recomputes every formula field.
ResourceReport resource_report_from_json(const json &j);

void write_resource_csv_header(std::ostream &out);
void write_resource_csv_row(std::ostream &out, const ResourceReport &report);

// ---------------------------------------------------------------------------
// Serialization

json to_json(const RunRecord &record);
json to_json(const DistPlan &plan);
DistPlan dist_plan_from_json(const json &j);

// ---------------------------------------------------------------------------
// Experiments

enum class Algorithm { Shor, Distributed };

struct ExperimentConfig {
    std::uint64_t N = 0;
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    Algorithm algorithm = Algorithm::Shor;
    Mode mode = Mode::Statevector;
    double epsilon = 0.25;
    std::optional<double> epsilon_prime;
    unsigned k = 2;
    std::optional<unsigned> h;
    std::uint64_t trials = 1;
    unsigned max_retries = 64;
    std::uint64_t seed = 0;
};

struct WilsonInterval {
    double low = 0.0;
    double high = 1.0;
};

/// 95% Wilson score interval for `successes` out of `n`.
WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t n);

struct ExperimentSummary {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    double success_rate = 0.0;
    double mean_retries = 0.0;
    WilsonInterval wilson;
    unsigned comm_qubits_per_attempt = 0;
    unsigned simulated_qubits = 0;
};

json to_json(const ExperimentSummary &summary);

/// Validates the configuration, then runs `trials` solves with streams
/// Rng::derive(seed, trial). Emits one JSON record per line followed by a
/// summary line. Throws ConfigError before any output on invalid input.
ExperimentSummary run_experiment(const ExperimentConfig &config, std::ostream &out);

// ---------------------------------------------------------------------------
// Property suites

struct VerifyOptions {
    std::optional<std::uint64_t> r;     // accuracy suite: restrict to one order
    std::optional<double> epsilon;      // accuracy suite: restrict to one budget
    std::uint64_t cases = 10000;        // randomized cases per configuration
    std::uint64_t seed = 1;
    std::uint64_t N = 11, a = 3, b = 9;  // instance for node-accuracy, eigen, factorization
    unsigned k = 2;
    unsigned h = 2;
    double dist_epsilon = 0.25;
    double dist_epsilon_prime = 0.2;
};

struct SuiteReport {
    std::string name;
    std::uint64_t checks = 0;
    std::uint64_t failures = 0;
    std::vector<std::string> lines;  // human-readable detail, one fact per line

    bool passed() const { return failures == 0 && checks > 0; }
};

/// Known suites: metric, prefix, accuracy, correct, node-accuracy, shift, tail,
/// eigen, factorization. Throws ConfigError for an unknown name.
SuiteReport run_suite(const std::string &name, const VerifyOptions &options);
const std::vector<std::string> &suite_names();

// ---------------------------------------------------------------------------
// Distributed state comparison

struct DistCompareReport {
    DistPlan plan;
    unsigned simulated_qubits = 0;
    double max_amplitude_deviation_bound = 0.0;  // Frobenius norm of the difference
    double simulated_norm = 0.0;
    double joint_total_variation = 0.0;
    double max_branch_total_variation = 0.0;  // node laws given |u_s>, worst s and node
    std::uint64_t state_hash_with_handoff = 0;
    std::uint64_t state_hash_without_handoff = 0;
    unsigned comm_qubits = 0;

    bool passed(double tolerance) const {
        return max_amplitude_deviation_bound <= tolerance && joint_total_variation <= tolerance &&
               max_branch_total_variation <= tolerance && state_hash_with_handoff == state_hash_without_handoff;
    }
};

DistCompareReport compare_distributed(const ProblemInstance &instance, const DistPlan &plan, std::uint64_t seed);

json to_json(const DistCompareReport &report);

}  // namespace distlog

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


#include "distlog/harness.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>

#include "distlog/errors.hpp"
#include "distlog/phase.hpp"

namespace distlog {
namespace {

std::string fmt(double x) {
    std::ostringstream out;
    out << std::setprecision(12) << x;
    return out.str();
}

template <typename T>
json optional_json(const std::optional<T> &value) {
    return value ? json(*value) : json(nullptr);
}

json bits_json(const std::optional<BitString> &x) { return x ? json(x->to_string()) : json(nullptr); }

json bits_array(const std::vector<BitString> &xs) {
    json out = json::array();
    for (const auto &x : xs) out.push_back(x.to_string());
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Resources

ResourceReport compute_resources(const ResourceInputs &inputs) {
    if (!(inputs.epsilon > 0.0 && inputs.epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
    if (!(inputs.epsilon_prime > 0.0 && inputs.epsilon_prime < 1.0))
        throw ConfigError("epsilon' must lie in (0, 1)");
    if (inputs.k < 1) throw ConfigError("k must be at least 1");
    if (inputs.ceil_log2_r < 1) throw ConfigError("r must be at least 2");

    ResourceReport report;
    report.inputs = inputs;
    const unsigned n = inputs.ceil_log2_r + 1;  // ceil(log2 r + 1)
    report.t_alg2 = n + ceil_log2(2.0 + 1.0 / inputs.epsilon);
    report.qubits_single_node_alg2 = 2 * report.t_alg2 + inputs.L;

    const double k = inputs.k;
    report.qubits_per_node_closed_form =
        2.0 * (static_cast<double>(n + 1) / k + ceil_log2(2.0 + k / inputs.epsilon_prime)) + inputs.L;
    report.comm_qubits = (inputs.k - 1) * inputs.L;

    try {
        const auto plan = make_plan_for_width(n, inputs.k, default_overlap(n + 1, inputs.k), inputs.epsilon,
                                              inputs.epsilon_prime);
        report.plan_feasible = true;
        report.node_t = plan.t;
        for (unsigned t : plan.t) report.qubits_per_node_alg4 = std::max(report.qubits_per_node_alg4, 2 * t + inputs.L);
        report.distributed_advantage = report.qubits_per_node_alg4 < report.qubits_single_node_alg2;
    } catch (const ConfigError &) {
        report.plan_feasible = false;
    }

    report.ancilla_note =
        "excludes the c = L + O(1) auxiliary qubits of a gate-level modular multiplier; "
        "the simulator applies multiplication as a basis permutation and uses none";
    return report;
}

json to_json(const ResourceReport &report) {
    json j;
    j["ceil_log2_r"] = report.inputs.ceil_log2_r;
    j["L"] = report.inputs.L;
    j["k"] = report.inputs.k;
    j["epsilon"] = report.inputs.epsilon;
    j["epsilon_prime"] = report.inputs.epsilon_prime;
    j["t_alg2"] = report.t_alg2;
    j["qubits_single_node_alg2"] = report.qubits_single_node_alg2;
    j["plan_feasible"] = report.plan_feasible;
    j["node_t"] = report.node_t;
    j["qubits_per_node_alg4"] = report.plan_feasible ? json(report.qubits_per_node_alg4) : json(nullptr);
    j["qubits_per_node_closed_form"] = report.qubits_per_node_closed_form;
    j["comm_qubits"] = report.comm_qubits;
    j["distributed_advantage"] = optional_json(report.distributed_advantage);
    j["gate_complexity_class"] = report.gate_complexity_class;
    j["depth_class"] = report.depth_class;
    j["ancilla_note"] = report.ancilla_note;
    j["simulated_qubits_actual"] = optional_json(report.simulated_qubits_actual);
    return j;
}

ResourceReport resource_report_from_json(const json &j) {
    ResourceInputs inputs;
    inputs.ceil_log2_r = j.at("ceil_log2_r").get<unsigned>();
    inputs.L = j.at("L").get<unsigned>();
    inputs.k = j.at("k").get<unsigned>();
    inputs.epsilon = j.at("epsilon").get<double>();
    inputs.epsilon_prime = j.at("epsilon_prime").get<double>();
    auto report = compute_resources(inputs);
    if (j.contains("simulated_qubits_actual") && !j["simulated_qubits_actual"].is_null())
        report.simulated_qubits_actual = j["simulated_qubits_actual"].get<unsigned>();
    return report;
}

void write_resource_csv_header(std::ostream &out) {
    out << "ceil_log2_r,L,k,epsilon,epsilon_prime,t_alg2,qubits_single_node_alg2,plan_feasible,"
           "qubits_per_node_alg4,qubits_per_node_closed_form,comm_qubits,distributed_advantage,"
           "gate_complexity_class,depth_class,simulated_qubits_actual,ancilla_note\n";
}

void write_resource_csv_row(std::ostream &out, const ResourceReport &report) {
    const auto &in = report.inputs;
    out << in.ceil_log2_r << ',' << in.L << ',' << in.k << ',' << fmt(in.epsilon) << ',' << fmt(in.epsilon_prime)
        << ',' << report.t_alg2 << ',' << report.qubits_single_node_alg2 << ','
        << (report.plan_feasible ? "true" : "false") << ',';
    if (report.plan_feasible) out << report.qubits_per_node_alg4;
    out << ',' << fmt(report.qubits_per_node_closed_form) << ',' << report.comm_qubits << ',';
    if (report.distributed_advantage) out << (*report.distributed_advantage ? "true" : "false");
    out << ',' << report.gate_complexity_class << ',' << report.depth_class << ',';
    if (report.simulated_qubits_actual) out << *report.simulated_qubits_actual;
    out << ",\"" << report.ancilla_note << "\"\n";
}

// ---------------------------------------------------------------------------
// Serialization

json to_json(const RunRecord &record) {
    json j;
    j["trial"] = record.trial;
    j["seed"] = record.seed;
    j["algorithm"] = record.algorithm;
    j["mode"] = std::string(to_string(record.mode));
    j["m_a"] = bits_json(record.m_a);
    j["m_b"] = bits_json(record.m_b);
    j["mhat_a"] = record.mhat_a;
    j["mhat_b"] = record.mhat_b;
    j["g_hat"] = optional_json(record.g_hat);
    j["retries"] = record.retries;
    j["success"] = record.success;
    j["simulated_qubits"] = record.simulated_qubits;
    if (record.latent_s) j["latent_s"] = *record.latent_s;
    if (record.algorithm == "distributed") {
        j["node_a"] = bits_array(record.node_a);
        j["node_b"] = bits_array(record.node_b);
        j["correct_fallback"] = record.correct_fallback;
        j["comm_qubits"] = record.comm_qubits;
    }
    return j;
}

json to_json(const DistPlan &plan) {
    json j;
    j["k"] = plan.k;
    j["h"] = plan.h;
    j["epsilon"] = plan.epsilon;
    j["epsilon_prime"] = plan.epsilon_prime;
    j["l"] = plan.l;
    j["t"] = plan.t;
    j["measured"] = plan.measured;
    j["total_width"] = plan.total_width;
    return j;
}

DistPlan dist_plan_from_json(const json &j) {
    DistPlan plan;
    plan.k = j.at("k").get<unsigned>();
    plan.h = j.at("h").get<unsigned>();
    plan.epsilon = j.at("epsilon").get<double>();
    plan.epsilon_prime = j.at("epsilon_prime").get<double>();
    plan.l = j.at("l").get<std::vector<unsigned>>();
    plan.t = j.at("t").get<std::vector<unsigned>>();
    plan.measured = j.at("measured").get<std::vector<unsigned>>();
    plan.total_width = j.at("total_width").get<unsigned>();
    return plan;
}

// ---------------------------------------------------------------------------
// Experiments

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t n) {
    if (n == 0) return {};
    constexpr double z = 1.959963984540054;
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double denom = 1.0 + z * z / nn;
    const double center = (p + z * z / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

json to_json(const ExperimentSummary &summary) {
    json j;
    j["trials"] = summary.trials;
    j["successes"] = summary.successes;
    j["success_rate"] = summary.success_rate;
    j["mean_retries"] = summary.mean_retries;
    j["wilson_low"] = summary.wilson.low;
    j["wilson_high"] = summary.wilson.high;
    j["simulated_qubits"] = summary.simulated_qubits;
    j["comm_qubits_per_attempt"] = summary.comm_qubits_per_attempt;
    return j;
}

ExperimentSummary run_experiment(const ExperimentConfig &config, std::ostream &out) {
    if (config.trials == 0) throw ConfigError("trials must be positive");
    if (config.max_retries == 0) throw ConfigError("max_retries must be positive");
    const auto instance = validate_instance(config.N, config.a, config.b);

    std::unique_ptr<ShorStage> shor_stage;
    std::unique_ptr<DistStage> dist_stage;
    ShorConfig shor_config;
    std::optional<DistPlan> plan;
    ExperimentSummary summary;
    if (config.algorithm == Algorithm::Shor) {
        shor_config = ShorConfig::make(instance, config.epsilon, config.max_retries, config.mode);
        shor_stage = make_shor_stage(instance, shor_config);
        summary.simulated_qubits = shor_stage->simulated_qubits();
    } else {
        plan = make_plan(instance, config.k, config.h, config.epsilon, config.epsilon_prime);
        dist_stage = make_dist_stage(instance, *plan, config.mode);
        summary.simulated_qubits = dist_stage->simulated_qubits();
        summary.comm_qubits_per_attempt = (plan->k - 1) * instance.L;
    }

    std::uint64_t retries = 0;
    for (std::uint64_t trial = 0; trial < config.trials; ++trial) {
        Rng rng = Rng::derive(config.seed, trial);
        RunRecord record = shor_stage ? solve(instance, shor_config, *shor_stage, rng)
                                      : solve_distributed(instance, *plan, *dist_stage, config.mode,
                                                          config.max_retries, rng);
        record.seed = config.seed;
        record.trial = trial;
        summary.successes += record.success;
        retries += record.retries;
        out << to_json(record).dump() << '\n';
    }
    summary.trials = config.trials;
    summary.success_rate = static_cast<double>(summary.successes) / static_cast<double>(summary.trials);
    summary.mean_retries = static_cast<double>(retries) / static_cast<double>(summary.trials);
    summary.wilson = wilson_interval(summary.successes, summary.trials);

    json line;
    line["summary"] = to_json(summary);
    line["summary"]["algorithm"] = config.algorithm == Algorithm::Shor ? "shor" : "distributed";
    line["summary"]["mode"] = std::string(to_string(config.mode));
    line["summary"]["seed"] = config.seed;
    line["summary"]["max_retries"] = config.max_retries;
    if (plan) line["summary"]["plan"] = to_json(*plan);
    else line["summary"]["t"] = shor_config.t;
    out << line.dump() << '\n';
    return summary;
}

// ---------------------------------------------------------------------------
// Property suites

namespace {

class Tally {
  public:
    explicit Tally(SuiteReport &report) : report_(report) {}

    // Records one check; keeps the first few failure descriptions.
    void check(bool ok, const std::function<std::string()> &describe) {
        ++report_.checks;
        if (ok) return;
        if (++report_.failures <= 5) report_.lines.push_back("FAIL " + describe());
    }

  private:
    SuiteReport &report_;
};

std::uint64_t ref_dist(std::uint64_t x, std::uint64_t y, unsigned t) {
    const std::uint64_t diff = x > y ? x - y : y - x;
    return std::min(diff, (std::uint64_t{1} << t) - diff);
}

std::string summary_line(const std::string &what, const SuiteReport &report) {
    return what + ": " + std::to_string(report.checks) + " checks, " + std::to_string(report.failures) + " failures";
}

void metric_suite(const VerifyOptions &options, SuiteReport &report) {
    Tally tally(report);
    for (unsigned t = 1; t <= 6; ++t) {
        const std::uint64_t size = std::uint64_t{1} << t;
        for (std::uint64_t x = 0; x < size; ++x) {
            for (std::uint64_t y = 0; y < size; ++y) {
                const BitString X(t, x), Y(t, y);
                const auto d = circ_dist(X, Y);
                auto where = [&] { return X.to_string() + " " + Y.to_string(); };
                tally.check(d == ref_dist(x, y, t), where);
                tally.check((d == 0) == (x == y), where);
                tally.check(d == circ_dist(Y, X), where);
                for (std::uint64_t z = 0; z < size; ++z) {
                    const BitString Z(t, z);
                    tally.check(d <= circ_dist(X, Z) + circ_dist(Z, Y), where);
                }
                // Distance is the smallest shift connecting x to y.
                const auto signed_size = static_cast<std::int64_t>(size);
                std::int64_t best = signed_size;
                for (std::int64_t b = -(signed_size - 1); b <= signed_size - 1; ++b)
                    if (wrap_add(X, b) == Y) best = std::min<std::int64_t>(best, b < 0 ? -b : b);
                tally.check(d == static_cast<std::uint64_t>(best), where);
                // Closeness at scale 2^{t - t0} survives truncation to t0 bits.
                for (unsigned t0 = 1; t0 < t; ++t0) {
                    if (d >= (std::uint64_t{1} << (t - t0))) continue;
                    tally.check(circ_dist(slice(X, 1, t0), slice(Y, 1, t0)) <= 1, where);
                }
            }
        }
    }
    report.lines.push_back(summary_line("exhaustive t <= 6 (axioms, shift form, truncation)", report));

    const auto before = report.checks;
    Rng rng(options.seed);
    for (std::uint64_t n = 0; n < options.cases; ++n) {
        const unsigned t = 1 + static_cast<unsigned>(rng.below(16));
        const std::uint64_t size = std::uint64_t{1} << t;
        const BitString x(t, rng.below(size)), y(t, rng.below(size)), z(t, rng.below(size));
        auto where = [&] { return x.to_string() + " " + y.to_string() + " " + z.to_string(); };
        tally.check(circ_dist(x, y) == ref_dist(x.value(), y.value(), t), where);
        tally.check(circ_dist(x, y) == circ_dist(y, x), where);
        tally.check(circ_dist(x, y) <= circ_dist(x, z) + circ_dist(z, y), where);
    }
    report.lines.push_back("random t <= 16: " + std::to_string(report.checks - before) + " checks");
}

void prefix_check(Tally &tally, const BitString &x, const BitString &y) {
    const unsigned t = x.width();
    const auto d = circ_dist(x, y);
    for (unsigned t0 = 1; t0 <= t; ++t0) {
        if (d >= (std::uint64_t{1} << (t - t0))) continue;
        for (unsigned t1 = t0; t1 <= t; ++t1) {
            tally.check(circ_dist(slice(x, 1, t1), slice(y, 1, t1)) <= (std::uint64_t{1} << (t1 - t0)), [&] {
                return x.to_string() + " " + y.to_string() + " t0=" + std::to_string(t0) + " t1=" + std::to_string(t1);
            });
        }
    }
}

void prefix_suite(const VerifyOptions &options, SuiteReport &report) {
    Tally tally(report);
    for (unsigned t = 1; t <= 8; ++t) {
        const std::uint64_t size = std::uint64_t{1} << t;
        for (std::uint64_t x = 0; x < size; ++x)
            for (std::uint64_t y = 0; y < size; ++y) prefix_check(tally, BitString(t, x), BitString(t, y));
    }
    report.lines.push_back(summary_line("exhaustive t <= 8", report));
    Rng rng(options.seed);
    for (std::uint64_t n = 0; n < options.cases; ++n) {
        const unsigned t = 1 + static_cast<unsigned>(rng.below(20));
        const std::uint64_t size = std::uint64_t{1} << t;
        const BitString x(t, rng.below(size));
        const auto spread =
            static_cast<std::int64_t>(rng.below(std::max<std::uint64_t>(2, size >> rng.below(t + 1))));
        prefix_check(tally, x, wrap_add(x, rng.below(2) ? spread : -spread));
    }
    report.lines.push_back(summary_line("exhaustive plus random t <= 20", report));
}

void accuracy_suite(const VerifyOptions &options, SuiteReport &report) {
    Tally tally(report);
    std::vector<std::uint64_t> orders;
    if (options.r) {
        if (*options.r < 2) throw ConfigError("r must be at least 2");
        orders.push_back(*options.r);
    } else {
        for (std::uint64_t r = 2; r <= 31; ++r)
            if (is_prime(r)) orders.push_back(r);
    }
    std::vector<double> budgets = options.epsilon ? std::vector<double>{*options.epsilon}
                                                  : std::vector<double>{0.5, 0.25, 0.1};
    for (std::uint64_t r : orders) {
        for (double eps : budgets) {
            double min_full = 1.0, min_prefix = 1.0;
            for (unsigned n = 1; n <= 6; ++n) {
                const unsigned t = phase_register_width(n, eps);
                for (std::uint64_t s = 0; s < r; ++s) {
                    const auto acc = check_accuracy_bound(Fraction::make(s, r), t, n, eps);
                    min_full = std::min(min_full, acc.full_mass);
                    for (double m : acc.prefix_masses) min_prefix = std::min(min_prefix, m);
                    tally.check(acc.holds, [&] {
                        return "r=" + std::to_string(r) + " s=" + std::to_string(s) + " n=" + std::to_string(n) +
                               " eps=" + fmt(eps);
                    });
                }
            }
            report.lines.push_back("r=" + std::to_string(r) + " eps=" + fmt(eps) + " n=1..6: min full mass " +
                                   fmt(min_full) + ", min prefix mass " + fmt(min_prefix) + ", bound " +
                                   fmt(1.0 - eps));
        }
    }
}

void correct_suite(const VerifyOptions &options, SuiteReport &report) {
    Tally tally(report);
    Rng rng(options.seed);
    for (std::uint64_t r : {5u, 7u, 11u, 13u}) {
        for (unsigned k : {2u, 3u}) {
            for (unsigned h : {2u, 3u}) {
                DistPlan plan;
                try {
                    plan = make_plan_for_width(ceil_log2(r) + 1, k, h, 0.25, 0.2);
                } catch (const ConfigError &) {
                    continue;
                }
                const auto before = report.checks;
                const std::int64_t bound = std::int64_t{1} << (h - 2);
                auto limit = [&](unsigned j) { return j + 1 == k ? std::int64_t{1} : bound; };
                std::vector<std::int64_t> p(k);
                auto run = [&](const BitString &w) {
                    tally.check(brute_force_correct_oracle(w, p, plan).ok, [&] {
                        std::string s = "w=" + w.to_string() + " shifts";
                        for (auto v : p) s += " " + std::to_string(v);
                        return s;
                    });
                };
                if (plan.total_width <= 8) {
                    for (std::uint64_t wv = 0; wv < (std::uint64_t{1} << plan.total_width); ++wv) {
                        const BitString w(plan.total_width, wv);
                        std::function<void(unsigned)> rec = [&](unsigned j) {
                            if (j == k) return run(w);
                            for (p[j] = -limit(j); p[j] <= limit(j); ++p[j]) rec(j + 1);
                        };
                        rec(0);
                    }
                }
                const auto exhaustive = report.checks - before;
                for (std::uint64_t n = 0; n < options.cases; ++n) {
                    const BitString w(plan.total_width, rng.next() & low_mask(plan.total_width));
                    for (unsigned j = 0; j < k; ++j)
                        p[j] = static_cast<std::int64_t>(rng.below(2 * limit(j) + 1)) - limit(j);
                    run(w);
                }
                report.lines.push_back("r=" + std::to_string(r) + " k=" + std::to_string(k) + " h=" +
                                       std::to_string(h) + " W=" + std::to_string(plan.total_width) + ": " +
                                       std::to_string(exhaustive) + " exhaustive, " + std::to_string(options.cases) +
                                       " random");
            }
        }
    }
    report.lines.push_back(summary_line("total", report));
}

void node_accuracy_suite(const VerifyOptions &options, SuiteReport &report) {
    Tally tally(report);
    const auto instance = validate_instance(options.N, options.a, options.b);
    const auto plan = make_plan(instance, options.k, options.h, options.dist_epsilon, options.dist_epsilon_prime);
    double min_event = 1.0;
    for (const auto &mass : accuracy_event_masses(instance, plan)) {
        min_event = std::min(min_event, mass.event);
        auto where = [&] { return "s=" + std::to_string(mass.s) + " event mass " + fmt(mass.event); };
        tally.check(mass.event >= 1.0 - plan.epsilon_prime, where);
        // Off the zero branch the event implies success.
        if (mass.s != 0) tally.check(std::abs(mass.event_and_success - mass.event) <= 1e-12, where);
    }
    report.lines.push_back("min per-branch event mass " + fmt(min_event) + ", bound " + fmt(1.0 - plan.epsilon_prime) +
                           " (k=" + std::to_string(plan.k) + ", h=" + std::to_string(plan.h) + ")");
}

void shift_suite(const VerifyOptions &, SuiteReport &report) {
    Tally tally(report);
    for (unsigned t = 3; t <= 7; ++t) {
        for (unsigned h = 2; h < t; ++h) {
            const std::int64_t outer = std::int64_t{1} << (h - 1);
            const std::int64_t inner = std::int64_t{1} << (h - 2);
            for (std::uint64_t wv = 0; wv < (std::uint64_t{1} << t); ++wv) {
                const BitString omega(t, wv);
                const BitString omega_tail = slice(omega, t - h, t);
                for (std::int64_t b1 : {-1, 0, 1}) {
                    const BitString x_tail = slice(wrap_add(omega, -b1), t - h, t);
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
                        const auto choice = select_shift(x_tail, z, h);
                        tally.check(matches == 1 && found == b1 + b2 && choice.exact && choice.q == found, [&] {
                            return "omega=" + omega.to_string() + " h=" + std::to_string(h) +
                                   " b1=" + std::to_string(b1) + " b2=" + std::to_string(b2);
                        });
                    }
                }
            }
        }
    }
    report.lines.push_back(summary_line("unique shift equals b1 + b2, t <= 7", report));
}

void tail_suite(const VerifyOptions &, SuiteReport &report) {
    Tally tally(report);
    for (unsigned t = 3; t <= 8; ++t) {
        for (unsigned h = 2; h <= t; ++h) {
            const std::int64_t bound = std::int64_t{1} << (h - 2);
            for (std::uint64_t xv = 0; xv < (std::uint64_t{1} << t); ++xv) {
                for (std::uint64_t yv = 0; yv < (std::uint64_t{1} << t); ++yv) {
                    const BitString x(t, xv), y(t, yv);
                    if (circ_dist(x, y) > static_cast<std::uint64_t>(bound)) continue;
                    int full_matches = 0;
                    bool agree = true;
                    for (std::int64_t b = -bound; b <= bound; ++b) {
                        const bool full = wrap_add(x, b) == y;
                        const bool tail = wrap_add(slice(x, t - h + 1, t), b) == slice(y, t - h + 1, t);
                        agree = agree && full == tail;
                        full_matches += full;
                    }
                    tally.check(agree && full_matches == 1, [&] {
                        return x.to_string() + " " + y.to_string() + " h=" + std::to_string(h);
                    });
                }
            }
        }
    }
    report.lines.push_back(summary_line("full and last-h-bit shifts agree, t <= 8", report));
}

void eigen_suite(const VerifyOptions &options, SuiteReport &report) {
    Tally tally(report);
    const auto instance = validate_instance(options.N, options.a, options.b);
    const std::uint64_t r = instance.r;
    std::vector<std::vector<Amplitude>> states;
    for (std::uint64_t s = 0; s < r; ++s) states.push_back(build_eigenstate(instance, s));
    for (std::uint64_t s = 0; s < r; ++s) {
        auto where = [&] { return "s=" + std::to_string(s); };
        tally.check(eigenphase_numerator(instance, instance.a, s) == s, where);
        if (instance.hidden_g)
            tally.check(eigenphase_numerator(instance, instance.b, s) == s * *instance.hidden_g % r, where);
        for (std::uint64_t s2 = 0; s2 < r; ++s2) {
            Amplitude overlap{};
            for (std::size_t i = 0; i < states[s].size(); ++i) overlap += std::conj(states[s][i]) * states[s2][i];
            tally.check(std::abs(overlap - Amplitude(s == s2 ? 1.0 : 0.0)) <= 1e-12, where);
        }
    }
    // (1/sqrt r) sum_s u_s = |1>.
    double deviation = 0.0;
    for (std::size_t i = 0; i < states[0].size(); ++i) {
        Amplitude sum{};
        for (const auto &u : states) sum += u[i];
        sum /= std::sqrt(static_cast<double>(r));
        deviation = std::max(deviation, std::abs(sum - Amplitude(i == 1 ? 1.0 : 0.0)));
    }
    tally.check(deviation <= 1e-12, [] { return std::string("uniform superposition is not |1>"); });
    report.lines.push_back(summary_line("eigenphases, orthonormality, superposition (r=" + std::to_string(r) + ")",
                                        report));
}

void factorization_suite(const VerifyOptions &options, SuiteReport &report) {
    Tally tally(report);
    const auto instance = validate_instance(options.N, options.a, options.b);
    const auto plan = make_plan(instance, options.k, options.h, options.dist_epsilon, options.dist_epsilon_prime);
    const auto cmp = compare_distributed(instance, plan, options.seed);
    tally.check(cmp.max_amplitude_deviation_bound <= 1e-9, [] { return std::string("state deviation"); });
    tally.check(cmp.joint_total_variation <= 1e-9, [] { return std::string("joint law"); });
    tally.check(cmp.max_branch_total_variation <= 1e-9, [] { return std::string("branch-conditioned node law"); });
    tally.check(cmp.state_hash_with_handoff == cmp.state_hash_without_handoff, [] {
        return std::string("hand-off changed the state");
    });
    report.lines.push_back("deviation " + fmt(cmp.max_amplitude_deviation_bound) + ", joint TV " +
                           fmt(cmp.joint_total_variation) + ", branch TV " + fmt(cmp.max_branch_total_variation));
}

using SuiteFn = void (*)(const VerifyOptions &, SuiteReport &);

const std::vector<std::pair<std::string, SuiteFn>> &suites() {
    static const std::vector<std::pair<std::string, SuiteFn>> table = {
        {"metric", metric_suite},
        {"prefix", prefix_suite},
        {"accuracy", accuracy_suite},
        {"correct", correct_suite},
        {"node-accuracy", node_accuracy_suite},
        {"shift", shift_suite},
        {"tail", tail_suite},
        {"eigen", eigen_suite},
        {"factorization", factorization_suite},
    };
    return table;
}

}  // namespace

const std::vector<std::string> &suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto &[name, fn] : suites()) out.push_back(name);
        return out;
    }();
    return names;
}

SuiteReport run_suite(const std::string &name, const VerifyOptions &options) {
    for (const auto &[suite, fn] : suites()) {
        if (suite != name) continue;
        SuiteReport report;
        report.name = name;
        fn(options, report);
        return report;
    }
    throw ConfigError("unknown suite '" + name + "'");
}

// ---------------------------------------------------------------------------
// Distributed state comparison

namespace {

struct Fnv1a {
    std::uint64_t state = 0xcbf29ce484222325ULL;

    void bytes(const void *data, std::size_t size) {
        const auto *p = static_cast<const unsigned char *>(data);
        for (std::size_t i = 0; i < size; ++i) {
            state ^= p[i];
            state *= 0x100000001b3ULL;
        }
    }
    void value(std::uint64_t x) { bytes(&x, sizeof x); }
};

std::uint64_t run_hash(const DistributedSimulator &sim, std::uint64_t seed, bool record_handoff, unsigned &comm) {
    Fnv1a hash;
    for (std::uint64_t trial = 0; trial < 16; ++trial) {
        Rng rng = Rng::derive(seed, trial);
        HandoffLedger ledger;
        std::vector<Amplitude> rho;
        const auto m = sim.sample(rng, record_handoff ? &ledger : nullptr, rho);
        for (const auto &x : m.a) hash.value(x.value());
        for (const auto &x : m.b) hash.value(x.value());
        hash.bytes(rho.data(), rho.size() * sizeof(Amplitude));
        if (record_handoff) comm += ledger.qubits;
    }
    return hash.state;
}

}  // namespace

DistCompareReport compare_distributed(const ProblemInstance &instance, const DistPlan &plan, std::uint64_t seed) {
    const DistributedSimulator sim(instance, plan);
    const DistributedAnalytic analytic(instance, plan);
    DistCompareReport report;
    report.plan = plan;
    report.simulated_qubits = sim.simulated_qubits();
    report.max_amplitude_deviation_bound = sim.factorization_deviation();
    report.simulated_norm = sim.simulated_norm();
    report.joint_total_variation = total_variation(sim.prefix_distribution(), analytic.prefix_distribution());

    for (std::uint64_t s = 0; s < instance.r; ++s) {
        const auto u = sim.orbit_eigenstate(s);
        for (unsigned j = 0; j < plan.k; ++j) {
            const auto law = sim.node_prefix_distribution(j, u);
            const auto &pa = analytic.node_marginal(s, j, 0);
            const auto &pb = analytic.node_marginal(s, j, 1);
            std::vector<double> product;
            product.reserve(pa.size() * pb.size());
            for (double x : pa)
                for (double y : pb) product.push_back(x * y);
            report.max_branch_total_variation =
                std::max(report.max_branch_total_variation, total_variation(law, product));
        }
    }

    unsigned comm = 0;
    report.state_hash_with_handoff = run_hash(sim, seed, true, comm);
    report.state_hash_without_handoff = run_hash(sim, seed, false, comm);
    report.comm_qubits = comm / 16;  // per run
    return report;
}

json to_json(const DistCompareReport &report) {
    json j;
    j["plan"] = to_json(report.plan);
    j["simulated_qubits"] = report.simulated_qubits;
    j["max_amplitude_deviation_bound"] = report.max_amplitude_deviation_bound;
    j["simulated_norm"] = report.simulated_norm;
    j["joint_total_variation"] = report.joint_total_variation;
    j["max_branch_total_variation"] = report.max_branch_total_variation;
    j["state_hash_with_handoff"] = report.state_hash_with_handoff;
    j["state_hash_without_handoff"] = report.state_hash_without_handoff;
    j["comm_qubits"] = report.comm_qubits;
    return j;
}

}  // namespace distlog

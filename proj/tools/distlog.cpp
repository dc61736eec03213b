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


// Command-line front end. Exit codes: 0 ok, 1 property failure, 2 bad input.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "distlog/errors.hpp"
#include "distlog/harness.hpp"
#include "distlog/numtheory.hpp"

namespace {

using namespace distlog;

constexpr int kOk = 0;
constexpr int kPropertyFailure = 1;
constexpr int kConfigError = 2;

struct InstanceFlags {
    std::uint64_t N = 0, a = 0, b = 0;

    void add(CLI::App &cmd, bool required) {
        auto *n = cmd.add_option("--N", N, "Modulus");
        auto *x = cmd.add_option("--a", a, "Base of order r");
        auto *y = cmd.add_option("--b", b, "Target b = a^g mod N");
        if (required) {
            n->required();
            x->required();
            y->required();
        }
    }
};

int emit_records(const ExperimentConfig &config, const std::string &output) {
    if (output.empty() || output == "-") {
        run_experiment(config, std::cout);
        return kOk;
    }
    std::ofstream file(output, std::ios::binary);
    if (!file) throw ConfigError("cannot open output file '" + output + "'");
    run_experiment(config, file);
    return kOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Discrete logarithms by monolithic and distributed phase estimation"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);

    ExperimentConfig solve_config;
    InstanceFlags solve_instance;
    std::string solve_mode = "statevector", solve_output;
    auto *solve = app.add_subcommand("solve", "Run the single-node solver and emit NDJSON records");
    solve_instance.add(*solve, true);
    solve->add_option("--epsilon", solve_config.epsilon, "Failure budget")->capture_default_str();
    solve->add_option("--mode", solve_mode, "statevector | analytic")->capture_default_str();
    solve->add_option("--trials", solve_config.trials, "Independent solver runs")->capture_default_str();
    solve->add_option("--seed", solve_config.seed, "Master seed")->required();
    solve->add_option("--max-retries", solve_config.max_retries, "Attempts per run")->capture_default_str();
    solve->add_option("--output", solve_output, "Record file, '-' for stdout");

    ExperimentConfig dist_config;
    dist_config.algorithm = Algorithm::Distributed;
    InstanceFlags dist_instance;
    std::string dist_mode = "statevector", dist_output;
    auto *solve_dist = app.add_subcommand("solve-dist", "Run the k-node solver and emit NDJSON records");
    dist_instance.add(*solve_dist, true);
    solve_dist->add_option("--k", dist_config.k, "Number of nodes")->capture_default_str();
    solve_dist->add_option("--h", dist_config.h, "Overlap bits between neighbouring nodes");
    solve_dist->add_option("--epsilon", dist_config.epsilon, "Single-node failure budget")->capture_default_str();
    solve_dist->add_option("--epsilon-prime", dist_config.epsilon_prime, "Distributed budget, < epsilon");
    solve_dist->add_option("--mode", dist_mode, "statevector | analytic")->capture_default_str();
    solve_dist->add_option("--trials", dist_config.trials, "Independent solver runs")->capture_default_str();
    solve_dist->add_option("--seed", dist_config.seed, "Master seed")->required();
    solve_dist->add_option("--max-retries", dist_config.max_retries, "Attempts per run")->capture_default_str();
    solve_dist->add_option("--output", dist_output, "Record file, '-' for stdout");

    std::vector<std::uint64_t> res_r;
    std::vector<unsigned> res_log2_r, res_k{2};
    std::vector<double> res_eps{0.25}, res_eps_prime{0.2};
    std::optional<unsigned> res_L;
    std::string res_format = "csv";
    auto *resources = app.add_subcommand("resources", "Tabulate qubit and communication counts over a grid");
    resources->add_option("--r", res_r, "Orders r (integers)");
    resources->add_option("--log2-r", res_log2_r, "Symbolic orders given by ceil(log2 r)");
    resources->add_option("--L", res_L, "Work register width; default ceil(log2 r) + 1");
    resources->add_option("--k", res_k, "Node counts")->capture_default_str();
    resources->add_option("--epsilon", res_eps, "Single-node budgets")->capture_default_str();
    resources->add_option("--epsilon-prime", res_eps_prime, "Distributed budgets")->capture_default_str();
    resources->add_option("--format", res_format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

    std::string suite = "all";
    VerifyOptions verify_options;
    InstanceFlags verify_instance{11, 3, 9};
    std::optional<std::uint64_t> verify_r;
    std::optional<double> verify_eps;
    auto *verify = app.add_subcommand("verify", "Run property suites and report achieved masses");
    std::vector<std::string> choices = suite_names();
    choices.push_back("all");
    verify->add_option("--suite", suite, "Suite name")->check(CLI::IsMember(choices))->capture_default_str();
    verify->add_option("--r", verify_r, "Accuracy suite: single order");
    verify->add_option("--epsilon", verify_eps, "Accuracy suite: single budget");
    verify->add_option("--cases", verify_options.cases, "Random cases per configuration")->capture_default_str();
    verify->add_option("--seed", verify_options.seed, "Seed for random cases")->capture_default_str();
    verify_instance.add(*verify, false);
    verify->add_option("--k", verify_options.k, "Plan node count")->capture_default_str();
    verify->add_option("--h", verify_options.h, "Plan overlap")->capture_default_str();
    verify->add_option("--dist-epsilon", verify_options.dist_epsilon, "Plan epsilon")->capture_default_str();
    verify->add_option("--epsilon-prime", verify_options.dist_epsilon_prime, "Plan epsilon'")->capture_default_str();

    InstanceFlags cmp_instance;
    unsigned cmp_k = 2;
    std::optional<unsigned> cmp_h;
    double cmp_eps = 0.25;
    std::optional<double> cmp_eps_prime;
    std::uint64_t cmp_seed = 0;
    double cmp_tolerance = 1e-9;
    auto *compare = app.add_subcommand("dist-compare", "Compare the simulated k-node state with its factorization");
    cmp_instance.add(*compare, true);
    compare->add_option("--k", cmp_k, "Number of nodes")->capture_default_str();
    compare->add_option("--h", cmp_h, "Overlap bits");
    compare->add_option("--epsilon", cmp_eps, "Single-node budget")->capture_default_str();
    compare->add_option("--epsilon-prime", cmp_eps_prime, "Distributed budget");
    compare->add_option("--seed", cmp_seed, "Seed for the hand-off runs")->capture_default_str();
    compare->add_option("--tolerance", cmp_tolerance, "Allowed deviation")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (*solve) {
            solve_config.N = solve_instance.N;
            solve_config.a = solve_instance.a;
            solve_config.b = solve_instance.b;
            solve_config.mode = parse_mode(solve_mode);
            return emit_records(solve_config, solve_output);
        }
        if (*solve_dist) {
            dist_config.N = dist_instance.N;
            dist_config.a = dist_instance.a;
            dist_config.b = dist_instance.b;
            dist_config.mode = parse_mode(dist_mode);
            return emit_records(dist_config, dist_output);
        }
        if (*resources) {
            if (res_r.empty() && res_log2_r.empty()) throw ConfigError("give at least one --r or --log2-r");
            for (auto r : res_r) {
                if (r < 2) throw ConfigError("r must be at least 2");
                res_log2_r.push_back(ceil_log2(r));
            }
            if (res_format == "csv") write_resource_csv_header(std::cout);
            for (unsigned c : res_log2_r)
                for (unsigned k : res_k)
                    for (double eps : res_eps)
                        for (double eps_prime : res_eps_prime) {
                            const auto report = compute_resources({c, res_L.value_or(c + 1), k, eps, eps_prime});
                            if (res_format == "csv") write_resource_csv_row(std::cout, report);
                            else std::cout << to_json(report).dump() << '\n';
                        }
            return kOk;
        }
        if (*verify) {
            verify_options.r = verify_r;
            verify_options.epsilon = verify_eps;
            verify_options.N = verify_instance.N;
            verify_options.a = verify_instance.a;
            verify_options.b = verify_instance.b;
            std::vector<std::string> names = suite == "all" ? suite_names() : std::vector<std::string>{suite};
            bool all_passed = true;
            for (const auto &name : names) {
                const auto report = run_suite(name, verify_options);
                std::cout << (report.passed() ? "PASS " : "FAIL ") << name << " (" << report.checks << " checks, "
                          << report.failures << " failures)\n";
                for (const auto &line : report.lines) std::cout << "  " << line << '\n';
                all_passed = all_passed && report.passed();
            }
            return all_passed ? kOk : kPropertyFailure;
        }
        if (*compare) {
            const auto instance = validate_instance(cmp_instance.N, cmp_instance.a, cmp_instance.b);
            const auto plan = make_plan(instance, cmp_k, cmp_h, cmp_eps, cmp_eps_prime);
            const auto report = compare_distributed(instance, plan, cmp_seed);
            auto j = to_json(report);
            j["passed"] = report.passed(cmp_tolerance);
            std::cout << j.dump() << '\n';
            return report.passed(cmp_tolerance) ? kOk : kPropertyFailure;
        }
    } catch (const ConfigError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
    return kConfigError;
}

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


#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "distlog/errors.hpp"
#include "distlog/harness.hpp"

namespace py = pybind11;
using namespace distlog;

namespace {

// JSON values cross the boundary as native dicts and lists.
py::object to_python(const json &j) { return py::module_::import("json").attr("loads")(j.dump()); }

Mode mode_arg(const std::string &mode) { return parse_mode(mode); }

py::dict instance_dict(const ProblemInstance &inst) {
    py::dict d;
    d["N"] = inst.N;
    d["a"] = inst.a;
    d["b"] = inst.b;
    d["r"] = inst.r;
    d["L"] = inst.L;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Discrete-logarithm solvers and property checks backed by the distlog C++ library.";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def("circ_dist", [](const std::string &x, const std::string &y) {
        return circ_dist(BitString::parse(x), BitString::parse(y));
    }, py::arg("x"), py::arg("y"), "Circular distance between two equal-width bit strings.");

    m.def("wrap_add", [](const std::string &x, std::int64_t b) {
        return wrap_add(BitString::parse(x), b).to_string();
    }, py::arg("x"), py::arg("b"), "Adds b to x modulo 2^len(x).");

    m.def("validate_instance", [](std::uint64_t N, std::uint64_t a, std::uint64_t b) {
        return instance_dict(validate_instance(N, a, b));
    }, py::arg("N"), py::arg("a"), py::arg("b"));

    m.def("make_plan", [](std::uint64_t N, std::uint64_t a, std::uint64_t b, unsigned k, std::optional<unsigned> h,
                          double epsilon, std::optional<double> epsilon_prime) {
        return to_python(to_json(make_plan(validate_instance(N, a, b), k, h, epsilon, epsilon_prime)));
    }, py::arg("N"), py::arg("a"), py::arg("b"), py::arg("k") = 2, py::arg("h") = py::none(),
          py::arg("epsilon") = 0.25, py::arg("epsilon_prime") = py::none());

    m.def("correct", [](const std::vector<std::string> &estimates, unsigned h) {
        std::vector<BitString> xs;
        for (const auto &x : estimates) xs.push_back(BitString::parse(x));
        const auto res = correct(xs, h);
        py::dict d;
        d["output"] = res.output.to_string();
        d["shifts"] = res.shifts;
        d["fallback"] = res.fallback;
        return d;
    }, py::arg("estimates"), py::arg("h"), "Aligns overlapping per-node estimates into one string.");

    m.def("run", [](std::uint64_t N, std::uint64_t a, std::uint64_t b, const std::string &algorithm,
                    const std::string &mode, double epsilon, std::optional<double> epsilon_prime, unsigned k,
                    std::optional<unsigned> h, std::uint64_t trials, unsigned max_retries, std::uint64_t seed) {
        ExperimentConfig config{N, a, b};
        if (algorithm == "shor") config.algorithm = Algorithm::Shor;
        else if (algorithm == "distributed") config.algorithm = Algorithm::Distributed;
        else throw ConfigError("algorithm must be 'shor' or 'distributed'");
        config.mode = mode_arg(mode);
        config.epsilon = epsilon;
        config.epsilon_prime = epsilon_prime;
        config.k = k;
        config.h = h;
        config.trials = trials;
        config.max_retries = max_retries;
        config.seed = seed;
        std::ostringstream out;
        {
            py::gil_scoped_release release;
            run_experiment(config, out);
        }
        return out.str();
    }, py::arg("N"), py::arg("a"), py::arg("b"), py::arg("algorithm") = "shor", py::arg("mode") = "statevector",
          py::arg("epsilon") = 0.25, py::arg("epsilon_prime") = py::none(), py::arg("k") = 2, py::arg("h") = py::none(),
          py::arg("trials") = 1, py::arg("max_retries") = 64, py::arg("seed") = 0,
          "Runs trials and returns the NDJSON text: one record per line, then a summary line.");

    m.def("resources", [](unsigned ceil_log2_r, unsigned L, unsigned k, double epsilon, double epsilon_prime) {
        return to_python(to_json(compute_resources({ceil_log2_r, L, k, epsilon, epsilon_prime})));
    }, py::arg("ceil_log2_r"), py::arg("L"), py::arg("k") = 2, py::arg("epsilon") = 0.25,
          py::arg("epsilon_prime") = 0.2);

    m.def("suite_names", &suite_names);

    m.def("verify", [](const std::string &suite, std::uint64_t cases, std::uint64_t seed) {
        VerifyOptions options;
        options.cases = cases;
        options.seed = seed;
        const auto rep = [&] {
            py::gil_scoped_release release;
            return run_suite(suite, options);
        }();
        py::dict d;
        d["name"] = rep.name;
        d["passed"] = rep.passed();
        d["checks"] = rep.checks;
        d["failures"] = rep.failures;
        d["lines"] = rep.lines;
        return d;
    }, py::arg("suite"), py::arg("cases") = 10000, py::arg("seed") = 1);

    m.def("dist_compare", [](std::uint64_t N, std::uint64_t a, std::uint64_t b, unsigned k, std::optional<unsigned> h,
                             double epsilon, std::optional<double> epsilon_prime, std::uint64_t seed) {
        const auto inst = validate_instance(N, a, b);
        const auto plan = make_plan(inst, k, h, epsilon, epsilon_prime);
        const auto rep = [&] {
            py::gil_scoped_release release;
            return compare_distributed(inst, plan, seed);
        }();
        auto j = to_json(rep);
        j["passed"] = rep.passed(1e-9);
        return to_python(j);
    }, py::arg("N"), py::arg("a"), py::arg("b"), py::arg("k") = 2, py::arg("h") = py::none(),
          py::arg("epsilon") = 0.25, py::arg("epsilon_prime") = py::none(), py::arg("seed") = 0);

#ifdef DISTLOG_VERSION
    m.attr("__version__") = DISTLOG_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}

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

#include "distlog/dist.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "distlog/errors.hpp"
#include "distlog/phase.hpp"

namespace distlog {

namespace {

// Node outcome arrays are held in memory as r^2 * 4^t complex entries.
constexpr std::uint64_t kMaxKrausEntries = std::uint64_t{1} << 24;
// Joint prefix laws and exhaustive enumerations stop at 2^26 outcomes.
constexpr unsigned kMaxEnumerationBits = 26;

std::string str(std::uint64_t v) { return std::to_string(v); }

}  // namespace

unsigned default_overlap(unsigned total_width, unsigned k) {
    return std::max(2u, std::min(3u, total_width / k));
}

DistPlan make_plan_for_width(unsigned accuracy_bits, unsigned k, unsigned h, double epsilon, double epsilon_prime) {
    if (!(epsilon_prime > 0.0 && epsilon_prime < epsilon && epsilon < 1.0))
        throw ConfigError("budgets must satisfy 0 < epsilon' < epsilon < 1");
    if (k < 2) throw ConfigError("k must be at least 2");
    DistPlan plan;
    plan.k = k;
    plan.h = h;
    plan.epsilon = epsilon;
    plan.epsilon_prime = epsilon_prime;
    plan.total_width = accuracy_bits + 1;
    const std::uint64_t W = plan.total_width;

    plan.l.resize(k + 1);
    plan.l[0] = 1;
    for (unsigned i = 1; i < k; ++i) plan.l[i] = static_cast<unsigned>(i * W / k);
    plan.l[k] = plan.total_width;
    for (unsigned i = 0; i < k; ++i) {
        if (plan.l[i + 1] <= plan.l[i])
            throw ConfigError("plan infeasible: k exceeds floor(W / 2) = " + str(W / 2) + " for W = " + str(W));
    }
    if (h < 2 || h > plan.max_h())
        throw ConfigError("h = " + str(h) + " out of range [2, " + str(plan.max_h()) + "]");

    const unsigned extra = ceil_log2(2.0 + static_cast<double>(k) / epsilon_prime);
    plan.t.resize(k);
    plan.measured.resize(k);
    for (unsigned j = 0; j < k; ++j) {
        const unsigned span = plan.l[j + 1] - plan.l[j];
        const bool last = j + 1 == k;
        plan.t[j] = span + (last ? 1 : 3) + extra;
        plan.measured[j] = span + (last ? 1 : h + 1);
        if (plan.measured[j] > plan.t[j])
            throw ConfigError("h = " + str(h) + " measures more qubits than node " + str(j + 1) + " holds");
    }
    return plan;
}

DistPlan make_plan(const ProblemInstance &instance, unsigned k, std::optional<unsigned> h, double epsilon,
                   std::optional<double> epsilon_prime) {
    const unsigned n = instance.accuracy_bits();
    if (k == 0) throw ConfigError("k must be at least 2");
    return make_plan_for_width(n, k, h.value_or(default_overlap(n + 1, k)), epsilon,
                               epsilon_prime.value_or(epsilon / 2));
}

ShiftChoice select_shift(const BitString &tail, const BitString &head, unsigned h) {
    if (tail.width() != h + 1 || head.width() != h + 1) throw InternalError("select_shift: overlap width mismatch");
    ShiftChoice best{0, false};
    std::uint64_t best_dist = ~std::uint64_t{0};
    const std::int64_t limit = std::int64_t{1} << (h - 1);
    for (std::int64_t magnitude = 0; magnitude <= limit; ++magnitude) {
        for (std::int64_t q : {magnitude, -magnitude}) {
            const auto d = circ_dist(wrap_add(tail, q), head);
            if (d == 0) return {q, true};
            if (d < best_dist) {
                best_dist = d;
                best.q = q;
            }
            if (magnitude == 0) break;
        }
    }
    return best;
}

CorrectResult correct(std::span<const BitString> measurements, unsigned h) {
    if (measurements.empty()) throw ConfigError("correct needs at least one measurement");
    const std::size_t k = measurements.size();
    CorrectResult result{measurements[k - 1], std::vector<std::int64_t>(k - 1, 0), false};
    BitString c = measurements[k - 1];
    for (std::size_t j = k - 1; j-- > 0;) {
        const BitString &m = measurements[j];
        if (m.width() < h + 1 || c.width() < h + 1) throw ConfigError("correct: estimates narrower than h + 1 bits");
        const auto choice = select_shift(slice(m, m.width() - h, m.width()), slice(c, 1, h + 1), h);
        result.shifts[j] = choice.q;
        result.fallback = result.fallback || !choice.exact;
        const BitString p = wrap_add(m, choice.q);
        c = c.width() > h + 1 ? concat(p, slice(c, h + 2, c.width())) : p;
    }
    result.output = c;
    return result;
}

CorrectResult correct(std::span<const BitString> measurements, const DistPlan &plan) {
    if (measurements.size() != plan.k)
        throw ConfigError("correct: expected " + str(plan.k) + " estimates, got " + str(measurements.size()));
    for (unsigned j = 0; j < plan.k; ++j) {
        if (measurements[j].width() != plan.measured[j])
            throw ConfigError("correct: estimate " + str(j + 1) + " has width " + str(measurements[j].width()) +
                              ", plan expects " + str(plan.measured[j]));
    }
    return correct(measurements, plan.h);
}

CorrectOracleResult brute_force_correct_oracle(const BitString &w, std::span<const std::int64_t> perturbations,
                                               const DistPlan &plan) {
    if (w.width() != plan.total_width) throw ConfigError("oracle: w must have the plan's total width");
    if (perturbations.size() != plan.k) throw ConfigError("oracle: one perturbation per node");
    const std::int64_t bound = std::int64_t{1} << (plan.h - 2);
    std::vector<BitString> xs;
    xs.reserve(plan.k);
    for (unsigned j = 0; j + 1 < plan.k; ++j) {
        if (std::llabs(perturbations[j]) > bound) throw ConfigError("oracle: perturbation exceeds 2^{h-2}");
        xs.push_back(wrap_add(slice(w, plan.l[j], plan.l[j + 1] + plan.h), perturbations[j]));
    }
    const std::int64_t last = perturbations[plan.k - 1];
    if (std::llabs(last) > 1) throw ConfigError("oracle: last perturbation exceeds 1");
    const BitString window = slice(w, plan.l[plan.k - 1], plan.l[plan.k]);
    xs.push_back(wrap_add(window, last));

    const auto result = correct(xs, plan);
    CorrectOracleResult out{false, result.output, circ_dist(result.output, w), circ_dist(xs.back(), window)};
    out.ok = out.distance == out.expected_distance &&
             out.expected_distance == static_cast<std::uint64_t>(std::llabs(last));
    return out;
}

// ---------------------------------------------------------------------------
// DistributedSimulator

DistributedSimulator::DistributedSimulator(const ProblemInstance &instance, const DistPlan &plan)
    : instance_(instance), plan_(plan), orbit_(power_orbit(instance.a, instance.N)) {
    r_ = orbit_.size();
    const std::size_t L = instance.L;
    std::vector<std::int64_t> position(std::size_t{1} << L, -1);
    for (std::size_t i = 0; i < r_; ++i) position[orbit_[i]] = static_cast<std::int64_t>(i);
    start_ = static_cast<std::size_t>(position[1]);
    for (auto x : orbit_) {
        if (position[x * instance.b % instance.N] < 0) throw InternalError("orbit of a is not closed under b");
    }

    kraus_.resize(plan.k);
    effects_.resize(plan.k);
    for (unsigned j = 0; j < plan.k; ++j) {
        const unsigned t = plan.t[j];
        const unsigned qubits = 2 * t + instance.L;
        simulated_qubits_ = std::max(simulated_qubits_, qubits);
        if (qubits > RegisterLayout::kMaxQubits) {
            throw ConfigError("node " + str(j + 1) + " needs " + str(qubits) + " qubits, over the " +
                              str(RegisterLayout::kMaxQubits) + "-qubit budget; use --mode analytic");
        }
        const std::size_t outcomes = std::size_t{1} << (2 * t);
        if (static_cast<std::uint64_t>(r_) * r_ * outcomes > kMaxKrausEntries)
            throw ConfigError("node " + str(j + 1) + " transfer tensor too large; use --mode analytic");

        auto &K = kraus_[j];
        K.assign(outcomes * r_ * r_, Amplitude{});
        const std::string ra = std::to_string(j + 1) + "a";
        const std::string rb = std::to_string(j + 1) + "b";
        const RegisterLayout layout({{ra, t}, {rb, t}, {"C", instance.L}});
        for (std::size_t in = 0; in < r_; ++in) {
            auto state = QuantumState::basis(layout, {{"C", orbit_[in]}});
            state.hadamard_layer(ra);
            state.hadamard_layer(rb);
            state.controlled_modmul_power(ra, "C", instance.a, plan.l[j] - 1, instance.N);
            state.controlled_modmul_power(rb, "C", instance.b, plan.l[j] - 1, instance.N);
            state.inverse_qft(ra);
            state.inverse_qft(rb);
            const auto amps = state.amplitudes();
            const std::size_t work_mask = low_mask(instance.L);
            for (std::size_t idx = 0; idx < amps.size(); ++idx) {
                const auto out = position[idx & work_mask];
                if (out < 0) continue;  // off-orbit work values carry no amplitude
                K[((idx >> L) * r_ + static_cast<std::size_t>(out)) * r_ + in] = amps[idx];
            }
        }

        const unsigned w = plan.measured[j];
        auto &E = effects_[j];
        E.assign(std::size_t{1} << (2 * w), std::vector<Amplitude>(r_ * r_, Amplitude{}));
        for (std::size_t m = 0; m < outcomes; ++m) {
            auto &e = E[prefix_of(j, m)];
            for (std::size_t out = 0; out < r_; ++out) {
                for (std::size_t in = 0; in < r_; ++in) {
                    const Amplitude left = std::conj(kraus(j, m, out, in));
                    if (left == Amplitude{}) continue;
                    for (std::size_t in2 = 0; in2 < r_; ++in2) e[in * r_ + in2] += left * kraus(j, m, out, in2);
                }
            }
        }
    }
    first_node_law_.resize(effects_[0].size());
    for (std::size_t p = 0; p < first_node_law_.size(); ++p)
        first_node_law_[p] = std::max(0.0, effects_[0][p][start_ * r_ + start_].real());
}

std::size_t DistributedSimulator::prefix_of(unsigned j, std::size_t m) const {
    const unsigned t = plan_.t[j];
    const unsigned drop = t - plan_.measured[j];
    const std::size_t pa = (m >> t) >> drop;
    const std::size_t pb = (m & low_mask(t)) >> drop;
    return (pa << plan_.measured[j]) | pb;
}

std::vector<Amplitude> DistributedSimulator::apply_prefix(unsigned j, std::size_t p,
                                                          std::span<const Amplitude> rho) const {
    const unsigned t = plan_.t[j];
    const unsigned w = plan_.measured[j];
    const unsigned drop = t - w;
    const std::size_t pa = p >> w;
    const std::size_t pb = p & low_mask(w);
    std::vector<Amplitude> result(r_ * r_, Amplitude{});
    std::vector<Amplitude> k_rho(r_ * r_);
    for (std::size_t sa = 0; sa < (std::size_t{1} << drop); ++sa) {
        for (std::size_t sb = 0; sb < (std::size_t{1} << drop); ++sb) {
            const std::size_t m = ((((pa << drop) | sa)) << t) | ((pb << drop) | sb);
            // k_rho = K_m rho
            for (std::size_t out = 0; out < r_; ++out) {
                for (std::size_t c = 0; c < r_; ++c) {
                    Amplitude acc{};
                    for (std::size_t in = 0; in < r_; ++in) acc += kraus(j, m, out, in) * rho[in * r_ + c];
                    k_rho[out * r_ + c] = acc;
                }
            }
            // result += k_rho K_m^dagger
            for (std::size_t out = 0; out < r_; ++out) {
                for (std::size_t out2 = 0; out2 < r_; ++out2) {
                    Amplitude acc{};
                    for (std::size_t c = 0; c < r_; ++c) acc += k_rho[out * r_ + c] * std::conj(kraus(j, m, out2, c));
                    result[out * r_ + out2] += acc;
                }
            }
        }
    }
    return result;
}

namespace {

double trace_product(std::span<const Amplitude> rho, std::span<const Amplitude> effect, std::size_t r) {
    Amplitude acc{};
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t c = 0; c < r; ++c) acc += rho[i * r + c] * effect[c * r + i];
    return std::max(0.0, acc.real());
}

void scale(std::vector<Amplitude> &rho, double factor) {
    for (auto &x : rho) x *= factor;
}

void hand_off(HandoffLedger *ledger, unsigned qubits) {
    if (ledger == nullptr) return;
    ++ledger->transfers;
    ledger->qubits += qubits;
}

}  // namespace

NodeMeasurements DistributedSimulator::sample(Rng &rng, HandoffLedger *ledger) const {
    std::vector<Amplitude> unused;
    return sample(rng, ledger, unused);
}

NodeMeasurements DistributedSimulator::sample(Rng &rng, HandoffLedger *ledger,
                                              std::vector<Amplitude> &final_work_state) const {
    NodeMeasurements out;
    std::vector<Amplitude> rho(r_ * r_, Amplitude{});
    rho[start_ * r_ + start_] = 1.0;
    for (unsigned j = 0; j < plan_.k; ++j) {
        if (j > 0) hand_off(ledger, instance_.L);
        const unsigned w = plan_.measured[j];
        std::size_t p = 0;
        double prob = 0.0;
        if (j == 0) {
            p = rng.pick(first_node_law_);
            prob = first_node_law_[p];
        } else {
            std::vector<double> law(effects_[j].size());
            for (std::size_t q = 0; q < law.size(); ++q) law[q] = trace_product(rho, effects_[j][q], r_);
            p = rng.pick(law);
            prob = law[p];
        }
        // Measuring node j's prefix now rather than after the last node is
        // equivalent: later nodes never touch ja or jb.
        rho = apply_prefix(j, p, rho);
        scale(rho, 1.0 / prob);
        out.a.emplace_back(w, p >> w);
        out.b.emplace_back(w, p & low_mask(w));
    }
    final_work_state = std::move(rho);
    return out;
}

std::vector<double> DistributedSimulator::prefix_distribution() const {
    unsigned bits = 0;
    for (auto w : plan_.measured) bits += 2 * w;
    if (bits > kMaxEnumerationBits) throw ConfigError("joint prefix law over " + str(bits) + " bits is too large");

    struct History {
        std::size_t index;
        std::vector<Amplitude> rho;  // unnormalized: trace is the history's probability
    };
    std::vector<History> histories;
    std::vector<Amplitude> rho0(r_ * r_, Amplitude{});
    rho0[start_ * r_ + start_] = 1.0;
    histories.push_back({0, std::move(rho0)});

    std::vector<double> law(std::size_t{1} << bits, 0.0);
    for (unsigned j = 0; j < plan_.k; ++j) {
        const std::size_t prefixes = effects_[j].size();
        std::vector<History> next;
        for (const auto &hist : histories) {
            for (std::size_t p = 0; p < prefixes; ++p) {
                const std::size_t index = hist.index * prefixes + p;
                if (j + 1 == plan_.k) {
                    law[index] = trace_product(hist.rho, effects_[j][p], r_);
                    continue;
                }
                if (trace_product(hist.rho, effects_[j][p], r_) == 0.0) continue;
                next.push_back({index, apply_prefix(j, p, hist.rho)});
            }
        }
        histories = std::move(next);
    }
    return law;
}

std::vector<double> DistributedSimulator::node_prefix_distribution(unsigned j,
                                                                   std::span<const Amplitude> work_state) const {
    if (j >= plan_.k) throw ConfigError("node index out of range");
    if (work_state.size() != r_) throw ConfigError("work state must have one amplitude per orbit element");
    std::vector<Amplitude> rho(r_ * r_);
    for (std::size_t i = 0; i < r_; ++i)
        for (std::size_t c = 0; c < r_; ++c) rho[i * r_ + c] = work_state[i] * std::conj(work_state[c]);
    std::vector<double> law(effects_[j].size());
    for (std::size_t p = 0; p < law.size(); ++p) law[p] = trace_product(rho, effects_[j][p], r_);
    return law;
}

std::vector<Amplitude> DistributedSimulator::orbit_eigenstate(std::uint64_t s) const {
    std::vector<Amplitude> u(r_);
    const double norm = 1.0 / std::sqrt(static_cast<double>(r_));
    for (std::size_t k = 0; k < r_; ++k)
        u[k] = std::polar(norm, -2 * std::numbers::pi * static_cast<double>((s * k) % r_) / static_cast<double>(r_));
    return u;
}

double DistributedSimulator::sweep_norm(bool subtract_factorized) const {
    using Matrix = Eigen::MatrixXcd;
    const std::size_t r = r_;
    const std::size_t D = subtract_factorized ? 2 * r : r;

    std::vector<std::uint64_t> b_num(r);
    if (subtract_factorized)
        for (std::uint64_t s = 0; s < r; ++s) b_num[s] = eigenphase_numerator(instance_, instance_.b, s);

    // Bond: simulated orbit index (first r) then the branch s (last r).
    Matrix R = Matrix::Zero(1, static_cast<Eigen::Index>(D));
    R(0, static_cast<Eigen::Index>(start_)) = 1.0;
    if (subtract_factorized)
        for (std::size_t s = 0; s < r; ++s) R(0, static_cast<Eigen::Index>(r + s)) = -1.0 / std::sqrt(double(r));

    for (unsigned j = 0; j < plan_.k; ++j) {
        const unsigned t = plan_.t[j];
        const std::size_t outcomes = std::size_t{1} << (2 * t);
        const std::size_t size = std::size_t{1} << t;
        std::vector<std::vector<Amplitude>> psi_a, psi_b;
        if (subtract_factorized) {
            for (std::uint64_t s = 0; s < r; ++s) {
                psi_a.push_back(phase_outcome_amplitudes(Fraction::make(s, r).shifted(plan_.l[j] - 1), t));
                psi_b.push_back(phase_outcome_amplitudes(Fraction::make(b_num[s], r).shifted(plan_.l[j] - 1), t));
            }
        }
        const auto rows = static_cast<std::size_t>(R.rows());
        Matrix M(static_cast<Eigen::Index>(rows * outcomes), static_cast<Eigen::Index>(D));
        for (std::size_t row = 0; row < rows; ++row) {
            for (std::size_t m = 0; m < outcomes; ++m) {
                const auto mi = static_cast<Eigen::Index>(row * outcomes + m);
                for (std::size_t out = 0; out < r; ++out) {
                    Amplitude acc{};
                    for (std::size_t in = 0; in < r; ++in)
                        acc += R(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(in)) * kraus(j, m, out, in);
                    M(mi, static_cast<Eigen::Index>(out)) = acc;
                }
                if (!subtract_factorized) continue;
                const std::size_t ma = m / size;
                const std::size_t mb = m % size;
                for (std::size_t s = 0; s < r; ++s) {
                    const auto col = static_cast<Eigen::Index>(r + s);
                    M(mi, col) = R(static_cast<Eigen::Index>(row), col) * psi_a[s][ma] * psi_b[s][mb];
                }
            }
        }
        // M = Q R' with Q an isometry, so the remaining contraction only
        // needs R'.
        Eigen::HouseholderQR<Matrix> qr(M);
        const auto keep = std::min<Eigen::Index>(M.rows(), M.cols());
        R = qr.matrixQR().topRows(keep).triangularView<Eigen::Upper>();
    }

    // Close the C bond: the simulated part is already in the orbit basis,
    // the factorized part contributes u_s.
    Matrix closing = Matrix::Zero(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(r));
    for (std::size_t x = 0; x < r; ++x) closing(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) = 1.0;
    if (subtract_factorized) {
        for (std::uint64_t s = 0; s < r; ++s) {
            const auto u = orbit_eigenstate(s);
            for (std::size_t x = 0; x < r; ++x)
                closing(static_cast<Eigen::Index>(r + s), static_cast<Eigen::Index>(x)) = u[x];
        }
    }
    return (R * closing).norm();
}

double DistributedSimulator::factorization_deviation() const { return sweep_norm(true); }

double DistributedSimulator::simulated_norm() const { return sweep_norm(false); }

// ---------------------------------------------------------------------------
// DistributedAnalytic

DistributedAnalytic::DistributedAnalytic(const ProblemInstance &instance, const DistPlan &plan)
    : instance_(instance), plan_(plan) {
    const std::uint64_t r = instance.r;
    b_numerators_.reserve(r);
    for (std::uint64_t s = 0; s < r; ++s) b_numerators_.push_back(eigenphase_numerator(instance, instance.b, s));
    marginals_.reserve(r * plan.k * 2);
    for (std::uint64_t s = 0; s < r; ++s) {
        for (unsigned j = 0; j < plan.k; ++j) {
            for (std::uint64_t numerator : {s, b_numerators_[s]}) {
                const auto omega = Fraction::make(numerator, r).shifted(plan.l[j] - 1);
                const auto full = phase_outcome_distribution(omega, plan.t[j]);
                marginals_.push_back(prefix_marginal(full, plan.t[j], plan.measured[j]));
                samplers_.emplace_back(marginals_.back());
            }
        }
    }
}

NodeMeasurements DistributedAnalytic::sample(Rng &rng) const {
    NodeMeasurements out;
    const std::uint64_t s = rng.below(instance_.r);
    out.latent_s = s;
    for (unsigned j = 0; j < plan_.k; ++j) {
        const std::size_t base = (s * plan_.k + j) * 2;
        out.a.emplace_back(plan_.measured[j], samplers_[base](rng));
        out.b.emplace_back(plan_.measured[j], samplers_[base + 1](rng));
    }
    return out;
}

std::vector<double> DistributedAnalytic::prefix_distribution() const {
    unsigned bits = 0;
    for (auto w : plan_.measured) bits += 2 * w;
    if (bits > kMaxEnumerationBits) throw ConfigError("joint prefix law over " + str(bits) + " bits is too large");
    std::vector<double> law(std::size_t{1} << bits, 0.0);
    const double weight = 1.0 / static_cast<double>(instance_.r);
    for (std::uint64_t s = 0; s < instance_.r; ++s) {
        std::vector<double> product{weight};
        for (unsigned j = 0; j < plan_.k; ++j) {
            for (int family = 0; family < 2; ++family) {
                const auto &marg = node_marginal(s, j, family);
                std::vector<double> next(product.size() * marg.size());
                for (std::size_t i = 0; i < product.size(); ++i)
                    for (std::size_t v = 0; v < marg.size(); ++v) next[i * marg.size() + v] = product[i] * marg[v];
                product = std::move(next);
            }
        }
        for (std::size_t i = 0; i < law.size(); ++i) law[i] += product[i];
    }
    return law;
}

namespace {

// Windows of the target phase seen by each node, and the accuracy bound.
struct NodeTarget {
    BitString window;
    std::uint64_t bound;
};

std::vector<NodeTarget> node_targets(std::uint64_t numerator, std::uint64_t r, const DistPlan &plan) {
    std::vector<NodeTarget> targets;
    for (unsigned j = 0; j < plan.k; ++j) {
        const bool last = j + 1 == plan.k;
        const unsigned end = last ? plan.l[j + 1] : plan.l[j + 1] + plan.h;
        targets.push_back({fraction_bits(numerator, r, plan.l[j], end), last ? 1u : std::uint64_t{1} << (plan.h - 2)});
    }
    return targets;
}

// Pushes the product law of one family's node prefixes through correct.
// With `targets`, only outcomes inside the accuracy event contribute.
std::vector<double> corrected_law(const DistPlan &plan, const std::vector<const std::vector<double> *> &marginals,
                                  const std::vector<NodeTarget> *targets) {
    unsigned bits = 0;
    for (auto w : plan.measured) bits += w;
    if (bits > kMaxEnumerationBits) throw ConfigError("corrected law over " + str(bits) + " bits is too large");
    std::vector<double> law(std::size_t{1} << plan.total_width, 0.0);
    std::vector<BitString> current;
    current.reserve(plan.k);
    auto recurse = [&](auto &self, unsigned j, double prob) -> void {
        if (j == plan.k) {
            law[correct(current, plan.h).output.value()] += prob;
            return;
        }
        const auto &marg = *marginals[j];
        for (std::size_t v = 0; v < marg.size(); ++v) {
            if (marg[v] == 0.0) continue;
            BitString x(plan.measured[j], v);
            if (targets && circ_dist(x, (*targets)[j].window) > (*targets)[j].bound) continue;
            current.push_back(x);
            self(self, j + 1, prob * marg[v]);
            current.pop_back();
        }
    };
    recurse(recurse, 0, 1.0);
    return law;
}

double paired_success(std::span<const double> law_a, std::span<const double> law_b, const ProblemInstance &instance,
                      unsigned width, const std::vector<char> &table) {
    const std::uint64_t r = instance.r;
    std::vector<double> by_residue_a(r, 0.0), by_residue_b(r, 0.0);
    for (std::size_t y = 0; y < law_a.size(); ++y) {
        const auto res = round_scaled(BitString(width, y), r) % r;
        by_residue_a[res] += law_a[y];
        by_residue_b[res] += law_b[y];
    }
    double mass = 0.0;
    for (std::uint64_t x = 0; x < r; ++x)
        for (std::uint64_t y = 0; y < r; ++y)
            if (table[x * r + y]) mass += by_residue_a[x] * by_residue_b[y];
    return mass;
}

}  // namespace

std::vector<double> DistributedAnalytic::corrected_distribution(std::uint64_t s, int family) const {
    std::vector<const std::vector<double> *> marginals;
    for (unsigned j = 0; j < plan_.k; ++j) marginals.push_back(&node_marginal(s, j, family));
    return corrected_law(plan_, marginals, nullptr);
}

std::vector<AccuracyEventMass> accuracy_event_masses(const ProblemInstance &instance, const DistPlan &plan) {
    const DistributedAnalytic analytic(instance, plan);
    const auto table = postprocess_success_table(instance);
    std::vector<AccuracyEventMass> masses;
    for (std::uint64_t s = 0; s < instance.r; ++s) {
        AccuracyEventMass entry{s, 1.0, 0.0};
        std::vector<std::vector<double>> restricted;
        for (int family = 0; family < 2; ++family) {
            const auto targets = node_targets(family == 0 ? s : analytic.b_numerator(s), instance.r, plan);
            std::vector<const std::vector<double> *> marginals;
            for (unsigned j = 0; j < plan.k; ++j) {
                const auto &marg = analytic.node_marginal(s, j, family);
                marginals.push_back(&marg);
                double inside = 0.0;
                for (std::size_t v = 0; v < marg.size(); ++v)
                    if (circ_dist(BitString(plan.measured[j], v), targets[j].window) <= targets[j].bound)
                        inside += marg[v];
                entry.event *= inside;
            }
            restricted.push_back(corrected_law(plan, marginals, &targets));
        }
        entry.event_and_success = paired_success(restricted[0], restricted[1], instance, plan.total_width, table);
        masses.push_back(entry);
    }
    return masses;
}

double distributed_success_probability(std::span<const double> prefix_law, const ProblemInstance &instance,
                                       const DistPlan &plan) {
    unsigned bits = 0;
    for (auto w : plan.measured) bits += 2 * w;
    if (prefix_law.size() != (std::size_t{1} << bits)) throw ConfigError("prefix law size does not match the plan");
    const unsigned family_bits = bits / 2;
    // Residue of the corrected estimate for every family-prefix combination.
    std::vector<std::uint64_t> residue(std::size_t{1} << family_bits);
    std::vector<BitString> xs;
    for (std::size_t combo = 0; combo < residue.size(); ++combo) {
        xs.clear();
        unsigned shift = family_bits;
        for (unsigned j = 0; j < plan.k; ++j) {
            shift -= plan.measured[j];
            xs.emplace_back(plan.measured[j], (combo >> shift) & low_mask(plan.measured[j]));
        }
        residue[combo] = round_scaled(correct(xs, plan.h).output, instance.r) % instance.r;
    }
    const auto table = postprocess_success_table(instance);
    double mass = 0.0;
    for (std::size_t index = 0; index < prefix_law.size(); ++index) {
        if (prefix_law[index] == 0.0) continue;
        std::size_t combo_a = 0, combo_b = 0;
        unsigned shift = bits;
        for (unsigned j = 0; j < plan.k; ++j) {
            const unsigned w = plan.measured[j];
            shift -= w;
            combo_a = (combo_a << w) | ((index >> shift) & low_mask(w));
            shift -= w;
            combo_b = (combo_b << w) | ((index >> shift) & low_mask(w));
        }
        if (table[residue[combo_a] * instance.r + residue[combo_b]]) mass += prefix_law[index];
    }
    return mass;
}

double distributed_success_probability(const DistributedAnalytic &analytic, const ProblemInstance &instance,
                                       const DistPlan &plan) {
    const auto table = postprocess_success_table(instance);
    double mass = 0.0;
    for (std::uint64_t s = 0; s < instance.r; ++s) {
        mass += paired_success(analytic.corrected_distribution(s, 0), analytic.corrected_distribution(s, 1), instance,
                               plan.total_width, table);
    }
    return mass / static_cast<double>(instance.r);
}

NodeMeasurements AnalyticDistStage::sample(Rng &rng, HandoffLedger *ledger) {
    for (unsigned j = 1; j < k_; ++j) hand_off(ledger, L_);
    return analytic_.sample(rng);
}

std::unique_ptr<DistStage> make_dist_stage(const ProblemInstance &instance, const DistPlan &plan, Mode mode) {
    if (mode == Mode::Statevector) return std::make_unique<StatevectorDistStage>(instance, plan);
    return std::make_unique<AnalyticDistStage>(instance, plan);
}

RunRecord solve_distributed(const ProblemInstance &instance, const DistPlan &plan, DistStage &stage, Mode mode,
                            unsigned max_retries, Rng &rng) {
    if (max_retries == 0) throw ConfigError("max_retries must be positive");
    if (plan.total_width > kMaxBitWidth) throw ConfigError("plan too wide for 64-bit estimates");
    RunRecord record;
    record.algorithm = "distributed";
    record.mode = mode;
    record.simulated_qubits = stage.simulated_qubits();
    HandoffLedger ledger;
    for (unsigned attempt = 1; attempt <= max_retries; ++attempt) {
        auto nodes = stage.sample(rng, &ledger);
        const auto ca = correct(nodes.a, plan);
        const auto cb = correct(nodes.b, plan);
        const auto post = postprocess(ca.output, cb.output, instance);
        record.retries = attempt;
        record.m_a = ca.output;
        record.m_b = cb.output;
        record.mhat_a = post.mhat_a;
        record.mhat_b = post.mhat_b;
        record.g_hat = post.g_hat;
        record.latent_s = nodes.latent_s;
        record.node_a = std::move(nodes.a);
        record.node_b = std::move(nodes.b);
        record.correct_fallback = ca.fallback || cb.fallback;
        if (post.status == PostprocessResult::Status::Ok) {
            record.success = true;
            break;
        }
    }
    record.comm_qubits = ledger.qubits;
    return record;
}

}  // namespace distlog

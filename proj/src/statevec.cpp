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

#include "distlog/statevec.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <set>

#include "distlog/errors.hpp"
#include "distlog/numtheory.hpp"

namespace distlog {

RegisterLayout::RegisterLayout(std::vector<Register> registers) : registers_(std::move(registers)) {
    if (registers_.empty()) {
        throw ConfigError("register layout must declare at least one register");
    }
    std::set<std::string> seen;
    for (const auto &r : registers_) {
        if (r.width == 0) {
            throw ConfigError("register '" + r.name + "' has zero width");
        }
        if (!seen.insert(r.name).second) {
            throw ConfigError("duplicate register name '" + r.name + "'");
        }
        total_width_ += r.width;
    }
    if (total_width_ > kMaxQubits) {
        throw ConfigError("layout needs " + std::to_string(total_width_) + " qubits; the dense simulator is limited to " +
                          std::to_string(kMaxQubits));
    }
    shifts_.resize(registers_.size());
    unsigned shift = 0;
    for (std::size_t i = registers_.size(); i-- > 0;) {
        shifts_[i] = shift;
        shift += registers_[i].width;
    }
}

std::size_t RegisterLayout::find(std::string_view name) const {
    for (std::size_t i = 0; i < registers_.size(); ++i) {
        if (registers_[i].name == name) {
            return i;
        }
    }
    throw ConfigError("unknown register '" + std::string(name) + "'");
}

std::size_t RegisterLayout::compose(const std::map<std::string, std::uint64_t> &values) const {
    std::size_t index = 0;
    for (const auto &[name, value] : values) {
        const std::size_t pos = find(name);
        if (value > low_mask(registers_[pos].width)) {
            throw ConfigError("value " + std::to_string(value) + " overflows register '" + name + "'");
        }
        index |= static_cast<std::size_t>(value) << shifts_[pos];
    }
    return index;
}

QuantumState QuantumState::basis(const RegisterLayout &layout,
                                 const std::map<std::string, std::uint64_t> &assignments) {
    std::vector<Amplitude> amps(layout.dimension());
    amps[layout.compose(assignments)] = 1.0;
    return QuantumState(layout, std::move(amps));
}

QuantumState QuantumState::product(const RegisterLayout &layout,
                                   const std::map<std::string, std::vector<Amplitude>> &register_states) {
    // Build by Kronecker products in declaration order.
    std::vector<Amplitude> amps{1.0};
    for (const auto &reg : layout.registers()) {
        const std::size_t dim = std::size_t{1} << reg.width;
        std::vector<Amplitude> local(dim);
        auto it = register_states.find(reg.name);
        if (it == register_states.end()) {
            local[0] = 1.0;
        } else {
            if (it->second.size() != dim) {
                throw ConfigError("state for register '" + reg.name + "' has wrong dimension");
            }
            local = it->second;
        }
        std::vector<Amplitude> next(amps.size() * dim);
        for (std::size_t i = 0; i < amps.size(); ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                next[i * dim + j] = amps[i] * local[j];
            }
        }
        amps = std::move(next);
    }
    for (const auto &[name, _] : register_states) {
        layout.find(name);
    }
    QuantumState state(layout, std::move(amps));
    if (std::abs(state.norm_squared() - 1.0) > 1e-12) {
        throw ConfigError("product state is not normalized");
    }
    return state;
}

double QuantumState::norm_squared() const {
    double total = 0.0;
    for (const auto &a : amplitudes_) {
        total += std::norm(a);
    }
    return total;
}

void QuantumState::hadamard_layer(std::string_view reg) {
    const std::size_t pos = layout_.find(reg);
    const unsigned lo = layout_.shift(pos);
    const unsigned width = layout_.registers()[pos].width;
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    const std::size_t dim = amplitudes_.size();
    for (unsigned q = lo; q < lo + width; ++q) {
        const std::size_t stride = std::size_t{1} << q;
        for (std::size_t block = 0; block < dim; block += 2 * stride) {
            for (std::size_t i = block; i < block + stride; ++i) {
                const Amplitude a = amplitudes_[i];
                const Amplitude b = amplitudes_[i + stride];
                amplitudes_[i] = (a + b) * inv_sqrt2;
                amplitudes_[i + stride] = (a - b) * inv_sqrt2;
            }
        }
    }
}

namespace {

void check_work_register(unsigned width, std::uint64_t N) {
    if (N < 2 || N > (std::uint64_t{1} << width)) {
        throw ConfigError("modulus " + std::to_string(N) + " does not fit the work register");
    }
}

}  // namespace

void QuantumState::controlled_modmul_power(std::string_view control, std::string_view work, std::uint64_t base,
                                           unsigned power_exponent, std::uint64_t N) {
    const std::size_t cpos = layout_.find(control);
    const std::size_t wpos = layout_.find(work);
    if (cpos == wpos) {
        throw ConfigError("control and work registers must differ");
    }
    const unsigned wwidth = layout_.registers()[wpos].width;
    check_work_register(wwidth, N);
    if (std::gcd(base, N) != 1) {
        throw ConfigError("controlled multiplication by " + std::to_string(base) + " mod " + std::to_string(N) +
                          " is not a permutation (gcd != 1)");
    }
    const std::uint64_t c = mod_pow2k(base, power_exponent, N);
    const std::size_t cdim = std::size_t{1} << layout_.registers()[cpos].width;
    std::vector<std::uint64_t> powers(cdim);
    powers[0] = 1 % N;
    for (std::size_t j = 1; j < cdim; ++j) {
        powers[j] = powers[j - 1] * c % N;
    }
    const unsigned wshift = layout_.shift(wpos);
    const std::size_t wclear = ~(static_cast<std::size_t>(low_mask(wwidth)) << wshift);
    std::vector<Amplitude> out(amplitudes_.size());
    for (std::size_t idx = 0; idx < amplitudes_.size(); ++idx) {
        const std::uint64_t x = layout_.extract(idx, wpos);
        std::size_t target = idx;
        if (x < N) {
            const std::uint64_t j = layout_.extract(idx, cpos);
            target = (idx & wclear) | (static_cast<std::size_t>(powers[j] * x % N) << wshift);
        }
        out[target] = amplitudes_[idx];
    }
    amplitudes_ = std::move(out);
}

void QuantumState::modmul(std::string_view work, std::uint64_t multiplier, std::uint64_t N) {
    const std::size_t wpos = layout_.find(work);
    const unsigned wwidth = layout_.registers()[wpos].width;
    check_work_register(wwidth, N);
    if (std::gcd(multiplier, N) != 1) {
        throw ConfigError("multiplication by " + std::to_string(multiplier) + " mod " + std::to_string(N) +
                          " is not a permutation (gcd != 1)");
    }
    const std::uint64_t c = multiplier % N;
    const unsigned wshift = layout_.shift(wpos);
    const std::size_t wclear = ~(static_cast<std::size_t>(low_mask(wwidth)) << wshift);
    std::vector<Amplitude> out(amplitudes_.size());
    for (std::size_t idx = 0; idx < amplitudes_.size(); ++idx) {
        const std::uint64_t x = layout_.extract(idx, wpos);
        const std::size_t target = x < N ? (idx & wclear) | (static_cast<std::size_t>(c * x % N) << wshift) : idx;
        out[target] = amplitudes_[idx];
    }
    amplitudes_ = std::move(out);
}

void QuantumState::inverse_qft(std::string_view reg) { fourier(reg, -1.0); }

void QuantumState::qft(std::string_view reg) { fourier(reg, +1.0); }

void QuantumState::fourier(std::string_view reg, double sign) {
    const std::size_t pos = layout_.find(reg);
    const unsigned width = layout_.registers()[pos].width;
    const unsigned shift = layout_.shift(pos);
    const std::size_t n = std::size_t{1} << width;

    // Twiddles e^{sign * 2 pi i k / n}, k < n.
    std::vector<Amplitude> twiddle(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        twiddle[k] = {std::cos(angle), std::sin(angle)};
    }
    std::vector<std::size_t> reversed(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t r = 0;
        for (unsigned b = 0; b < width; ++b) {
            if (k & (std::size_t{1} << b)) {
                r |= std::size_t{1} << (width - 1 - b);
            }
        }
        reversed[k] = r;
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));

    const std::size_t lo_count = std::size_t{1} << shift;
    const std::size_t hi_count = amplitudes_.size() >> (shift + width);
    std::vector<Amplitude> buf(n);
    for (std::size_t hi = 0; hi < hi_count; ++hi) {
        for (std::size_t lo = 0; lo < lo_count; ++lo) {
            const std::size_t base = (hi << (shift + width)) | lo;
            for (std::size_t k = 0; k < n; ++k) {
                buf[reversed[k]] = amplitudes_[base | (k << shift)];
            }
            for (std::size_t len = 2; len <= n; len <<= 1) {
                const std::size_t half = len >> 1;
                const std::size_t step = n / len;
                for (std::size_t start = 0; start < n; start += len) {
                    for (std::size_t k = 0; k < half; ++k) {
                        const Amplitude u = buf[start + k];
                        const Amplitude v = buf[start + k + half] * twiddle[k * step];
                        buf[start + k] = u + v;
                        buf[start + k + half] = u - v;
                    }
                }
            }
            for (std::size_t k = 0; k < n; ++k) {
                amplitudes_[base | (k << shift)] = buf[k] * scale;
            }
        }
    }
}

std::vector<double> QuantumState::marginal_distribution(std::string_view reg, unsigned prefix_width) const {
    const RegisterPrefix prefix{std::string(reg), prefix_width};
    return joint_marginal(std::span<const RegisterPrefix>(&prefix, 1));
}

std::vector<double> QuantumState::joint_marginal(std::span<const RegisterPrefix> prefixes) const {
    struct Selector {
        std::size_t pos;
        unsigned drop;
        unsigned width;
    };
    std::vector<Selector> selectors;
    unsigned out_width = 0;
    for (const auto &p : prefixes) {
        const std::size_t pos = layout_.find(p.name);
        const unsigned w = layout_.registers()[pos].width;
        if (p.width < 1 || p.width > w) {
            throw ConfigError("prefix width " + std::to_string(p.width) + " invalid for register '" + p.name + "'");
        }
        selectors.push_back({pos, w - p.width, p.width});
        out_width += p.width;
    }
    if (out_width > 30) {
        throw ConfigError("joint marginal over more than 30 bits");
    }
    std::vector<double> probs(std::size_t{1} << out_width, 0.0);
    for (std::size_t idx = 0; idx < amplitudes_.size(); ++idx) {
        const double p = std::norm(amplitudes_[idx]);
        if (p == 0.0) {
            continue;
        }
        std::size_t key = 0;
        for (const auto &s : selectors) {
            key = (key << s.width) | (layout_.extract(idx, s.pos) >> s.drop);
        }
        probs[key] += p;
    }
    return probs;
}

MeasurementOutcome QuantumState::measure_prefix(std::string_view reg, unsigned prefix_width, Rng &rng) {
    const std::vector<double> probs = marginal_distribution(reg, prefix_width);
    const std::size_t outcome = rng.pick(probs);
    const double p = probs[outcome];
    if (p < 1e-15) {
        throw InternalError("measurement selected an outcome with negligible mass");
    }
    const std::size_t pos = layout_.find(reg);
    const unsigned drop = layout_.registers()[pos].width - prefix_width;
    const double scale = 1.0 / std::sqrt(p);
    for (std::size_t idx = 0; idx < amplitudes_.size(); ++idx) {
        if ((layout_.extract(idx, pos) >> drop) == outcome) {
            amplitudes_[idx] *= scale;
        } else {
            amplitudes_[idx] = 0.0;
        }
    }
    return {BitString(prefix_width, outcome), p};
}

void QuantumState::write_csv(std::ostream &out) const {
    out << "index,re,im\n";
    char line[96];
    for (std::size_t idx = 0; idx < amplitudes_.size(); ++idx) {
        const Amplitude a = amplitudes_[idx];
        if (a == Amplitude{}) {
            continue;
        }
        std::snprintf(line, sizeof line, "%zu,%.17g,%.17g\n", idx, a.real(), a.imag());
        out << line;
    }
}

double total_variation(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) {
        throw ConfigError("total_variation: size mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        sum += std::abs(p[i] - q[i]);
    }
    return 0.5 * sum;
}

}  // namespace distlog

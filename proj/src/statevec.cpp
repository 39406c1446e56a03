// Copyright 2026 The QVR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "qvr/statevec.hpp"

#include "qvr/error.hpp"

#include <bit>
#include <cmath>
#include <random>
#include <string>

namespace qvr {

Statevector::Statevector(std::size_t num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
        throw ConfigError("qubit count must be in [1, " + std::to_string(kMaxQubits) +
                          "], got " + std::to_string(num_qubits));
    }
    amps_.assign(std::size_t{1} << num_qubits, Complex{0.0, 0.0});
    amps_[0] = 1.0;
}

Statevector Statevector::from_amplitudes(std::vector<Complex> amps) {
    if (amps.size() < 2 || !std::has_single_bit(amps.size()) ||
        amps.size() > (std::size_t{1} << kMaxQubits)) {
        throw ArgumentError("amplitude vector length must be a power of two >= 2");
    }
    Statevector s;
    s.num_qubits_ = static_cast<std::size_t>(std::countr_zero(amps.size()));
    s.amps_ = std::move(amps);
    return s;
}

double Statevector::norm_squared() const noexcept {
    double acc = 0.0;
    for (const auto &a : amps_) {
        acc += std::norm(a);
    }
    return acc;
}

void Statevector::check_qubit(std::size_t q) const {
    if (q >= num_qubits_) {
        throw IndexError("qubit index " + std::to_string(q) + " out of range for " +
                         std::to_string(num_qubits_) + " qubits");
    }
}

Statevector &Statevector::apply_single(std::size_t qubit, const Complex (&u)[4]) {
    check_qubit(qubit);
    const std::size_t stride = std::size_t{1} << (num_qubits_ - 1 - qubit);
    const std::size_t dim = amps_.size();
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t off = 0; off < stride; ++off) {
            const std::size_t i0 = base + off;
            const std::size_t i1 = i0 + stride;
            const Complex a0 = amps_[i0];
            const Complex a1 = amps_[i1];
            amps_[i0] = u[0] * a0 + u[1] * a1;
            amps_[i1] = u[2] * a0 + u[3] * a1;
        }
    }
    return *this;
}

Statevector &Statevector::apply_ry(std::size_t qubit, double angle) {
    const double c = std::cos(0.5 * angle);
    const double s = std::sin(0.5 * angle);
    const Complex u[4] = {c, -s, s, c};
    return apply_single(qubit, u);
}

Statevector &Statevector::apply_rz(std::size_t qubit, double angle) {
    const Complex lo = std::polar(1.0, -0.5 * angle);
    const Complex u[4] = {lo, 0.0, 0.0, std::conj(lo)};
    return apply_single(qubit, u);
}

Statevector &Statevector::apply_rot(std::size_t qubit, double phi, double theta,
                                    double omega) {
    // Fused R_z(omega) R_y(theta) R_z(phi).
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    const Complex u[4] = {std::polar(c, -0.5 * (phi + omega)),
                          -std::polar(s, 0.5 * (phi - omega)),
                          std::polar(s, -0.5 * (phi - omega)),
                          std::polar(c, 0.5 * (phi + omega))};
    return apply_single(qubit, u);
}

Statevector &Statevector::apply_cnot(std::size_t control, std::size_t target) {
    check_qubit(control);
    check_qubit(target);
    if (control == target) {
        throw ArgumentError("CNOT control and target must differ");
    }
    const std::size_t cmask = std::size_t{1} << (num_qubits_ - 1 - control);
    const std::size_t tmask = std::size_t{1} << (num_qubits_ - 1 - target);
    for (std::size_t b = 0; b < amps_.size(); ++b) {
        if ((b & cmask) != 0U && (b & tmask) == 0U) {
            std::swap(amps_[b], amps_[b | tmask]);
        }
    }
    return *this;
}

Statevector &Statevector::apply_diagonal(std::span<const double> phases) {
    if (phases.size() != amps_.size()) {
        throw ArgumentError("diagonal length " + std::to_string(phases.size()) +
                            " does not match state dimension " +
                            std::to_string(amps_.size()));
    }
    for (std::size_t b = 0; b < amps_.size(); ++b) {
        amps_[b] *= std::polar(1.0, -phases[b]);
    }
    return *this;
}

double expectation_mean_z(const Statevector &s) {
    const std::size_t n = s.num_qubits();
    double acc = 0.0;
    for (std::size_t b = 0; b < s.dim(); ++b) {
        // sum_i z_i(b) = n - 2 * popcount(b)
        const auto ones = static_cast<double>(std::popcount(b));
        acc += std::norm(s[b]) * (static_cast<double>(n) - 2.0 * ones);
    }
    return acc / static_cast<double>(n);
}

double sample_mean_z(const Statevector &s, const ShotConfig &cfg) {
    if (cfg.exact()) {
        return expectation_mean_z(s);
    }
    std::vector<double> probs(s.dim());
    for (std::size_t b = 0; b < s.dim(); ++b) {
        probs[b] = std::norm(s[b]);
    }
    std::mt19937_64 rng(cfg.seed);
    std::discrete_distribution<std::size_t> dist(probs.begin(), probs.end());
    const auto n = static_cast<double>(s.num_qubits());
    double acc = 0.0;
    for (std::size_t k = 0; k < cfg.shots; ++k) {
        const std::size_t b = dist(rng);
        acc += (n - 2.0 * static_cast<double>(std::popcount(b))) / n;
    }
    return acc / static_cast<double>(cfg.shots);
}

} // namespace qvr

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
/**
 * @file
 * Dense statevector engine for small qubit registers.
 *
 * Basis index b encodes qubit 0 as the most significant bit, so for n qubits
 * qubit q corresponds to bit (n - 1 - q) of b.
 */
#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qvr {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxQubits = 12;

/// Number of measurement samples, or exact expectation values.
struct ShotConfig {
    std::size_t shots = 0; ///< 0 means exact
    std::uint64_t seed = 0;

    [[nodiscard]] bool exact() const noexcept { return shots == 0; }
};

/**
 * @brief Pure n-qubit state stored as 2^n complex amplitudes.
 *
 * Gate methods mutate the state in place and return `*this` so that circuits
 * can be chained. Copies are cheap for the register sizes used here.
 */
class Statevector {
  public:
    /// |0...0> on n qubits; throws ConfigError unless 1 <= n <= kMaxQubits.
    explicit Statevector(std::size_t num_qubits);

    /// Adopts the given amplitudes; size must be a power of two.
    static Statevector from_amplitudes(std::vector<Complex> amps);

    [[nodiscard]] std::size_t num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] std::size_t dim() const noexcept { return amps_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const noexcept { return amps_; }
    [[nodiscard]] const Complex &operator[](std::size_t b) const { return amps_[b]; }

    [[nodiscard]] double norm_squared() const noexcept;

    Statevector &apply_ry(std::size_t qubit, double angle);
    Statevector &apply_rz(std::size_t qubit, double angle);
    /// R_z(omega) * R_y(theta) * R_z(phi) on one qubit.
    Statevector &apply_rot(std::size_t qubit, double phi, double theta, double omega);
    Statevector &apply_cnot(std::size_t control, std::size_t target);
    /// Multiplies amplitude b by exp(-i * phases[b]).
    Statevector &apply_diagonal(std::span<const double> phases);
    /// Generic 2x2 unitary given row-major as {u00, u01, u10, u11}.
    Statevector &apply_single(std::size_t qubit, const Complex (&u)[4]);

  private:
    Statevector() = default;
    void check_qubit(std::size_t q) const;

    std::size_t num_qubits_ = 0;
    std::vector<Complex> amps_;
};

/// Convenience wrapper matching the free-function style used by callers.
inline Statevector init_zero(std::size_t num_qubits) { return Statevector(num_qubits); }

/// z_i(b) = +1 when qubit i is 0 in basis state b, else -1.
[[nodiscard]] inline int z_sign(std::size_t num_qubits, std::size_t qubit,
                                std::size_t basis) noexcept {
    return ((basis >> (num_qubits - 1 - qubit)) & 1U) != 0U ? -1 : 1;
}

/// Mean over qubits of <sigma_z^i>, in [-1, 1].
[[nodiscard]] double expectation_mean_z(const Statevector &s);

/// Shot-sampled estimate of expectation_mean_z. Exact when cfg.exact().
[[nodiscard]] double sample_mean_z(const Statevector &s, const ShotConfig &cfg);

} // namespace qvr

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
 * Circuit pieces of the rewinding operator: angle embedding U[x], the
 * trainable eigenbasis W(alpha), and the time-encoded diagonal D(eps, t).
 */
#pragma once

#include "qvr/statevec.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace qvr {

/// d features embedded on the first d of n qubits; remaining qubits idle.
struct EmbeddingSpec {
    std::size_t features = 1;
    std::size_t qubits = 2;

    void validate() const;
};

/**
 * @brief Angles of the layered eigenbasis circuit.
 *
 * Layer l applies a general rotation (phi, theta, omega) to every qubit and
 * then, for n >= 2, a forward ring of CNOTs (q -> (q + 1) mod n).
 * Storage is row-major over (layer, qubit, angle).
 */
class WParams {
  public:
    WParams() = default;
    WParams(std::size_t layers, std::size_t qubits);
    WParams(std::size_t layers, std::size_t qubits, std::vector<double> angles);

    [[nodiscard]] std::size_t layers() const noexcept { return layers_; }
    [[nodiscard]] std::size_t qubits() const noexcept { return qubits_; }
    [[nodiscard]] std::size_t size() const noexcept { return angles_.size(); }
    [[nodiscard]] std::span<const double> angles() const noexcept { return angles_; }
    [[nodiscard]] std::span<double> angles() noexcept { return angles_; }

    [[nodiscard]] double at(std::size_t layer, std::size_t qubit, std::size_t k) const {
        return angles_[(layer * qubits_ + qubit) * 3 + k];
    }

    static constexpr std::size_t size_for(std::size_t layers, std::size_t qubits) {
        return layers * qubits * 3;
    }

  private:
    std::size_t layers_ = 0;
    std::size_t qubits_ = 0;
    std::vector<double> angles_;
};

/**
 * @brief All 2^n - 1 nonempty Pauli-Z strings and their sign table.
 *
 * Strings are ordered by cardinality, then lexicographically by qubit index.
 * sign(b, q) is the product of z_i(b) over the qubits in string q.
 */
class DiagGenerator {
  public:
    DiagGenerator() = default;
    explicit DiagGenerator(std::size_t qubits);

    [[nodiscard]] std::size_t qubits() const noexcept { return qubits_; }
    [[nodiscard]] std::size_t dim() const noexcept { return std::size_t{1} << qubits_; }
    /// Number of Z strings, Q = 2^n - 1.
    [[nodiscard]] std::size_t terms() const noexcept { return strings_.size(); }
    [[nodiscard]] const std::vector<std::vector<std::size_t>> &strings() const noexcept {
        return strings_;
    }
    [[nodiscard]] int sign(std::size_t basis, std::size_t term) const {
        return signs_[basis * strings_.size() + term];
    }

  private:
    std::size_t qubits_ = 0;
    std::vector<std::vector<std::size_t>> strings_;
    std::vector<int> signs_; // dim x terms, row-major
};

/// R_y(x_0) x ... x R_y(x_{d-1}) x I applied to |0...0>.
[[nodiscard]] Statevector embed(std::span<const double> x, const EmbeddingSpec &spec);

/// Applies W(alpha), or W(alpha)^dagger when adjoint is set.
void apply_w(Statevector &s, const WParams &w, bool adjoint = false);

/// phases[b] = t * sum_q eps[q] * sign(b, q).
[[nodiscard]] std::vector<double> diag_phases(const DiagGenerator &gen,
                                              std::span<const double> eps, double t);
void diag_phases_into(const DiagGenerator &gen, std::span<const double> eps, double t,
                      std::span<double> out);

/// W^dagger D(eps, t) W applied to s.
void rewind(Statevector &s, const WParams &w, const DiagGenerator &gen,
            std::span<const double> eps, double t);

} // namespace qvr

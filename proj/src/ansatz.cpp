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
#include "qvr/ansatz.hpp"

#include "qvr/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qvr {

void EmbeddingSpec::validate() const {
    if (qubits < 1 || qubits > kMaxQubits) {
        throw ConfigError("embedding qubit count out of range: " + std::to_string(qubits));
    }
    if (features < 1 || features > qubits) {
        throw ConfigError("embedding needs 1 <= features <= qubits, got features=" +
                          std::to_string(features) + " qubits=" + std::to_string(qubits));
    }
}

WParams::WParams(std::size_t layers, std::size_t qubits)
    : WParams(layers, qubits, std::vector<double>(size_for(layers, qubits), 0.0)) {}

WParams::WParams(std::size_t layers, std::size_t qubits, std::vector<double> angles)
    : layers_(layers), qubits_(qubits), angles_(std::move(angles)) {
    if (layers_ < 1) {
        throw ConfigError("W(alpha) needs at least one layer");
    }
    if (angles_.size() != size_for(layers_, qubits_)) {
        throw ArgumentError("W(alpha) expects " + std::to_string(size_for(layers_, qubits_)) +
                            " angles, got " + std::to_string(angles_.size()));
    }
    if (!std::all_of(angles_.begin(), angles_.end(), [](double a) { return std::isfinite(a); })) {
        throw NumericError("W(alpha) angles must be finite");
    }
}

DiagGenerator::DiagGenerator(std::size_t qubits) : qubits_(qubits) {
    if (qubits < 1 || qubits > kMaxQubits) {
        throw ConfigError("diagonal generator qubit count out of range: " +
                          std::to_string(qubits));
    }
    // Enumerate subsets as bit masks over qubit indices, then order by
    // (cardinality, lexicographic index list).
    const std::size_t count = (std::size_t{1} << qubits) - 1;
    strings_.reserve(count);
    for (std::size_t mask = 1; mask <= count; ++mask) {
        std::vector<std::size_t> s;
        for (std::size_t q = 0; q < qubits; ++q) {
            if ((mask >> q) & 1U) {
                s.push_back(q);
            }
        }
        strings_.push_back(std::move(s));
    }
    std::sort(strings_.begin(), strings_.end(), [](const auto &a, const auto &b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    });

    const std::size_t dimension = dim();
    signs_.resize(dimension * count);
    for (std::size_t b = 0; b < dimension; ++b) {
        for (std::size_t q = 0; q < count; ++q) {
            int sgn = 1;
            for (auto i : strings_[q]) {
                sgn *= z_sign(qubits_, i, b);
            }
            signs_[b * count + q] = sgn;
        }
    }
}

Statevector embed(std::span<const double> x, const EmbeddingSpec &spec) {
    spec.validate();
    if (x.size() != spec.features) {
        throw ArgumentError("embedding expects " + std::to_string(spec.features) +
                            " features, got " + std::to_string(x.size()));
    }
    Statevector s(spec.qubits);
    for (std::size_t j = 0; j < x.size(); ++j) {
        s.apply_ry(j, x[j]);
    }
    return s;
}

namespace {

void apply_ring(Statevector &s, bool reverse) {
    const std::size_t n = s.num_qubits();
    if (n < 2) {
        return;
    }
    if (!reverse) {
        for (std::size_t q = 0; q < n; ++q) {
            s.apply_cnot(q, (q + 1) % n);
        }
    } else {
        for (std::size_t q = n; q-- > 0;) {
            s.apply_cnot(q, (q + 1) % n);
        }
    }
}

} // namespace

void apply_w(Statevector &s, const WParams &w, bool adjoint) {
    if (w.qubits() != s.num_qubits()) {
        throw ArgumentError("W(alpha) built for " + std::to_string(w.qubits()) +
                            " qubits applied to a " + std::to_string(s.num_qubits()) +
                            "-qubit state");
    }
    const std::size_t n = w.qubits();
    if (!adjoint) {
        for (std::size_t l = 0; l < w.layers(); ++l) {
            for (std::size_t q = 0; q < n; ++q) {
                s.apply_rot(q, w.at(l, q, 0), w.at(l, q, 1), w.at(l, q, 2));
            }
            apply_ring(s, false);
        }
        return;
    }
    // (Rz(w) Ry(t) Rz(p))^dagger = Rz(-p) Ry(-t) Rz(-w)
    for (std::size_t l = w.layers(); l-- > 0;) {
        apply_ring(s, true);
        for (std::size_t q = n; q-- > 0;) {
            s.apply_rot(q, -w.at(l, q, 2), -w.at(l, q, 1), -w.at(l, q, 0));
        }
    }
}

void diag_phases_into(const DiagGenerator &gen, std::span<const double> eps, double t,
                      std::span<double> out) {
    const std::size_t terms = gen.terms();
    if (eps.size() != terms) {
        throw ArgumentError("expected " + std::to_string(terms) + " eigenphase parameters, got " +
                            std::to_string(eps.size()));
    }
    if (out.size() != gen.dim()) {
        throw ArgumentError("phase buffer has wrong length");
    }
    for (std::size_t b = 0; b < gen.dim(); ++b) {
        double acc = 0.0;
        for (std::size_t q = 0; q < terms; ++q) {
            acc += eps[q] * gen.sign(b, q);
        }
        out[b] = t * acc;
    }
}

std::vector<double> diag_phases(const DiagGenerator &gen, std::span<const double> eps,
                                double t) {
    std::vector<double> out(gen.dim());
    diag_phases_into(gen, eps, t, out);
    return out;
}

void rewind(Statevector &s, const WParams &w, const DiagGenerator &gen,
            std::span<const double> eps, double t) {
    if (gen.qubits() != s.num_qubits()) {
        throw ArgumentError("diagonal generator and state qubit counts differ");
    }
    apply_w(s, w, false);
    const auto phases = diag_phases(gen, eps, t);
    s.apply_diagonal(phases);
    apply_w(s, w, true);
}

} // namespace qvr

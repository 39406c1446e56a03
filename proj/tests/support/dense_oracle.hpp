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
// Dense-matrix oracle built from explicit Kronecker products. Shares no code
// with the library's gate kernels.
#pragma once

#include "qvr/model.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

namespace oracle {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using C = std::complex<double>;

inline Mat kron(const Mat &a, const Mat &b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline Mat eye2() { return Mat::Identity(2, 2); }

inline Mat ry(double a) {
    Mat m(2, 2);
    m << std::cos(a / 2), -std::sin(a / 2), std::sin(a / 2), std::cos(a / 2);
    return m;
}

inline Mat rz(double a) {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = std::exp(C(0, -a / 2));
    m(1, 1) = std::exp(C(0, a / 2));
    return m;
}

inline Mat pauli_z() {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = 1;
    m(1, 1) = -1;
    return m;
}

/// Qubit 0 is the leftmost Kronecker factor.
inline Mat lift(std::size_t n, std::size_t q, const Mat &g) {
    Mat out = Mat::Identity(1, 1);
    for (std::size_t k = 0; k < n; ++k) {
        out = kron(out, k == q ? g : eye2());
    }
    return out;
}

inline Mat cnot(std::size_t n, std::size_t control, std::size_t target) {
    // |0><0|_c x I + |1><1|_c x X_t
    Mat p0 = Mat::Zero(2, 2);
    p0(0, 0) = 1;
    Mat p1 = Mat::Zero(2, 2);
    p1(1, 1) = 1;
    Mat x = Mat::Zero(2, 2);
    x(0, 1) = 1;
    x(1, 0) = 1;
    Mat a = Mat::Identity(1, 1);
    Mat b = Mat::Identity(1, 1);
    for (std::size_t k = 0; k < n; ++k) {
        a = kron(a, k == control ? p0 : eye2());
        b = kron(b, k == control ? p1 : (k == target ? x : eye2()));
    }
    return a + b;
}

inline Mat rot(double phi, double theta, double omega) { return rz(omega) * ry(theta) * rz(phi); }

inline Mat w_matrix(const qvr::WParams &w) {
    const std::size_t n = w.qubits();
    Mat u = Mat::Identity(Eigen::Index{1} << n, Eigen::Index{1} << n);
    for (std::size_t l = 0; l < w.layers(); ++l) {
        for (std::size_t q = 0; q < n; ++q) {
            u = lift(n, q, rot(w.at(l, q, 0), w.at(l, q, 1), w.at(l, q, 2))) * u;
        }
        if (n >= 2) {
            for (std::size_t q = 0; q < n; ++q) {
                u = cnot(n, q, (q + 1) % n) * u;
            }
        }
    }
    return u;
}

/// Nonempty subsets of {0..n-1}, by size then lexicographically.
inline std::vector<std::vector<std::size_t>> z_strings(std::size_t n) {
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
        std::vector<std::size_t> s;
        for (std::size_t q = 0; q < n; ++q) {
            if ((mask >> q) & 1U) {
                s.push_back(q);
            }
        }
        out.push_back(s);
    }
    std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    return out;
}

inline Mat z_string_matrix(std::size_t n, const std::vector<std::size_t> &s) {
    Mat out = Mat::Identity(1, 1);
    for (std::size_t k = 0; k < n; ++k) {
        out = kron(out, std::find(s.begin(), s.end(), k) != s.end() ? pauli_z() : eye2());
    }
    return out;
}

/// exp(-i t sum_q eps_q P_q) by the matrix exponential.
inline Mat diag_unitary(std::size_t n, std::span<const double> eps, double t) {
    const auto strings = z_strings(n);
    Mat m = Mat::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n);
    for (std::size_t q = 0; q < strings.size(); ++q) {
        m += eps[q] * z_string_matrix(n, strings[q]);
    }
    Mat arg = C(0, -t) * m;
    return arg.exp();
}

inline Vec embed(std::size_t n, std::span<const double> x) {
    Mat u = Mat::Identity(1, 1);
    for (std::size_t k = 0; k < n; ++k) {
        u = kron(u, k < x.size() ? ry(x[k]) : eye2());
    }
    Vec zero = Vec::Zero(Eigen::Index{1} << n);
    zero(0) = 1;
    return u * zero;
}

inline double mean_z(std::size_t n, const Vec &psi) {
    double acc = 0.0;
    for (std::size_t q = 0; q < n; ++q) {
        acc += (psi.adjoint() * lift(n, q, pauli_z()) * psi)(0, 0).real();
    }
    return acc / static_cast<double>(n);
}

inline Vec rewind(const qvr::WParams &w, std::span<const double> eps, double t, const Vec &psi) {
    const Mat u = w_matrix(w);
    return u.adjoint() * diag_unitary(w.qubits(), eps, t) * u * psi;
}

inline double omega(std::span<const double> x, double t, const qvr::ModelParams &p,
                    std::span<const double> eps) {
    const std::size_t n = p.alpha.qubits();
    const double eta0 = std::clamp(p.eta0, -1.0, 1.0);
    return eta0 - mean_z(n, rewind(p.alpha, eps, t, embed(n, x)));
}

inline Vec to_eigen(const qvr::Statevector &s) {
    Vec v(static_cast<Eigen::Index>(s.dim()));
    for (std::size_t b = 0; b < s.dim(); ++b) {
        v(static_cast<Eigen::Index>(b)) = s[b];
    }
    return v;
}

inline double max_abs_diff(const qvr::Statevector &s, const Vec &v) {
    return (to_eigen(s) - v).cwiseAbs().maxCoeff();
}

} // namespace oracle

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
#include "dense_oracle.hpp"
#include "doctest.h"

#include "qvr/ansatz.hpp"
#include "qvr/error.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace qvr;

namespace {

WParams random_w(std::size_t layers, std::size_t n, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(0.0, 2 * std::numbers::pi);
    std::vector<double> a(WParams::size_for(layers, n));
    for (auto &v : a) {
        v = u(rng);
    }
    return WParams(layers, n, std::move(a));
}

std::vector<double> random_vec(std::size_t k, double lo, double hi, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(k);
    for (auto &x : v) {
        x = u(rng);
    }
    return v;
}

double diff(const Statevector &a, const Statevector &b) {
    return oracle::max_abs_diff(a, oracle::to_eigen(b));
}

} // namespace

TEST_CASE("embed") {
    const std::vector<double> zero{0.0, 0.0};
    const Statevector s = embed(zero, {2, 2});
    CHECK(s[0] == Complex(1.0, 0.0));

    const std::vector<double> pi3(3, std::numbers::pi);
    const Statevector f = embed(pi3, {3, 3});
    CHECK(std::abs(std::abs(f[7]) - 1.0) < 1e-15);

    const std::vector<double> half{std::numbers::pi / 2};
    const Statevector u = embed(half, {1, 2});
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(u[0] - Complex(r, 0)) < 1e-15);
    CHECK(std::abs(u[1]) < 1e-15);
    CHECK(std::abs(u[2] - Complex(r, 0)) < 1e-15);
    CHECK(std::abs(u[3]) < 1e-15);

    CHECK_THROWS_AS((void)embed(zero, {1, 2}), ArgumentError);
    CHECK_THROWS_AS((void)embed(zero, {3, 2}), ConfigError);
}

TEST_CASE("wparams shape") {
    const WParams w(3, 2);
    CHECK(w.size() == 18);
    CHECK_THROWS_AS(WParams(2, 2, std::vector<double>(5, 0.0)), ArgumentError);
    CHECK_THROWS_AS(WParams(1, 1, std::vector<double>{0.0, NAN, 0.0}), NumericError);
}

TEST_CASE("apply_w") {
    std::mt19937_64 rng(17);
    SUBCASE("zero angles give the bare CNOT ring") {
        Statevector s = Statevector::from_amplitudes({0, 0, 1, 0});
        apply_w(s, WParams(2, 2));
        Statevector ring = Statevector::from_amplitudes({0, 0, 1, 0});
        for (int l = 0; l < 2; ++l) {
            ring.apply_cnot(0, 1).apply_cnot(1, 0);
        }
        CHECK(diff(s, ring) < 1e-15);
    }
    SUBCASE("adjoint inverts") {
        for (std::size_t n = 1; n <= 3; ++n) {
            const WParams w = random_w(3, n, rng);
            Statevector s = embed(random_vec(n, -3, 3, rng), {n, n});
            const Statevector before = s;
            apply_w(s, w);
            apply_w(s, w, true);
            CHECK(diff(s, before) < 1e-10);
        }
    }
    SUBCASE("matches the dense chain") {
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t n = 1 + static_cast<std::size_t>(trial % 3);
            const WParams w = random_w(3, n, rng);
            Statevector s = embed(random_vec(n, -3, 3, rng), {n, n});
            const oracle::Vec v = oracle::w_matrix(w) * oracle::to_eigen(s);
            apply_w(s, w);
            CHECK(oracle::max_abs_diff(s, v) < 1e-12);
        }
    }
    SUBCASE("qubit mismatch") {
        Statevector s = init_zero(3);
        CHECK_THROWS_AS(apply_w(s, WParams(1, 2)), ArgumentError);
    }
}

TEST_CASE("diag generator") {
    const DiagGenerator g1(1);
    CHECK(g1.terms() == 1);
    const DiagGenerator g3(3);
    CHECK(g3.terms() == 7);
    const std::vector<std::vector<std::size_t>> expected{{0}, {1}, {2}, {0, 1},
                                                         {0, 2}, {1, 2}, {0, 1, 2}};
    CHECK(g3.strings() == expected);
    for (std::size_t n = 1; n <= 4; ++n) {
        CHECK(DiagGenerator(n).strings() == oracle::z_strings(n));
    }
}

TEST_CASE("property: sign table equals the bitwise parity product") {
    for (std::size_t n = 1; n <= 5; ++n) {
        const DiagGenerator g(n);
        for (std::size_t b = 0; b < g.dim(); ++b) {
            for (std::size_t q = 0; q < g.terms(); ++q) {
                int parity = 0;
                for (const std::size_t i : g.strings()[q]) {
                    parity ^= static_cast<int>((b >> (n - 1 - i)) & 1U);
                }
                const int s = g.sign(b, q);
                REQUIRE((s == 1 || s == -1));
                REQUIRE(s == (parity != 0 ? -1 : 1));
            }
        }
    }
}

TEST_CASE("diag_phases") {
    std::mt19937_64 rng(23);
    const DiagGenerator g2(2);
    const std::vector<double> eps = random_vec(3, -2, 2, rng);
    for (const double p : diag_phases(g2, eps, 0.0)) {
        CHECK(p == 0.0);
    }

    const DiagGenerator g1(1);
    const std::vector<double> e1{0.7};
    const std::vector<double> p1 = diag_phases(g1, e1, 1.5);
    CHECK(p1[0] == doctest::Approx(1.05));
    CHECK(p1[1] == doctest::Approx(-1.05));

    const double t = 0.83;
    const std::vector<double> ph = diag_phases(g2, eps, t);
    const oracle::Mat d = oracle::diag_unitary(2, eps, t);
    for (Eigen::Index b = 0; b < 4; ++b) {
        CHECK(std::abs(d(b, b) - std::exp(oracle::C(0, -ph[static_cast<std::size_t>(b)]))) <
              1e-12);
        for (Eigen::Index c = 0; c < 4; ++c) {
            if (c != b) {
                CHECK(std::abs(d(b, c)) < 1e-12);
            }
        }
    }
    CHECK_THROWS_AS((void)diag_phases(g2, e1, 1.0), ArgumentError);
}

TEST_CASE("property: diag_phases is linear in eps") {
    std::mt19937_64 rng(29);
    const DiagGenerator g(3);
    for (int k = 0; k < 100; ++k) {
        const std::vector<double> eps = random_vec(7, -3, 3, rng);
        const double a = random_vec(1, -5, 5, rng)[0];
        const double t = random_vec(1, -5, 5, rng)[0];
        std::vector<double> scaled = eps;
        for (auto &e : scaled) {
            e *= a;
        }
        const auto p = diag_phases(g, eps, t);
        const auto q = diag_phases(g, scaled, t);
        for (std::size_t b = 0; b < p.size(); ++b) {
            REQUIRE(std::abs(q[b] - a * p[b]) < 1e-12);
        }
    }
}

TEST_CASE("rewind") {
    std::mt19937_64 rng(31);
    for (std::size_t n = 1; n <= 3; ++n) {
        const DiagGenerator g(n);
        const WParams w = random_w(2, n, rng);
        const std::vector<double> eps = random_vec(g.terms(), -2, 2, rng);
        const Statevector s0 = embed(random_vec(n, -3, 3, rng), {n, n});

        Statevector s = s0;
        rewind(s, w, g, eps, 0.0);
        CHECK(diff(s, s0) < 1e-10);

        Statevector a = s0;
        rewind(a, w, g, eps, 1.3);
        std::vector<double> neg = eps;
        for (auto &e : neg) {
            e = -e;
        }
        Statevector b = s0;
        rewind(b, w, g, neg, -1.3);
        CHECK(diff(a, b) < 1e-12);

        const oracle::Vec v = oracle::rewind(w, eps, 1.3, oracle::to_eigen(s0));
        CHECK(oracle::max_abs_diff(a, v) < 1e-10);
    }
}

TEST_CASE("property: rewind is unitary, additive in t and inverted by -t") {
    std::mt19937_64 rng(37);
    for (int k = 0; k < 300; ++k) {
        const std::size_t n = 1 + static_cast<std::size_t>(k % 3);
        const DiagGenerator g(n);
        const WParams w = random_w(1 + static_cast<std::size_t>(k % 4), n, rng);
        const std::vector<double> eps = random_vec(g.terms(), -3, 3, rng);
        const double t1 = random_vec(1, -10, 10, rng)[0];
        const double t2 = random_vec(1, -10, 10, rng)[0];
        const Statevector s0 = embed(random_vec(n, -3.2, 3.2, rng), {n, n});

        Statevector a = s0;
        rewind(a, w, g, eps, t1);
        REQUIRE(std::abs(a.norm_squared() - 1.0) < 1e-9);
        rewind(a, w, g, eps, t2);
        Statevector b = s0;
        rewind(b, w, g, eps, t1 + t2);
        REQUIRE(diff(a, b) < 1e-9);

        Statevector c = s0;
        rewind(c, w, g, eps, t1);
        rewind(c, w, g, eps, -t1);
        REQUIRE(diff(c, s0) < 1e-9);
    }
}

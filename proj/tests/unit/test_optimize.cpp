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
#include "doctest.h"

#include "qvr/error.hpp"
#include "qvr/optimize.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <sstream>

using namespace qvr;

namespace {

double sphere_shift(std::span<const double> x) {
    double s = 0.0;
    for (const double v : x) {
        s += (v - 1.0) * (v - 1.0);
    }
    return s;
}

double rosenbrock(std::span<const double> x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
}

OptimizerSpec spec_for(Method m, std::size_t budget, double tol = 0.0) {
    OptimizerSpec s;
    s.method = m;
    s.max_evaluations = budget;
    s.cost_tolerance = tol;
    return s;
}

void check_trace(const OptimizeResult &r, std::size_t budget) {
    REQUIRE(r.trace.evaluations() <= budget);
    for (std::size_t i = 1; i < r.trace.records.size(); ++i) {
        REQUIRE(r.trace.records[i].best_cost <= r.trace.records[i - 1].best_cost);
        REQUIRE(r.trace.records[i].iteration == i);
    }
}

} // namespace

TEST_CASE("method names") {
    CHECK(parse_method("powell") == Method::Powell);
    CHECK(parse_method("nelder-mead") == Method::NelderMead);
    CHECK(to_string(Method::NelderMead) == "nelder-mead");
    CHECK_THROWS_AS((void)parse_method("cobyla"), ConfigError);
}

TEST_CASE("spec validation") {
    OptimizerSpec s;
    CHECK_NOTHROW(s.validate());
    s.max_evaluations = 0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = OptimizerSpec{};
    s.initial_step = 0.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = OptimizerSpec{};
    s.cost_tolerance = -1.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("nelder-mead") {
    SUBCASE("shifted sphere") {
        const auto r = nelder_mead(sphere_shift, std::vector<double>(4, 0.0),
                                   spec_for(Method::NelderMead, 500));
        for (const double v : r.x) {
            CHECK(std::abs(v - 1.0) < 1e-4);
        }
        check_trace(r, 500);
    }
    SUBCASE("flat objective") {
        const std::vector<double> x0{0.3, -0.2};
        const auto r = nelder_mead([](std::span<const double>) { return 2.0; }, x0,
                                   spec_for(Method::NelderMead, 100));
        CHECK(r.x == x0);
        CHECK(r.budget_exhausted);
        CHECK(r.trace.evaluations() == 100);
    }
    SUBCASE("rosenbrock") {
        const auto r = nelder_mead(rosenbrock, {-1.2, 1.0}, spec_for(Method::NelderMead, 2000));
        CHECK(r.f < 1e-6);
        check_trace(r, 2000);
    }
}

TEST_CASE("powell") {
    SUBCASE("one dimension") {
        const auto r = powell([](std::span<const double> x) { return (x[0] - 3) * (x[0] - 3); },
                              {0.0}, spec_for(Method::Powell, 200));
        CHECK(std::abs(r.x[0] - 3.0) < 1e-8);
    }
    SUBCASE("convex quadratic") {
        const auto r = powell(
            [](std::span<const double> x) {
                const double a = x[0] - 1.0, b = x[1] + 2.0;
                return 3 * a * a + 2 * a * b + 2 * b * b;
            },
            {0.0, 0.0}, [] {
                OptimizerSpec s = spec_for(Method::Powell, 400);
                s.line_tolerance = 1e-9;
                return s;
            }());
        CHECK(std::abs(r.x[0] - 1.0) < 1e-6);
        CHECK(std::abs(r.x[1] + 2.0) < 1e-6);
        check_trace(r, 400);
    }
    SUBCASE("rosenbrock") {
        const auto r = powell(rosenbrock, {-1.2, 1.0}, spec_for(Method::Powell, 3000));
        CHECK(r.f < 1e-8);
        check_trace(r, 3000);
    }
}

TEST_CASE("property: both methods solve a random positive-definite quadratic") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    const int dim = 10;
    Eigen::MatrixXd a(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            a(i, j) = g(rng);
        }
    }
    const Eigen::MatrixXd h = a.transpose() * a / dim + Eigen::MatrixXd::Identity(dim, dim);
    Eigen::VectorXd target(dim);
    for (int i = 0; i < dim; ++i) {
        target(i) = g(rng);
    }
    const Eigen::VectorXd b = h * target;
    const Objective f = [&](std::span<const double> x) {
        const Eigen::Map<const Eigen::VectorXd> v(x.data(), dim);
        return 0.5 * v.dot(h * v) - b.dot(v);
    };
    const Eigen::VectorXd closed = h.ldlt().solve(b);
    for (const Method m : {Method::Powell, Method::NelderMead}) {
        const std::size_t budget = m == Method::Powell ? 20000 : 40000;
        const auto r = minimize(f, std::vector<double>(dim, 0.0), spec_for(m, budget, 1e-12));
        const Eigen::Map<const Eigen::VectorXd> x(r.x.data(), dim);
        CHECK((x - closed).norm() < 1e-3);
        check_trace(r, budget);
    }
}

TEST_CASE("every objective call is one trace record") {
    for (const Method m : {Method::Powell, Method::NelderMead}) {
        std::size_t calls = 0;
        const auto r = minimize(
            [&](std::span<const double> x) {
                ++calls;
                return sphere_shift(x);
            },
            {5.0, -3.0, 2.0}, spec_for(m, 137));
        CHECK(r.trace.evaluations() == calls);
        CHECK(calls <= 137);
        CHECK(r.f == r.trace.best_cost());
    }
}

TEST_CASE("non-finite inputs") {
    CHECK_THROWS_AS(
        (void)powell([](std::span<const double>) { return std::nan(""); }, {0.0},
                     spec_for(Method::Powell, 10)),
        NumericError);
    CHECK_THROWS_AS((void)nelder_mead(sphere_shift, {NAN}, spec_for(Method::NelderMead, 10)),
                    NumericError);
    CHECK_THROWS_AS((void)powell(sphere_shift, {}, spec_for(Method::Powell, 10)), ArgumentError);
}

TEST_CASE("trace jsonl") {
    const auto r = powell(sphere_shift, {0.0, 0.0}, spec_for(Method::Powell, 5));
    std::ostringstream out;
    write_trace_jsonl(out, r.trace);
    const std::string text = out.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);
    CHECK(text.find("\"best_cost\"") != std::string::npos);
    CHECK(text.rfind("{\"iteration\":0", 0) == 0);
}

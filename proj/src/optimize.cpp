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
#include "qvr/optimize.hpp"

#include "qvr/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace qvr {

std::string_view to_string(Method m) noexcept {
    return m == Method::NelderMead ? "nelder-mead" : "powell";
}

Method parse_method(std::string_view text) {
    if (text == "nelder-mead" || text == "neldermead" || text == "nm") {
        return Method::NelderMead;
    }
    if (text == "powell") {
        return Method::Powell;
    }
    throw ConfigError("unknown optimizer '" + std::string(text) +
                      "' (expected nelder-mead or powell)");
}

void OptimizerSpec::validate() const {
    if (max_evaluations < 1) {
        throw ConfigError("optimizer budget must be >= 1 evaluation");
    }
    if (!(initial_step > 0.0)) {
        throw ConfigError("optimizer initial_step must be positive");
    }
    if (!(cost_tolerance >= 0.0)) {
        throw ConfigError("optimizer cost_tolerance must be >= 0");
    }
    if (!(line_tolerance > 0.0)) {
        throw ConfigError("optimizer line_tolerance must be positive");
    }
    if (!(max_line_step >= initial_step)) {
        throw ConfigError("optimizer max_line_step must be >= initial_step");
    }
}

double TrainTrace::best_cost() const {
    return records.empty() ? std::numeric_limits<double>::infinity() : records.back().best_cost;
}

void write_trace_jsonl(std::ostream &out, const TrainTrace &trace) {
    const auto old_precision = out.precision(17);
    for (const auto &r : trace.records) {
        out << "{\"iteration\":" << r.iteration << ",\"cost\":" << r.cost
            << ",\"best_cost\":" << r.best_cost << ",\"wall_ms\":" << r.wall_ms << "}\n";
    }
    out.precision(old_precision);
}

namespace {

struct BudgetExhausted {};

/// Counts evaluations, records the trace and enforces the budget.
class Evaluator {
  public:
    Evaluator(const Objective &f, std::size_t budget)
        : f_(f), budget_(budget), start_(std::chrono::steady_clock::now()) {}

    double operator()(std::span<const double> x) {
        if (trace_.records.size() >= budget_) {
            throw BudgetExhausted{};
        }
        const double v = f_(x);
        if (std::isnan(v)) {
            throw NumericError("objective returned NaN at evaluation " +
                               std::to_string(trace_.records.size()));
        }
        const auto now = std::chrono::steady_clock::now();
        const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
        last_ = now;
        if (trace_.records.empty() || v < best_) {
            best_ = v;
            trace_.best_x.assign(x.begin(), x.end());
        }
        trace_.records.push_back({trace_.records.size(), v, best_, ms});
        return v;
    }

    OptimizeResult finish(bool exhausted) {
        OptimizeResult r;
        r.x = trace_.best_x;
        r.f = best_;
        r.trace = std::move(trace_);
        r.budget_exhausted = exhausted;
        return r;
    }

  private:
    const Objective &f_;
    std::size_t budget_;
    std::chrono::steady_clock::time_point start_;
    std::chrono::steady_clock::time_point last_ = start_;
    TrainTrace trace_;
    double best_ = std::numeric_limits<double>::infinity();
};

void check_start(const std::vector<double> &x0) {
    if (x0.empty()) {
        throw ArgumentError("optimizer needs at least one parameter");
    }
    if (!std::all_of(x0.begin(), x0.end(), [](double v) { return std::isfinite(v); })) {
        throw NumericError("optimizer start point must be finite");
    }
}

void run_nelder_mead(Evaluator &eval, std::vector<double> x0, const OptimizerSpec &spec) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> simplex(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) {
        simplex[i + 1][i] += spec.initial_step;
    }
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        fv[i] = eval(simplex[i]);
    }

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    auto point = [&](std::vector<double> &out, double coeff, const std::vector<double> &worst) {
        for (std::size_t j = 0; j < n; ++j) {
            out[j] = centroid[j] + coeff * (worst[j] - centroid[j]);
        }
    };

    for (;;) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];

        double diameter = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            double d2 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double dx = simplex[i][j] - simplex[best][j];
                d2 += dx * dx;
            }
            diameter = std::max(diameter, std::sqrt(d2));
        }
        if (diameter < spec.cost_tolerance) {
            return;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                centroid[j] += simplex[i][j];
            }
        }
        for (auto &c : centroid) {
            c /= static_cast<double>(n);
        }

        point(xr, -1.0, simplex[worst]);
        const double fr = eval(xr);
        if (fr < fv[best]) {
            point(xe, -2.0, simplex[worst]);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[worst] = xe;
                fv[worst] = fe;
            } else {
                simplex[worst] = xr;
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second]) {
            simplex[worst] = xr;
            fv[worst] = fr;
            continue;
        }
        if (fr < fv[worst]) {
            point(xc, -0.5, simplex[worst]); // outside contraction
            const double fc = eval(xc);
            if (fc <= fr) {
                simplex[worst] = xc;
                fv[worst] = fc;
                continue;
            }
        } else {
            point(xc, 0.5, simplex[worst]); // inside contraction
            const double fc = eval(xc);
            if (fc < fv[worst]) {
                simplex[worst] = xc;
                fv[worst] = fc;
                continue;
            }
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
            }
            fv[i] = eval(simplex[i]);
        }
    }
}

constexpr double kGolden = 0.6180339887498949; // (sqrt(5) - 1) / 2

/// Minimizes f(x + a * dir) over a, starting from the known value fx at a = 0.
/// Moves x to the best point found and returns its value.
double line_minimize(Evaluator &eval, std::vector<double> &x, double fx,
                     const std::vector<double> &dir, const OptimizerSpec &spec) {
    const std::size_t n = x.size();
    std::vector<double> trial(n);
    auto f_at = [&](double a) {
        for (std::size_t j = 0; j < n; ++j) {
            trial[j] = x[j] + a * dir[j];
        }
        return eval(trial);
    };
    auto move_to = [&](double a) {
        for (std::size_t j = 0; j < n; ++j) {
            x[j] += a * dir[j];
        }
    };
    // Golden-section search on [lo, hi]; (best_a, best_f) is the best point
    // already known inside the interval.
    auto golden = [&](double lo, double hi, double best_a, double best_f) {
        double x1 = hi - kGolden * (hi - lo);
        double x2 = lo + kGolden * (hi - lo);
        double f1 = f_at(x1);
        double f2 = f_at(x2);
        while (hi - lo > spec.line_tolerance) {
            if (f1 < f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - kGolden * (hi - lo);
                f1 = f_at(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + kGolden * (hi - lo);
                f2 = f_at(x2);
            }
        }
        if (f1 < best_f) {
            best_f = f1;
            best_a = x1;
        }
        if (f2 < best_f) {
            best_f = f2;
            best_a = x2;
        }
        move_to(best_a);
        return best_f;
    };

    // Bracket a < b < c (or reversed) with f(b) below both ends, expanding by
    // 1/golden but never beyond max_line_step.
    const double step = spec.initial_step;
    double a = 0.0;
    double fa = fx;
    double b = step;
    double fb = f_at(b);
    if (fb > fa) {
        const double fm = f_at(-step);
        if (!(fm < fa)) {
            return golden(-step, step, 0.0, fa);
        }
        b = -step;
        fb = fm;
    }
    auto next = [&](double from, double to) {
        const double c = to + (to - from) / kGolden;
        return std::abs(c) > spec.max_line_step ? std::copysign(spec.max_line_step, c) : c;
    };
    double c = next(a, b);
    double fc = f_at(c);
    while (fc < fb && std::abs(c) < spec.max_line_step) {
        a = b;
        fa = fb;
        b = c;
        fb = fc;
        c = next(a, b);
        fc = f_at(c);
    }
    if (fc < fb) {
        move_to(c);
        return fc;
    }
    return golden(std::min(a, c), std::max(a, c), b, fb);
}

void run_powell(Evaluator &eval, std::vector<double> x, const OptimizerSpec &spec) {
    const std::size_t n = x.size();
    std::vector<std::vector<double>> dirs(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        dirs[i][i] = 1.0;
    }
    double fx = eval(x);
    std::vector<double> x_start(n), x_ext(n), new_dir(n);
    for (;;) {
        x_start = x;
        const double f_start = fx;
        double biggest_drop = 0.0;
        std::size_t biggest_idx = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double before = fx;
            fx = line_minimize(eval, x, fx, dirs[i], spec);
            if (before - fx > biggest_drop) {
                biggest_drop = before - fx;
                biggest_idx = i;
            }
        }
        if (2.0 * (f_start - fx) <=
            spec.cost_tolerance * (std::abs(f_start) + std::abs(fx)) + 1e-300) {
            return;
        }
        double norm = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            new_dir[j] = x[j] - x_start[j];
            x_ext[j] = x[j] + new_dir[j];
            norm += new_dir[j] * new_dir[j];
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            continue;
        }
        const double f_ext = eval(x_ext);
        if (f_ext < f_start) {
            const double p = f_start - 2.0 * fx + f_ext;
            const double q = f_start - fx - biggest_drop;
            const double test = 2.0 * p * q * q - biggest_drop * (f_start - f_ext) * (f_start - f_ext);
            if (test < 0.0) {
                for (auto &v : new_dir) {
                    v /= norm;
                }
                fx = line_minimize(eval, x, fx, new_dir, spec);
                dirs[biggest_idx] = dirs[n - 1];
                dirs[n - 1] = new_dir;
            }
        }
    }
}

} // namespace

OptimizeResult nelder_mead(const Objective &f, std::vector<double> x0, const OptimizerSpec &spec) {
    spec.validate();
    check_start(x0);
    Evaluator eval(f, spec.max_evaluations);
    try {
        run_nelder_mead(eval, std::move(x0), spec);
    } catch (const BudgetExhausted &) {
        return eval.finish(true);
    }
    return eval.finish(false);
}

OptimizeResult powell(const Objective &f, std::vector<double> x0, const OptimizerSpec &spec) {
    spec.validate();
    check_start(x0);
    Evaluator eval(f, spec.max_evaluations);
    try {
        run_powell(eval, std::move(x0), spec);
    } catch (const BudgetExhausted &) {
        return eval.finish(true);
    }
    return eval.finish(false);
}

OptimizeResult minimize(const Objective &f, std::vector<double> x0, const OptimizerSpec &spec) {
    return spec.method == Method::NelderMead ? nelder_mead(f, std::move(x0), spec)
                                             : powell(f, std::move(x0), spec);
}

} // namespace qvr

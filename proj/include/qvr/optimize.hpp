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
 * Derivative-free minimizers. Every objective evaluation is one trace record,
 * so for the stochastic training objective the trace length equals the number
 * of minibatches drawn.
 */
#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qvr {

enum class Method { NelderMead, Powell };

[[nodiscard]] std::string_view to_string(Method m) noexcept;
/// "nelder-mead" or "powell"; throws ConfigError otherwise.
[[nodiscard]] Method parse_method(std::string_view text);

struct OptimizerSpec {
    Method method = Method::Powell;
    std::size_t max_evaluations = 1000; ///< one minibatch per evaluation
    /// Nelder-Mead: simplex diameter; Powell: relative decrease per sweep.
    /// Zero disables early termination.
    double cost_tolerance = 0.0;
    /// Initial simplex edge (Nelder-Mead) or first line-search step (Powell).
    double initial_step = 0.5;
    /// Golden-section interval width at which a Powell line search stops.
    double line_tolerance = 1e-3;
    /// Largest step a Powell line search may take along one direction.
    double max_line_step = 10.0;

    void validate() const;
};

struct TraceRecord {
    std::size_t iteration = 0;
    double cost = 0.0;
    double best_cost = 0.0;
    double wall_ms = 0.0;
};

struct TrainTrace {
    std::vector<TraceRecord> records;
    std::vector<double> best_x;

    [[nodiscard]] std::size_t evaluations() const noexcept { return records.size(); }
    [[nodiscard]] double best_cost() const;
};

/// Writes one JSON object per line: iteration, cost, best_cost, wall_ms.
void write_trace_jsonl(std::ostream &out, const TrainTrace &trace);

struct OptimizeResult {
    std::vector<double> x;
    double f = 0.0;
    TrainTrace trace;
    bool budget_exhausted = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Simplex method with reflection 1, expansion 2, contraction 1/2, shrink 1/2.
[[nodiscard]] OptimizeResult nelder_mead(const Objective &f, std::vector<double> x0,
                                         const OptimizerSpec &spec);

/// Powell's conjugate-direction method with bracketed golden-section line
/// searches.
[[nodiscard]] OptimizeResult powell(const Objective &f, std::vector<double> x0,
                                    const OptimizerSpec &spec);

[[nodiscard]] OptimizeResult minimize(const Objective &f, std::vector<double> x0,
                                      const OptimizerSpec &spec);

} // namespace qvr

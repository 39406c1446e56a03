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
 * Synthetic generators, CSV ingestion and min-max angle rescaling.
 *
 * CSV layout (long format, one row per time point):
 *
 *     series_id,t,f1[,f2,...][,label][,value_usd]
 *
 * The header row is mandatory. LF is written; CRLF is accepted on read.
 */
#pragma once

#include "qvr/timeseries.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <tuple>

namespace qvr {

/// m series of p iid Normal(0, noise_std) points on the grid t_j = j.
[[nodiscard]] Dataset gen_gaussian(std::size_t m, std::size_t p, double noise_std,
                                   std::uint64_t seed, std::string name = "X");

struct SpikeParams {
    double rate = 0.04; ///< per-point probability that a spike starts
    std::size_t min_duration = 1;
    std::size_t max_duration = 4;
    double min_amplitude = 0.5;
    double max_amplitude = 3.0;
    /// Spikes forced at random positions until a series has this many.
    std::size_t min_spikes = 0;

    void validate() const;
};

/// gen_gaussian plus rectangular spikes of random sign, duration and
/// amplitude. With rate == 0 and min_spikes == 0 it equals gen_gaussian.
[[nodiscard]] Dataset gen_spikes(std::size_t m, std::size_t p, double noise_std,
                                 const SpikeParams &spikes, std::uint64_t seed,
                                 std::string name = "G");

/// gen_gaussian plus sin(t_j).
[[nodiscard]] Dataset gen_sine_added(std::size_t m, std::size_t p, double noise_std,
                                     std::uint64_t seed, std::string name = "H");

enum class SinusoidKind { R, W, Z };

/// 51 samples of sin (R, Z) or cos (W) at phases 2 pi j / 50 on the time grid
/// t_j = j, plus one N(0.1, offset_std) offset per series. A negative
/// offset_std selects the kind's default (0.1 for R and W, 0.5 for Z).
[[nodiscard]] Dataset gen_sinusoids(SinusoidKind kind, std::size_t m, std::uint64_t seed,
                                    double offset_std = -1.0, std::string name = "");

/// Isotropic 2-D Gaussian cluster as single-point series at t = 1.
[[nodiscard]] Dataset gen_blobs(std::size_t count, double stddev, std::array<double, 2> centre,
                                std::uint64_t seed, std::string name = "blobs");

[[nodiscard]] Dataset load_csv(const std::filesystem::path &path);
[[nodiscard]] Dataset read_csv(std::istream &in, std::string name);
void save_csv(const std::filesystem::path &path, const Dataset &data);
void write_csv(std::ostream &out, const Dataset &data);

/// Per (time point, feature), maps the across-series max to pi and min to
/// -pi. Degenerate points (max == min) map to 0 and are counted in
/// `degenerate` when given.
[[nodiscard]] Dataset minmax_rescale(const Dataset &data, std::size_t *degenerate = nullptr);

struct Split {
    Dataset train;
    Dataset validation;
    Dataset test;
};

/// Seeded disjoint partition; fractions are normalized.
[[nodiscard]] Split split(const Dataset &data, std::array<double, 3> fractions,
                          std::uint64_t seed);

/// Formats a double so that parsing it back yields the same value.
[[nodiscard]] std::string format_double(double v);

} // namespace qvr

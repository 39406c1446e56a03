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
#include "qvr/data.hpp"

#include "qvr/error.hpp"
#include "qvr/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <unordered_set>

namespace qvr {

std::string_view to_string(Label label) noexcept {
    switch (label) {
    case Label::Normal:
        return "normal";
    case Label::Anomalous:
        return "anomalous";
    case Label::Unknown:
        break;
    }
    return "unknown";
}

Label parse_label(std::string_view text) {
    if (text == "normal" || text == "0") {
        return Label::Normal;
    }
    if (text == "anomalous" || text == "1") {
        return Label::Anomalous;
    }
    if (text == "unknown" || text.empty()) {
        return Label::Unknown;
    }
    throw DataError("unrecognized label '" + std::string(text) + "'");
}

void TimeSeries::validate() const {
    if (features < 1) {
        throw DataError("series '" + id + "' has no features");
    }
    if (values.size() != times.size() * features) {
        throw DataError("series '" + id + "' has inconsistent value count");
    }
    for (std::size_t j = 1; j < times.size(); ++j) {
        if (!(times[j] > times[j - 1])) {
            throw DataError("series '" + id + "' times are not strictly increasing at point " +
                            std::to_string(j));
        }
    }
    for (double v : values) {
        if (std::isnan(v)) {
            throw DataError("series '" + id + "' contains NaN");
        }
    }
    for (double t : times) {
        if (std::isnan(t)) {
            throw DataError("series '" + id + "' contains a NaN time");
        }
    }
}

void Dataset::validate() const {
    std::unordered_set<std::string> ids;
    for (const auto &s : series) {
        s.validate();
        if (s.points() != points() || s.features != features()) {
            throw DataError("dataset '" + name + "' is ragged: series '" + s.id + "' has shape " +
                            std::to_string(s.points()) + "x" + std::to_string(s.features) +
                            ", expected " + std::to_string(points()) + "x" +
                            std::to_string(features()));
        }
        if (!ids.insert(s.id).second) {
            throw DataError("dataset '" + name + "' has duplicate series id '" + s.id + "'");
        }
    }
}

namespace {

std::string series_id(const std::string &prefix, std::size_t i) {
    return prefix + "_" + std::to_string(i);
}

void check_shape(std::size_t m, std::size_t p) {
    if (m < 1 || p < 1) {
        throw ConfigError("generators need m >= 1 and p >= 1");
    }
}

} // namespace

Dataset gen_gaussian(std::size_t m, std::size_t p, double noise_std, std::uint64_t seed,
                     std::string name) {
    check_shape(m, p);
    if (!(noise_std >= 0.0)) {
        throw ConfigError("noise_std must be >= 0");
    }
    Dataset ds;
    ds.name = std::move(name);
    ds.series.reserve(m);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < m; ++i) {
        Rng rng(derive_seed(seed, {0x6761ULL, i}));
        TimeSeries s;
        s.id = series_id(ds.name, i);
        s.features = 1;
        s.times.resize(p);
        s.values.resize(p);
        for (std::size_t j = 0; j < p; ++j) {
            s.times[j] = static_cast<double>(j);
            s.values[j] = noise_std * normal(rng);
        }
        s.label = Label::Normal;
        ds.series.push_back(std::move(s));
    }
    return ds;
}

void SpikeParams::validate() const {
    if (!(rate >= 0.0 && rate < 1.0)) {
        throw ConfigError("spike rate must be in [0, 1)");
    }
    if (min_duration < 1 || min_duration > max_duration) {
        throw ConfigError("spike durations need 1 <= min <= max");
    }
    if (!(min_amplitude >= 0.0 && min_amplitude <= max_amplitude)) {
        throw ConfigError("spike amplitudes need 0 <= min <= max");
    }
}

Dataset gen_spikes(std::size_t m, std::size_t p, double noise_std, const SpikeParams &spikes,
                   std::uint64_t seed, std::string name) {
    spikes.validate();
    Dataset ds = gen_gaussian(m, p, noise_std, seed, std::move(name));
    if (spikes.rate == 0.0 && spikes.min_spikes == 0) {
        return ds;
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> duration(spikes.min_duration,
                                                        spikes.max_duration);
    std::uniform_real_distribution<double> amplitude(spikes.min_amplitude,
                                                     std::nextafter(spikes.max_amplitude,
                                                                    spikes.max_amplitude + 1.0));
    std::uniform_int_distribution<std::size_t> position(0, p - 1);
    for (std::size_t i = 0; i < m; ++i) {
        Rng rng(derive_seed(seed, {0x7370ULL, i}));
        TimeSeries &s = ds.series[i];
        auto insert = [&](std::size_t start) {
            const std::size_t len = duration(rng);
            const double amp = spikes.min_amplitude == spikes.max_amplitude
                                   ? spikes.min_amplitude
                                   : amplitude(rng);
            const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
            for (std::size_t j = start; j < std::min(p, start + len); ++j) {
                s.values[j] += sign * amp;
            }
        };
        std::size_t count = 0;
        for (std::size_t j = 0; j < p; ++j) {
            if (unit(rng) < spikes.rate) {
                insert(j);
                ++count;
            }
        }
        for (; count < spikes.min_spikes; ++count) {
            insert(position(rng));
        }
        s.label = Label::Anomalous;
    }
    return ds;
}

Dataset gen_sine_added(std::size_t m, std::size_t p, double noise_std, std::uint64_t seed,
                       std::string name) {
    Dataset ds = gen_gaussian(m, p, noise_std, seed, std::move(name));
    for (auto &s : ds.series) {
        for (std::size_t j = 0; j < p; ++j) {
            s.values[j] += std::sin(s.times[j]);
        }
        s.label = Label::Anomalous;
    }
    return ds;
}

Dataset gen_sinusoids(SinusoidKind kind, std::size_t m, std::uint64_t seed, double offset_std,
                      std::string name) {
    check_shape(m, 1);
    constexpr std::size_t kPoints = 51;
    constexpr double kOffsetMean = 0.1;
    if (offset_std < 0.0) {
        offset_std = kind == SinusoidKind::Z ? 0.5 : 0.1;
    }
    if (name.empty()) {
        name = kind == SinusoidKind::R ? "R" : kind == SinusoidKind::W ? "W" : "Z";
    }
    Dataset ds;
    ds.name = std::move(name);
    ds.series.reserve(m);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < m; ++i) {
        Rng rng(derive_seed(seed, {0x73696eULL, i}));
        const double offset = kOffsetMean + offset_std * normal(rng);
        TimeSeries s;
        s.id = series_id(ds.name, i);
        s.features = 1;
        s.times.resize(kPoints);
        s.values.resize(kPoints);
        for (std::size_t j = 0; j < kPoints; ++j) {
            const double phase = 2.0 * std::numbers::pi * static_cast<double>(j) / 50.0;
            s.times[j] = static_cast<double>(j);
            s.values[j] = (kind == SinusoidKind::W ? std::cos(phase) : std::sin(phase)) + offset;
        }
        s.label = kind == SinusoidKind::Z ? Label::Anomalous : Label::Normal;
        ds.series.push_back(std::move(s));
    }
    return ds;
}

Dataset gen_blobs(std::size_t count, double stddev, std::array<double, 2> centre,
                  std::uint64_t seed, std::string name) {
    check_shape(count, 1);
    if (!(stddev >= 0.0)) {
        throw ConfigError("blob stddev must be >= 0");
    }
    Dataset ds;
    ds.name = std::move(name);
    ds.series.reserve(count);
    std::normal_distribution<double> normal(0.0, 1.0);
    Rng rng(derive_seed(seed, {0x626c6f62ULL}));
    for (std::size_t i = 0; i < count; ++i) {
        TimeSeries s;
        s.id = series_id(ds.name, i);
        s.features = 2;
        s.times = {1.0};
        const double a = normal(rng);
        const double b = normal(rng);
        s.values = {centre[0] + stddev * a, centre[1] + stddev * b};
        s.label = Label::Normal;
        ds.series.push_back(std::move(s));
    }
    return ds;
}

Dataset minmax_rescale(const Dataset &data, std::size_t *degenerate) {
    data.validate();
    if (data.size() < 2) {
        throw DataError("min-max rescaling needs at least two series");
    }
    Dataset out = data;
    std::size_t flat = 0;
    const std::size_t p = data.points();
    const std::size_t d = data.features();
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t f = 0; f < d; ++f) {
            double lo = data.series.front().at(j, f);
            double hi = lo;
            for (const auto &s : data.series) {
                lo = std::min(lo, s.at(j, f));
                hi = std::max(hi, s.at(j, f));
            }
            const double span = hi - lo;
            for (auto &s : out.series) {
                if (span > 0.0) {
                    s.at(j, f) = 2.0 * std::numbers::pi * ((s.at(j, f) - lo) / span) -
                                 std::numbers::pi;
                } else {
                    s.at(j, f) = 0.0;
                }
            }
            if (!(span > 0.0)) {
                ++flat;
            }
        }
    }
    if (degenerate != nullptr) {
        *degenerate = flat;
    }
    out.rescaled = true;
    return out;
}

Split split(const Dataset &data, std::array<double, 3> fractions, std::uint64_t seed) {
    for (double f : fractions) {
        if (!(f >= 0.0)) {
            throw ConfigError("split fractions must be >= 0");
        }
    }
    const double total = fractions[0] + fractions[1] + fractions[2];
    if (!(total > 0.0)) {
        throw ConfigError("split fractions must not all be zero");
    }
    const std::size_t n = data.size();
    auto count = [&](double f) {
        return static_cast<std::size_t>(std::llround(f / total * static_cast<double>(n)));
    };
    std::size_t n_val = std::min(n, count(fractions[1]));
    std::size_t n_test = std::min(n - n_val, count(fractions[2]));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(seed, {0x73706cULL}));
    std::shuffle(order.begin(), order.end(), rng);

    Split out;
    out.train.name = data.name + "_train";
    out.validation.name = data.name + "_validation";
    out.test.name = data.name + "_test";
    for (auto *part : {&out.train, &out.validation, &out.test}) {
        part->rescaled = data.rescaled;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const auto &s = data.series[order[k]];
        if (k < n_val) {
            out.validation.series.push_back(s);
        } else if (k < n_val + n_test) {
            out.test.series.push_back(s);
        } else {
            out.train.series.push_back(s);
        }
    }
    return out;
}

} // namespace qvr

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

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qvr {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_number(std::string_view text, std::size_t row, std::string_view column) {
    text = trim(text);
    double v = 0.0;
    const auto *first = text.data();
    const auto *last = text.data() + text.size();
    if (!text.empty() && *first == '+') {
        ++first;
    }
    const auto res = std::from_chars(first, last, v);
    if (text.empty() || res.ec != std::errc() || res.ptr != last) {
        throw DataError("row " + std::to_string(row) + ": cannot parse '" + std::string(text) +
                        "' in column '" + std::string(column) + "' as a number");
    }
    return v;
}

struct Row {
    std::size_t line;
    double t;
    std::vector<double> values;
};

struct Pending {
    std::string id;
    std::vector<Row> rows;
    Label label = Label::Unknown;
    bool label_seen = false;
    std::optional<double> value_usd;
};

} // namespace

Dataset read_csv(std::istream &in, std::string name) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        throw DataError("CSV is empty: header row is mandatory");
    }
    ++line_no;
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
        static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
        line.erase(0, 3);
    }
    const auto header = split_fields(trim(line));
    long id_col = -1;
    long t_col = -1;
    long label_col = -1;
    long usd_col = -1;
    std::map<std::size_t, std::size_t> feature_cols; // feature number -> column
    for (std::size_t c = 0; c < header.size(); ++c) {
        const auto h = trim(header[c]);
        if (h == "series_id") {
            id_col = static_cast<long>(c);
        } else if (h == "t") {
            t_col = static_cast<long>(c);
        } else if (h == "label") {
            label_col = static_cast<long>(c);
        } else if (h == "value_usd") {
            usd_col = static_cast<long>(c);
        } else if (h.size() >= 2 && h[0] == 'f' &&
                   std::all_of(h.begin() + 1, h.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
            const std::size_t k = std::stoul(std::string(h.substr(1)));
            if (k == 0 || !feature_cols.emplace(k, c).second) {
                throw DataError("header: invalid or duplicate feature column '" + std::string(h) + "'");
            }
        } else {
            throw DataError("header: unknown column '" + std::string(h) + "'");
        }
    }
    if (id_col < 0) {
        throw DataError("header: missing required column 'series_id'");
    }
    if (t_col < 0) {
        throw DataError("header: missing required column 't'");
    }
    if (feature_cols.empty()) {
        throw DataError("header: missing required column 'f1'");
    }
    std::vector<std::size_t> fcols;
    for (std::size_t k = 1; k <= feature_cols.size(); ++k) {
        const auto it = feature_cols.find(k);
        if (it == feature_cols.end()) {
            throw DataError("header: missing required column 'f" + std::to_string(k) + "'");
        }
        fcols.push_back(it->second);
    }

    std::vector<Pending> pending;
    std::unordered_map<std::string, std::size_t> index;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty()) {
            continue;
        }
        const auto fields = split_fields(body);
        if (fields.size() != header.size()) {
            throw DataError("row " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
        }
        const std::string id(trim(fields[static_cast<std::size_t>(id_col)]));
        if (id.empty()) {
            throw DataError("row " + std::to_string(line_no) + ": empty series_id");
        }
        auto [it, inserted] = index.emplace(id, pending.size());
        if (inserted) {
            pending.push_back(Pending{id, {}, Label::Unknown, false, std::nullopt});
        }
        Pending &p = pending[it->second];
        Row row{line_no, parse_number(fields[static_cast<std::size_t>(t_col)], line_no, "t"), {}};
        for (std::size_t k = 0; k < fcols.size(); ++k) {
            row.values.push_back(
                parse_number(fields[fcols[k]], line_no, "f" + std::to_string(k + 1)));
        }
        if (label_col >= 0) {
            Label lbl = Label::Unknown;
            try {
                lbl = parse_label(trim(fields[static_cast<std::size_t>(label_col)]));
            } catch (const DataError &e) {
                throw DataError("row " + std::to_string(line_no) + ": " + e.what());
            }
            if (p.label_seen && lbl != p.label) {
                throw DataError("row " + std::to_string(line_no) + ": label of series '" + id +
                                "' changes within the series");
            }
            p.label = lbl;
            p.label_seen = true;
        }
        if (usd_col >= 0) {
            const auto cell = trim(fields[static_cast<std::size_t>(usd_col)]);
            if (!cell.empty()) {
                p.value_usd = parse_number(cell, line_no, "value_usd");
            }
        }
        p.rows.push_back(std::move(row));
    }

    Dataset ds;
    ds.name = std::move(name);
    ds.series.reserve(pending.size());
    for (auto &p : pending) {
        std::stable_sort(p.rows.begin(), p.rows.end(),
                         [](const Row &a, const Row &b) { return a.t < b.t; });
        TimeSeries s;
        s.id = p.id;
        s.features = fcols.size();
        s.label = p.label;
        s.value_usd = p.value_usd;
        for (std::size_t r = 0; r < p.rows.size(); ++r) {
            if (r > 0 && !(p.rows[r].t > p.rows[r - 1].t)) {
                throw DataError("row " + std::to_string(p.rows[r].line) + ": time " +
                                format_double(p.rows[r].t) + " of series '" + p.id +
                                "' repeats row " + std::to_string(p.rows[r - 1].line));
            }
            s.times.push_back(p.rows[r].t);
            s.values.insert(s.values.end(), p.rows[r].values.begin(), p.rows[r].values.end());
        }
        if (!ds.series.empty() && s.points() != ds.series.front().points()) {
            throw DataError("ragged dataset: series '" + s.id + "' (ending row " +
                            std::to_string(p.rows.back().line) + ") has " +
                            std::to_string(s.points()) + " points, expected " +
                            std::to_string(ds.series.front().points()));
        }
        ds.series.push_back(std::move(s));
    }
    ds.validate();
    return ds;
}

Dataset load_csv(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "'");
    }
    return read_csv(in, path.stem().string());
}

void write_csv(std::ostream &out, const Dataset &data) {
    const std::size_t d = data.empty() ? 1 : data.features();
    const bool has_usd = std::any_of(data.series.begin(), data.series.end(),
                                     [](const TimeSeries &s) { return s.value_usd.has_value(); });
    out << "series_id,t";
    for (std::size_t f = 0; f < d; ++f) {
        out << ",f" << (f + 1);
    }
    out << ",label";
    if (has_usd) {
        out << ",value_usd";
    }
    out << '\n';
    for (const auto &s : data.series) {
        for (std::size_t j = 0; j < s.points(); ++j) {
            out << s.id << ',' << format_double(s.times[j]);
            for (std::size_t f = 0; f < s.features; ++f) {
                out << ',' << format_double(s.at(j, f));
            }
            out << ',' << to_string(s.label);
            if (has_usd) {
                out << ',';
                if (s.value_usd) {
                    out << format_double(*s.value_usd);
                }
            }
            out << '\n';
        }
    }
}

void save_csv(const std::filesystem::path &path, const Dataset &data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write '" + path.string() + "'");
    }
    write_csv(out, data);
    if (!out) {
        throw DataError("write failed for '" + path.string() + "'");
    }
}

} // namespace qvr

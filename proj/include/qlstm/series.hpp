// Copyright 2026 The qlstm-forecast Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Raw multivariate series and its CSV form.
 *
 * CSV schema: a header row `date,<feature names...>,<target name>`, then one
 * row per observation with an ISO-8601 date followed by numeric cells. The
 * last column is the prediction target; every other column after `date` is a
 * feature. Numbers are written in shortest round-trip form so a
 * load/save cycle preserves values bit-exactly.
 */
#pragma once

#include "qlstm/date.hpp"
#include "qlstm/error.hpp"
#include "qlstm/linalg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace qlstm {

struct RawSeries {
    std::vector<Date> dates;
    Matrix features; // [n_rows x n_features]
    std::vector<double> target;
    std::vector<std::string> feature_names;
    std::string target_name = "target";

    [[nodiscard]] std::size_t rows() const { return dates.size(); }
    [[nodiscard]] std::size_t n_features() const { return features.cols; }

    /// Throws FormatError on an invariant violation.
    void validate() const {
        if (features.rows != dates.size() || target.size() != dates.size()) {
            throw ShapeError("series columns have different lengths");
        }
        if (feature_names.size() != features.cols) {
            throw ShapeError("feature name count != feature column count");
        }
        for (std::size_t r = 1; r < dates.size(); ++r) {
            if (!(dates[r - 1] < dates[r])) {
                throw FormatError("dates not strictly increasing at row " +
                                  std::to_string(r + 1));
            }
        }
        for (double x : features.data) {
            if (!std::isfinite(x)) {
                throw FormatError("non-finite feature value");
            }
        }
        for (double x : target) {
            if (!std::isfinite(x)) {
                throw FormatError("non-finite target value");
            }
        }
    }
};

/// Shortest decimal string that parses back to exactly `x`.
inline std::string format_double(double x) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, ptr);
}

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    for (auto &c : cells) {
        while (!c.empty() && (c.front() == ' ' || c.front() == '\t')) {
            c.remove_prefix(1);
        }
        while (!c.empty() && (c.back() == ' ' || c.back() == '\t' || c.back() == '\r')) {
            c.remove_suffix(1);
        }
    }
    return cells;
}

inline double parse_cell(std::string_view cell, std::size_t line_no,
                         std::string_view column) {
    double v = 0.0;
    const char *first = cell.data();
    const char *last = first + cell.size();
    if (!cell.empty() && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (cell.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v)) {
        throw FormatError("line " + std::to_string(line_no) + ", column '" +
                          std::string(column) + "': non-numeric value '" +
                          std::string(cell) + "'");
    }
    return v;
}

} // namespace detail

/// Parses the CSV schema above; rows are returned in date order.
[[nodiscard]] inline RawSeries parse_csv(std::istream &in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        for (auto c : detail::split_csv_line(line)) {
            header.emplace_back(c);
        }
        break;
    }
    if (header.empty()) {
        throw EmptyInputError("CSV input is empty");
    }
    if (header.front() != "date") {
        throw FormatError("first CSV column must be 'date', found '" +
                          header.front() + "'");
    }
    if (header.size() < 3) {
        throw FormatError("CSV needs date, at least one feature and a target column");
    }
    const std::size_t n_features = header.size() - 2;

    struct Row {
        Date date;
        std::vector<double> values;
        std::size_t line_no;
    };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != header.size()) {
            throw FormatError("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(header.size()) + " cells, found " +
                              std::to_string(cells.size()));
        }
        if (cells[0].empty()) {
            throw FormatError("line " + std::to_string(line_no) + ": missing date");
        }
        Row row{};
        try {
            row.date = Date::parse(cells[0]);
        } catch (const FormatError &e) {
            throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
        }
        row.line_no = line_no;
        row.values.reserve(header.size() - 1);
        for (std::size_t c = 1; c < cells.size(); ++c) {
            row.values.push_back(detail::parse_cell(cells[c], line_no, header[c]));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw EmptyInputError("CSV input has a header but no data rows");
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row &a, const Row &b) { return a.date < b.date; });
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].date == rows[r - 1].date) {
            throw FormatError("duplicate date " + rows[r].date.to_string() +
                              " on line " + std::to_string(rows[r].line_no));
        }
    }

    RawSeries s;
    s.feature_names.assign(header.begin() + 1, header.end() - 1);
    s.target_name = header.back();
    s.features = Matrix(rows.size(), n_features);
    s.dates.reserve(rows.size());
    s.target.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        s.dates.push_back(rows[r].date);
        for (std::size_t c = 0; c < n_features; ++c) {
            s.features(r, c) = rows[r].values[c];
        }
        s.target.push_back(rows[r].values.back());
    }
    return s;
}

[[nodiscard]] inline RawSeries load_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open '" + path + "'");
    }
    return parse_csv(in);
}

inline void write_csv(std::ostream &out, const RawSeries &s) {
    out << "date";
    for (const auto &n : s.feature_names) {
        out << ',' << n;
    }
    out << ',' << s.target_name << '\n';
    for (std::size_t r = 0; r < s.rows(); ++r) {
        out << s.dates[r].to_string();
        for (std::size_t c = 0; c < s.n_features(); ++c) {
            out << ',' << format_double(s.features(r, c));
        }
        out << ',' << format_double(s.target[r]) << '\n';
    }
}

inline void save_csv(const std::string &path, const RawSeries &s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FormatError("cannot write '" + path + "'");
    }
    write_csv(out, s);
}

} // namespace qlstm

// Copyright 2026 The biped-kit Authors
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

// Plain numeric CSV tables: one header row, comma separated, numbers
// written with 17 significant digits so a write/read cycle is lossless.

#ifndef BIPED_IO_HPP
#define BIPED_IO_HPP

#include <biped/errors.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace biped::io {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string &name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw ValidationError("missing column '" + name + "'");
    }
};

inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline double parse_number(const std::string &s, std::size_t line, const std::string &path) {
    double v = 0.0;
    const char *first = s.data(), *last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw ValidationError(path + ":" + std::to_string(line) + ": '" + s + "' is not a number");
    return v;
}

inline Table parse_csv(std::istream &in, const std::string &path = "<stream>") {
    Table t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto cells = split_csv_line(line);
        if (t.columns.empty()) {
            t.columns = std::move(cells);
            continue;
        }
        if (cells.size() != t.columns.size())
            throw ValidationError(path + ":" + std::to_string(lineno) + ": expected " +
                                  std::to_string(t.columns.size()) + " fields, got " + std::to_string(cells.size()));
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto &c : cells) row.push_back(parse_number(c, lineno, path));
        t.rows.push_back(std::move(row));
    }
    if (t.columns.empty()) throw ValidationError(path + ": missing header row");
    return t;
}

inline Table read_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw PipelineError("io", "cannot open '" + path + "' for reading");
    return parse_csv(in, path);
}

inline void write_csv(std::ostream &out, const Table &t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (const auto &row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
        out << '\n';
    }
}

inline void write_csv(const std::string &path, const Table &t) {
    std::ofstream out(path);
    if (!out) throw PipelineError("io", "cannot open '" + path + "' for writing");
    write_csv(out, t);
    if (!out) throw PipelineError("io", "write to '" + path + "' failed");
}

inline void write_text(const std::string &path, const std::string &text) {
    std::ofstream out(path);
    if (!out) throw PipelineError("io", "cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw PipelineError("io", "write to '" + path + "' failed");
}

} // namespace biped::io

#endif

// Copyright 2026 The qemit Authors
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

#include "output.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "config.hpp"
#include "fmt/format.h"
#include "qemit/rng.hpp"

namespace qemit::harness {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";  // no negative zero
    return fmt::format("{:.12g}", v);
}

std::string metadata_line(uint64_t seed, const std::string& config_hash) {
    return fmt::format("# qemit {} seed={} config={} rng={}", kVersion, seed, config_hash, kRngName);
}

size_t Csv::column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw ConfigError(fmt::format("CSV has no column '{}'", name));
}

std::string Csv::render() const {
    std::string out;
    for (const auto& c : comments) out += "#" + c + "\n";
    auto line = [&](const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
}

Csv parse_csv(const std::string& text, const std::string& origin) {
    Csv csv;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        size_t start = 0;
        for (size_t i = 0; i <= s.size(); ++i) {
            if (i == s.size() || s[i] == ',') {
                cells.push_back(s.substr(start, i - start));
                start = i + 1;
            }
        }
        return cells;
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (csv.header.empty()) csv.comments.push_back(line.substr(1));
            continue;
        }
        auto cells = split(line);
        if (line.find('"') != std::string::npos) {
            throw ConfigError(fmt::format("{}:{}: quoted fields are not supported", origin, lineno));
        }
        if (csv.header.empty()) {
            csv.header = cells;
            for (const auto& h : csv.header) {
                if (h.empty()) throw ConfigError(fmt::format("{}:{}: empty column name", origin, lineno));
            }
            continue;
        }
        if (cells.size() != csv.header.size()) {
            throw ConfigError(fmt::format("{}:{}: expected {} fields, got {}", origin, lineno, csv.header.size(), cells.size()));
        }
        csv.rows.push_back(std::move(cells));
    }
    if (csv.header.empty()) throw ConfigError(fmt::format("{}: missing header row", origin));
    return csv;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("cannot read '{}'", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Csv read_csv(const std::string& path) { return parse_csv(read_file(path), path); }

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
    out << bytes;
    if (!out) throw std::runtime_error(fmt::format("write failed for '{}'", path));
}

double parse_number(const std::string& s, const std::string& what) {
    if (s == "nan") return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || std::isspace(static_cast<unsigned char>(s[0]))) {
        throw ConfigError(fmt::format("{}: '{}' is not a number", what, s));
    }
    return v;
}

}  // namespace qemit::harness

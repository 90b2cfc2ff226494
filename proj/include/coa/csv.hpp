#pragma once

/// @file csv.hpp
/// Minimal CSV tables: comma-delimited, header row, newline-terminated rows,
/// no quoting (every field the tools emit is a number or an identifier).

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "errors.hpp"

namespace coa::csv {

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string format_position(const std::vector<double>& x) {
    std::string s = "[";
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) s += ',';
        s += format_double(x[i]);
    }
    return s + "]";
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline void write(std::ostream& os, const Table& table) {
    auto line = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) os << ',';
            os << fields[i];
        }
        os << '\n';
    };
    line(table.header);
    for (const auto& r : table.rows) line(r);
}

inline void write_file(const std::filesystem::path& path, const Table& table) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write " + path.string());
    write(os, table);
    if (!os) throw IoError("write failed: " + path.string());
}

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

/// Reads a table, checking that it has a header and that every row has the
/// header's width. Optionally checks the header against `expected_header`.
inline Table read_file(const std::filesystem::path& path,
                       const std::vector<std::string>& expected_header = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    Table t;
    std::string line;
    if (!std::getline(in, line) || line.empty()) throw IoError("missing header in " + path.string());
    t.header = split_line(line);
    if (!expected_header.empty() && t.header != expected_header)
        throw IoError("unexpected header in " + path.string());
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = split_line(line);
        if (fields.size() != t.header.size())
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                          std::to_string(t.header.size()) + " fields");
        t.rows.push_back(std::move(fields));
    }
    return t;
}

} // namespace coa::csv

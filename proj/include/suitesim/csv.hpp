#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "suitesim/error.hpp"

namespace suitesim {

/// Minimal strict CSV support for the dialect used by every file in this
/// project: comma separator, '.' decimal point, header in the first row,
/// no quoting. Fields therefore must not contain commas.
namespace csv {

struct Table {
    std::string path;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;  // data rows, file order
    std::vector<std::size_t> line_numbers;       // 1-based file line per data row
};

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string::size_type start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

inline Table read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "cannot open file: " + path);

    Table table;
    table.path = path;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (table.header.empty()) {
            table.header = split_line(line);
        } else {
            table.rows.push_back(split_line(line));
            table.line_numbers.push_back(line_number);
        }
    }
    require(!table.header.empty(), "empty file: " + path);
    return table;
}

/// Parses a finite double. `context` names the file/row/column for error text.
inline double parse_double(std::string_view text, const std::string& context) {
    // trim ordinary spaces so "0.25, 0.75"-style files load
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    require(ec == std::errc() && ptr == last && !text.empty(),
            "non-numeric value '" + std::string(text) + "' " + context);
    require(std::isfinite(value), "non-finite value '" + std::string(text) + "' " + context);
    return value;
}

/// Fixed-point formatting used by every CSV artifact: six decimal digits,
/// bit-reproducible for identical inputs. Folds negative zero.
inline std::string format_fixed(double value, int digits = 6) {
    if (value == 0.0) value = 0.0;
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*f", digits, value);
    return buffer;
}

inline std::string join_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out += ',';
        out += fields[i];
    }
    out += '\n';
    return out;
}

}  // namespace csv
}  // namespace suitesim

#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "zalms/errors.hpp"

namespace zalms {

/**
 * CSV primitives.
 *
 * Numbers are serialized with std::to_chars in shortest round-trip form:
 * the printed decimal parses back to the exact same double, with no excess
 * digits.  Files use '\n' line endings and a single fixed header row, so a
 * deterministic computation yields byte-identical files.
 */

/// Shortest decimal string that round-trips to exactly this double.
inline std::string format_double(double value) {
    char buffer[64];
    const std::to_chars_result res = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (res.ec != std::errc())
        throw compute_error("format_double: conversion failed");
    return std::string(buffer, res.ptr);
}

inline std::string format_unsigned(std::uint64_t value) {
    char buffer[24];
    const std::to_chars_result res = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (res.ec != std::errc())
        throw compute_error("format_unsigned: conversion failed");
    return std::string(buffer, res.ptr);
}

/// Parse a full string as a double; rejects empty input, trailing garbage,
/// and anything std::from_chars cannot bind.
inline double parse_double(std::string_view text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const std::from_chars_result res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last)
        throw std::invalid_argument("parse_double: cannot parse '" + std::string(text) + "'");
    return value;
}

inline std::uint64_t parse_unsigned(std::string_view text) {
    std::uint64_t value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const std::from_chars_result res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last)
        throw std::invalid_argument("parse_unsigned: cannot parse '" + std::string(text) +
                                    "'");
    return value;
}

/// Streaming CSV writer with a fixed column count set by the header.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header)
        : path_(path), columns_(header.size()), out_(path, std::ios::binary | std::ios::trunc) {
        if (header.empty()) throw std::invalid_argument("CsvWriter: empty header");
        if (!out_) throw compute_error("CsvWriter: cannot open '" + path + "' for writing");
        write_cells(header);
    }

    void write_row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_)
            throw std::invalid_argument("CsvWriter: row width " + std::to_string(cells.size()) +
                                        " != header width " + std::to_string(columns_));
        write_cells(cells);
    }

    /// Flush and close; throws on I/O failure.  Also invoked by the
    /// destructor (which swallows errors), so call explicitly when failure
    /// must be detected.
    void close() {
        if (!out_.is_open()) return;
        out_.close();
        if (out_.fail()) throw compute_error("CsvWriter: write to '" + path_ + "' failed");
    }

    ~CsvWriter() {
        try {
            close();
        } catch (...) {
        }
    }

private:
    void write_cells(const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k > 0) out_ << ',';
            out_ << cells[k];
        }
        out_ << '\n';
        if (!out_) throw compute_error("CsvWriter: write to '" + path_ + "' failed");
    }

    std::string path_;
    std::size_t columns_;
    std::ofstream out_;
};

/// Fully parsed CSV file (no quoting support; the emitted files are purely
/// numeric plus fixed header names).
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw compute_error("read_csv: cannot open '" + path + "'");
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) {
                cells.push_back(line.substr(start));
                break;
            }
            cells.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        if (first) {
            table.header = std::move(cells);
            first = false;
        } else {
            if (cells.size() != table.header.size())
                throw compute_error("read_csv: ragged row in '" + path + "'");
            table.rows.push_back(std::move(cells));
        }
    }
    if (first) throw compute_error("read_csv: '" + path + "' is empty");
    return table;
}

} // namespace zalms

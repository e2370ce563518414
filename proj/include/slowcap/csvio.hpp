#pragma once

// ============================================================================
// slowcap -- deterministic CSV output
//
// All numeric output is written with 17 significant digits (round-trip exact
// for IEEE doubles) so repeated runs with identical inputs produce
// byte-identical files.
// ============================================================================

#include <cstdio>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace slowcap {

/// Format one double with 17 significant digits.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Write a CSV file of named columns (all the same length).
inline void write_csv(const std::string& path,
                      const std::vector<std::string>& names,
                      const std::vector<std::span<const double>>& cols) {
    if (names.size() != cols.size())
        throw std::invalid_argument("write_csv: names/columns mismatch");
    const std::size_t rows = cols.empty() ? 0 : cols.front().size();
    for (const auto& c : cols)
        if (c.size() != rows) throw std::invalid_argument("write_csv: ragged columns");

    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    for (std::size_t j = 0; j < names.size(); ++j)
        out << (j ? "," : "") << names[j];
    out << "\n";
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j)
            out << (j ? "," : "") << format_g17(cols[j][i]);
        out << "\n";
    }
    if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

} // namespace slowcap

#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace levydiv {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kCsvSchema = 1;

// 17 significant digits; infinities spelled inf / -inf.
inline std::string fmt17(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_csv_header(std::ostream& out, const std::vector<std::string>& columns) {
    out << "# levy-dividend-opt v" << kVersion << " schema=" << kCsvSchema << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << "\n";
}

}  // namespace levydiv

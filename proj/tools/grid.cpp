#include "grid.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace levydiv::cli {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t p = s.find(sep, start);
        out.push_back(s.substr(start, p - start));
        if (p == std::string::npos) break;
        start = p + 1;
    }
    return out;
}

}  // namespace

double parse_number(const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (!text.empty() && text.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || text.empty()) throw std::invalid_argument("not a number: '" + text + "'");
    if (std::isnan(v)) throw std::invalid_argument("not a number: '" + text + "'");
    return v;
}

std::vector<double> parse_grid(const std::string& text) {
    if (text.find(':') == std::string::npos) {
        std::vector<double> out;
        for (const auto& part : split(text, ',')) out.push_back(parse_number(part));
        return out;
    }
    auto parts = split(text, ':');
    if (parts.size() < 3 || parts.size() > 4) throw std::invalid_argument("grid must be min:max:count[:lin|log]");
    const double lo = parse_number(parts[0]), hi = parse_number(parts[1]);
    const double nd = parse_number(parts[2]);
    if (!(nd >= 1.0) || nd != std::floor(nd) || nd > 1e7) throw std::invalid_argument("grid count must be a positive integer");
    const auto n = static_cast<std::size_t>(nd);
    const std::string spacing = parts.size() == 4 ? parts[3] : "lin";
    if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo) throw std::invalid_argument("grid needs finite min <= max");
    std::vector<double> out(n);
    if (spacing == "lin") {
        for (std::size_t i = 0; i < n; ++i) out[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    } else if (spacing == "log") {
        if (!(lo > 0.0)) throw std::invalid_argument("log grid needs min > 0");
        const double a = std::log(lo), c = std::log(hi);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = n == 1 ? lo : std::exp(a + (c - a) * static_cast<double>(i) / (n - 1));
    } else {
        throw std::invalid_argument("grid spacing must be lin or log, got '" + spacing + "'");
    }
    if (n > 1) out.back() = hi;
    return out;
}

}  // namespace levydiv::cli

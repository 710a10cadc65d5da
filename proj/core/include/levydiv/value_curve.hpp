#pragma once

#include <iosfwd>
#include <vector>

namespace levydiv {

enum class Limit { left, right };

struct CurvePoint {
    double x;
    double v;
    double vprime;
    double vsecond_left;
    double vsecond_right;
    double psi;
};

// First-derivative form of the verification inequalities:
// v' >= 1 on (0, b], v' <= 1 on (b, inf), v(0) >= -Lambda.
struct HjbReport {
    bool pass = true;
    double worst_violation = 0.0;  // largest amount by which an inequality fails (0 if none)
    double worst_x = 0.0;
    double v0 = 0.0;
    bool v0_ok = true;
    std::size_t points = 0;
};

// columns x, v, vprime, vsecond_left, vsecond_right, psi
void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& pts);

template <class Curve>
HjbReport hjb_check(const Curve& c, const std::vector<double>& grid, double lambda) {
    HjbReport r;
    r.v0 = c.v(0.0);
    r.v0_ok = r.v0 >= -lambda - 1e-12;
    for (double x : grid) {
        if (!(x > 0.0)) continue;
        ++r.points;
        double d = c.vprime(x, Limit::left);
        double bad = x <= c.b() ? (1.0 - 1e-9) - d : d - (1.0 + 1e-9);
        if (bad > r.worst_violation) {
            r.worst_violation = bad;
            r.worst_x = x;
        }
    }
    r.pass = r.worst_violation <= 0.0 && r.v0_ok;
    return r;
}

}  // namespace levydiv

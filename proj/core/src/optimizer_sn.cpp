#include "levydiv/optimizer_sn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "levydiv/errors.hpp"
#include "levydiv/format.hpp"

namespace levydiv {

const char* boundary_case_name(BoundaryCase c) {
    switch (c) {
        case BoundaryCase::interior: return "interior";
        case BoundaryCase::at_zero: return "at_zero";
        case BoundaryCase::ceiling_rate_fallback: return "ceiling_rate_fallback";
    }
    return "?";
}

std::vector<double> verification_grid(double b, int n) {
    std::vector<double> g;
    const double top = std::max(3.0 * b, b + 10.0);
    const int below = b > 0.0 ? n / 2 : 0;
    for (int i = 1; i <= below; ++i) g.push_back(b * i / below);
    const int above = n - below;
    for (int i = 1; i <= above; ++i) g.push_back(b + (top - b) * i / above);
    if (b > 2e-6) g.push_back(b - 1e-6);
    g.push_back(b + 1e-6);
    if (b > 0.0) g.push_back(b);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

ThresholdOptimizer::ThresholdOptimizer(const ModelSpec& m, OptimizerOptions opt) : f_(m), opt_(opt) {
    if (f_.delta() > 0.0) b0_ = b_opt(0.0).b_opt;
}

double ThresholdOptimizer::a_max(double lambda) const {
    f_.require_positive_terminal(lambda);
    const double ql = std::abs(f_.q() * lambda);
    const double wp0 = f_.X().Wp0;
    const double n0 = f_.g_prime_numerator(0.0, lambda);
    const double mag = std::abs(f_.X().Wpp.eval(0.0)) + wp0 * wp0 * (1.0 + ql);
    if (n0 <= 1e-12 * mag) return 0.0;

    double lo = 0.0, hi = 1.0;
    const double cap = 690.0 / f_.Phi();
    while (f_.g_prime_numerator(hi, lambda) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > cap) throw InternalError("g' keeps its sign: no maximum of g found");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
        double mid = 0.5 * (lo + hi);
        (f_.g_prime_numerator(mid, lambda) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

ThresholdSolution ThresholdOptimizer::b_opt(double lambda) const {
    ThresholdSolution s;
    s.lambda = lambda;
    if (!(f_.q() * lambda + f_.delta() > 0.0)) {
        // pay at the full rate delta whenever the surplus is positive
        s.boundary_case = BoundaryCase::ceiling_rate_fallback;
        s.b_opt = 0.0;
        s.xi_at_opt = std::numeric_limits<double>::quiet_NaN();
        s.a_lambda = 0.0;
        if (opt_.verify) s.hjb = hjb_check(f_.curve(0.0, lambda), verification_grid(0.0), lambda);
        return s;
    }
    s.a_lambda = a_max(lambda);
    const double a = s.a_lambda;

    double b = 0.0;
    s.boundary_case = BoundaryCase::at_zero;
    if (a > 0.0 && F(0.0, lambda) > 0.0) {
        // first sign change of xi - g on (0, a]
        double lo = 0.0, hi = -1.0;
        for (int i = 1; i <= opt_.scan_cells; ++i) {
            double x = a * i / opt_.scan_cells;
            if (F(x, lambda) <= 0.0) {
                hi = x;
                break;
            }
            lo = x;
        }
        if (hi > 0.0) {
            for (int it = 0; it < opt_.max_iter && hi - lo > opt_.tol_b; ++it) {
                double mid = 0.5 * (lo + hi);
                (F(mid, lambda) > 0.0 ? lo : hi) = mid;
            }
            b = 0.5 * (lo + hi);
            s.boundary_case = BoundaryCase::interior;
        }
    }
    s.b_opt = b;
    s.xi_at_opt = f_.xi(b, lambda);
    if (opt_.verify) {
        s.hjb = hjb_check(f_.curve(b, lambda), verification_grid(b), lambda);
        if (!s.hjb.pass)
            throw InternalError("verification failed at b = " + fmt17(b) + ", Lambda = " + fmt17(lambda) +
                                ": worst violation " + fmt17(s.hjb.worst_violation) + " at x = " +
                                fmt17(s.hjb.worst_x));
    }
    return s;
}

double ThresholdOptimizer::lambda_bar() const {
    const ModelSpec& m = f_.model();
    const double q = m.q, d = m.delta, phi = f_.varphi();
    if (m.sigma > 0.0) return (m.sigma * m.sigma * phi / 2.0 - d) / q;
    const double c = m.x_drift();
    const double rate = q + m.jumps.kappa;
    if (phi >= rate / (c - d)) return std::numeric_limits<double>::infinity();
    return (phi * c * (c - d) - d * rate) / (q * (rate - phi * (c - d)));
}

double ThresholdOptimizer::H(double b) const {
    if (!(b > b0_)) throw DomainError("H(b) needs b > b_0 = " + fmt17(b0_) + ", got " + fmt17(b));
    const double Ph = f_.Phi();
    return std::exp(Ph * b) * f_.h_gap(b) / f_.h_mixture().derivative().scaled(b, Ph);
}

double ThresholdOptimizer::lambda_of_b(double b) const {
    if (!(b > b0_)) throw DomainError("lambda(b) needs b > b_0 = " + fmt17(b0_) + ", got " + fmt17(b));
    const double Ph = f_.Phi();
    double hp = f_.h_mixture().derivative().scaled(b, Ph);
    return hp / (f_.q() * f_.h_gap(b));
}

}  // namespace levydiv

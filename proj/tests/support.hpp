#pragma once

// Test models and numerical oracles shared by the unit and acceptance tests.
// The oracles (quadrature, bisection, finite differences) never call the
// closed forms they are used to check.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "levydiv/levy_model.hpp"

namespace levydiv::testing {

inline ModelSpec case1() {
    ModelSpec m;
    m.drift = 1.5;
    m.sigma = 0.2;
    m.delta = 1.0;
    m.q = 0.05;
    m.jumps.kappa = 1.0;
    m.jumps.terms = {{1.0, 1.0, 1}};
    return m;
}

inline ModelSpec case2() {
    ModelSpec m;
    m.drift = 5.0;
    m.sigma = 0.0;
    m.delta = 0.1;
    m.q = 0.05;
    m.jumps.kappa = 0.01;
    m.jumps.terms = {{1.0, 1.0, 1}};
    return m;
}

// driftless Brownian motion with sigma^2 = 2, so psi(l) = l^2
inline ModelSpec pure_bm(double delta = 0.5) {
    ModelSpec m;
    m.drift = 0.0;
    m.sigma = std::sqrt(2.0);
    m.delta = delta;
    m.q = 0.05;
    return m;
}

// Spectrally positive desk model: surplus drift -1, sigma 0.2, upward jumps
// at rate 1.5 with sizes 0.7 Exp(1) + 0.3 Exp(2).
inline ModelSpec desk_sp(double sigma = 0.2) {
    ModelSpec m;
    m.side = Side::spectrally_positive;
    m.drift = -1.0;
    m.sigma = sigma;
    m.delta = 1.0;
    m.q = 0.05;
    m.jumps.kappa = 1.5;
    m.jumps.terms = {{0.7, 1.0, 1}, {0.3, 2.0, 1}};
    return m;
}

// Erlang(2) phase mixed with an exponential one (complex roots possible).
inline ModelSpec erlang_mix() {
    ModelSpec m;
    m.drift = 2.0;
    m.sigma = 0.3;
    m.delta = 1.0;
    m.q = 0.05;
    m.jumps.kappa = 1.0;
    m.jumps.terms = {{0.4, 1.0, 1}, {0.6, 2.0, 2}};
    return m;
}

// psi from the definition, written out independently of LaplaceExponent
inline double psi_direct(double c, double sigma, const JumpMixture& j, double l) {
    double s = 0.0;
    for (const auto& t : j.terms) s += t.p * std::pow(t.rho / (t.rho + l), t.k);
    return c * l + 0.5 * sigma * sigma * l * l - j.kappa * (1.0 - s);
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-14) {
    double flo = f(lo), fhi = f(hi);
    if (flo * fhi > 0.0) throw std::runtime_error("bisect: no sign change");
    for (int i = 0; i < 400 && hi - lo > tol * std::max(1.0, std::abs(lo)); ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

inline double integrate(const std::function<double(double)>& f, double a, double b) {
    boost::math::quadrature::gauss_kronrod<double, 61> gk;
    return gk.integrate(f, a, b, 15, 1e-13);
}

// int_a^inf f
inline double integrate_tail(const std::function<double(double)>& f, double a) {
    boost::math::quadrature::exp_sinh<double> es;
    return es.integrate([&](double t) { return f(a + t); });
}

inline double central_diff(const std::function<double(double)>& f, double x, double h = 1e-5) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double second_diff(const std::function<double(double)>& f, double x, double h = 1e-4) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace levydiv::testing

#include "levydiv/scale_functions.hpp"

#include <cmath>

#include "levydiv/errors.hpp"

namespace levydiv {

ScaleFamily build_family(const LaplaceExponent& f, const std::vector<cplx>& roots, double q) {
    ScaleFamily s;
    s.q = q;
    s.roots = roots;
    s.dominant_rate = roots.front().real();
    std::vector<ExpTerm> w, z, zb;
    cplx zb0 = 0.0;
    for (const cplx& th : roots) {
        cplx c = 1.0 / f.derivative(th);
        w.push_back({c, th});
        // Z = 1 + q Wbar; the constant 1 - q sum c/theta vanishes identically
        z.push_back({q * c / th, th});
        zb.push_back({q * c / (th * th), th});
        zb0 -= q * c / (th * th);
    }
    zb.push_back({zb0, 0.0});
    s.dominant_coeff = w.front().coeff.real();
    s.W = ExpMixture(std::move(w));
    s.Wp = s.W.derivative();
    s.Wpp = s.W.derivative(2);
    s.Wppp = s.W.derivative(3);
    s.Wbar = s.W.antiderivative();
    s.Z = ExpMixture(std::move(z));
    s.Zbar = ExpMixture(std::move(zb));
    s.W0 = s.W.eval(0.0);
    s.Wp0 = s.Wp.eval(0.0);
    return s;
}

ScalePair build_scale(const ModelSpec& m) {
    ScalePair p;
    p.roots = solve_roots(m);
    p.q = m.q;
    p.delta = m.delta;
    p.x = build_family(exponent_x(m), p.roots.x_roots, m.q);
    p.y = build_family(exponent_y(m), p.roots.y_roots, m.q);
    const double Phi = p.roots.phi_q;
    if (p.x.W.max_rate() > Phi || Phi >= p.roots.varphi_q)
        throw InternalError("scale roots out of order");
    std::vector<ExpTerm> zt;
    for (const auto& t : p.y.W.terms()) {
        cplx r = t.rate - Phi;
        zt.push_back({m.delta * Phi * t.coeff / r, r});
    }
    p.z_phi = ExpMixture(std::move(zt));
    return p;
}

double refraction_identity_residual(double x, const ScalePair& s) {
    if (x <= 0.0) return 0.0;
    double lhs = s.delta * convolve(s.y.W, s.x.W).eval(x);
    return lhs - (s.y.Wbar.eval(x) - s.x.Wbar.eval(x));
}

double z_change_of_measure(const ScalePair& s, double x) {
    return x <= 0.0 ? 1.0 : s.z_phi.eval(x);
}

AsymptoticReport asymptotic_check(const ScaleFamily& f) {
    AsymptoticReport r;
    r.limit = f.dominant_coeff;
    for (double x = 1.0; x <= 64.0; x *= 2.0) {
        r.xs.push_back(x);
        r.ratios.push_back(f.W.scaled(x, f.dominant_rate));
    }
    for (std::size_t i = 1; i < r.ratios.size(); ++i)
        if (!(r.ratios[i] >= r.ratios[i - 1])) r.monotone_increasing = false;
    if (!(r.ratios.back() <= r.limit + 1e-13 * std::abs(r.limit))) r.monotone_increasing = false;
    r.deviation = std::abs(r.ratios.back() - r.limit);
    return r;
}

}  // namespace levydiv

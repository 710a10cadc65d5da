#include "invariants.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <ostream>
#include <string>

#include "levydiv/format.hpp"
#include "levydiv/optimizer_sn.hpp"
#include "levydiv/refracted_sp.hpp"
#include "levydiv/scale_functions.hpp"

namespace levydiv::cli {

namespace {

class Checker {
public:
    explicit Checker(std::ostream& out) : out_(out) {}

    void check(const std::string& name, bool ok, const std::string& detail) {
        out_ << (ok ? "PASS  " : "FAIL  ") << name << "  " << detail << "\n";
        if (!ok) ++failed_;
    }
    void measure(const std::string& name, double err, double tol) {
        check(name, err < tol, "err=" + fmt17(err) + " tol=" + fmt17(tol));
    }
    int failed() const { return failed_; }

private:
    std::ostream& out_;
    int failed_ = 0;
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// int_0^inf exp(-theta x) W(x) dx by tanh-sinh on the half line
double laplace_by_quadrature(const ExpMixture& W, double theta) {
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate([&](double x) { return W.scaled(x, theta); });
}

void check_roots(Checker& c, const ModelSpec& m, const RootSet& r) {
    const double q = m.q;
    c.measure("root Phi(q)", std::abs(exponent_x(m)(r.phi_q) - q) / q, 1e-10);
    c.measure("root varphi(q)", std::abs(exponent_y(m)(r.varphi_q) - q) / q, 1e-10);
    c.check("varphi > Phi > 0", r.varphi_q > r.phi_q && r.phi_q > 0.0,
            "Phi=" + fmt17(r.phi_q) + " varphi=" + fmt17(r.varphi_q));
}

void check_laplace(Checker& c, const std::string& tag, const LaplaceExponent& f, const ScaleFamily& s) {
    double worst = 0.0;
    for (double bump : {0.1, 0.5, 1.0, 3.0, 10.0}) {
        double th = s.dominant_rate + bump;
        worst = std::max(worst, rel(laplace_by_quadrature(s.W, th), 1.0 / (f(th) - s.q)));
    }
    c.measure(tag + " Laplace transform (quadrature)", worst, 1e-6);
}

void check_sn(Checker& c, const ModelSpec& m, double lambda) {
    ThresholdOptimizer opt(m);
    const SnFunctionals& f = opt.functionals();
    const ScalePair& s = f.scales();
    check_roots(c, m, s.roots);
    check_laplace(c, "W", exponent_x(m), s.x);
    check_laplace(c, "WW", exponent_y(m), s.y);
    c.measure("int exp(-varphi y) W = 1/(delta varphi)",
              rel(s.x.W.laplace(f.varphi()), 1.0 / (f.delta() * f.varphi())), 1e-10);
    double worst = 0.0;
    for (double x = 0.5; x <= 10.0; x += 0.5)
        worst = std::max(worst, std::abs(refraction_identity_residual(x, s)) / (1.0 + s.y.wbar(x)));
    c.measure("refraction identity residual", worst, 1e-9);
    auto asym = asymptotic_check(s.x);
    c.check("exp(-Phi x) W increases to its limit", asym.monotone_increasing, "dev=" + fmt17(asym.deviation));

    boost::math::quadrature::gauss_kronrod<double, 61> gk;
    const double b3 = 3.0;
    double tail = gk.integrate([&](double y) { return s.x.Wp.scaled(y, f.varphi()); }, b3,
                               std::numeric_limits<double>::infinity());
    c.measure("h(3) tail integral (quadrature)",
              rel(f.h(b3), f.varphi() * std::exp(f.varphi() * b3) * tail), 1e-8);

    if (!(m.q * lambda + m.delta > 0.0)) {
        c.check("lambda admissible", false, "q*Lambda + delta <= 0, skipping threshold checks");
        return;
    }
    auto sol = opt.b_opt(lambda);
    c.check("verification at b_opt", sol.hjb.pass,
            "b_opt=" + fmt17(sol.b_opt) + " worst=" + fmt17(sol.hjb.worst_violation));
    if (sol.b_opt > 0.0) {
        auto cur = f.curve(sol.b_opt, lambda);
        const double b = sol.b_opt;
        c.measure("smooth fit v'", std::abs(cur.vprime(b, Limit::left) - cur.vprime(b, Limit::right)), 1e-9);
        if (f.variation() == Variation::unbounded)
            c.measure("smooth fit v''", std::abs(cur.vsecond(b, Limit::left) - cur.vsecond(b, Limit::right)), 1e-8);
        c.measure("v'(b_opt) = 1", std::abs(cur.vprime(b, Limit::left) - 1.0), 1e-9);
    }
    // strict while the gap to the limit K_1 is above roundoff, non-increasing after
    bool dec = true;
    const double k1 = f.K_x(1.0);
    double prev = f.ruin_laplace(1.0, 0.0);
    for (double b = 0.25; b <= 20.0; b += 0.25) {
        double p = f.ruin_laplace(1.0, b);
        if (prev - k1 > 1e-10 ? !(p < prev) : p > prev) dec = false;
        prev = p;
    }
    c.check("Psi_1(b) strictly decreasing in b", dec, "b in [0, 20]");
}

void check_sp(Checker& c, const ModelSpec& m, double lambda) {
    SpFunctionals f(m);
    const ScalePair& s = f.scales();
    check_roots(c, m, s.roots);
    check_laplace(c, "W", exponent_x(m), s.x);
    check_laplace(c, "WW", exponent_y(m), s.y);

    boost::math::quadrature::gauss_kronrod<double, 61> gk;
    double integral = gk.integrate([&](double z) { return s.y.W.scaled(z, f.Phi()); }, 0.0, 1.0);
    c.measure("ZZ_Phi(1) (quadrature)", rel(f.z_phi(1.0), 1.0 + f.delta() * f.Phi() * integral), 1e-10);

    const double x = 1.0;
    c.measure("Psi_1(0+) = exp(-Phi)", std::abs(f.ruin_laplace(x, 1e-8) - std::exp(-f.Phi() * x)), 1e-6);
    c.measure("Psi_1(60) = exp(-varphi)", std::abs(f.ruin_laplace(x, 60.0) - std::exp(-f.varphi() * x)), 1e-6);
    c.measure("s(0+) = 1/Phi - delta/q", std::abs(f.s(1e-8) - f.Lambda_tilde()), 1e-6);

    auto sol = f.b_opt(lambda);
    c.check("verification at b_opt", sol.hjb.pass,
            "b_opt=" + fmt17(sol.b_opt) + " worst=" + fmt17(sol.hjb.worst_violation));
    c.measure("v(0) = -Lambda", std::abs(f.value(0.0, sol.b_opt, lambda) + lambda), 1e-12);
    if (sol.b_opt > 0.0) {
        auto sf = f.smooth_fit_check(sol.b_opt, lambda);
        c.check("smooth fit at b_opt", sf.continuous, "jump1=" + fmt17(sf.jump1) + " jump2=" + fmt17(sf.jump2));
    }
}

}  // namespace

int check_invariants(const ModelSpec& m, double lambda, std::ostream& out) {
    Checker c(out);
    if (m.side == Side::spectrally_negative)
        check_sn(c, m, lambda);
    else
        check_sp(c, m, lambda);
    out << (c.failed() ? "FAILED " + std::to_string(c.failed()) + " check(s)" : std::string("all checks passed"))
        << "\n";
    return c.failed();
}

}  // namespace levydiv::cli

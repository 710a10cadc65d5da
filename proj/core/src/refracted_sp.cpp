#include "levydiv/refracted_sp.hpp"

#include <cmath>
#include <string>

#include "levydiv/errors.hpp"
#include "levydiv/format.hpp"

namespace levydiv {

SpFunctionals::SpFunctionals(const ModelSpec& m) : model_(m) {
    if (m.side != Side::spectrally_positive)
        throw ModelError("SpFunctionals needs a spectrally positive model");
    variation_ = classify_variation(m);
    s_ = build_scale(m);
    const double phi = varphi(), Ph = Phi();
    A1_ = Y().Z.coefficient(phi).real();
    r1_ = Y().Z.without_rate(phi);
    A2_ = s_.z_phi.coefficient(phi - Ph).real();
    r2_ = s_.z_phi.without_rate(phi - Ph);
    R2_ = r2_.times_exp(Ph);

    std::vector<ExpTerm> lt;
    for (const auto& t : Y().W.terms())
        lt.push_back({delta() * Ph * t.coeff / (t.rate * (t.rate - Ph)), t.rate});
    lt_ = ExpMixture(std::move(lt));
    ltp_ = s_.z_phi.times_exp(Ph);
}

double SpFunctionals::z_phi(double x) const { return x <= 0.0 ? 1.0 : s_.z_phi.eval(x); }

double SpFunctionals::ruin_laplace(double x, double b) const {
    if (x <= 0.0) return 1.0;
    if (b > x) return std::exp(-varphi() * x) * zhat(b - x) / zhat(b);
    return std::exp(-Phi() * x - (varphi() - Phi()) * b) / zhat(b);
}

double SpFunctionals::dividends_only(double x, double b) const {
    if (x <= 0.0) return 0.0;
    const double dq = delta() / q();
    const double phi = varphi(), Ph = Phi();
    if (x >= b) return dq * (1.0 - std::exp(-Ph * (x - b)) * Y().Z.scaled(b, phi) / zhat(b));
    // ZZ(b-x) ZZ_Phi(b) - ZZ(b) exp(-Phi x) ZZ_Phi(b-x) with the exp(2 varphi b)
    // products cancelled
    const double u = b - x;
    const double r1u = r1_.eval(u), r1b = r1_.eval(b), r2u = r2_.eval(u), r2b = r2_.eval(b);
    const double e = std::exp(-(phi - Ph) * b);
    const double ex = std::exp(-phi * x);
    double t = A1_ * ex * R2_.eval(b) + A2_ * r1u + r1u * r2b * e - A1_ * R2_.eval(u) - A2_ * ex * r1b -
               std::exp(-Ph * x) * r1b * r2u * e;
    return dq * t / zhat(b);
}

double SpFunctionals::value(double x, double b, double lambda) const {
    return dividends_only(x, b) - lambda * ruin_laplace(x, b);
}

double SpFunctionals::kbar_x(double x, double b, double lambda) const {
    return ruin_laplace(x, b) * (delta() / q() * zz(b) + lambda);
}

double SpFunctionals::kbar_b(double b, double lambda) const {
    const double phi = varphi();
    return (delta() / q() * Y().Z.scaled(b, phi) + lambda * std::exp(-phi * b)) / zhat(b);
}

double SpFunctionals::vprime(double x, double b, double lambda, Limit side) const {
    const double Ph = Phi();
    const double kb = kbar_b(b, lambda);
    if (x < b || (x == b && side == Limit::left && b > 0.0)) {
        const double u = b - x;
        return delta() * Y().w(u) * (Ph * kb - 1.0) + Ph * kbar_x(x, b, lambda);
    }
    return Ph * kb * std::exp(-Ph * (x - b));
}

double SpFunctionals::vsecond(double x, double b, double lambda, Limit side) const {
    const double Ph = Phi();
    const double kb = kbar_b(b, lambda);
    if (x < b || (x == b && side == Limit::left && b > 0.0)) {
        const double u = b - x;
        return -delta() * Y().wp(u) * (Ph * kb - 1.0) - Ph * Ph * kbar_x(x, b, lambda) -
               delta() * Ph * Ph * kb * Y().w(u);
    }
    return -Ph * Ph * kb * std::exp(-Ph * (x - b));
}

double SpFunctionals::s(double b) const { return lt_.scaled(b, Phi()); }

double SpFunctionals::s_prime(double b) const {
    return delta() * Phi() * Y().Z.scaled(b, Phi()) / q();
}

double SpFunctionals::lambda_tilde(double b) const { return lt_.eval(b); }

double SpFunctionals::lambda_tilde_prime(double b) const { return ltp_.eval(b); }

ThresholdSolution SpFunctionals::b_opt(double lambda, bool verify) const {
    ThresholdSolution sol;
    sol.lambda = lambda;
    sol.boundary_case = BoundaryCase::at_zero;
    double b = 0.0;
    if (lambda > Lambda_tilde()) {
        double lo = 0.0, hi = 1.0;
        const double cap = 690.0 / varphi();
        while (lambda_tilde(hi) < lambda) {
            lo = hi;
            hi *= 2.0;
            if (hi > cap) throw DomainError("threshold for Lambda = " + fmt17(lambda) + " is out of range");
        }
        // safeguarded Newton on the increasing lambda_tilde
        double x = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            double f = lambda_tilde(x) - lambda;
            if (f > 0.0) hi = x; else lo = x;
            double nx = x - f / lambda_tilde_prime(x);
            if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
            if (std::abs(nx - x) <= 1e-15 * std::max(1.0, x) || hi - lo <= 1e-15 * std::max(1.0, hi)) {
                x = nx;
                break;
            }
            x = nx;
        }
        b = x;
        sol.boundary_case = BoundaryCase::interior;
    }
    sol.b_opt = b;
    sol.xi_at_opt = b > 0.0 ? s(b) : Lambda_tilde();
    if (verify) {
        sol.hjb = hjb_check(curve(b, lambda), verification_grid(b), lambda);
        if (!sol.hjb.pass)
            throw InternalError("verification failed at b = " + fmt17(b) + ", Lambda = " + fmt17(lambda) +
                                ": worst violation " + fmt17(sol.hjb.worst_violation) + " at x = " +
                                fmt17(sol.hjb.worst_x));
    }
    return sol;
}

double SpFunctionals::b0() const { return b_opt(0.0, false).b_opt; }

SmoothFitReport SpFunctionals::smooth_fit_check(double b, double lambda) const {
    if (!(b > 0.0)) throw DomainError("smooth fit check needs b > 0");
    SmoothFitReport r;
    r.b = b;
    r.vprime_left = vprime(b, b, lambda, Limit::left);
    r.vprime_right = vprime(b, b, lambda, Limit::right);
    r.vsecond_left = vsecond(b, b, lambda, Limit::left);
    r.vsecond_right = vsecond(b, b, lambda, Limit::right);
    r.jump1 = r.vprime_left - r.vprime_right;
    const bool unbounded = variation_ == Variation::unbounded;
    r.jump2 = unbounded ? r.vsecond_left - r.vsecond_right : 0.0;
    r.continuous = std::abs(r.jump1) <= 1e-8 && (!unbounded || std::abs(r.jump2) <= 1e-8);
    return r;
}

double SpValueCurve::v(double x) const { return f_->value(x, b_, lambda_); }
double SpValueCurve::vprime(double x, Limit side) const { return f_->vprime(x, b_, lambda_, side); }
double SpValueCurve::vsecond(double x, Limit side) const { return f_->vsecond(x, b_, lambda_, side); }
double SpValueCurve::psi(double x) const { return f_->ruin_laplace(x, b_); }

CurvePoint SpValueCurve::point(double x) const {
    return {x, v(x), vprime(x, Limit::left), vsecond(x, Limit::left), vsecond(x, Limit::right), psi(x)};
}

std::vector<CurvePoint> SpValueCurve::sample(const std::vector<double>& xs) const {
    std::vector<CurvePoint> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back(point(x));
    return out;
}

}  // namespace levydiv

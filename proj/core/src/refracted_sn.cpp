#include "levydiv/refracted_sn.hpp"

#include <atomic>
#include <cmath>
#include <ostream>
#include <string>

#include "levydiv/errors.hpp"
#include "levydiv/format.hpp"

namespace levydiv {

namespace {

std::atomic<long> g_clamped{0};

double clamp_probability(double p) {
    if (p >= 0.0 && p <= 1.0) return p;
    if (p > -1e-9 && p < 0.0) {
        ++g_clamped;
        return 0.0;
    }
    if (p > 1.0 && p < 1.0 + 1e-9) {
        ++g_clamped;
        return 1.0;
    }
    throw InternalError("ruin Laplace transform out of [0,1]: " + fmt17(p));
}

// Above roughly this, exp(Phi b) overflows when shifting mixtures to b.
constexpr double kShiftLimit = 690.0;

}  // namespace

long ruin_clamp_count() { return g_clamped.load(); }

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& pts) {
    write_csv_header(out, {"x", "v", "vprime", "vsecond_left", "vsecond_right", "psi"});
    for (const auto& p : pts)
        out << fmt17(p.x) << ',' << fmt17(p.v) << ',' << fmt17(p.vprime) << ',' << fmt17(p.vsecond_left)
            << ',' << fmt17(p.vsecond_right) << ',' << fmt17(p.psi) << '\n';
}

SnFunctionals::SnFunctionals(const ModelSpec& m) : model_(m) {
    if (m.side != Side::spectrally_negative)
        throw ModelError("SnFunctionals needs a spectrally negative model");
    variation_ = classify_variation(m);
    s_ = build_scale(m);
    const double phi = varphi();
    const double Ph = Phi();
    h_ = X().Wp.weighted_tail(phi) * phi;
    hp_ = h_.derivative();
    wh_ = X().W.weighted_tail(phi) * phi;

    A_ = X().W.coefficient(Ph).real();
    r_ = X().W.without_rate(Ph);
    rp_ = r_.derivative();
    rpp_ = r_.derivative(2);
    HPhi_ = h_.coefficient(Ph).real();
    hr_ = h_.without_rate(Ph);
    hrp_ = hr_.derivative();
    Omega_ = wh_.coefficient(Ph).real();
    whr_ = wh_.without_rate(Ph);
}

void SnFunctionals::require_positive_terminal(double lambda) const {
    if (!(q() * lambda + delta() > 0.0))
        throw AssumptionViolated(assumption::positive_terminal_rate,
                                 "q*Lambda + delta = " + fmt17(q() * lambda + delta()) + " <= 0");
}

double SnFunctionals::ruin_ratio(double b) const {
    return wh_.scaled(b, Phi()) / h_.scaled(b, Phi());
}

double SnFunctionals::inv_h(double b) const { return std::exp(-Phi() * b) / h_.scaled(b, Phi()); }

double SnFunctionals::xi(double b, double lambda) const {
    require_positive_terminal(lambda);
    const double Ph = Phi();
    return (std::exp(-Ph * b) + q() * lambda * wh_.scaled(b, Ph)) / h_.scaled(b, Ph);
}

double SnFunctionals::h_gap(double b) const {
    const double Ph = Phi();
    double hr = hr_.eval(b), hrp = hrp_.eval(b), whr = whr_.eval(b);
    return 2.0 * HPhi_ * hr - Ph * HPhi_ * whr - Omega_ * hrp + std::exp(-Ph * b) * (hr * hr - hrp * whr);
}

double SnFunctionals::xi_prime(double b, double lambda) const {
    require_positive_terminal(lambda);
    const double Ph = Phi();
    double hs = h_.scaled(b, Ph);
    return std::exp(-Ph * b) * (q() * lambda * h_gap(b) - hp_.scaled(b, Ph)) / (hs * hs);
}

double SnFunctionals::g(double b, double lambda) const {
    const double Ph = Phi();
    return (std::exp(-Ph * b) + q() * lambda * X().W.scaled(b, Ph)) / X().Wp.scaled(b, Ph);
}

double SnFunctionals::g_prime_numerator(double b, double lambda) const {
    const double Ph = Phi();
    double r = r_.eval(b), rp = rp_.eval(b), rpp = rpp_.eval(b);
    double gap = A_ * (2.0 * Ph * rp - Ph * Ph * r - rpp) + std::exp(-Ph * b) * (rp * rp - r * rpp);
    return q() * lambda * gap - X().Wpp.scaled(b, Ph);
}

double SnFunctionals::g_prime(double b, double lambda) const {
    double wps = X().Wp.scaled(b, Phi());
    return std::exp(-Phi() * b) * g_prime_numerator(b, lambda) / (wps * wps);
}

double SnFunctionals::dividends_only(double x, double b) const {
    if (x <= b) return X().w(x) * inv_h(b);
    return RefractedBranch(*this, b).dividends(x);
}

double SnFunctionals::ruin_laplace(double x, double b) const {
    if (x <= b) return clamp_probability(X().z(x) - q() * ruin_ratio(b) * X().w(x));
    return RefractedBranch(*this, b).ruin(x);
}

double SnFunctionals::value(double x, double b, double lambda) const {
    require_positive_terminal(lambda);
    RefractedBranch br(*this, b);
    return br.dividends(x) - lambda * br.ruin(x);
}

double SnFunctionals::K_x(double x) const {
    // the exp(Phi x) parts of Z and (q/Phi) W are equal
    const double Ph = Phi();
    double tail = 0.0;
    for (const auto& t : X().W.terms()) {
        if (t.rate == cplx(Ph, 0.0)) continue;
        tail += (q() * t.coeff * (1.0 / t.rate - 1.0 / Ph) * std::exp(t.rate * x)).real();
    }
    return tail;
}

RefractedBranch::RefractedBranch(const SnFunctionals& f, double b) : f_(&f), b_(b) {
    if (!(b >= 0.0)) throw DomainError("threshold must be nonnegative");
    inv_h_ = f.inv_h(b);
    ratio_ = f.ruin_ratio(b);
}

void RefractedBranch::build_above() const {
    if (built_) return;
    const SnFunctionals& f = *f_;
    if (f.Phi() * b_ > kShiftLimit) throw DomainError("threshold too large to evaluate above it");
    const double d = f.delta(), q = f.q();
    ExpMixture Ws = f.X().W.shifted(b_);
    ExpMixture Wps = f.X().Wp.shifted(b_);
    ExpMixture Zs = f.X().Z.shifted(b_);
    ExpMixture c1 = convolve(f.Y().W, Wps);
    ExpMixture c0 = convolve(f.Y().W, Ws);

    MixtureSum dv;
    dv.add(Ws, inv_h_);
    dv.add(c1, d * inv_h_);
    dv.add(f.Y().Wbar, -d);
    double r1 = dv.cancel(f.varphi());
    div_above_ = dv.result();

    MixtureSum rv;
    rv.add(Zs);
    rv.add(c0, d * q);
    rv.add(Ws, -q * ratio_);
    rv.add(c1, -q * ratio_ * d);
    double r2 = rv.cancel(f.varphi());
    ruin_above_ = rv.result();
    residual_ = std::max(r1, r2);
    built_ = true;
}

double RefractedBranch::dividends(double x, int order, Limit side) const {
    bool below = x < b_ || (x == b_ && (order == 0 || (side == Limit::left && b_ > 0.0)));
    if (below) {
        const ScaleFamily& X = f_->X();
        const ExpMixture& m = order == 0 ? X.W : order == 1 ? X.Wp : X.Wpp;
        return m.eval(x) * inv_h_;
    }
    build_above();
    return div_above_.derivative(order).eval(x - b_);
}

double RefractedBranch::ruin(double x, int order, Limit side) const {
    bool below = x < b_ || (x == b_ && (order == 0 || (side == Limit::left && b_ > 0.0)));
    const double q = f_->q();
    if (below) {
        const ScaleFamily& X = f_->X();
        if (order == 0) return clamp_probability(X.z(x) - q * ratio_ * X.w(x));
        if (order == 1) return q * X.w(x) - q * ratio_ * X.wp(x);
        return q * X.wp(x) - q * ratio_ * X.wpp(x);
    }
    build_above();
    double v = ruin_above_.derivative(order).eval(x - b_);
    return order == 0 ? clamp_probability(v) : v;
}

ValueCurve::ValueCurve(const SnFunctionals& f, double b, double lambda)
    : branch_(f, b), lambda_(lambda) {}

double ValueCurve::v(double x) const { return branch_.dividends(x) - lambda_ * branch_.ruin(x); }

double ValueCurve::vprime(double x, Limit side) const {
    return branch_.dividends(x, 1, side) - lambda_ * branch_.ruin(x, 1, side);
}

double ValueCurve::vsecond(double x, Limit side) const {
    return branch_.dividends(x, 2, side) - lambda_ * branch_.ruin(x, 2, side);
}

CurvePoint ValueCurve::point(double x) const {
    return {x, v(x), vprime(x, Limit::left), vsecond(x, Limit::left), vsecond(x, Limit::right), psi(x)};
}

std::vector<CurvePoint> ValueCurve::sample(const std::vector<double>& xs) const {
    std::vector<CurvePoint> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back(point(x));
    return out;
}

}  // namespace levydiv

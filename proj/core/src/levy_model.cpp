#include "levydiv/levy_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "levydiv/errors.hpp"

namespace levydiv {

namespace {

constexpr double kRootTol = 1e-12;
constexpr int kMaxIter = 200;
constexpr double kMinRootGap = 1e-8;
constexpr double kImagCut = 1e-10;

bool finite(double v) { return std::isfinite(v); }

using Poly = std::vector<double>;  // coefficients, lowest degree first

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

Poly poly_add(Poly a, const Poly& b) {
    if (b.size() > a.size()) a.resize(b.size(), 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    return a;
}

Poly poly_pow_linear(double rho, int k) {
    Poly r{1.0};
    for (int i = 0; i < k; ++i) r = poly_mul(r, Poly{rho, 1.0});
    return r;
}

// Newton safeguarded by a bracket [lo, hi] with f(lo) < 0 < f(hi).
double positive_root(const LaplaceExponent& f, double q) {
    double lo = 0.0, hi = 1.0;
    int grow = 0;
    while (f(hi) - q <= 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++grow > kMaxIter) throw InternalError("positive root: no bracket");
    }
    double x = hi;
    for (int it = 0; it < kMaxIter; ++it) {
        double fx = f(x) - q;
        if (fx == 0.0) return x;
        if (fx < 0.0) lo = x; else hi = x;
        double d = f.derivative(x);
        double xn = x - fx / d;
        if (!(xn > lo && xn < hi) || !finite(xn)) xn = 0.5 * (lo + hi);
        if (std::abs(xn - x) <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(x) ||
            hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
            x = xn;
            break;
        }
        x = xn;
    }
    if (std::abs(f(x) - q) > kRootTol * std::max(1.0, q))
        throw InternalError("positive root did not converge");
    return x;
}

// Root of f - q on (a, b) given f(a+) > q > f(b-).  a may be -inf.
double bisect_between(const LaplaceExponent& f, double q, double a, double b) {
    if (!std::isfinite(a)) {
        double step = 1.0;
        a = b - step;
        while (f(a) - q <= 0.0) {
            step *= 2.0;
            a = b - step;
            if (step > 1e300) throw InternalError("negative root: no bracket");
        }
    }
    double lo = a, hi = b;  // f(lo) > q, f(hi) < q
    for (int it = 0; it < 2000; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double fm = f(mid) - q;
        if (fm == 0.0) return mid;
        if (fm > 0.0) lo = mid; else hi = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 3; ++it) {
        double xn = x - (f(x) - q) / f.derivative(x);
        if (!(xn >= lo && xn <= hi)) break;
        x = xn;
    }
    return x;
}

void sort_roots(std::vector<cplx>& r) {
    std::sort(r.begin(), r.end(), [](const cplx& a, const cplx& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
}

void check_simple(const std::vector<cplx>& r) {
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = i + 1; j < r.size(); ++j)
            if (std::abs(r[i] - r[j]) < kMinRootGap)
                throw MultipleRootError("roots " + std::to_string(r[i].real()) + " and " +
                                        std::to_string(r[j].real()) + " closer than 1e-8");
}

std::vector<cplx> hyperexponential_roots(const LaplaceExponent& f, double q, double pos) {
    std::vector<cplx> out{pos};
    const auto& t = f.jumps().terms;
    if (f.jumps().kappa > 0.0 && !t.empty()) {
        out.emplace_back(bisect_between(f, q, -t.front().rho, 0.0));
        for (std::size_t i = 0; i + 1 < t.size(); ++i)
            out.emplace_back(bisect_between(f, q, -t[i + 1].rho, -t[i].rho));
        if (f.sigma() > 0.0)
            out.emplace_back(bisect_between(f, q, -std::numeric_limits<double>::infinity(),
                                            -t.back().rho));
    } else if (f.sigma() > 0.0) {
        out.emplace_back(bisect_between(f, q, -std::numeric_limits<double>::infinity(), 0.0));
    }
    return out;
}

std::vector<cplx> companion_roots(const LaplaceExponent& f, double q, double pos) {
    const double s2 = f.sigma() * f.sigma();
    const JumpMixture& J = f.jumps();
    Poly base{-J.kappa - q, f.drift(), 0.5 * s2};
    if (s2 == 0.0) base.pop_back();
    Poly all{1.0};
    for (const auto& t : J.terms) all = poly_mul(all, poly_pow_linear(t.rho, t.k));
    Poly num = poly_mul(base, all);
    for (std::size_t i = 0; i < J.terms.size(); ++i) {
        Poly rest{J.kappa * J.terms[i].p * std::pow(J.terms[i].rho, J.terms[i].k)};
        for (std::size_t j = 0; j < J.terms.size(); ++j)
            if (j != i) rest = poly_mul(rest, poly_pow_linear(J.terms[j].rho, J.terms[j].k));
        num = poly_add(num, rest);
    }
    const int n = static_cast<int>(num.size()) - 1;
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) C(i, n - 1) = -num[i] / num[n];
    Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
    std::vector<cplx> r;
    for (int i = 0; i < n; ++i) {
        cplx z = es.eigenvalues()[i];
        for (int it = 0; it < 50; ++it) {
            cplx step = (f(z) - q) / f.derivative(z);
            z -= step;
            if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z))) break;
        }
        if (std::abs(z.imag()) < kImagCut) z = cplx(z.real(), 0.0);
        r.push_back(z);
    }
    // the Newton root from the real search is the more accurate one
    std::size_t ip = 0;
    for (std::size_t i = 1; i < r.size(); ++i)
        if (std::abs(r[i] - pos) < std::abs(r[ip] - pos)) ip = i;
    r[ip] = pos;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i].imag() <= 0.0) continue;
        std::size_t best = r.size();
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (j == i || r[j].imag() >= 0.0) continue;
            if (best == r.size() || std::abs(r[j] - std::conj(r[i])) < std::abs(r[best] - std::conj(r[i])))
                best = j;
        }
        if (best == r.size()) throw InternalError("complex root without conjugate");
        r[best] = std::conj(r[i]);
    }
    return r;
}

}  // namespace

bool JumpMixture::hyperexponential() const {
    return std::all_of(terms.begin(), terms.end(), [](const JumpTerm& t) { return t.k == 1; });
}

double JumpMixture::mean_size() const {
    double m = 0.0;
    for (const auto& t : terms) m += t.p * t.k / t.rho;
    return m;
}

void ModelSpec::validate() const {
    if (!finite(drift) || !finite(sigma) || !finite(delta) || !finite(q) || !finite(jumps.kappa))
        throw ModelError("model parameters must be finite");
    if (q <= 0.0) throw ModelError("q must be positive");
    if (delta <= 0.0) throw ModelError("delta must be positive");
    if (sigma < 0.0) throw ModelError("sigma must be nonnegative");
    if (jumps.kappa < 0.0) throw ModelError("kappa must be nonnegative");
    if (jumps.kappa > 0.0 && jumps.terms.empty()) throw ModelError("kappa > 0 needs jump terms");
    if (!jumps.terms.empty()) {
        double sp = 0.0;
        for (std::size_t i = 0; i < jumps.terms.size(); ++i) {
            const auto& t = jumps.terms[i];
            if (!(t.p > 0.0) || !finite(t.p)) throw ModelError("jump weights must be positive");
            if (!(t.rho > 0.0) || !finite(t.rho)) throw ModelError("jump rates must be positive");
            if (t.k < 1 || t.k > 64) throw ModelError("Erlang shape must be in 1..64");
            if (i > 0 && !(t.rho > jumps.terms[i - 1].rho))
                throw ModelError("jump rates must be strictly ascending");
            sp += t.p;
        }
        if (std::abs(sp - 1.0) > 1e-12) throw ModelError("jump weights must sum to 1");
    }
    if (sigma == 0.0 && jumps.kappa == 0.0)
        throw AssumptionViolated(assumption::not_monotone, "pure drift paths are monotone");
    if (sigma == 0.0) {
        if (side == Side::spectrally_negative && !(drift > 0.0))
            throw AssumptionViolated(assumption::not_monotone, "drift must be positive when sigma = 0");
        if (side == Side::spectrally_positive && !(drift < 0.0))
            throw AssumptionViolated(assumption::not_monotone,
                                     "drift must be negative when sigma = 0 (upward jumps)");
    }
}

double ModelSpec::x_drift() const {
    return side == Side::spectrally_negative ? drift : -drift + delta;
}

LaplaceExponent::LaplaceExponent(double drift, double sigma, JumpMixture jumps)
    : c_(drift), sigma_(sigma), jumps_(std::move(jumps)) {}

void LaplaceExponent::check_pole(cplx l) const {
    for (const auto& t : jumps_.terms)
        if (l == cplx(-t.rho, 0.0)) throw DomainError("Laplace exponent evaluated at a pole");
}

double LaplaceExponent::operator()(double l) const {
    check_pole(l);
    double s = 0.0;
    for (const auto& t : jumps_.terms) s += t.p * std::pow(t.rho / (t.rho + l), t.k);
    return c_ * l + 0.5 * sigma_ * sigma_ * l * l - jumps_.kappa * (1.0 - s);
}

cplx LaplaceExponent::operator()(cplx l) const {
    check_pole(l);
    cplx s = 0.0;
    for (const auto& t : jumps_.terms) s += t.p * std::pow(t.rho / (t.rho + l), t.k);
    return c_ * l + 0.5 * sigma_ * sigma_ * l * l - jumps_.kappa * (1.0 - s);
}

double LaplaceExponent::derivative(double l) const {
    check_pole(l);
    double s = 0.0;
    for (const auto& t : jumps_.terms)
        s += t.p * t.k * std::pow(t.rho, t.k) / std::pow(t.rho + l, t.k + 1);
    return c_ + sigma_ * sigma_ * l - jumps_.kappa * s;
}

cplx LaplaceExponent::derivative(cplx l) const {
    check_pole(l);
    cplx s = 0.0;
    for (const auto& t : jumps_.terms)
        s += t.p * double(t.k) * std::pow(t.rho, t.k) / std::pow(t.rho + l, t.k + 1);
    return c_ + sigma_ * sigma_ * l - jumps_.kappa * s;
}

int LaplaceExponent::numerator_degree() const {
    int d = sigma_ > 0.0 ? 2 : 1;
    if (jumps_.kappa > 0.0)
        for (const auto& t : jumps_.terms) d += t.k;
    return d;
}

LaplaceExponent exponent_x(const ModelSpec& m) { return {m.x_drift(), m.sigma, m.jumps}; }
LaplaceExponent exponent_y(const ModelSpec& m) { return {m.y_drift(), m.sigma, m.jumps}; }

double laplace_exponent(const ModelSpec& m, double l) { return exponent_x(m)(l); }

double laplace_exponent_refracted(const ModelSpec& m, double theta) {
    return exponent_x(m)(theta) - m.delta * theta;
}

Variation classify_variation(const ModelSpec& m) {
    m.validate();
    if (m.sigma > 0.0) return Variation::unbounded;
    if (!(m.delta < m.x_drift()))
        throw AssumptionViolated(assumption::ceiling_below_drift,
                                 "bounded variation needs delta < c (delta = " +
                                     std::to_string(m.delta) + ", c = " + std::to_string(m.x_drift()) + ")");
    return Variation::bounded;
}

std::vector<cplx> roots_of(const LaplaceExponent& f, double q) {
    double pos = positive_root(f, q);
    std::vector<cplx> r = (f.jumps().kappa == 0.0 || f.jumps().hyperexponential())
                              ? hyperexponential_roots(f, q, pos)
                              : companion_roots(f, q, pos);
    if (static_cast<int>(r.size()) != f.numerator_degree())
        throw InternalError("root count does not match numerator degree");
    sort_roots(r);
    check_simple(r);
    return r;
}

RootSet solve_roots(const ModelSpec& m) {
    classify_variation(m);
    RootSet rs;
    rs.x_roots = roots_of(exponent_x(m), m.q);
    rs.y_roots = roots_of(exponent_y(m), m.q);
    rs.phi_q = rs.x_roots.front().real();
    rs.varphi_q = rs.y_roots.front().real();
    if (!(rs.varphi_q > rs.phi_q && rs.phi_q > 0.0))
        throw InternalError("expected varphi(q) > Phi(q) > 0");
    return rs;
}

std::vector<cplx> RootSet::negative_roots() const {
    return {x_roots.begin() + 1, x_roots.end()};
}

std::vector<cplx> RootSet::y_negative_roots() const {
    return {y_roots.begin() + 1, y_roots.end()};
}

}  // namespace levydiv

#include "levydiv/exp_mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "levydiv/errors.hpp"
#include "levydiv/format.hpp"

namespace levydiv {

namespace {

bool same_rate(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::abs(a)); }

constexpr double kFactorThreshold = 500.0;

}  // namespace

ExpMixture::ExpMixture(std::vector<ExpTerm> terms) : terms_(std::move(terms)) {}

ExpMixture ExpMixture::constant(double c) { return ExpMixture({{cplx(c, 0.0), cplx(0.0, 0.0)}}); }

cplx ExpMixture::eval_complex(double x) const {
    double top = 0.0;
    for (const auto& t : terms_) top = std::max(top, t.rate.real() * x);
    cplx s = 0.0;
    if (top > kFactorThreshold) {
        for (const auto& t : terms_) s += t.coeff * std::exp(t.rate * x - top);
        return s * std::exp(top);
    }
    for (const auto& t : terms_) s += t.coeff * std::exp(t.rate * x);
    return s;
}

double ExpMixture::eval(double x) const { return eval_complex(x).real(); }

double ExpMixture::scaled(double x, double s) const {
    cplx r = 0.0;
    for (const auto& t : terms_) r += t.coeff * std::exp((t.rate - s) * x);
    return r.real();
}

ExpMixture ExpMixture::derivative(int order) const {
    ExpMixture d = *this;
    for (int i = 0; i < order; ++i)
        for (auto& t : d.terms_) t.coeff *= t.rate;
    return d;
}

ExpMixture ExpMixture::antiderivative() const {
    std::vector<ExpTerm> out;
    cplx c0 = 0.0;
    for (const auto& t : terms_) {
        if (t.rate == cplx(0.0, 0.0)) {
            if (t.coeff != cplx(0.0, 0.0))
                throw DomainError("antiderivative of a constant term is not an exponential mixture");
            continue;
        }
        out.push_back({t.coeff / t.rate, t.rate});
        c0 -= t.coeff / t.rate;
    }
    out.push_back({c0, 0.0});
    return ExpMixture(std::move(out));
}

ExpMixture ExpMixture::shifted(double b) const {
    ExpMixture r = *this;
    for (auto& t : r.terms_) t.coeff *= std::exp(t.rate * b);
    return r;
}

ExpMixture ExpMixture::times_exp(double s) const {
    ExpMixture r = *this;
    for (auto& t : r.terms_) t.rate += s;
    return r;
}

double ExpMixture::max_rate() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms_) m = std::max(m, t.rate.real());
    return m;
}

double ExpMixture::laplace(double s) const {
    if (!(s > max_rate())) throw DomainError("Laplace transform needs s above every rate");
    cplx r = 0.0;
    for (const auto& t : terms_) r += t.coeff / (s - t.rate);
    return r.real();
}

ExpMixture ExpMixture::weighted_tail(double s) const {
    if (!(s > max_rate())) throw DomainError("tail integral needs s above every rate");
    ExpMixture r = *this;
    for (auto& t : r.terms_) t.coeff /= (s - t.rate);
    return r;
}

cplx ExpMixture::coefficient(cplx rate, double tol) const {
    cplx c = 0.0;
    for (const auto& t : terms_)
        if (same_rate(t.rate, rate, tol)) c += t.coeff;
    return c;
}

ExpMixture ExpMixture::without_rate(cplx rate, double tol) const {
    std::vector<ExpTerm> out;
    for (const auto& t : terms_)
        if (!same_rate(t.rate, rate, tol)) out.push_back(t);
    return ExpMixture(std::move(out));
}

ExpMixture ExpMixture::merged(double tol) const {
    std::vector<ExpTerm> out;
    for (const auto& t : terms_) {
        auto it = std::find_if(out.begin(), out.end(),
                               [&](const ExpTerm& o) { return same_rate(o.rate, t.rate, tol); });
        if (it == out.end()) out.push_back(t);
        else it->coeff += t.coeff;
    }
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](const ExpTerm& t) { return t.coeff == cplx(0.0, 0.0); }),
              out.end());
    return ExpMixture(std::move(out));
}

ExpMixture ExpMixture::operator-() const {
    ExpMixture r = *this;
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
}

ExpMixture& ExpMixture::operator+=(const ExpMixture& o) {
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    *this = merged();
    return *this;
}

ExpMixture& ExpMixture::operator-=(const ExpMixture& o) { return *this += -o; }

ExpMixture& ExpMixture::operator*=(double s) {
    for (auto& t : terms_) t.coeff *= s;
    return *this;
}

ExpMixture& ExpMixture::operator*=(cplx s) {
    for (auto& t : terms_) t.coeff *= s;
    return *this;
}

void ExpMixture::write_csv(std::ostream& out) const {
    write_csv_header(out, {"re_coeff", "im_coeff", "re_exp", "im_exp"});
    for (const auto& t : terms_)
        out << fmt17(t.coeff.real()) << ',' << fmt17(t.coeff.imag()) << ',' << fmt17(t.rate.real())
            << ',' << fmt17(t.rate.imag()) << '\n';
}

ExpMixture operator+(ExpMixture a, const ExpMixture& b) { return a += b; }
ExpMixture operator-(ExpMixture a, const ExpMixture& b) { return a -= b; }
ExpMixture operator*(ExpMixture a, double s) { return a *= s; }
ExpMixture operator*(double s, ExpMixture a) { return a *= s; }

ExpMixture convolve(const ExpMixture& f, const ExpMixture& g) {
    std::vector<ExpTerm> out;
    out.reserve(2 * f.size() * g.size());
    for (const auto& a : f.terms())
        for (const auto& b : g.terms()) {
            cplx gap = b.rate - a.rate;
            if (std::abs(gap) < 1e-10 * (1.0 + std::abs(a.rate)))
                throw DomainError("convolution of terms with equal rates");
            cplx k = a.coeff * b.coeff / gap;
            out.push_back({k, b.rate});
            out.push_back({-k, a.rate});
        }
    return ExpMixture(std::move(out)).merged();
}

MixtureSum::Slot& MixtureSum::slot(cplx rate) {
    for (auto& s : slots_)
        if (same_rate(s.rate, rate, 1e-12)) return s;
    slots_.push_back({rate, 0.0, 0.0});
    return slots_.back();
}

void MixtureSum::add(const ExpMixture& f, double w) { add(f, cplx(w, 0.0)); }

void MixtureSum::add(const ExpMixture& f, cplx w) {
    for (const auto& t : f.terms()) {
        Slot& s = slot(t.rate);
        s.coeff += w * t.coeff;
        s.magnitude += std::abs(w * t.coeff);
    }
}

ExpMixture MixtureSum::result() const {
    std::vector<ExpTerm> out;
    for (const auto& s : slots_)
        if (s.coeff != cplx(0.0, 0.0)) out.push_back({s.coeff, s.rate});
    return ExpMixture(std::move(out));
}

double MixtureSum::cancel(cplx rate) {
    for (auto it = slots_.begin(); it != slots_.end(); ++it)
        if (same_rate(it->rate, rate, 1e-12)) {
            double rel = it->magnitude > 0.0 ? std::abs(it->coeff) / it->magnitude : 0.0;
            slots_.erase(it);
            return rel;
        }
    return 0.0;
}

}  // namespace levydiv

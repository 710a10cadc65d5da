#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

namespace levydiv {

using cplx = std::complex<double>;

struct ExpTerm {
    cplx coeff;
    cplx rate;
};

// f(x) = sum_k c_k exp(w_k x), real valued when terms come in conjugate
// pairs.  The function is taken to vanish on x < 0; eval() ignores that
// convention and returns the formula value for any x.
class ExpMixture {
public:
    ExpMixture() = default;
    explicit ExpMixture(std::vector<ExpTerm> terms);
    static ExpMixture constant(double c);

    const std::vector<ExpTerm>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    double operator()(double x) const { return x < 0.0 ? 0.0 : eval(x); }
    double eval(double x) const;
    cplx eval_complex(double x) const;
    // exp(-s x) f(x), evaluated without forming exp(w x) separately.
    double scaled(double x, double s) const;

    ExpMixture derivative(int order = 1) const;
    // x -> int_0^x f; a zero-rate term would give a polynomial and is rejected.
    ExpMixture antiderivative() const;
    // x -> f(x + b)
    ExpMixture shifted(double b) const;
    // x -> exp(s x) f(x)
    ExpMixture times_exp(double s) const;
    // int_0^inf exp(-s y) f(y) dy, needs s > max Re w.
    double laplace(double s) const;
    // b -> exp(s b) int_b^inf exp(-s y) f(y) dy, as a mixture in b.
    ExpMixture weighted_tail(double s) const;

    double max_rate() const;
    // Coefficient of the term with the given rate (0 when absent).
    cplx coefficient(cplx rate, double tol = 1e-12) const;
    ExpMixture without_rate(cplx rate, double tol = 1e-12) const;
    // Terms with equal rates combined.
    ExpMixture merged(double tol = 1e-12) const;

    ExpMixture operator-() const;
    ExpMixture& operator+=(const ExpMixture& o);
    ExpMixture& operator-=(const ExpMixture& o);
    ExpMixture& operator*=(double s);
    ExpMixture& operator*=(cplx s);

    // columns re_coeff, im_coeff, re_exp, im_exp
    void write_csv(std::ostream& out) const;

private:
    std::vector<ExpTerm> terms_;
};

ExpMixture operator+(ExpMixture a, const ExpMixture& b);
ExpMixture operator-(ExpMixture a, const ExpMixture& b);
ExpMixture operator*(ExpMixture a, double s);
ExpMixture operator*(double s, ExpMixture a);

// u -> int_0^u f(u - s) g(s) ds.  Rates of f and g must differ pairwise.
ExpMixture convolve(const ExpMixture& f, const ExpMixture& g);

// Accumulates weighted mixtures, merges like rates, and keeps for each rate
// the sum of absolute contributions, so that a rate known to cancel exactly
// can be dropped with a measured relative residual.
class MixtureSum {
public:
    void add(const ExpMixture& f, double w = 1.0);
    void add(const ExpMixture& f, cplx w);
    ExpMixture result() const;
    // Removes the given rate; returns |net coefficient| / sum |contributions|.
    double cancel(cplx rate);

private:
    struct Slot {
        cplx rate;
        cplx coeff;
        double magnitude;
    };
    Slot& slot(cplx rate);
    std::vector<Slot> slots_;
};

}  // namespace levydiv

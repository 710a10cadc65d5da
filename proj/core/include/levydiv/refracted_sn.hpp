#pragma once

#include <memory>
#include <vector>

#include "levydiv/exp_mixture.hpp"
#include "levydiv/levy_model.hpp"
#include "levydiv/scale_functions.hpp"
#include "levydiv/value_curve.hpp"

namespace levydiv {

class SnFunctionals;

// number of ruin transforms clamped into [0,1] (within 1e-9) so far
long ruin_clamp_count();

// Dividend and ruin functionals of the strategy refracted at b, as functions
// of the starting point x.  Above b they are kept as mixtures in u = x - b
// with the exp(varphi u) terms removed: those cancel exactly.
class RefractedBranch {
public:
    RefractedBranch(const SnFunctionals& f, double b);

    double b() const { return b_; }
    // order 0, 1, 2; at x = b the side selects the one-sided limit
    double dividends(double x, int order = 0, Limit side = Limit::left) const;
    double ruin(double x, int order = 0, Limit side = Limit::left) const;
    // relative size of the cancelled exp(varphi u) coefficients
    double cancellation_residual() const { return residual_; }

private:
    void build_above() const;

    const SnFunctionals* f_;
    double b_;
    double inv_h_;  // 1 / h(b)
    double ratio_;  // (W(b) + h(b)/varphi) / h(b)
    mutable bool built_ = false;
    mutable ExpMixture div_above_, ruin_above_;
    mutable double residual_ = 0.0;
};

class ValueCurve {
public:
    ValueCurve(const SnFunctionals& f, double b, double lambda);

    double b() const { return branch_.b(); }
    double lambda() const { return lambda_; }
    double v(double x) const;
    double vprime(double x, Limit side = Limit::left) const;
    double vsecond(double x, Limit side) const;
    double psi(double x) const { return branch_.ruin(x); }
    CurvePoint point(double x) const;
    std::vector<CurvePoint> sample(const std::vector<double>& xs) const;
    const RefractedBranch& branch() const { return branch_; }

private:
    RefractedBranch branch_;
    double lambda_;
};

class SnFunctionals {
public:
    explicit SnFunctionals(const ModelSpec& m);

    const ModelSpec& model() const { return model_; }
    const ScalePair& scales() const { return s_; }
    const ScaleFamily& X() const { return s_.x; }
    const ScaleFamily& Y() const { return s_.y; }
    Variation variation() const { return variation_; }
    double Phi() const { return s_.phi(); }
    double varphi() const { return s_.varphi(); }
    double q() const { return model_.q; }
    double delta() const { return model_.delta; }

    // h(b) = varphi exp(varphi b) int_b^inf exp(-varphi y) W'(y) dy
    double h(double b) const { return h_.eval(b); }
    double h_prime(double b) const { return hp_.eval(b); }
    // W(b) + h(b)/varphi = varphi exp(varphi b) int_b^inf exp(-varphi y) W(y) dy
    double laplace_weight(double b) const { return wh_.eval(b); }
    // (W(b) + h(b)/varphi) / h(b), bounded for all b
    double ruin_ratio(double b) const;
    double inv_h(double b) const;
    const ExpMixture& h_mixture() const { return h_; }
    const ExpMixture& laplace_weight_mixture() const { return wh_; }

    double xi(double b, double lambda) const;
    double xi_prime(double b, double lambda) const;
    // g(b) = (1 + q Lambda W(b)) / W'(b); b = 0 means 0+
    double g(double b, double lambda) const;
    double g_prime(double b, double lambda) const;
    // exp(Phi b) W'(b)^2 g'(b) exp(-2 Phi b); same sign as g'
    double g_prime_numerator(double b, double lambda) const;
    // exp(-Phi b) (h(b)^2 - h'(b)(W(b) + h(b)/varphi)), leading terms cancelled
    double h_gap(double b) const;

    double dividends_only(double x, double b) const;
    double ruin_laplace(double x, double b) const;
    // Requires q Lambda + delta > 0.
    double value(double x, double b, double lambda) const;
    ValueCurve curve(double b, double lambda) const { return {*this, b, lambda}; }
    // Laplace transform of the ruin time without dividends.
    double K_x(double x) const;

    void require_positive_terminal(double lambda) const;

private:
    ModelSpec model_;
    Variation variation_;
    ScalePair s_;
    ExpMixture h_, hp_, wh_;
    // W = A exp(Phi b) + r(b); h and wh split the same way
    double A_ = 0.0, HPhi_ = 0.0, Omega_ = 0.0;
    ExpMixture r_, rp_, rpp_, hr_, hrp_, whr_;
};

}  // namespace levydiv

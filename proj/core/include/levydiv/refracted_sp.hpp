#pragma once

#include <vector>

#include "levydiv/exp_mixture.hpp"
#include "levydiv/levy_model.hpp"
#include "levydiv/optimizer_sn.hpp"
#include "levydiv/scale_functions.hpp"
#include "levydiv/value_curve.hpp"

namespace levydiv {

class SpFunctionals;

class SpValueCurve {
public:
    SpValueCurve(const SpFunctionals& f, double b, double lambda) : f_(&f), b_(b), lambda_(lambda) {}

    double b() const { return b_; }
    double lambda() const { return lambda_; }
    double v(double x) const;
    double vprime(double x, Limit side = Limit::left) const;
    double vsecond(double x, Limit side) const;
    double psi(double x) const;
    CurvePoint point(double x) const;
    std::vector<CurvePoint> sample(const std::vector<double>& xs) const;

private:
    const SpFunctionals* f_;
    double b_, lambda_;
};

struct SmoothFitReport {
    double b = 0.0;
    double vprime_left = 0.0, vprime_right = 0.0;
    double vsecond_left = 0.0, vsecond_right = 0.0;
    double jump1 = 0.0;  // v'(b-) - v'(b+)
    double jump2 = 0.0;  // v''(b-) - v''(b+), unbounded variation only
    bool continuous = false;
};

// Spectrally positive surplus Ybar, handled through the spectrally negative
// duals Y = -Ybar (scale function WW, root varphi) and X = Y + delta t
// (scale function W, root Phi).
class SpFunctionals {
public:
    explicit SpFunctionals(const ModelSpec& m);

    const ModelSpec& model() const { return model_; }
    const ScalePair& scales() const { return s_; }
    const ScaleFamily& X() const { return s_.x; }
    const ScaleFamily& Y() const { return s_.y; }
    Variation variation() const { return variation_; }
    double Phi() const { return s_.phi(); }
    double varphi() const { return s_.varphi(); }
    double q() const { return model_.q; }
    double delta() const { return model_.delta; }

    // ZZ_Phi(x) = 1 + delta Phi int_0^x exp(-Phi z) WW(z) dz, and 1 for x <= 0
    double z_phi(double x) const;
    // ZZ^(q), with ZZ = 1 for x <= 0
    double zz(double x) const { return Y().z(x); }

    double ruin_laplace(double x, double b) const;
    double dividends_only(double x, double b) const;
    double value(double x, double b, double lambda) const;
    double kbar_x(double x, double b, double lambda) const;
    double kbar_b(double b, double lambda) const;
    double vprime(double x, double b, double lambda, Limit side = Limit::left) const;
    double vsecond(double x, double b, double lambda, Limit side = Limit::left) const;
    SpValueCurve curve(double b, double lambda) const { return {*this, b, lambda}; }

    double s(double b) const;
    double s_prime(double b) const;
    // exp(Phi b) s(b), strictly increasing
    double lambda_tilde(double b) const;
    double lambda_tilde_prime(double b) const;
    // lambda_tilde(0+) = 1/Phi - delta/q
    double Lambda_tilde() const { return 1.0 / Phi() - delta() / q(); }

    // xi_at_opt carries s(b) here
    ThresholdSolution b_opt(double lambda, bool verify = true) const;
    double b0() const;
    SmoothFitReport smooth_fit_check(double b, double lambda) const;

private:
    double zhat(double y) const { return s_.z_phi.scaled(y, varphi() - Phi()); }

    ModelSpec model_;
    Variation variation_;
    ScalePair s_;
    // ZZ = A1 exp(varphi y) + r1(y); ZZ_Phi = A2 exp((varphi - Phi) y) + r2(y)
    double A1_ = 0.0, A2_ = 0.0;
    ExpMixture r1_, r2_, R2_;  // R2(y) = exp(Phi y) r2(y)
    ExpMixture lt_, ltp_;      // lambda_tilde and its derivative
};

}  // namespace levydiv

#pragma once

#include <vector>

#include "levydiv/exp_mixture.hpp"
#include "levydiv/levy_model.hpp"

namespace levydiv {

// W^(q) and relatives for one spectrally negative exponent, all as exact
// exponential mixtures.  W = sum_k exp(theta_k x) / psi'(theta_k).
struct ScaleFamily {
    double q = 0.0;
    double dominant_rate = 0.0;   // Phi(q) or varphi(q)
    double dominant_coeff = 0.0;  // 1 / psi'(dominant_rate)
    std::vector<cplx> roots;
    ExpMixture W, Wp, Wpp, Wppp, Wbar, Z, Zbar;
    double W0 = 0.0;   // W(0)
    double Wp0 = 0.0;  // W'(0+)

    // Conventions outside [0, inf): W = Wbar = 0, Z = 1, Zbar = x.
    double w(double x) const { return x < 0.0 ? 0.0 : W.eval(x); }
    double wp(double x) const { return x < 0.0 ? 0.0 : Wp.eval(x); }
    double wpp(double x) const { return x < 0.0 ? 0.0 : Wpp.eval(x); }
    double wbar(double x) const { return x <= 0.0 ? 0.0 : Wbar.eval(x); }
    double z(double x) const { return x <= 0.0 ? 1.0 : Z.eval(x); }
    double zbar(double x) const { return x <= 0.0 ? x : Zbar.eval(x); }
    // W minus its dominant exponential: the completely monotone remainder
    // (up to sign) for hyperexponential jumps.
    ExpMixture remainder() const { return W.without_rate(dominant_rate); }
};

ScaleFamily build_family(const LaplaceExponent& f, const std::vector<cplx>& roots, double q);

// Scale functions of X and of Y = X - delta t, plus the change-of-measure
// function Zphi(x) = 1 + delta Phi int_0^x exp(-Phi z) WW(z) dz.
struct ScalePair {
    RootSet roots;
    double q = 0.0;
    double delta = 0.0;
    ScaleFamily x;
    ScaleFamily y;
    ExpMixture z_phi;

    double phi() const { return roots.phi_q; }
    double varphi() const { return roots.varphi_q; }
};

ScalePair build_scale(const ModelSpec& m);

// delta int_0^x WW(x-y) W(y) dy - (WWbar(x) - Wbar(x)), closed form.
double refraction_identity_residual(double x, const ScalePair& s);

double z_change_of_measure(const ScalePair& s, double x);

struct AsymptoticReport {
    std::vector<double> xs;
    std::vector<double> ratios;  // exp(-rate x) W(x)
    double limit = 0.0;          // 1 / psi'(rate)
    double deviation = 0.0;      // |ratio - limit| at the largest x
    bool monotone_increasing = true;
};

// exp(-rate x) W(x) on x = 1, 2, 4, ..., 64 against its limit.
AsymptoticReport asymptotic_check(const ScaleFamily& f);

}  // namespace levydiv

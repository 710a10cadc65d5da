#pragma once

#include <complex>
#include <vector>

namespace levydiv {

using cplx = std::complex<double>;

enum class Side { spectrally_negative, spectrally_positive };
enum class Variation { bounded, unbounded };

struct JumpTerm {
    double p = 1.0;
    double rho = 1.0;
    int k = 1;  // Erlang shape, 1 for an exponential phase
};

struct JumpMixture {
    double kappa = 0.0;
    std::vector<JumpTerm> terms;

    bool hyperexponential() const;
    double mean_size() const;
};

// Surplus model.  For the spectrally negative side `drift` is c in
// X_t = ct + sigma B_t - S_t.  For the spectrally positive side `drift` is the
// drift of the surplus Ybar_t = drift t + sigma B_t + S_t itself; its dual
// Y = -Ybar then has drift -drift and X = Y + delta t.
struct ModelSpec {
    Side side = Side::spectrally_negative;
    double drift = 0.0;
    double sigma = 0.0;
    JumpMixture jumps;
    double delta = 1.0;
    double q = 0.05;

    // Throws ModelError on malformed input.  Does not check that delta is
    // below the drift (see classify_variation).
    void validate() const;

    // Drift of the uncontrolled spectrally negative process X.
    double x_drift() const;
    // Drift of Y = X - delta t.
    double y_drift() const { return x_drift() - delta; }
};

// psi(l) = c l + sigma^2 l^2 / 2 - kappa (1 - sum p_i (rho_i / (rho_i + l))^k_i)
class LaplaceExponent {
public:
    LaplaceExponent(double drift, double sigma, JumpMixture jumps);

    double operator()(double l) const;
    cplx operator()(cplx l) const;
    double derivative(double l) const;
    cplx derivative(cplx l) const;

    double drift() const { return c_; }
    double sigma() const { return sigma_; }
    const JumpMixture& jumps() const { return jumps_; }
    // Degree of the numerator of psi(l) - q after clearing the poles.
    int numerator_degree() const;

private:
    void check_pole(cplx l) const;

    double c_;
    double sigma_;
    JumpMixture jumps_;
};

LaplaceExponent exponent_x(const ModelSpec& m);
LaplaceExponent exponent_y(const ModelSpec& m);

double laplace_exponent(const ModelSpec& m, double l);
double laplace_exponent_refracted(const ModelSpec& m, double theta);

Variation classify_variation(const ModelSpec& m);

struct RootSet {
    double phi_q = 0.0;     // Phi(q), right inverse of psi
    double varphi_q = 0.0;  // varphi(q), right inverse of psi_Y
    // All roots of psi = q (resp. psi_Y = q), largest real part first;
    // the first entry is phi_q (resp. varphi_q).
    std::vector<cplx> x_roots;
    std::vector<cplx> y_roots;

    std::vector<cplx> negative_roots() const;
    std::vector<cplx> y_negative_roots() const;
};

// All roots of f(l) = q for one exponent; first entry is the positive root.
std::vector<cplx> roots_of(const LaplaceExponent& f, double q);
RootSet solve_roots(const ModelSpec& m);

}  // namespace levydiv

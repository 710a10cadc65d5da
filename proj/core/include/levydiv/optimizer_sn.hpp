#pragma once

#include <vector>

#include "levydiv/refracted_sn.hpp"
#include "levydiv/value_curve.hpp"

namespace levydiv {

enum class BoundaryCase { interior, at_zero, ceiling_rate_fallback };

const char* boundary_case_name(BoundaryCase c);

struct ThresholdSolution {
    double b_opt = 0.0;
    double xi_at_opt = 0.0;  // NaN for the ceiling-rate fallback
    double lambda = 0.0;
    BoundaryCase boundary_case = BoundaryCase::at_zero;
    HjbReport hjb;
    double a_lambda = 0.0;
};

struct OptimizerOptions {
    double tol_b = 1e-11;
    int max_iter = 60;
    // number of uniform cells scanned on (0, a] for the first sign change
    int scan_cells = 64;
    bool verify = true;
};

// Grid used for verification: dense on (0, b], coarser out to a few
// multiples of b, plus the points b and b +- 1e-6.
std::vector<double> verification_grid(double b, int n = 400);

class ThresholdOptimizer {
public:
    explicit ThresholdOptimizer(const ModelSpec& m, OptimizerOptions opt = {});

    const SnFunctionals& functionals() const { return f_; }
    const OptimizerOptions& options() const { return opt_; }

    // argmax of g_Lambda; 0 when g' <= 0 at 0+
    double a_max(double lambda) const;
    ThresholdSolution b_opt(double lambda) const;
    // +inf when the zero threshold is optimal for every admissible Lambda
    double lambda_bar() const;
    double b0() const { return b0_; }
    // H(b) = h^2/h' - (W + h/varphi); requires b > b_0
    double H(double b) const;
    // 1 / (q H(b)); requires b > b_0
    double lambda_of_b(double b) const;

private:
    double F(double b, double lambda) const { return f_.xi(b, lambda) - f_.g(b, lambda); }

    SnFunctionals f_;
    OptimizerOptions opt_;
    double b0_ = 0.0;
};

}  // namespace levydiv

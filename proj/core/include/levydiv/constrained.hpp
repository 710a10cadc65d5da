#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "levydiv/optimizer_sn.hpp"
#include "levydiv/refracted_sp.hpp"

namespace levydiv {

enum class Branch {
    unconstrained,
    interior,
    boundary_zero,
    infeasible,
    lambda_bar_infinite_feasible,
    lambda_bar_infinite_infeasible,
    x_zero_degenerate
};

const char* branch_name(Branch b);

struct ConstrainedSolution {
    double x = 0.0;
    double K = 0.0;
    Branch branch = Branch::infeasible;
    double value = 0.0;  // -inf when infeasible
    std::optional<double> b_star;
    std::optional<double> lambda_star;
    double k_limit = 0.0;  // K_x (SN) or exp(-varphi x) (SP)
    double psi_b0 = 0.0;   // ruin transform at the unconstrained threshold
    double slack = 0.0;    // |K - Psi_x(b*)| at interior solutions
};

struct ConstrainedOptions {
    double k_tol = 1e-10;
    double bracket_cap = 1e4;
};

ConstrainedSolution solve_sn(const ThresholdOptimizer& opt, double x, double K, ConstrainedOptions o = {});
// Same, with the value of Lambda-bar supplied instead of computed.
ConstrainedSolution solve_sn_given_lambda_bar(const ThresholdOptimizer& opt, double x, double K,
                                              double lambda_bar, ConstrainedOptions o = {});
// Requires x > 0.
ConstrainedSolution solve_sp(const SpFunctionals& f, double x, double K, ConstrainedOptions o = {});

struct DualEntry {
    double lambda;
    double b_opt;
    double value;  // V_Lambda(x) + Lambda K
};

struct DualProfile {
    double x = 0.0;
    double K = 0.0;
    std::vector<DualEntry> entries;
    std::size_t argmin = 0;
};

DualProfile dual_profile_sn(const ThresholdOptimizer& opt, double x, double K, const std::vector<double>& grid);
DualProfile dual_profile_sp(const SpFunctionals& f, double x, double K, const std::vector<double>& grid);
std::vector<DualProfile> dual_profiles_sn(const ThresholdOptimizer& opt, const std::vector<double>& xs, double K,
                                          const std::vector<double>& grid);
std::vector<DualProfile> dual_profiles_sp(const SpFunctionals& f, const std::vector<double>& xs, double K,
                                          const std::vector<double>& grid);

// 0, 0.1, ..., 1, 2, ..., 10, 20, ..., 100, ..., 10000, 20000
std::vector<double> default_lambda_grid();

// columns x, K, branch, value, b_star, lambda_star, slack
void write_solutions_csv(std::ostream& out, const std::vector<ConstrainedSolution>& s);
// columns x, K, lambda, b_opt, value, is_argmin
void write_dual_csv(std::ostream& out, const std::vector<DualProfile>& ps);

}  // namespace levydiv

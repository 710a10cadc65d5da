#include "levydiv/constrained.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <ostream>

#include "levydiv/errors.hpp"
#include "levydiv/format.hpp"

namespace levydiv {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Inversion {
    bool bracketed = false;
    double b = 0.0;
};

// psi is strictly decreasing on [b0, inf); find psi(b) = K with K < psi(b0).
Inversion invert_decreasing(const std::function<double(double)>& psi, double b0, double K, double cap) {
    Inversion r;
    double lo = b0;
    double step = 1.0;
    double hi = b0 + step;
    while (!(psi(hi) < K)) {
        if (hi >= cap) return r;
        lo = hi;
        step *= 2.0;
        hi = std::min(b0 + step, cap);
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (psi(mid) >= K ? lo : hi) = mid;
    }
    r.bracketed = true;
    double plo = psi(lo), phi = psi(hi);
    r.b = std::abs(plo - K) <= std::abs(phi - K) ? lo : hi;
    return r;
}

// shared case table once the model specific pieces are known
template <class Ruin, class Div, class Lam>
void classify(ConstrainedSolution& s, double b0, Ruin ruin, Div div, Lam lam, const ConstrainedOptions& o) {
    const double K = s.K;
    s.psi_b0 = ruin(b0);
    if (K >= s.psi_b0) {
        s.branch = Branch::unconstrained;
        s.value = div(b0);
        s.b_star = b0;
        s.lambda_star = 0.0;
        return;
    }
    if (std::abs(K - s.k_limit) <= o.k_tol) {
        s.branch = Branch::boundary_zero;
        s.value = 0.0;
        return;
    }
    if (K < s.k_limit) {
        s.branch = Branch::infeasible;
        s.value = kNegInf;
        return;
    }
    Inversion inv = invert_decreasing(ruin, b0, K, o.bracket_cap);
    if (!inv.bracketed) {
        s.branch = Branch::boundary_zero;
        s.value = 0.0;
        return;
    }
    s.branch = Branch::interior;
    s.b_star = inv.b;
    s.value = div(inv.b);
    s.lambda_star = lam(inv.b);
    s.slack = std::abs(K - ruin(inv.b));
}

}  // namespace

const char* branch_name(Branch b) {
    switch (b) {
        case Branch::unconstrained: return "unconstrained";
        case Branch::interior: return "interior";
        case Branch::boundary_zero: return "boundary_zero";
        case Branch::infeasible: return "infeasible";
        case Branch::lambda_bar_infinite_feasible: return "lambda_bar_infinite_feasible";
        case Branch::lambda_bar_infinite_infeasible: return "lambda_bar_infinite_infeasible";
        case Branch::x_zero_degenerate: return "x_zero_degenerate";
    }
    return "?";
}

ConstrainedSolution solve_sn(const ThresholdOptimizer& opt, double x, double K, ConstrainedOptions o) {
    return solve_sn_given_lambda_bar(opt, x, K, opt.lambda_bar(), o);
}

ConstrainedSolution solve_sn_given_lambda_bar(const ThresholdOptimizer& opt, double x, double K,
                                              double lambda_bar, ConstrainedOptions o) {
    if (!(x >= 0.0)) throw DomainError("initial surplus must be nonnegative");
    if (!(K >= 0.0 && K <= 1.0)) throw DomainError("K must lie in [0, 1]");
    const SnFunctionals& f = opt.functionals();
    ConstrainedSolution s;
    s.x = x;
    s.K = K;
    s.k_limit = f.K_x(x);

    if (x == 0.0 && f.variation() == Variation::unbounded) {
        // Psi_0 = 1 for every threshold
        s.branch = Branch::x_zero_degenerate;
        s.psi_b0 = 1.0;
        s.value = K >= 1.0 ? 0.0 : kNegInf;
        return s;
    }
    if (std::isinf(lambda_bar) && lambda_bar > 0.0) {
        // b_Lambda = 0 for every Lambda >= 0
        s.psi_b0 = f.ruin_laplace(x, 0.0);
        if (K >= s.psi_b0) {
            s.branch = Branch::lambda_bar_infinite_feasible;
            s.value = f.dividends_only(x, 0.0);
            s.b_star = 0.0;
            s.lambda_star = 0.0;
        } else {
            s.branch = Branch::lambda_bar_infinite_infeasible;
            s.value = kNegInf;
        }
        return s;
    }
    classify(
        s, opt.b0(), [&](double b) { return f.ruin_laplace(x, b); },
        [&](double b) { return f.dividends_only(x, b); }, [&](double b) { return opt.lambda_of_b(b); }, o);
    return s;
}

ConstrainedSolution solve_sp(const SpFunctionals& f, double x, double K, ConstrainedOptions o) {
    if (!(x > 0.0)) throw DomainError("spectrally positive constrained problem needs x > 0");
    if (!(K >= 0.0 && K <= 1.0)) throw DomainError("K must lie in [0, 1]");
    ConstrainedSolution s;
    s.x = x;
    s.K = K;
    s.k_limit = std::exp(-f.varphi() * x);
    const double b0 = f.b0();
    classify(
        s, b0, [&](double b) { return f.ruin_laplace(x, b); }, [&](double b) { return f.dividends_only(x, b); },
        [&](double b) { return f.lambda_tilde(b); }, o);
    return s;
}

namespace {

// One b_opt per multiplier, reused across starting points.
template <class Solve, class Value>
std::vector<DualProfile> profiles(const std::vector<double>& xs, double K, const std::vector<double>& grid,
                                  Solve solve, Value value) {
    std::vector<double> bs;
    bs.reserve(grid.size());
    for (double lam : grid) bs.push_back(solve(lam));
    std::vector<DualProfile> out;
    for (double x : xs) {
        DualProfile p;
        p.x = x;
        p.K = K;
        for (std::size_t i = 0; i < grid.size(); ++i)
            p.entries.push_back({grid[i], bs[i], value(x, bs[i], grid[i]) + grid[i] * K});
        for (std::size_t i = 1; i < p.entries.size(); ++i)
            if (p.entries[i].value < p.entries[p.argmin].value) p.argmin = i;
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace

std::vector<DualProfile> dual_profiles_sn(const ThresholdOptimizer& opt, const std::vector<double>& xs, double K,
                                          const std::vector<double>& grid) {
    const SnFunctionals& f = opt.functionals();
    return profiles(
        xs, K, grid, [&](double lam) { return opt.b_opt(lam).b_opt; },
        [&](double x, double b, double lam) { return f.value(x, b, lam); });
}

std::vector<DualProfile> dual_profiles_sp(const SpFunctionals& f, const std::vector<double>& xs, double K,
                                          const std::vector<double>& grid) {
    return profiles(
        xs, K, grid, [&](double lam) { return f.b_opt(lam).b_opt; },
        [&](double x, double b, double lam) { return f.value(x, b, lam); });
}

DualProfile dual_profile_sn(const ThresholdOptimizer& opt, double x, double K, const std::vector<double>& grid) {
    return dual_profiles_sn(opt, {x}, K, grid).front();
}

DualProfile dual_profile_sp(const SpFunctionals& f, double x, double K, const std::vector<double>& grid) {
    return dual_profiles_sp(f, {x}, K, grid).front();
}

std::vector<double> default_lambda_grid() {
    std::vector<double> g{0.0};
    for (int i = 1; i <= 10; ++i) g.push_back(0.1 * i);
    for (double scale = 1.0; scale < 1e4; scale *= 10.0)
        for (int i = 2; i <= 10; ++i) g.push_back(scale * i);
    g.push_back(20000.0);
    return g;
}

void write_solutions_csv(std::ostream& out, const std::vector<ConstrainedSolution>& sols) {
    write_csv_header(out, {"x", "K", "branch", "value", "b_star", "lambda_star", "slack"});
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& s : sols)
        out << fmt17(s.x) << ',' << fmt17(s.K) << ',' << branch_name(s.branch) << ',' << fmt17(s.value) << ','
            << fmt17(s.b_star.value_or(nan)) << ',' << fmt17(s.lambda_star.value_or(nan)) << ','
            << fmt17(s.slack) << '\n';
}

void write_dual_csv(std::ostream& out, const std::vector<DualProfile>& ps) {
    write_csv_header(out, {"x", "K", "lambda", "b_opt", "value", "is_argmin"});
    for (const auto& p : ps)
        for (std::size_t i = 0; i < p.entries.size(); ++i) {
            const auto& e = p.entries[i];
            out << fmt17(p.x) << ',' << fmt17(p.K) << ',' << fmt17(e.lambda) << ',' << fmt17(e.b_opt) << ','
                << fmt17(e.value) << ',' << (i == p.argmin ? 1 : 0) << '\n';
        }
}

}  // namespace levydiv

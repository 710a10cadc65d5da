// levy-dividend-opt: command-line front end for the dividend solvers.
//
// Exit codes: 0 success, 1 usage or input error, 2 violated model
// assumption, 3 failed invariant checks, 4 internal numerical error.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "grid.hpp"
#include "invariants.hpp"
#include "levydiv/constrained.hpp"
#include "levydiv/errors.hpp"
#include "levydiv/format.hpp"
#include "levydiv/model_io.hpp"
#include "levydiv/optimizer_sn.hpp"
#include "levydiv/refracted_sp.hpp"
#include "levydiv/simulate.hpp"

namespace fs = std::filesystem;
using namespace levydiv;

namespace {

struct Common {
    std::string model_path;
    std::string out_dir = ".";
    std::string tag;
};

std::ofstream open_output(const Common& c, const std::string& name) {
    fs::create_directories(c.out_dir);
    fs::path p = fs::path(c.out_dir) / (c.tag.empty() ? name : c.tag + "_" + name);
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    std::cerr << "wrote " << p.string() << "\n";
    return f;
}

// Runs fn(i) for i in [0, n) on the default thread count; results are stored
// by index, so output order never depends on scheduling.
template <class Fn>
void parallel_for(std::size_t n, Fn fn) {
    unsigned nt = std::min<std::size_t>(default_thread_count(), std::max<std::size_t>(n, 1));
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(nt);
    for (unsigned t = 0; t < nt; ++t)
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < n; i += nt) fn(i);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

bool is_sn(const ModelSpec& m) { return m.side == Side::spectrally_negative; }

// ---- solve-lagrangian ----

struct LagrangianArgs {
    double lambda = 1.0;
    std::string x_grid = "0:20:401";
    std::string compare = "auto";
    bool allow_fallback = false;
};

template <class Curve>
void write_optimality(std::ostream& out, const std::vector<std::pair<std::string, Curve>>& curves,
                      const std::vector<double>& xs) {
    write_csv_header(out, {"label", "b", "x", "v", "vprime"});
    for (const auto& [label, c] : curves)
        for (double x : xs)
            out << label << ',' << fmt17(c.b()) << ',' << fmt17(x) << ',' << fmt17(c.v(x)) << ','
                << fmt17(c.vprime(x, Limit::left)) << '\n';
}

std::vector<double> compare_thresholds(const std::string& spec, double b) {
    if (spec == "none") return {};
    if (spec != "auto") return cli::parse_grid(spec);
    if (b > 0.0) return {0.0, 0.5 * b, 1.5 * b};
    return {1.0, 2.0, 3.0};
}

int cmd_solve_lagrangian(const Common& c, const LagrangianArgs& a) {
    ModelSpec m = load_model(c.model_path);
    auto xs = cli::parse_grid(a.x_grid);
    ThresholdSolution sol;
    std::vector<CurvePoint> pts;
    std::ostringstream opt_csv;
    if (is_sn(m)) {
        ThresholdOptimizer opt(m);
        if (!a.allow_fallback) opt.functionals().require_positive_terminal(a.lambda);
        sol = opt.b_opt(a.lambda);
        const auto& f = opt.functionals();
        auto best = f.curve(sol.b_opt, a.lambda);
        pts = best.sample(xs);
        std::vector<std::pair<std::string, ValueCurve>> curves{{"optimal", best}};
        for (double b : compare_thresholds(a.compare, sol.b_opt)) curves.emplace_back("b=" + fmt17(b), f.curve(b, a.lambda));
        write_optimality(opt_csv, curves, xs);
    } else {
        SpFunctionals f(m);
        sol = f.b_opt(a.lambda);
        auto best = f.curve(sol.b_opt, a.lambda);
        pts = best.sample(xs);
        std::vector<std::pair<std::string, SpValueCurve>> curves{{"optimal", best}};
        for (double b : compare_thresholds(a.compare, sol.b_opt)) curves.emplace_back("b=" + fmt17(b), f.curve(b, a.lambda));
        write_optimality(opt_csv, curves, xs);
    }
    {
        auto f = open_output(c, "curve.csv");
        write_curve_csv(f, pts);
    }
    {
        auto f = open_output(c, "optimality.csv");
        f << opt_csv.str();
    }
    std::cout << "side=" << side_name(m.side) << " lambda=" << fmt17(a.lambda) << " b_opt=" << fmt17(sol.b_opt)
              << (is_sn(m) ? " xi=" : " s=") << fmt17(sol.xi_at_opt)
              << " boundary=" << boundary_case_name(sol.boundary_case) << " hjb=" << (sol.hjb.pass ? "pass" : "fail")
              << " worst_violation=" << fmt17(sol.hjb.worst_violation) << "\n";
    return 0;
}

// ---- sweep-xi ----

int cmd_sweep_xi(const Common& c, double lambda, const std::string& grid) {
    ModelSpec m = load_model(c.model_path);
    auto bs = cli::parse_grid(grid);
    auto out = open_output(c, "xi.csv");
    if (is_sn(m)) {
        SnFunctionals f(m);
        f.require_positive_terminal(lambda);
        std::vector<std::array<double, 3>> rows(bs.size());
        parallel_for(bs.size(), [&](std::size_t i) {
            rows[i] = {f.xi(bs[i], lambda), f.g(bs[i], lambda), 0.0};
            rows[i][2] = rows[i][0] - rows[i][1];
        });
        write_csv_header(out, {"b", "xi", "g", "xi_minus_g"});
        for (std::size_t i = 0; i < bs.size(); ++i)
            out << fmt17(bs[i]) << ',' << fmt17(rows[i][0]) << ',' << fmt17(rows[i][1]) << ',' << fmt17(rows[i][2])
                << '\n';
    } else {
        // the spectrally positive analogue: s(b) and lambda_tilde(b) against Lambda
        SpFunctionals f(m);
        write_csv_header(out, {"b", "s", "lambda_tilde", "lambda_tilde_minus_lambda"});
        for (double b : bs) {
            double lt = f.lambda_tilde(b);
            out << fmt17(b) << ',' << fmt17(f.s(b)) << ',' << fmt17(lt) << ',' << fmt17(lt - lambda) << '\n';
        }
    }
    return 0;
}

// ---- solve-constrained ----

int cmd_solve_constrained(const Common& c, const std::string& xg, const std::string& kg) {
    ModelSpec m = load_model(c.model_path);
    auto xs = cli::parse_grid(xg);
    auto ks = cli::parse_grid(kg);
    std::vector<ConstrainedSolution> sols(xs.size() * ks.size());
    if (is_sn(m)) {
        ThresholdOptimizer opt(m);
        parallel_for(sols.size(), [&](std::size_t i) { sols[i] = solve_sn(opt, xs[i / ks.size()], ks[i % ks.size()]); });
    } else {
        SpFunctionals f(m);
        for (double x : xs)
            if (!(x > 0.0)) throw DomainError("spectrally positive constrained problem needs x > 0");
        f.b0();
        parallel_for(sols.size(), [&](std::size_t i) { sols[i] = solve_sp(f, xs[i / ks.size()], ks[i % ks.size()]); });
    }
    auto out = open_output(c, "constrained.csv");
    write_solutions_csv(out, sols);
    std::size_t feasible = 0;
    for (const auto& s : sols) feasible += std::isfinite(s.value);
    std::cout << "solved " << sols.size() << " cells, " << feasible << " feasible\n";
    return 0;
}

// ---- dual-profile ----

int cmd_dual_profile(const Common& c, const std::string& xg, double K, const std::string& lg) {
    ModelSpec m = load_model(c.model_path);
    auto xs = cli::parse_grid(xg);
    auto grid = lg == "default" ? default_lambda_grid() : cli::parse_grid(lg);
    std::vector<DualProfile> ps;
    std::vector<ConstrainedSolution> primal;
    if (is_sn(m)) {
        ThresholdOptimizer opt(m);
        ps = dual_profiles_sn(opt, xs, K, grid);
        for (double x : xs) primal.push_back(solve_sn(opt, x, K));
    } else {
        SpFunctionals f(m);
        ps = dual_profiles_sp(f, xs, K, grid);
        for (double x : xs) primal.push_back(solve_sp(f, x, K));
    }
    auto out = open_output(c, "dual_profile.csv");
    write_dual_csv(out, ps);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto& e = ps[i].entries[ps[i].argmin];
        std::cout << "x=" << fmt17(xs[i]) << " K=" << fmt17(K) << " argmin_lambda=" << fmt17(e.lambda)
                  << " dual_min=" << fmt17(e.value) << " primal=" << fmt17(primal[i].value)
                  << " branch=" << branch_name(primal[i].branch);
        if (primal[i].lambda_star) std::cout << " lambda_star=" << fmt17(*primal[i].lambda_star);
        std::cout << "\n";
    }
    return 0;
}

// ---- simulate ----

struct SimulateArgs {
    std::string b = "1";
    double x = 1.0;
    double lambda = 1.0;
    bool no_dividends = false;
    bool no_antithetic = false;
    std::string paths_csv;
    SimConfig cfg;
};

void print_estimate(const char* name, const Estimate& e, double analytic) {
    std::cout << name << " mean=" << fmt17(e.mean) << " stderr=" << fmt17(e.stderr)
              << " truncation_bound=" << fmt17(e.truncation_bound);
    if (std::isfinite(analytic))
        std::cout << " analytic=" << fmt17(analytic) << " z=" << fmt17((e.mean - analytic) / std::max(e.stderr, 1e-300));
    std::cout << "\n";
}

int cmd_simulate(const Common& c, SimulateArgs a) {
    ModelSpec m = load_model(c.model_path);
    const double b = a.no_dividends ? kNoDividends : cli::parse_number(a.b);
    if (!(b >= 0.0)) throw DomainError("threshold must be nonnegative");
    if (!(a.x >= 0.0)) throw DomainError("start must be nonnegative");
    a.cfg.antithetic = !a.no_antithetic;
    a.cfg.keep_paths = !a.paths_csv.empty();
    SimResult r = simulate(m, b, a.x, a.cfg);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    double div = nan, ruin = nan;
    if (is_sn(m)) {
        SnFunctionals f(m);
        if (std::isinf(b)) {
            div = 0.0;
            ruin = f.X().z(a.x) - f.q() / f.Phi() * f.X().w(a.x);
        } else {
            div = f.dividends_only(a.x, b);
            ruin = f.ruin_laplace(a.x, b);
        }
    } else if (std::isfinite(b)) {
        SpFunctionals f(m);
        div = f.dividends_only(a.x, b);
        ruin = f.ruin_laplace(a.x, b);
    }
    std::cout << "paths=" << a.cfg.n_paths << " dt=" << fmt17(a.cfg.dt) << " horizon=" << fmt17(a.cfg.horizon)
              << " seed=" << a.cfg.seed << " steps=" << r.steps << " seconds=" << fmt17(r.seconds) << "\n";
    print_estimate("dividends", r.dividends, div);
    print_estimate("ruin_laplace", r.ruin_laplace, ruin);
    if (std::isfinite(b)) print_estimate("value", r.value(a.lambda), div - a.lambda * ruin);
    if (!a.paths_csv.empty()) {
        std::ofstream f(a.paths_csv);
        if (!f) throw std::runtime_error("cannot write " + a.paths_csv);
        write_paths_csv(f, r);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal dividends with a terminal value and ruin constraint for spectrally one-sided Levy models"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    Common common;
    auto add_common = [&](CLI::App* sub, bool outputs) {
        sub->add_option("-m,--model", common.model_path, "model JSON file")->required()->check(CLI::ExistingFile);
        if (outputs) {
            sub->add_option("-o,--out", common.out_dir, "output directory")->capture_default_str();
            sub->add_option("--tag", common.tag, "prefix for output file names");
        }
    };

    LagrangianArgs la;
    auto* s_lag = app.add_subcommand("solve-lagrangian", "optimal threshold and value curve for one multiplier");
    add_common(s_lag, true);
    s_lag->add_option("-l,--lambda", la.lambda, "terminal-value multiplier")->capture_default_str();
    s_lag->add_option("--x-grid", la.x_grid, "grid for the curve CSV")->capture_default_str();
    s_lag->add_option("--compare-b", la.compare, "suboptimal thresholds: auto, none, or a grid")->capture_default_str();
    s_lag->add_flag("--allow-fallback", la.allow_fallback, "return the ceiling-rate strategy when q*Lambda+delta <= 0");

    double xi_lambda = 1.0;
    std::string b_grid = "0:20:401";
    auto* s_xi = app.add_subcommand("sweep-xi", "xi and g (or s and lambda_tilde) across thresholds");
    add_common(s_xi, true);
    s_xi->add_option("-l,--lambda", xi_lambda)->capture_default_str();
    s_xi->add_option("--b-grid", b_grid)->capture_default_str();

    std::string cx = "0:10:41", ck = "0:1:41";
    auto* s_con = app.add_subcommand("solve-constrained", "ruin-constrained value over an (x, K) grid");
    add_common(s_con, true);
    s_con->add_option("--x-grid", cx)->capture_default_str();
    s_con->add_option("--k-grid", ck)->capture_default_str();

    std::string dx = "1", dl = "default";
    double dK = 0.5;
    auto* s_dual = app.add_subcommand("dual-profile", "V_Lambda(x) + Lambda K over a multiplier grid");
    add_common(s_dual, true);
    s_dual->add_option("-x,--x", dx, "starting surplus (a grid is allowed)")->capture_default_str();
    s_dual->add_option("-K,--K", dK, "ruin constraint level")->capture_default_str();
    s_dual->add_option("--lambda-grid", dl, "multiplier grid or 'default'")->capture_default_str();

    SimulateArgs sa;
    auto* s_sim = app.add_subcommand("simulate", "Monte Carlo estimate of dividends and ruin transform");
    add_common(s_sim, false);
    s_sim->add_option("-b,--b", sa.b, "threshold (inf for no dividends)")->capture_default_str();
    s_sim->add_option("-x,--x", sa.x)->capture_default_str();
    s_sim->add_option("-l,--lambda", sa.lambda, "multiplier for the reported value")->capture_default_str();
    s_sim->add_option("-n,--paths", sa.cfg.n_paths)->capture_default_str()->check(CLI::PositiveNumber);
    s_sim->add_option("--dt", sa.cfg.dt)->capture_default_str()->check(CLI::PositiveNumber);
    s_sim->add_option("--horizon", sa.cfg.horizon)->capture_default_str()->check(CLI::PositiveNumber);
    s_sim->add_option("--seed", sa.cfg.seed)->capture_default_str();
    s_sim->add_option("--threads", sa.cfg.threads, "0 uses LEVYDIV_THREADS or all cores")->capture_default_str();
    s_sim->add_flag("--no-dividends", sa.no_dividends, "simulate the do-nothing strategy");
    s_sim->add_flag("--no-antithetic", sa.no_antithetic);
    s_sim->add_option("--paths-csv", sa.paths_csv, "write per-path records");

    auto* s_print = app.add_subcommand("print-model", "echo the parsed model as canonical JSON");
    add_common(s_print, false);

    double inv_lambda = 1.0;
    auto* s_inv = app.add_subcommand("check-invariants", "self-checks against quadrature and closed forms");
    add_common(s_inv, false);
    s_inv->add_option("-l,--lambda", inv_lambda)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (s_lag->parsed()) return cmd_solve_lagrangian(common, la);
        if (s_xi->parsed()) return cmd_sweep_xi(common, xi_lambda, b_grid);
        if (s_con->parsed()) return cmd_solve_constrained(common, cx, ck);
        if (s_dual->parsed()) return cmd_dual_profile(common, dx, dK, dl);
        if (s_sim->parsed()) return cmd_simulate(common, sa);
        if (s_print->parsed()) {
            std::cout << print_model(load_model(common.model_path)) << "\n";
            return 0;
        }
        if (s_inv->parsed()) return cli::check_invariants(load_model(common.model_path), inv_lambda, std::cout) ? 3 : 0;
    } catch (const AssumptionViolated& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

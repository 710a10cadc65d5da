#include <benchmark/benchmark.h>

#include "levydiv/constrained.hpp"
#include "levydiv/model_io.hpp"
#include "levydiv/optimizer_sn.hpp"
#include "levydiv/refracted_sp.hpp"
#include "levydiv/scale_functions.hpp"

using namespace levydiv;

namespace {

ModelSpec case1() {
    return parse_model(R"({"drift": 1.5, "sigma": 0.2, "delta": 1, "q": 0.05,
                           "jumps": {"kappa": 1, "terms": [{"p": 1, "rho": 1}]}})");
}

ModelSpec case2() {
    return parse_model(R"({"drift": 5, "sigma": 0, "delta": 0.1, "q": 0.05,
                           "jumps": {"kappa": 0.01, "terms": [{"p": 1, "rho": 1}]}})");
}

ModelSpec desk() {
    return parse_model(R"({"side": "spectrally-positive", "drift": -1, "sigma": 0.2, "delta": 1, "q": 0.05,
                           "jumps": {"kappa": 1.5, "terms": [{"p": 0.7, "rho": 1}, {"p": 0.3, "rho": 2}]}})");
}

ModelSpec erlang() {
    return parse_model(R"({"drift": 2, "sigma": 0.3, "delta": 1, "q": 0.05,
                           "jumps": {"kappa": 1, "terms": [{"p": 0.4, "rho": 1}, {"p": 0.6, "rho": 2, "k": 2}]}})");
}

}  // namespace

static void BM_BuildScale(benchmark::State& st) {
    const ModelSpec m = st.range(0) == 0 ? case1() : st.range(0) == 1 ? case2() : erlang();
    for (auto _ : st) benchmark::DoNotOptimize(build_scale(m));
}
BENCHMARK(BM_BuildScale)->Arg(0)->Arg(1)->Arg(2);

static void BM_Optimizer(benchmark::State& st) {
    const ModelSpec m = case1();
    for (auto _ : st) {
        OptimizerOptions o;
        o.verify = false;
        ThresholdOptimizer opt(m, o);
        benchmark::DoNotOptimize(opt.b_opt(1.0));
    }
}
BENCHMARK(BM_Optimizer);

static void BM_BOptWithVerification(benchmark::State& st) {
    ThresholdOptimizer opt(case1());
    double L = 0.0;
    for (auto _ : st) {
        benchmark::DoNotOptimize(opt.b_opt(L));
        L = L < 10.0 ? L + 0.37 : 0.0;
    }
}
BENCHMARK(BM_BOptWithVerification);

static void BM_LambdaOfB(benchmark::State& st) {
    ThresholdOptimizer opt(case1());
    const double b0 = opt.b0();
    double b = b0 + 0.1;
    for (auto _ : st) {
        benchmark::DoNotOptimize(opt.lambda_of_b(b));
        b = b < b0 + 10.0 ? b + 0.013 : b0 + 0.1;
    }
}
BENCHMARK(BM_LambdaOfB);

static void BM_ValueCurve(benchmark::State& st) {
    ThresholdOptimizer opt(case1());
    const double b = opt.b_opt(1.0).b_opt;
    std::vector<double> xs;
    for (int i = 0; i <= 400; ++i) xs.push_back(20.0 * i / 400.0);
    for (auto _ : st) benchmark::DoNotOptimize(opt.functionals().curve(b, 1.0).sample(xs));
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(xs.size()));
}
BENCHMARK(BM_ValueCurve);

static void BM_SolveConstrained(benchmark::State& st) {
    ThresholdOptimizer opt(case1());
    double K = 0.43;
    for (auto _ : st) {
        benchmark::DoNotOptimize(solve_sn(opt, 1.0, K));
        K = K < 0.55 ? K + 0.003 : 0.43;
    }
}
BENCHMARK(BM_SolveConstrained);

static void BM_DualProfile(benchmark::State& st) {
    ThresholdOptimizer opt(case1());
    const auto grid = default_lambda_grid();
    for (auto _ : st) benchmark::DoNotOptimize(dual_profile_sn(opt, 1.0, 0.5, grid));
}
BENCHMARK(BM_DualProfile);

static void BM_SpBOpt(benchmark::State& st) {
    SpFunctionals f(desk());
    double L = 0.0;
    for (auto _ : st) {
        benchmark::DoNotOptimize(f.b_opt(L, st.range(0) != 0));
        L = L < 10.0 ? L + 0.37 : 0.0;
    }
}
BENCHMARK(BM_SpBOpt)->Arg(0)->Arg(1);

static void BM_Case2Construction(benchmark::State& st) {
    const ModelSpec m = case2();
    for (auto _ : st) benchmark::DoNotOptimize(ThresholdOptimizer(m).lambda_bar());
}
BENCHMARK(BM_Case2Construction);

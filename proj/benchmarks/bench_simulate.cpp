#include <benchmark/benchmark.h>

#include <vector>

#include "levydiv/model_io.hpp"
#include "levydiv/simulate.hpp"

using namespace levydiv;

static void BM_FillNormals(benchmark::State& st) {
    std::vector<double> z(detail::kNormalChunk);
    std::uint64_t ctr = 0;
    for (auto _ : st) {
        detail::fill_normals(42, ctr, z.data());
        benchmark::DoNotOptimize(z.data());
        ctr += detail::kNormalChunk;
    }
    st.SetItemsProcessed(st.iterations() * detail::kNormalChunk);
}
BENCHMARK(BM_FillNormals);

// items are Euler steps (or drift segments when sigma = 0)
static void BM_Simulate(benchmark::State& st) {
    const bool diffusive = st.range(0) != 0;
    const ModelSpec m = parse_model(diffusive ? R"({"drift": 1.5, "sigma": 0.2, "delta": 1, "q": 0.05,
                                                    "jumps": {"kappa": 1, "terms": [{"p": 1, "rho": 1}]}})"
                                              : R"({"drift": 5, "sigma": 0, "delta": 0.1, "q": 0.05,
                                                    "jumps": {"kappa": 0.01, "terms": [{"p": 1, "rho": 1}]}})");
    SimConfig c;
    c.n_paths = 2000;
    c.horizon = 20.0;
    c.threads = 1;
    c.antithetic = st.range(1) != 0;
    std::int64_t steps = 0;
    for (auto _ : st) {
        auto r = simulate(m, 2.0, 1.0, c);
        steps += static_cast<std::int64_t>(r.steps);
        benchmark::DoNotOptimize(r.dividends.mean);
    }
    st.SetItemsProcessed(steps);
}
BENCHMARK(BM_Simulate)->Args({1, 1})->Args({1, 0})->Args({0, 0})->Unit(benchmark::kMillisecond);

#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include "levydiv/levy_model.hpp"

namespace levydiv {

// Threshold meaning "never pay": the do-nothing strategy.
inline constexpr double kNoDividends = std::numeric_limits<double>::infinity();

struct SimConfig {
    std::size_t n_paths = 200000;
    double dt = 1e-3;  // Euler step, used only when sigma > 0
    double horizon = 200.0;
    std::uint64_t seed = 20240607;
    bool antithetic = true;  // pairs share jumps and use opposite Gaussian increments
    unsigned threads = 0;    // 0: LEVYDIV_THREADS, else hardware concurrency
    bool keep_paths = false;
};

struct Estimate {
    double mean = 0.0;
    double stderr = 0.0;
    std::size_t n_effective = 0;
    double truncation_bound = 0.0;  // (delta/q) exp(-q T) for dividends, exp(-q T) for ruin
};

struct PathRecord {
    std::uint64_t path_id;
    double tau_or_T;
    double discounted_dividends;
    double e_q_tau;  // 0 when not ruined by the horizon
};

struct SimResult {
    Estimate dividends;
    Estimate ruin_laplace;
    std::vector<PathRecord> paths;  // only with keep_paths
    std::uint64_t steps = 0;        // Euler steps or drift segments
    double seconds = 0.0;

    // dividends - lambda * ruin, with the sample covariance taken into account
    Estimate value(double lambda) const;

    // sums over independent samples (antithetic pairs count once)
    double sd = 0.0, sr = 0.0, sdd = 0.0, srr = 0.0, sdr = 0.0;
};

SimResult simulate(const ModelSpec& m, double b, double x, const SimConfig& cfg);
SimResult simulate_sn(const ModelSpec& m, double b, double x, const SimConfig& cfg);
SimResult simulate_sp(const ModelSpec& m, double b, double x, const SimConfig& cfg);

unsigned default_thread_count();

// columns path_id, tau_or_T, discounted_dividends, e_q_tau
void write_paths_csv(std::ostream& out, const SimResult& r);

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// n-th uniform on (0,1) of the stream keyed by key
inline double uniform(std::uint64_t key, std::uint64_t n) {
    return (static_cast<double>(mix64(key + n * kGolden) >> 11) + 0.5) * 0x1.0p-53;
}

inline constexpr int kNormalChunk = 256;

// z[0..kNormalChunk) standard normals from uniforms ctr, ctr+1, ... of key.
void fill_normals(std::uint64_t key, std::uint64_t ctr, double* z);

}  // namespace detail

}  // namespace levydiv

#include "levydiv/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <string>
#include <thread>

#include "levydiv/errors.hpp"
#include "levydiv/format.hpp"

namespace levydiv {

namespace {

using detail::kNormalChunk;
using detail::mix64;
using detail::uniform;

// Dynamics shared by both sides: dU = mu(U) dt + sigma dB + jump_sign * J,
// with mu = mu_below on U <= b and mu_above on U > b, ruin at U < 0.
struct Dynamics {
    double mu_below, mu_above, sigma, jump_sign, delta, q, b;
    double kappa;
    std::vector<JumpTerm> terms;  // cumulative p in JumpTerm::p
};

struct PathOut {
    double dividends = 0.0;
    double eqtau = 0.0;
    double end_time = 0.0;
    std::uint64_t steps = 0;
};

class JumpStream {
public:
    JumpStream(const Dynamics& d, std::uint64_t key) : d_(d), key_(key) {}
    double next_gap() { return d_.kappa > 0.0 ? -std::log(u()) / d_.kappa : std::numeric_limits<double>::infinity(); }
    double size() {
        double v = u();
        const JumpTerm* t = &d_.terms.back();
        for (const auto& jt : d_.terms)
            if (v <= jt.p) {
                t = &jt;
                break;
            }
        double s = 0.0;
        for (int i = 0; i < t->k; ++i) s -= std::log(u());
        return s / t->rho;
    }

private:
    double u() { return uniform(key_, n_++); }
    const Dynamics& d_;
    std::uint64_t key_;
    std::uint64_t n_ = 0;
};

// (delta/q) int_t1^t2 exp(-q t) dt
double accrual(const Dynamics& d, double t1, double t2) {
    return d.delta / d.q * std::exp(-d.q * t1) * -std::expm1(-d.q * (t2 - t1));
}

// Euler scheme for one path, or for an antithetic pair advanced together:
// the pair shares Gaussian draws (with opposite signs) and every jump.
void euler_paths(const Dynamics& d, double x, const SimConfig& cfg, std::uint64_t key_n, std::uint64_t key_j,
                 PathOut* out, int lanes) {
    const double dt = cfg.dt;
    const auto n_total = static_cast<std::uint64_t>(std::llround(cfg.horizon / dt));
    const double edt = std::exp(-d.q * dt);
    const double mb = d.mu_below * dt, ma = d.mu_above * dt;
    const double s = d.sigma * std::sqrt(dt);
    const double b = d.b;

    JumpStream js(d, key_j);
    double t_jump = js.next_gap();
    alignas(64) double z[kNormalChunk];
    std::uint64_t ctr = 0;
    int used = kNormalChunk;

    double u[2] = {x, x};
    double acc[2] = {0.0, 0.0};  // sum of exp(-q t_k) over steps started above b
    bool alive[2] = {true, lanes > 1};
    std::uint64_t end[2] = {n_total, n_total};
    std::uint64_t step = 0;

    auto kill = [&](int i) {
        alive[i] = false;
        end[i] = step;
    };
    while (step < n_total && (alive[0] || alive[1])) {
        if (used == kNormalChunk) {
            detail::fill_normals(key_n, ctr, z);
            ctr += kNormalChunk;
            used = 0;
        }
        // a jump is applied at the end of the step containing it
        std::uint64_t jstep = std::isfinite(t_jump) ? static_cast<std::uint64_t>(std::ceil(t_jump / dt)) : n_total + 1;
        if (jstep <= step) jstep = step + 1;
        const std::uint64_t lim = std::min<std::uint64_t>(
            {static_cast<std::uint64_t>(kNormalChunk - used), jstep - step, n_total - step});
        double disc = std::exp(-d.q * dt * static_cast<double>(step));
        const double* zp = z + used;
        std::uint64_t k = 0;
        if (alive[0] && alive[1]) {
            double u0 = u[0], u1 = u[1], a0 = acc[0], a1 = acc[1];
            for (; k < lim; ++k) {
                bool h0 = u0 > b, h1 = u1 > b;
                a0 += h0 ? disc : 0.0;
                a1 += h1 ? disc : 0.0;
                double w = s * zp[k];
                u0 += (h0 ? ma : mb) + w;
                u1 += (h1 ? ma : mb) - w;
                disc *= edt;
                if ((u0 < 0.0) | (u1 < 0.0)) {
                    ++k;
                    break;
                }
            }
            u[0] = u0, u[1] = u1, acc[0] = a0, acc[1] = a1;
        } else {
            const int i = alive[0] ? 0 : 1;
            const double sg = i == 0 ? s : -s;
            double ui = u[i], ai = acc[i];
            for (; k < lim; ++k) {
                bool h = ui > b;
                ai += h ? disc : 0.0;
                ui += (h ? ma : mb) + sg * zp[k];
                disc *= edt;
                if (ui < 0.0) {
                    ++k;
                    break;
                }
            }
            u[i] = ui, acc[i] = ai;
        }
        used += static_cast<int>(k);
        step += k;
        for (int i = 0; i < 2; ++i)
            if (alive[i] && u[i] < 0.0) kill(i);
        while (step == jstep && (alive[0] || alive[1])) {
            double J = d.jump_sign * js.size();
            for (int i = 0; i < 2; ++i)
                if (alive[i]) {
                    u[i] += J;
                    if (u[i] < 0.0) kill(i);
                }
            t_jump += js.next_gap();
            jstep = static_cast<std::uint64_t>(std::ceil(t_jump / dt));
        }
    }
    for (int i = 0; i < lanes; ++i) {
        const bool ruined = !alive[i] && end[i] < n_total + 1 && u[i] < 0.0;
        out[i].steps = end[i];
        out[i].end_time = static_cast<double>(end[i]) * dt;
        out[i].dividends = d.delta / d.q * -std::expm1(-d.q * dt) * acc[i];
        out[i].eqtau = ruined ? std::exp(-d.q * out[i].end_time) : 0.0;
    }
}

// Exact scheme for sigma = 0: linear motion between jump epochs.
PathOut drift_path(const Dynamics& d, double x, const SimConfig& cfg, std::uint64_t key_j) {
    PathOut out;
    const double T = cfg.horizon;
    const double b = d.b;
    JumpStream js(d, key_j);
    double t = 0.0, u = x;
    double div = 0.0;
    bool ruined = false;
    double t_next = std::min(js.next_gap(), T);
    for (;;) {
        ++out.steps;
        // drift from (t, u) until t_next, crossing b and 0 exactly
        while (t < t_next) {
            bool above = u > b || (u == b && d.mu_above > 0.0);
            double slope = above ? d.mu_above : d.mu_below;
            double stop = t_next;
            if (above && slope < 0.0 && std::isfinite(b)) stop = std::min(stop, t + (u - b) / -slope);
            if (!above && slope > 0.0 && std::isfinite(b)) stop = std::min(stop, t + (b - u) / slope);
            if (!above && slope < 0.0) stop = std::min(stop, t + u / -slope);
            if (above) div += accrual(d, t, stop);
            double nu = u + slope * (stop - t);
            if (stop < t_next) {
                // landed on a level
                if (above || slope > 0.0) nu = b;
                else {
                    t = stop;
                    ruined = true;
                    break;
                }
            }
            u = nu;
            t = stop;
        }
        if (ruined || t >= T) break;
        u += d.jump_sign * js.size();
        if (u < 0.0) {
            ruined = true;
            break;
        }
        t_next = std::min(t + js.next_gap(), T);
    }
    out.end_time = ruined ? t : T;
    out.dividends = div;
    out.eqtau = ruined ? std::exp(-d.q * t) : 0.0;
    return out;
}

Dynamics make_dynamics(const ModelSpec& m, double b) {
    m.validate();
    Dynamics d;
    d.sigma = m.sigma;
    d.delta = m.delta;
    d.q = m.q;
    d.b = b;
    d.kappa = m.jumps.kappa;
    double cum = 0.0;
    for (const auto& t : m.jumps.terms) {
        cum += t.p;
        d.terms.push_back({cum, t.rho, t.k});
    }
    if (!d.terms.empty()) d.terms.back().p = 1.0;
    if (m.side == Side::spectrally_negative) {
        d.mu_below = m.drift;
        d.mu_above = m.drift - m.delta;
        d.jump_sign = -1.0;
    } else {
        d.mu_below = m.drift;
        d.mu_above = m.drift - m.delta;
        d.jump_sign = 1.0;
    }
    return d;
}

Estimate finish(double s, double ss, std::size_t n) {
    Estimate e;
    e.n_effective = n;
    if (n == 0) return e;
    e.mean = s / static_cast<double>(n);
    if (n > 1) {
        double var = (ss - s * e.mean) / static_cast<double>(n - 1);
        e.stderr = std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
    }
    return e;
}

SimResult run(const ModelSpec& m, double b, double x, const SimConfig& cfg) {
    if (cfg.n_paths < 1) throw ModelError("n_paths must be at least 1");
    if (!(cfg.dt > 0.0)) throw ModelError("dt must be positive");
    if (!(cfg.horizon > 0.0)) throw ModelError("horizon must be positive");
    if (!(b >= 0.0)) throw DomainError("threshold must be nonnegative (inf for no dividends)");
    if (!(x >= 0.0)) throw DomainError("initial surplus must be nonnegative");
    const Dynamics d = make_dynamics(m, b);
    const bool pairs = cfg.antithetic && m.sigma > 0.0;
    const std::size_t n_samples = pairs ? (cfg.n_paths + 1) / 2 : cfg.n_paths;
    const std::size_t per_sample = pairs ? 2 : 1;

    std::vector<double> sd(n_samples), sr(n_samples);
    std::vector<std::uint64_t> steps(n_samples);
    std::vector<PathRecord> recs(cfg.keep_paths ? n_samples * per_sample : 0);
    const std::uint64_t master = mix64(cfg.seed);

    auto work = [&](std::size_t i) {
        std::uint64_t key_n = mix64(master + 2 * static_cast<std::uint64_t>(i));
        std::uint64_t key_j = mix64(master + 2 * static_cast<std::uint64_t>(i) + 1);
        double dsum = 0.0, rsum = 0.0;
        std::uint64_t st = 0;
        PathOut po[2];
        if (m.sigma > 0.0)
            euler_paths(d, x, cfg, key_n, key_j, po, static_cast<int>(per_sample));
        else
            po[0] = drift_path(d, x, cfg, key_j);
        for (std::size_t a = 0; a < per_sample; ++a) {
            const PathOut& p = po[a];
            dsum += p.dividends;
            rsum += p.eqtau;
            st += p.steps;
            if (cfg.keep_paths)
                recs[i * per_sample + a] = {static_cast<std::uint64_t>(i * per_sample + a), p.end_time, p.dividends,
                                            p.eqtau};
        }
        sd[i] = dsum / static_cast<double>(per_sample);
        sr[i] = rsum / static_cast<double>(per_sample);
        steps[i] = st;
    };

    auto t0 = std::chrono::steady_clock::now();
    unsigned nt = cfg.threads ? cfg.threads : default_thread_count();
    nt = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, nt), n_samples));
    if (nt == 1) {
        for (std::size_t i = 0; i < n_samples; ++i) work(i);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < nt; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < n_samples; i += nt) work(i);
            });
        for (auto& th : pool) th.join();
    }

    SimResult r;
    for (std::size_t i = 0; i < n_samples; ++i) {
        r.sd += sd[i];
        r.sr += sr[i];
        r.sdd += sd[i] * sd[i];
        r.srr += sr[i] * sr[i];
        r.sdr += sd[i] * sr[i];
        r.steps += steps[i];
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.dividends = finish(r.sd, r.sdd, n_samples);
    r.ruin_laplace = finish(r.sr, r.srr, n_samples);
    const double tail = std::exp(-m.q * cfg.horizon);
    r.dividends.truncation_bound = std::isinf(b) ? 0.0 : m.delta / m.q * tail;
    r.ruin_laplace.truncation_bound = tail;
    if (cfg.keep_paths) r.paths = std::move(recs);
    return r;
}

}  // namespace

Estimate SimResult::value(double lambda) const {
    const std::size_t n = dividends.n_effective;
    Estimate e = finish(sd - lambda * sr, sdd - 2.0 * lambda * sdr + lambda * lambda * srr, n);
    e.truncation_bound = dividends.truncation_bound + std::abs(lambda) * ruin_laplace.truncation_bound;
    return e;
}

unsigned default_thread_count() {
    if (const char* s = std::getenv("LEVYDIV_THREADS")) {
        int v = std::atoi(s);
        if (v > 0) return static_cast<unsigned>(v);
    }
    unsigned h = std::thread::hardware_concurrency();
    return h ? h : 1;
}

SimResult simulate(const ModelSpec& m, double b, double x, const SimConfig& cfg) { return run(m, b, x, cfg); }

SimResult simulate_sn(const ModelSpec& m, double b, double x, const SimConfig& cfg) {
    if (m.side != Side::spectrally_negative) throw ModelError("simulate_sn needs a spectrally negative model");
    return run(m, b, x, cfg);
}

SimResult simulate_sp(const ModelSpec& m, double b, double x, const SimConfig& cfg) {
    if (m.side != Side::spectrally_positive) throw ModelError("simulate_sp needs a spectrally positive model");
    return run(m, b, x, cfg);
}

void write_paths_csv(std::ostream& out, const SimResult& r) {
    write_csv_header(out, {"path_id", "tau_or_T", "discounted_dividends", "e_q_tau"});
    for (const auto& p : r.paths)
        out << p.path_id << ',' << fmt17(p.tau_or_T) << ',' << fmt17(p.discounted_dividends) << ','
            << fmt17(p.e_q_tau) << '\n';
}

}  // namespace levydiv

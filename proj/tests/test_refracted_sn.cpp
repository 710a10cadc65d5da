#include <gtest/gtest.h>

#include <sstream>

#include "levydiv/errors.hpp"
#include "levydiv/optimizer_sn.hpp"
#include "levydiv/refracted_sn.hpp"
#include "support.hpp"

using namespace levydiv;
using namespace levydiv::testing;

namespace {

const SnFunctionals& case1_f() {
    static const SnFunctionals f(case1());
    return f;
}

const SnFunctionals& case2_f() {
    static const SnFunctionals f(case2());
    return f;
}

// Optimal threshold for Case 1, Lambda = 1 (mpmath reference).
constexpr double kB1 = 4.7233176195208373975;

// h(b) = varphi exp(varphi b) int_b^inf exp(-varphi y) W'(y) dy by quadrature
double h_quad(const SnFunctionals& f, double b) {
    const double vp = f.varphi();
    return vp * integrate_tail([&](double y) { return f.X().Wp.scaled(y, vp); }, b) * std::exp(vp * b);
}

// dividends for x > b from the convolution formula, integral done numerically
double dividends_quad(const SnFunctionals& f, double x, double b) {
    const double d = f.delta();
    const double inv_h = 1.0 / f.h(b);
    double conv = integrate([&](double y) { return f.Y().W(x - y) * f.X().Wp(y); }, b, x);
    double wwbar = integrate([&](double y) { return f.Y().W(y); }, 0.0, x - b);
    return f.X().W(x) * inv_h + d * inv_h * conv - d * wwbar;
}

}  // namespace

TEST(FunctionH, AtZero) {
    for (const SnFunctionals* f : {&case1_f(), &case2_f()})
        EXPECT_NEAR(f->h(0.0), f->varphi() * (1.0 / f->delta() - f->X().W0), 1e-12);
}

TEST(FunctionH, AgainstQuadratureAndReference) {
    EXPECT_NEAR(case1_f().h(3.0), 0.26270744610215194077, 1e-13);
    EXPECT_NEAR(case2_f().h(3.0), 0.10325629081164393908, 1e-14);
    for (double b : {0.5, 3.0, 8.0}) EXPECT_LT(rel_err(case1_f().h(b), h_quad(case1_f(), b)), 1e-9);
}

TEST(FunctionH, PositiveAndEventuallyGrowing) {
    for (double b = 0.0; b <= 30.0; b += 0.5) EXPECT_GT(case1_f().h(b), 0.0);
    EXPECT_GT(case1_f().h(20.0) / case1_f().h(10.0), 1.0);
}

TEST(FunctionH, DerivativeIdentity) {
    const auto& f = case1_f();
    for (double b : {0.5, 2.0, 6.0}) {
        EXPECT_NEAR(f.h_prime(b), f.varphi() * (f.h(b) - f.X().Wp(b)), 1e-11);
        EXPECT_NEAR(f.h_prime(b), central_diff([&](double t) { return f.h(t); }, b), 1e-7);
    }
}

TEST(Xi, AtZero) {
    const auto& f = case2_f();
    EXPECT_NEAR(f.xi(0.0, 0.0), 0.1 / (f.varphi() * (1.0 - 0.1 * 0.2)), 1e-12);
    for (double L : {-1.0, 1.0, 10.0})
        EXPECT_NEAR(f.xi(0.0, L), (f.delta() + f.q() * L) / (f.varphi() * (1.0 - f.delta() * f.X().W0)),
                    1e-12 * (1.0 + std::abs(L)));
}

TEST(Xi, ReferenceValue) {
    EXPECT_NEAR(case1_f().xi(2.0, 1.0), 3.8125407117488129115, 1e-12);
    EXPECT_NEAR(case2_f().xi(2.0, 1.0), 14.772206028630217542, 1e-11);
}

TEST(Xi, LimitAtInfinity) {
    const auto& f = case1_f();
    EXPECT_NEAR(f.xi(300.0, 1.0), f.q() / f.Phi(), 1e-9);
    EXPECT_NEAR(f.g(300.0, 1.0), f.q() / f.Phi(), 1e-9);
    // convergence is slow, at rate exp(-Phi b)
    EXPECT_GT(std::abs(f.xi(80.0, 1.0) - f.q() / f.Phi()), 1e-3);
}

TEST(Xi, RejectsNonpositiveTerminalRate) {
    EXPECT_THROW(case1_f().xi(1.0, -20.0), AssumptionViolated);
    EXPECT_THROW(case1_f().value(1.0, 1.0, -25.0), AssumptionViolated);
}

TEST(Xi, DerivativeMatchesFiniteDifference) {
    const auto& f = case1_f();
    for (double L : {0.0, 1.0, 5.0})
        for (double b = 0.25; b <= 10.0; b += 0.25) {
            double fd = central_diff([&](double t) { return f.xi(t, L); }, b, 1e-5);
            EXPECT_LT(std::abs(f.xi_prime(b, L) - fd), 1e-6 * (1.0 + std::abs(fd))) << b;
        }
}

TEST(Xi, DerivativeFactorsThroughXiMinusG) {
    for (const SnFunctionals* f : {&case1_f(), &case2_f()})
        for (double b : {0.5, 2.0, 5.0}) {
            double rhs = f->varphi() * f->X().Wp(b) / f->h(b) * (f->xi(b, 1.0) - f->g(b, 1.0));
            EXPECT_NEAR(f->xi_prime(b, 1.0), rhs, 1e-10 * (1.0 + std::abs(rhs)));
        }
}

TEST(G, ValuesAndDerivative) {
    const auto& f = case1_f();
    EXPECT_NEAR(f.g(1.0, 1.0), 2.8414826696733311144, 1e-12);
    EXPECT_NEAR(case2_f().g(1.0, 1.0), 464.92129159734514584, 1e-9);
    for (double b : {0.5, 3.0}) EXPECT_NEAR(f.g(b, 0.0), 1.0 / f.X().Wp(b), 1e-14);
    for (double b = 0.25; b <= 8.0; b += 0.25) {
        double fd = central_diff([&](double t) { return f.g(t, 1.0); }, b, 1e-5);
        EXPECT_LT(std::abs(f.g_prime(b, 1.0) - fd), 1e-6 * (1.0 + std::abs(fd))) << b;
    }
}

TEST(Value, AtZero) {
    const auto& f = case1_f();
    for (double b : {0.5, 3.0})
        for (double L : {0.0, 1.0}) EXPECT_NEAR(f.value(0.0, b, L), f.xi(b, L) * f.X().W0 - L, 1e-14);
    EXPECT_NEAR(case2_f().value(0.0, 2.0, 1.0), case2_f().xi(2.0, 1.0) * 0.2 - 1.0, 1e-12);
}

TEST(Value, BelowThresholdForm) {
    const auto& f = case1_f();
    for (double x : {0.3, 1.0, 2.5})
        EXPECT_NEAR(f.value(x, 3.0, 1.0), f.xi(3.0, 1.0) * f.X().W(x) - f.X().z(x), 1e-12);
}

TEST(Dividends, AboveThresholdAgainstQuadrature) {
    for (const SnFunctionals* f : {&case1_f(), &case2_f()})
        for (double b : {0.0, 0.5, 2.0})
            for (double x : {b + 0.3, b + 2.0, b + 7.0})
                EXPECT_LT(rel_err(f->dividends_only(x, b), dividends_quad(*f, x, b)), 1e-9) << b << " " << x;
}

TEST(Dividends, SimpleCases) {
    const auto& f = case1_f();
    EXPECT_NEAR(f.dividends_only(0.0, 2.0), 0.0, 1e-13);
    EXPECT_LT(f.dividends_only(1.0, 400.0), 1e-13);
    EXPECT_GT(f.dividends_only(1.0, 0.5), 0.0);
}

TEST(Ruin, StartAtZeroUnboundedVariation) {
    for (double b : {0.0, 0.5, 3.0, 20.0}) EXPECT_NEAR(case1_f().ruin_laplace(0.0, b), 1.0, 1e-12);
}

TEST(Ruin, LimitIsKx) {
    const auto& f = case1_f();
    const double K1 = f.X().z(1.0) - f.q() / f.Phi() * f.X().w(1.0);
    EXPECT_NEAR(f.K_x(1.0), K1, 1e-13);
    EXPECT_NEAR(f.K_x(1.0), 0.42202810606532910456, 1e-13);
    EXPECT_NEAR(f.ruin_laplace(1.0, 80.0), K1, 1e-6);
    EXPECT_NEAR(case2_f().K_x(1.0), 0.00072990372622931241391, 1e-15);
}

TEST(Ruin, ReferenceValue) {
    EXPECT_NEAR(case1_f().ruin_laplace(1.0, 3.0), 0.64873020973319060125, 1e-13);
    EXPECT_NEAR(case2_f().ruin_laplace(1.0, 3.0), 0.00073186992980106344484, 1e-15);
}

TEST(Ruin, StrictlyDecreasingInThreshold) {
    for (const SnFunctionals* f : {&case1_f(), &case2_f()})
        for (double x : {0.5, 1.0, 3.0}) {
            double prev = f->ruin_laplace(x, 0.0);
            for (double b = 0.1; b <= 15.0; b += 0.1) {
                double p = f->ruin_laplace(x, b);
                EXPECT_LT(p, prev) << "x " << x << " b " << b;
                EXPECT_GE(p, 0.0);
                EXPECT_LE(p, 1.0);
                prev = p;
            }
        }
}

TEST(Ruin, ClampCounterIsReadable) { EXPECT_GE(ruin_clamp_count(), 0); }

TEST(Value, LimitAsThresholdGrows) {
    // v^b(x) -> -Lambda K_x, so v^b(x; K) = v^b(x) + Lambda K -> Lambda (K - K_x)
    const auto& f = case1_f();
    for (double L : {0.5, 1.0})
        EXPECT_NEAR(f.value(1.0, 300.0, L), -L * f.K_x(1.0), 1e-9);
}

TEST(ValueCurve, DerivativesMatchFiniteDifferences) {
    const auto& f = case1_f();
    auto c = f.curve(3.0, 1.0);
    auto v = [&](double x) { return c.v(x); };
    for (double x : {0.5, 2.0, 2.9, 3.1, 6.0}) {
        EXPECT_NEAR(c.vprime(x), central_diff(v, x, 1e-5), 1e-7);
        EXPECT_NEAR(c.vsecond(x, Limit::left), second_diff(v, x, 1e-4), 1e-5);
    }
}

TEST(ValueCurve, ContinuousAtAnyThreshold) {
    const auto& f = case1_f();
    for (double b : {1.0, 3.0, 6.0}) {
        auto c = f.curve(b, 1.0);
        EXPECT_NEAR(c.v(b - 1e-9), c.v(b + 1e-9), 1e-7);
    }
}

TEST(SmoothFit, AtOptimalThreshold) {
    const auto& f = case1_f();
    auto c = f.curve(kB1, 1.0);
    EXPECT_LT(std::abs(c.vprime(kB1, Limit::left) - c.vprime(kB1, Limit::right)), 1e-9);
    EXPECT_LT(std::abs(c.vsecond(kB1, Limit::left) - c.vsecond(kB1, Limit::right)), 1e-8);
    EXPECT_NEAR(c.vprime(kB1, Limit::left), 1.0, 1e-9);
}

TEST(SmoothFit, FailsAwayFromOptimum) {
    auto c = case1_f().curve(1.5 * kB1, 1.0);
    const double b = 1.5 * kB1;
    // sigma > 0: v' is continuous at every b, the second derivative is not
    EXPECT_LT(std::abs(c.vprime(b, Limit::left) - c.vprime(b, Limit::right)), 1e-9);
    EXPECT_GT(std::abs(c.vsecond(b, Limit::left) - c.vsecond(b, Limit::right)), 1e-4);
}

TEST(Hjb, PassesAtOptimum) {
    auto r = hjb_check(case1_f().curve(kB1, 1.0), verification_grid(kB1), 1.0);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.worst_violation, 0.0);
    EXPECT_TRUE(r.v0_ok);
}

TEST(Hjb, FailsAboveOptimum) {
    const double b = 1.5 * kB1;
    auto r = hjb_check(case1_f().curve(b, 1.0), verification_grid(b), 1.0);
    EXPECT_FALSE(r.pass);
    EXPECT_GT(r.worst_x, kB1);
    EXPECT_LE(r.worst_x, b);
}

TEST(Curve, CsvSchema) {
    auto pts = case1_f().curve(kB1, 1.0).sample({0.0, 1.0, kB1, 10.0});
    std::ostringstream os;
    write_curve_csv(os, pts);
    std::string s = os.str();
    EXPECT_EQ(s.rfind("# levy-dividend-opt v", 0), 0u);
    EXPECT_NE(s.find("x,v,vprime,vsecond_left,vsecond_right,psi\n"), std::string::npos);
}

TEST(RefractedBranch, CancellationResidualIsSmall) {
    RefractedBranch br(case1_f(), 3.0);
    br.dividends(5.0);
    EXPECT_LT(br.cancellation_residual(), 1e-12);
}

#include "logconcave/numerics.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using lcv::ErrorCode;
using lcv::kInf;
using lcv::RealFn;
using lcv::ToleranceProfile;
using testing_support::error_code;
namespace numerics = lcv::numerics;

TEST(Differences, QuadraticsAreExact) {
    auto gen = testing_support::rng(1);
    std::uniform_real_distribution<double> coef(-5.0, 5.0);
    std::uniform_real_distribution<double> where(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const double a = coef(gen);
        const double b = coef(gen);
        const double c = coef(gen);
        const double x = where(gen);
        RealFn q = [=](double t) { return (a * t + b) * t + c; };
        EXPECT_NEAR(numerics::differentiate(q, x, 1), 2.0 * a * x + b, 1e-9);
        EXPECT_NEAR(numerics::differentiate(q, x, 2), 2.0 * a, 1e-6);
    }
}

TEST(Differences, SmoothFunctionsMatchKnownDerivatives) {
    RealFn s = [](double t) { return std::sin(t); };
    for (double x : {-2.0, -0.3, 0.0, 1.1, 2.5}) {
        EXPECT_NEAR(numerics::differentiate(s, x, 1), std::cos(x), 1e-6);
        EXPECT_NEAR(numerics::differentiate(s, x, 2), -std::sin(x), 1e-5);
    }
}

TEST(Differences, RejectsBadArguments) {
    RealFn f = [](double t) { return t; };
    EXPECT_EQ(error_code([&] { numerics::central_difference(f, 0.0, 3, 1e-3); }), ErrorCode::InvalidParams);
    EXPECT_EQ(error_code([&] { numerics::central_difference(f, 0.0, 1, 0.0); }), ErrorCode::InvalidParams);
    RealFn bad = [](double t) { return t > 0 ? std::log(-1.0) : 0.0; };
    EXPECT_EQ(error_code([&] { numerics::differentiate(bad, 0.0, 1); }), ErrorCode::NonFiniteEvaluation);
}

TEST(Quadrature, PolynomialsAndClosedForms) {
    EXPECT_NEAR(numerics::integrate([](double x) { return x * x * x - x; }, -1.0, 2.0), 2.25, 1e-12);
    EXPECT_NEAR(numerics::integrate([](double x) { return std::exp(-x); }, 0.0, kInf), 1.0, 1e-10);
    const double gauss = numerics::integrate(
        [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }, -kInf, kInf);
    EXPECT_NEAR(gauss, 1.0, 1e-10);
    EXPECT_NEAR(numerics::integrate([](double x) { return 1.0 / (1.0 + x * x); }, -kInf, 0.0), std::numbers::pi / 2,
                1e-9);
}

TEST(Quadrature, DegenerateAndReversedIntervals) {
    RealFn f = [](double x) { return std::cos(x); };
    EXPECT_EQ(numerics::integrate(f, 0.7, 0.7), 0.0);
    EXPECT_NEAR(numerics::integrate(f, 1.0, 0.0), -std::sin(1.0), 1e-12);
    EXPECT_EQ(error_code([&] { numerics::integrate(f, std::nan(""), 1.0); }), ErrorCode::InvalidParams);
}

TEST(Quadrature, AdditiveOverSubintervals) {
    auto gen = testing_support::rng(2);
    std::uniform_real_distribution<double> where(-4.0, 4.0);
    RealFn f = [](double x) { return std::exp(-x * x) * (1.0 + std::sin(3.0 * x)); };
    for (int i = 0; i < 50; ++i) {
        double a = where(gen);
        double b = where(gen);
        double m = where(gen);
        const double whole = numerics::integrate(f, a, b);
        const double split = numerics::integrate(f, a, m) + numerics::integrate(f, m, b);
        EXPECT_NEAR(whole, split, 5e-10);
    }
}

TEST(Quadrature, KinkNearSegmentEdgeNeedsBreakpoint) {
    // (t - x) exp(-|t|) / 2 over [x, 13]; closed form from the two exponential pieces
    const double x = -7.85555771;
    const double hi = 13.0;
    RealFn f = [x](double t) { return (t - x) * std::exp(-std::abs(t)) / 2.0; };
    const double left = (-x - 1.0 + std::exp(x)) / 2.0;
    const double right = ((-x + 1.0) - (hi - x + 1.0) * std::exp(-hi)) / 2.0;
    EXPECT_NEAR(numerics::integrate_pieces(f, x, hi, {0.0}, {}, 1e-13), left + right, 1e-12);
}

TEST(Quadrature, NonFiniteIntegrandIsReported) {
    RealFn f = [](double x) { return 1.0 / x; };
    EXPECT_EQ(error_code([&] { numerics::integrate(f, -1.0, 1.0); }), ErrorCode::NonFiniteEvaluation);
}

TEST(Roots, FindsKnownRoots) {
    EXPECT_NEAR(numerics::find_root([](double x) { return std::cos(x); }, 0.0, 2.0), std::numbers::pi / 2, 1e-12);
    EXPECT_NEAR(numerics::find_root([](double x) { return x * x * x - 2.0; }, 0.0, 3.0), std::cbrt(2.0), 1e-12);
    const auto r = numerics::bracket_root([](double x) { return std::exp(x) - 10.0; }, 3.0, 0.0);
    EXPECT_NEAR(r.root, std::log(10.0), 1e-12);
    EXPECT_LE(r.hi - r.lo, 1e-12 + 1e-15);
    EXPECT_LT(r.iterations, 200);
}

TEST(Roots, RandomLinearFunctions) {
    auto gen = testing_support::rng(3);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 100; ++i) {
        const double root = u(gen);
        const double slope = u(gen);
        if (std::abs(slope) < 1e-3) {
            continue;
        }
        const double got = numerics::find_root([=](double x) { return slope * (x - root); }, -11.0, 11.0);
        EXPECT_NEAR(got, root, 1e-11);
    }
}

TEST(Roots, SteepAndFlatFunctionsStillConverge) {
    // secant steps crawl on this one; the forced bisection keeps the bracket shrinking
    const auto r = numerics::bracket_root([](double x) { return std::pow(x, 9) - 1e-9; }, -1.0, 4.0);
    EXPECT_NEAR(r.root, 0.1, 1e-10);
    EXPECT_LT(r.iterations, 400);
}

TEST(Roots, NoSignChange) {
    EXPECT_EQ(error_code([] { numerics::find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0); }),
              ErrorCode::NoSignChange);
    // an endpoint within slack of zero is accepted as the root
    ToleranceProfile prof;
    prof.slack = 1e-6;
    const auto r = numerics::bracket_root([](double x) { return x * x + 1e-8; }, 0.0, 1.0, prof);
    EXPECT_EQ(r.root, 0.0);
}

TEST(Grids, ChebyshevPointsAreOrderedAndInside) {
    const auto g = numerics::chebyshev_grid(-2.0, 3.0, 64);
    ASSERT_EQ(g.size(), 64u);
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        EXPECT_LT(g[i], g[i + 1]);
    }
    EXPECT_GE(g.front(), -2.0 + 1e-4 * 5.0);
    EXPECT_LE(g.back(), 3.0 - 1e-4 * 5.0);
    EXPECT_EQ(error_code([] { numerics::chebyshev_grid(0.0, 1.0, 0); }), ErrorCode::InvalidParams);
    EXPECT_EQ(error_code([] { numerics::chebyshev_grid(0.0, kInf, 4); }), ErrorCode::InvalidParams);
    const auto u = numerics::uniform_grid(0.0, 1.0, 11);
    EXPECT_EQ(u.front(), 0.0);
    EXPECT_EQ(u.back(), 1.0);
    EXPECT_NEAR(u[3], 0.3, 1e-15);
}

TEST(Profiles, Validation) {
    ToleranceProfile p;
    EXPECT_NO_THROW(p.validate());
    p.fd_step = 0.0;
    EXPECT_EQ(error_code([&] { p.validate(); }), ErrorCode::InvalidParams);
    lcv::SupportInterval s{0.0, 1.0, 0.0};
    EXPECT_NO_THROW(s.validate());
    s = {0.0, kInf, 0.0};
    EXPECT_EQ(error_code([&] { s.validate(); }), ErrorCode::InvalidSupport);
    s = {-kInf, kInf, 1e-3};
    EXPECT_EQ(error_code([&] { s.validate(); }), ErrorCode::InvalidSupport);
    s = {1.0, 1.0, 0.0};
    EXPECT_EQ(error_code([&] { s.validate(); }), ErrorCode::InvalidSupport);
}

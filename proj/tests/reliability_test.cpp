#include "logconcave/reliability.hpp"
#include "logconcave/verify.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using lcv::ErrorCode;
using lcv::SmoothDensity;
using testing_support::error_code;
namespace dist = lcv::distributions;
namespace lc = lcv::logconcavity;
namespace rel = lcv::reliability;
using dist::Family;

namespace {

SmoothDensity builtin(Family f, std::vector<double> p, double clip = 1e-6) { return dist::make_builtin(f, p, clip); }

} // namespace

TEST(Hazard, Examples) {
    const auto e = builtin(Family::Exponential, {1.0});
    for (double x : {0.0, 0.5, 3.0, 10.0}) {
        EXPECT_NEAR(rel::hazard_rate(e, x), 1.0, 1e-12);
    }
    EXPECT_NEAR(rel::hazard_rate(builtin(Family::Uniform, {0.0, 1.0}), 0.5), 2.0, 1e-14);
    EXPECT_NEAR(rel::hazard_rate(builtin(Family::Normal, {0.0, 1.0}), 0.0), 0.7978846, 1e-7);
}

TEST(Hazard, Errors) {
    EXPECT_EQ(error_code([] { rel::hazard_rate(builtin(Family::Uniform, {0.0, 1.0}), 1.0); }),
              ErrorCode::SurvivalUnderflow);
    EXPECT_EQ(error_code([] { rel::hazard_rate(builtin(Family::Normal, {0.0, 1.0}), 7.0); }),
              ErrorCode::SurvivalUnderflow);
    EXPECT_EQ(error_code([] { rel::hazard_rate(builtin(Family::Exponential, {1.0}), -1.0); }),
              ErrorCode::InvalidParams);
}

TEST(ReliabilityFn, Examples) {
    const auto u = builtin(Family::Uniform, {0.0, 1.0});
    EXPECT_NEAR(rel::reliability_fn(u, 0.0), 0.5, 1e-12);
    EXPECT_EQ(rel::reliability_fn(u, 1.0), 0.0);
    const auto e = builtin(Family::Exponential, {1.0}, 1e-9);
    EXPECT_NEAR(rel::reliability_fn(e, 0.0), 1.0, 1e-6);
}

TEST(ReliabilityFn, MatchesClosedForms) {
    // normal: H(x) = phi(x) - x (1 - Phi(x)); logistic: H(x) = log(1 + exp(-x))
    const auto n = builtin(Family::Normal, {0.0, 1.0});
    const auto l = builtin(Family::Logistic, {0.0, 1.0});
    const auto la = builtin(Family::Laplace, {0.0, 1.0});
    for (double x : {-3.0, -1.0, 0.0, 0.5, 2.0, 4.0}) {
        EXPECT_NEAR(rel::reliability_fn(n, x), lcv::normal::pdf(x) - x * lcv::normal::survival(x), 1e-10);
        EXPECT_NEAR(rel::reliability_fn(l, x), std::log1p(std::exp(-x)), 1e-10);
        const double la_h = x >= 0 ? 0.5 * std::exp(-x) : -x + 0.5 * std::exp(x);
        EXPECT_NEAR(rel::reliability_fn(la, x), la_h, 1e-10);
    }
}

TEST(ReliabilityFn, ConvexAndDecreasing) {
    for (const auto& nd : lcv::verify::builtin_densities()) {
        const auto& d = nd.density;
        const auto xs = lcv::numerics::uniform_grid(d.effective_lo(), d.effective_hi(), 101);
        std::vector<double> h;
        for (double x : xs) {
            h.push_back(rel::reliability_fn(d, x));
        }
        for (std::size_t i = 0; i + 1 < h.size(); ++i) {
            EXPECT_LE(h[i + 1], h[i] + 1e-12) << d.label();
        }
        for (std::size_t i = 1; i + 1 < h.size(); ++i) {
            EXPECT_GE(h[i + 1] - 2.0 * h[i] + h[i - 1], -1e-6) << d.label() << " x=" << xs[i];
        }
    }
}

TEST(MeanResidualLife, Examples) {
    const auto e = builtin(Family::Exponential, {1.0});
    for (double x : {0.0, 1.0, 5.0}) {
        EXPECT_NEAR(rel::mean_residual_life(e, x), 1.0, 1e-8);
    }
    const auto u = builtin(Family::Uniform, {0.0, 1.0});
    EXPECT_NEAR(rel::mean_residual_life(u, 0.0), 0.5, 1e-12);
    EXPECT_NEAR(rel::mean_residual_life(u, 0.5), 0.25, 1e-12);
    EXPECT_EQ(error_code([&] { rel::mean_residual_life(u, 1.0); }), ErrorCode::SurvivalUnderflow);
}

TEST(Report, Examples) {
    const auto e = rel::reliability_report(builtin(Family::Exponential, {1.0}));
    EXPECT_EQ(e.hazard_monotone, rel::Trend::Increasing);
    EXPECT_EQ(e.mrl_monotone, rel::Trend::Decreasing);
    const auto u = rel::reliability_report(builtin(Family::Uniform, {0.0, 1.0}));
    EXPECT_EQ(u.hazard_monotone, rel::Trend::Increasing);
    EXPECT_EQ(u.mrl_monotone, rel::Trend::Decreasing);
    EXPECT_EQ(u.h_logconcave, lc::Verdict::StrictlyLogConcave);
    // strictly: hazard 1/(1 - x), MRL (1 - x)/2
    for (std::size_t i = 0; i + 1 < u.grid.size(); ++i) {
        EXPECT_LT(u.grid[i].hazard, u.grid[i + 1].hazard);
        EXPECT_GT(u.grid[i].mrl, u.grid[i + 1].mrl);
    }
    for (const auto& r : u.grid) {
        EXPECT_NEAR(r.hazard, 1.0 / (1.0 - r.x), 1e-9 / (1.0 - r.x));
        EXPECT_NEAR(r.mrl, 0.5 * (1.0 - r.x), 1e-12);
    }
}

TEST(Report, RecordInvariants) {
    for (const auto& nd : lcv::verify::builtin_densities()) {
        const auto rep = rel::reliability_report(nd.density, 256);
        ASSERT_FALSE(rep.grid.empty());
        for (std::size_t i = 0; i + 1 < rep.grid.size(); ++i) {
            EXPECT_LT(rep.grid[i].x, rep.grid[i + 1].x);
        }
        for (const auto& r : rep.grid) {
            EXPECT_GT(r.hazard, 0.0);
            EXPECT_GT(r.mrl, 0.0);
        }
        EXPECT_LE(rep.max_identity_residual, 1e-4) << nd.density.label();
        EXPECT_TRUE(lc::is_log_concave(rep.h_logconcave)) << nd.density.label();
        EXPECT_NE(rep.hazard_monotone, rel::Trend::NotMonotone) << nd.density.label();
        EXPECT_NE(rep.mrl_monotone, rel::Trend::NotMonotone) << nd.density.label();
    }
}

TEST(Report, IdentityAgainstIndependentDifferences) {
    // MRL' = hazard * MRL - 1 for the normal, with MRL from the closed-form H
    auto mrl = [](double x) { return (lcv::normal::pdf(x) - x * lcv::normal::survival(x)) / lcv::normal::survival(x); };
    for (double x : {-2.0, 0.0, 1.0, 3.0}) {
        const double h = 1e-4;
        const double deriv = (mrl(x + h) - mrl(x - h)) / (2.0 * h);
        const double hazard = lcv::normal::pdf(x) / lcv::normal::survival(x);
        EXPECT_NEAR(deriv, hazard * mrl(x) - 1.0, 1e-6);
    }
}

TEST(Trend, Classification) {
    const std::vector<double> up = {1.0, 2.0, 2.0, 3.0};
    const std::vector<double> wobble = {1.0, 2.0, 2.0 - 1e-6, 3.0};
    const std::vector<double> zigzag = {1.0, 2.0, 1.0, 3.0};
    EXPECT_EQ(rel::monotone_trend(up, true, 1e-7), rel::Trend::Increasing);
    EXPECT_EQ(rel::monotone_trend(wobble, true, 1e-7), rel::Trend::Inconclusive);
    EXPECT_EQ(rel::monotone_trend(zigzag, true, 1e-7), rel::Trend::NotMonotone);
    EXPECT_EQ(rel::monotone_trend(zigzag, false, 1e-7), rel::Trend::NotMonotone);
}

TEST(Mlrp, Examples) {
    const auto n = rel::check_mlrp_location(builtin(Family::Normal, {0.0, 1.0}), {{0.0, 1.0}, {-2.0, 3.0}});
    EXPECT_EQ(n.status, rel::MlrpStatus::Holds);
    const auto l = rel::check_mlrp_location(builtin(Family::Logistic, {0.0, 1.0}), {{0.0, 1.0}});
    EXPECT_EQ(l.status, rel::MlrpStatus::Holds);
    const auto q = rel::check_mlrp_location(lcv::verify::log_convex_density(), {{0.0, 0.2}});
    EXPECT_EQ(q.status, rel::MlrpStatus::Fails);
    ASSERT_TRUE(q.witness.has_value());
    EXPECT_EQ(q.witness->theta1, 0.0);
    EXPECT_EQ(q.witness->theta2, 0.2);
    EXPECT_GT(q.witness->x, 0.2);
    EXPECT_LT(q.witness->x_next, 1.0);
    EXPECT_LT(q.witness->drop, 0.0);
    EXPECT_EQ(rel::to_string(q.status), "MLRPFails");
}

TEST(Mlrp, BruteForceOracleOnLogConvexDensity) {
    // log f(x - 0.2) - log f(x) = (x - 0.2)^2 - x^2 = 0.04 - 0.4 x falls on a 100-point grid
    const auto xs = lcv::numerics::uniform_grid(0.21, 0.99, 100);
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double a = std::pow(xs[i] - 0.2, 2) - xs[i] * xs[i];
        const double b = std::pow(xs[i + 1] - 0.2, 2) - xs[i + 1] * xs[i + 1];
        EXPECT_LT(b, a);
    }
}

TEST(Mlrp, Errors) {
    const auto u = builtin(Family::Uniform, {0.0, 1.0});
    EXPECT_EQ(error_code([&] { rel::check_mlrp_location(u, {{0.0, 2.0}}); }), ErrorCode::EmptyCommonSupport);
    EXPECT_EQ(error_code([&] { rel::check_mlrp_location(u, {{0.5, 0.1}}); }), ErrorCode::InvalidParams);
    EXPECT_EQ(error_code([&] { rel::check_mlrp_location(u, {}); }), ErrorCode::InvalidParams);
}

TEST(Mlrp, EquivalenceWithCertify) {
    for (const auto& nd : lcv::verify::builtin_densities()) {
        const auto c = lc::certify(nd.density);
        const auto m = rel::check_mlrp_location(nd.density, lcv::verify::theta_pairs_for(nd.density));
        ASSERT_TRUE(lc::is_log_concave(c.verdict));
        EXPECT_EQ(m.status, rel::MlrpStatus::Holds) << nd.density.label();
    }
    const auto q = lcv::verify::log_convex_density();
    EXPECT_EQ(lc::certify(q).verdict, lc::Verdict::NotLogConcave);
    EXPECT_EQ(rel::check_mlrp_location(q, lcv::verify::theta_pairs_for(q)).status, rel::MlrpStatus::Fails);
}

TEST(Midpoint, InequalityOnLogConcaveBuiltins) {
    for (const auto& nd : lcv::verify::builtin_densities()) {
        EXPECT_LE(rel::max_midpoint_excess(nd.density, 200), 1e-12) << nd.density.label();
    }
    EXPECT_GT(rel::max_midpoint_excess(lcv::verify::log_convex_density(), 200), 0.0);
}

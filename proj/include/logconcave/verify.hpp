#pragma once

#include "logconcave/distributions.hpp"
#include "logconcave/logconcavity.hpp"
#include "logconcave/monopoly.hpp"
#include "logconcave/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace lcv::verify {

struct Check {
    std::string name;
    bool passed;
    std::string detail;
};

struct SuiteResult {
    std::string name;
    std::vector<Check> checks;

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
    }
};

struct NamedDensity {
    std::string name;
    SmoothDensity density;
    logconcavity::Verdict expected;
};

/// The built-in families at representative parameters.
inline std::vector<NamedDensity> builtin_densities(const ToleranceProfile& prof = {}) {
    using distributions::Family;
    using logconcavity::Verdict;
    auto make = [&](Family f, std::vector<double> p) { return distributions::make_builtin(f, p, 1e-6, prof); };
    return {
        {"normal", make(Family::Normal, {0.0, 1.0}), Verdict::StrictlyLogConcave},
        {"exponential", make(Family::Exponential, {1.0}), Verdict::LogConcave},
        {"uniform", make(Family::Uniform, {0.0, 1.0}), Verdict::LogConcave},
        {"logistic", make(Family::Logistic, {0.0, 1.0}), Verdict::StrictlyLogConcave},
        {"laplace", make(Family::Laplace, {0.0, 1.0}), Verdict::LogConcave},
        {"truncnormal", make(Family::TruncNormal, {0.0, 1.0, -1.0, 2.0}), Verdict::StrictlyLogConcave},
    };
}

/// Density proportional to exp(x^2) on (0, 1): log-convex.
inline SmoothDensity log_convex_density(const ToleranceProfile& prof = {}) {
    return distributions::from_log_density(
        0.0, 1.0, [](double x) { return x * x; }, "expsq", [](double x) { return 2.0 * x; },
        [](double) { return 2.0; }, prof);
}

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

inline void add(SuiteResult& s, std::string name, bool ok, std::string detail = {}) {
    s.checks.push_back({std::move(name), ok, std::move(detail)});
}

/// Runs body and records a thrown error as a failed check.
inline void guarded(SuiteResult& s, const std::string& name, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        add(s, name, false, e.what());
    }
}

} // namespace detail

inline SuiteResult criteria_suite(std::size_t grid, const ToleranceProfile& prof) {
    SuiteResult s{"criteria", {}};
    for (const auto& nd : builtin_densities(prof)) {
        detail::guarded(s, nd.name, [&] {
            const auto c = logconcavity::certify(nd.density, grid, prof);
            const auto& v = c.criterion_verdicts;
            const bool agree = v[0] == v[1] && v[1] == v[2];
            detail::add(s, nd.name + " criteria agree", agree && c.verdict == nd.expected,
                        std::string(logconcavity::to_string(c.verdict)));
        });
    }
    detail::guarded(s, "expsq", [&] {
        const auto c = logconcavity::certify(log_convex_density(prof), grid, prof);
        detail::add(s, "expsq flagged", c.verdict == logconcavity::Verdict::NotLogConcave && !c.witnesses.empty() &&
                                            std::abs(c.max_violation - 2.0) < 1e-3,
                    "max_violation " + detail::fmt(c.max_violation));
    });
    return s;
}

inline SuiteResult integral_suite(std::size_t grid, const ToleranceProfile& prof) {
    SuiteResult s{"integral", {}};
    for (const auto& nd : builtin_densities(prof)) {
        detail::guarded(s, nd.name, [&] {
            const auto r = logconcavity::verify_integral_theorem(nd.density, grid, prof);
            const bool ok = r.sup_lower_curvature < -1e-6 && r.sup_upper_curvature < -1e-6 && r.passed;
            detail::add(s, nd.name + " F and Fbar strictly log-concave", ok,
                        "sup " + detail::fmt(r.sup_lower_curvature) + ", " + detail::fmt(r.sup_upper_curvature));
        });
    }
    bool refused = false;
    try {
        logconcavity::verify_integral_theorem(log_convex_density(prof), grid, prof);
    } catch (const Error& e) {
        refused = e.code() == ErrorCode::PreconditionNotCertified;
    }
    detail::add(s, "expsq precondition refused", refused);
    return s;
}

/// The default theta pairs, shrunk for narrow supports so every shifted pair overlaps.
inline std::vector<std::pair<double, double>> theta_pairs_for(const SmoothDensity& d) {
    const double scale = std::min(1.0, 0.25 * (d.effective_hi() - d.effective_lo()));
    auto pairs = reliability::default_theta_pairs();
    for (auto& [a, b] : pairs) {
        a *= scale;
        b *= scale;
    }
    return pairs;
}

inline SuiteResult mlrp_suite(std::size_t grid, const ToleranceProfile& prof) {
    SuiteResult s{"mlrp", {}};
    for (const auto& nd : builtin_densities(prof)) {
        detail::guarded(s, nd.name, [&] {
            const auto r = reliability::check_mlrp_location(nd.density, theta_pairs_for(nd.density), grid, prof);
            detail::add(s, nd.name + " MLRP holds", r.status == reliability::MlrpStatus::Holds);
            const double excess = reliability::max_midpoint_excess(nd.density);
            detail::add(s, nd.name + " midpoint inequality", excess <= prof.slack, detail::fmt(excess));
        });
    }
    detail::guarded(s, "expsq", [&] {
        const auto r = reliability::check_mlrp_location(log_convex_density(prof), {{0.0, 0.2}}, grid, prof);
        detail::add(s, "expsq MLRP fails with witness",
                    r.status == reliability::MlrpStatus::Fails && r.witness.has_value());
    });
    return s;
}

inline SuiteResult gamma_suite(std::size_t grid, const ToleranceProfile& prof) {
    SuiteResult s{"gamma", {}};
    const auto all = builtin_densities(prof);
    detail::guarded(s, "uniform", [&] {
        const auto r = logconcavity::verify_gamma_convexity(all[2].density, grid, {}, prof);
        detail::add(s, "uniform gamma linear", r.max_abs_second_difference <= 1e-8,
                    detail::fmt(r.max_abs_second_difference));
    });
    detail::guarded(s, "exponential", [&] {
        double worst = 0.0;
        for (double x : numerics::uniform_grid(0.01, 5.0, grid)) {
            worst = std::max(worst, std::abs(logconcavity::gamma_ratio(all[1].density, x, prof) - std::expm1(x)));
        }
        detail::add(s, "exponential gamma is exp(x) - 1", worst <= 1e-6, detail::fmt(worst));
        const auto r = logconcavity::verify_gamma_convexity(all[1].density, grid, {}, prof);
        detail::add(s, "exponential gamma convex", r.convex, detail::fmt(r.min_second));
    });
    detail::guarded(s, "normal", [&] {
        const auto r = logconcavity::verify_normal_gamma_convexity(grid, -8.0, 8.0, prof);
        detail::add(s, "normal gamma convex on [-8, 8]", r.min_second >= -1e-6, detail::fmt(r.min_second));
        detail::add(s, "normal gamma closed form agrees", r.max_second_disagreement.value_or(1.0) <= 1e-4,
                    detail::fmt(r.max_second_disagreement.value_or(1.0)));
        detail::add(s, "normal gamma recurrence", r.max_recurrence_error.value_or(1.0) <= 1e-5,
                    detail::fmt(r.max_recurrence_error.value_or(1.0)));
    });
    return s;
}

inline SuiteResult mills_suite() {
    SuiteResult s{"mills", {}};
    const auto r = logconcavity::verify_mills_bound(logconcavity::mills_grid());
    detail::add(s, "Mills bound", r.bound_holds, detail::fmt(r.max_bound_gap));
    detail::add(s, "k nonnegative", r.k_nonnegative, detail::fmt(r.min_k));
    detail::add(s, "k nonincreasing", r.k_nonincreasing, detail::fmt(r.max_k_increase));
    return s;
}

/// sup over a fine grid of |F(x) - x| for the normal(0.5, sigma) truncated to [0, 1].
inline double uniform_limit_gap(double sigma) {
    const auto p = distributions::TruncNormalParams::make(0.5, sigma, 0.0, 1.0);
    double gap = 0.0;
    for (double x : numerics::uniform_grid(0.0, 1.0, 1001)) {
        gap = std::max(gap, std::abs(distributions::trunc_normal_cdf(p, x) - x));
    }
    return gap;
}

inline SuiteResult truncation_suite(std::size_t grid, const ToleranceProfile& prof) {
    SuiteResult s{"truncation", {}};
    const std::vector<double> sigmas = {2.0, 10.0, 50.0, 100.0};
    std::vector<double> gaps;
    for (double sg : sigmas) {
        gaps.push_back(uniform_limit_gap(sg));
    }
    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < gaps.size(); ++i) {
        decreasing = decreasing && gaps[i + 1] < gaps[i];
    }
    detail::add(s, "uniform limit monotone", decreasing);
    detail::add(s, "uniform limit at sigma 100", gaps.back() <= 1e-3, detail::fmt(gaps.back()));
    for (const auto& nd : builtin_densities(prof)) {
        detail::guarded(s, nd.name, [&] {
            const double lo = distributions::quantile(nd.density, 0.1, prof);
            const double hi = distributions::quantile(nd.density, 0.9, prof);
            const auto t = distributions::truncate(nd.density, lo, hi, prof);
            const auto parent = logconcavity::certify(nd.density, grid, prof).verdict;
            const auto child = logconcavity::certify(t, grid, prof).verdict;
            detail::add(s, nd.name + " truncation keeps verdict",
                        logconcavity::strength(child) >= logconcavity::strength(parent),
                        std::string(logconcavity::to_string(child)));
        });
    }
    return s;
}

inline SuiteResult transform_suite(std::size_t grid, const ToleranceProfile& prof) {
    SuiteResult s{"transform", {}};
    const auto all = builtin_densities(prof);
    const std::vector<std::size_t> closed = {0, 1, 2, 3};
    for (std::size_t i : closed) {
        for (std::size_t j : closed) {
            if (j < i) {
                continue;
            }
            detail::guarded(s, all[i].name + "*" + all[j].name, [&] {
                const auto p = logconcavity::product(all[i].density, all[j].density, prof);
                const auto v = logconcavity::certify(p, grid, prof).verdict;
                detail::add(s, all[i].name + "*" + all[j].name + " log-concave", logconcavity::is_log_concave(v),
                            std::string(logconcavity::to_string(v)));
            });
        }
    }
    using logconcavity::Curvature;
    using logconcavity::Monotonicity;
    detail::guarded(s, "exponential o (exp - 1)", [&] {
        const auto r = logconcavity::compose(all[1].density, [](double x) { return std::expm1(x); },
                                             {Monotonicity::Increasing, Curvature::Convex}, 0.0, 1.0, prof);
        const auto v = logconcavity::certify(r.density, grid, prof).verdict;
        detail::add(s, "exponential o (exp - 1) applies",
                    r.verdict == logconcavity::CompositionVerdict::TheoremApplies &&
                        v != logconcavity::Verdict::NotLogConcave,
                    std::string(logconcavity::to_string(v)));
    });
    for (const auto& nd : all) {
        detail::guarded(s, nd.name + " affine", [&] {
            const double lo = (nd.density.effective_lo() - 1.0) / 2.0;
            const double hi = (nd.density.effective_hi() - 1.0) / 2.0;
            const auto r = logconcavity::compose(nd.density, [](double x) { return 2.0 * x + 1.0; },
                                                 {Monotonicity::Increasing, Curvature::Linear}, lo, hi, prof);
            const auto before = logconcavity::certify(nd.density, grid, prof).verdict;
            const auto after = logconcavity::certify(r.density, grid, prof).verdict;
            detail::add(s, nd.name + " affine invariance",
                        r.verdict == logconcavity::CompositionVerdict::TheoremApplies && before == after,
                        std::string(logconcavity::to_string(after)));
        });
    }
    return s;
}

/// Value distributions on [0, 1] used by the pricing checks.
inline std::vector<std::pair<std::string, SmoothDensity>> market_densities(const ToleranceProfile& prof = {}) {
    using distributions::Family;
    auto make = [&](Family f, std::vector<double> p) { return distributions::make_builtin(f, p, 1e-6, prof); };
    auto unit = [&](const SmoothDensity& d) { return distributions::truncate(d, 0.0, 1.0, prof); };
    return {
        {"uniform", make(Family::Uniform, {0.0, 1.0})},
        {"truncnormal", make(Family::TruncNormal, {0.5, 2.0, 0.0, 1.0})},
        {"normal", unit(make(Family::Normal, {0.5, 0.3}))},
        {"exponential", unit(make(Family::Exponential, {1.0}))},
        {"logistic", unit(make(Family::Logistic, {0.5, 0.2}))},
        {"laplace", unit(make(Family::Laplace, {0.5, 0.25}))},
    };
}

/// Best revenue (p - c)(1 - G(p)) over n equally spaced prices in [c, 1].
inline double brute_force_revenue(const monopoly::MarketModel& m, std::size_t n = 100000) {
    double best = 0.0;
    for (double p : numerics::uniform_grid(m.cost(), 1.0, n)) {
        best = std::max(best, (p - m.cost()) * monopoly::demand(m, p));
    }
    return best;
}

inline SuiteResult monopoly_suite(std::size_t grid, const ToleranceProfile& prof) {
    SuiteResult s{"monopoly", {}};
    const auto markets = market_densities(prof);
    detail::guarded(s, "uniform closed form", [&] {
        const monopoly::MarketModel m(markets[0].second, 0.0, grid, prof);
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> pick(0.0, 0.99);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            const double c = pick(rng);
            worst = std::max(worst, std::abs(monopoly::optimal_price(m.with_cost(c)).price - 0.5 * (1.0 + c)));
        }
        detail::add(s, "uniform price (1 + c) / 2", worst <= 1e-8, detail::fmt(worst));
    });
    std::vector<double> costs;
    for (int i = 0; i < 20; ++i) {
        costs.push_back(0.9 * i / 19.0);
    }
    const auto prices = numerics::uniform_grid(0.01, 0.99, 99);
    for (const auto& [name, g] : markets) {
        detail::guarded(s, name, [&] {
            const monopoly::MarketModel m(g, 0.0, grid, prof);
            const auto curve = monopoly::markup_curve(m, costs);
            bool markup_down = true;
            bool price_up = true;
            double foc = 0.0;
            for (std::size_t i = 0; i < curve.size(); ++i) {
                foc = std::max(foc, std::abs(curve[i].price - curve[i].cost - curve[i].markup));
                if (i > 0) {
                    markup_down = markup_down && curve[i].markup < curve[i - 1].markup;
                    price_up = price_up && curve[i].price > curve[i - 1].price;
                }
            }
            detail::add(s, name + " markup decreasing", markup_down);
            detail::add(s, name + " price increasing", price_up);
            detail::add(s, name + " first-order condition", foc <= 1e-8, detail::fmt(foc));
            bool elastic = true;
            double duality = 0.0;
            double prev = -kInf;
            for (double p : prices) {
                const double e = monopoly::elasticity(m, p);
                elastic = elastic && e > prev;
                prev = e;
                duality = std::max(duality, std::abs(monopoly::information_rent(m, p) *
                                                         reliability::hazard_rate(g, p, prof) - 1.0));
            }
            detail::add(s, name + " elasticity increasing", elastic);
            detail::add(s, name + " markup times hazard", duality <= 1e-8, detail::fmt(duality));
            const auto rv = monopoly::revenue_concavity_check(m, grid);
            detail::add(s, name + " revenue concave in q", rv == monopoly::RevenueVerdict::StrictlyConcave,
                        std::string(monopoly::to_string(rv)));
            for (double c : {0.0, 0.3, 0.6}) {
                const auto mc = m.with_cost(c);
                const auto sol = monopoly::optimal_price(mc);
                const double solver = (sol.price - c) * monopoly::demand(mc, sol.price);
                const double brute = brute_force_revenue(mc);
                detail::add(s, name + " brute-force revenue at c = " + detail::fmt(c),
                            std::abs(solver - brute) <= 1e-6 && solver >= brute - 1e-12,
                            detail::fmt(solver - brute));
            }
        });
    }
    return s;
}

inline SuiteResult reliability_suite(std::size_t grid, const ToleranceProfile& prof) {
    SuiteResult s{"reliability", {}};
    const auto all = builtin_densities(prof);
    for (const auto& nd : all) {
        detail::guarded(s, nd.name, [&] {
            const auto r = reliability::reliability_report(nd.density, grid, prof);
            detail::add(s, nd.name + " H log-concave", logconcavity::is_log_concave(r.h_logconcave),
                        std::string(logconcavity::to_string(r.h_logconcave)));
            detail::add(s, nd.name + " MRL identity", r.max_identity_residual <= 1e-4,
                        detail::fmt(r.max_identity_residual));
            detail::add(s, nd.name + " hazard increasing", r.hazard_monotone == reliability::Trend::Increasing);
            detail::add(s, nd.name + " MRL decreasing", r.mrl_monotone == reliability::Trend::Decreasing);
            if (nd.name == "exponential" || nd.name == "uniform") {
                double worst = 0.0;
                for (const auto& rec : r.grid) {
                    const double expected = nd.name == "exponential" ? 1.0 : 0.5 * (1.0 - rec.x);
                    worst = std::max(worst, std::abs(rec.mrl - expected));
                }
                detail::add(s, nd.name + " MRL closed form", worst <= 1e-6, detail::fmt(worst));
            }
        });
    }
    return s;
}

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"criteria", "integral", "mlrp",      "gamma",      "mills",
                                                   "truncation", "transform", "monopoly", "reliability"};
    return names;
}

inline SuiteResult run_suite(std::string_view name, std::size_t grid, const ToleranceProfile& prof) {
    if (name == "criteria") return criteria_suite(grid, prof);
    if (name == "integral") return integral_suite(grid, prof);
    if (name == "mlrp") return mlrp_suite(grid, prof);
    if (name == "gamma") return gamma_suite(grid, prof);
    if (name == "mills") return mills_suite();
    if (name == "truncation") return truncation_suite(grid, prof);
    if (name == "transform") return transform_suite(grid, prof);
    if (name == "monopoly") return monopoly_suite(grid, prof);
    if (name == "reliability") return reliability_suite(grid, prof);
    throw Error(ErrorCode::InvalidParams, "unknown suite '" + std::string(name) + "'");
}

} // namespace lcv::verify

#pragma once

#include "logconcave/distributions.hpp"
#include "logconcave/logconcavity.hpp"
#include "logconcave/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace lcv::monopoly {

/// Which route certified the model: log-concave g, or strictly log-concave 1 - G.
enum class Certification { DensityLogConcave, SurvivalLogConcave };

/// Consumers with values v ~ G on [0, 1] and a seller with unit cost c.
class MarketModel {
public:
    MarketModel(SmoothDensity g, double cost, std::size_t grid_size = 512, const ToleranceProfile& prof = {})
        : g_(std::move(g)), cost_(cost), prof_(prof) {
        prof_.validate();
        const auto& s = g_.support();
        if (std::abs(s.lo) > 1e-12 || std::abs(s.hi - 1.0) > 1e-12) {
            throw Error(ErrorCode::InvalidSupport, "value distribution must live on [0, 1]");
        }
        check_cost(cost_);
        const auto cert = logconcavity::certify(g_, grid_size, prof_);
        if (logconcavity::is_log_concave(cert.verdict)) {
            route_ = Certification::DensityLogConcave;
            return;
        }
        const auto surv = logconcavity::certify_probe(survival_probe(), logconcavity::certification_grid(g_, grid_size),
                                                      prof_.slack, "survival");
        if (surv.verdict != logconcavity::Verdict::StrictlyLogConcave) {
            throw Error(ErrorCode::PreconditionNotCertified,
                        "neither g nor 1 - G is certified log-concave for " + g_.label());
        }
        route_ = Certification::SurvivalLogConcave;
    }

    const SmoothDensity& value_dist() const { return g_; }
    double cost() const { return cost_; }
    const ToleranceProfile& tolerance() const { return prof_; }
    Certification certification() const { return route_; }

    /// Same market at another cost; the certification carries over.
    MarketModel with_cost(double c) const {
        check_cost(c);
        MarketModel m = *this;
        m.cost_ = c;
        return m;
    }

private:
    static void check_cost(double c) {
        if (!(c >= 0.0 && c < 1.0)) {
            throw Error(ErrorCode::InvalidParams, "cost must lie in [0, 1)");
        }
    }

    logconcavity::Probe survival_probe() const {
        logconcavity::Probe p;
        const auto g = g_;
        const auto prof = prof_;
        p.score = [g, prof](double x) { return -g.pdf(x) / distributions::survival(g, x, prof); };
        p.log_curvature = [g, prof](double x) {
            const double s = distributions::survival(g, x, prof);
            const double r = g.pdf(x) / s;
            return -distributions::pdf_derivative(g, x, prof) / s - r * r;
        };
        p.determinant = [g, prof](double x) {
            const double s = distributions::survival(g, x, prof);
            const double f = g.pdf(x);
            return -distributions::pdf_derivative(g, x, prof) * s - f * f;
        };
        p.determinant_scale = [g, prof](double x) {
            const double s = distributions::survival(g, x, prof);
            return s * s;
        };
        return p;
    }

    SmoothDensity g_;
    double cost_;
    ToleranceProfile prof_;
    Certification route_ = Certification::DensityLogConcave;
};

inline void require_price(double p, bool open) {
    const bool ok = open ? (p > 0.0 && p < 1.0) : (p >= 0.0 && p <= 1.0);
    if (!ok) {
        throw Error(ErrorCode::InvalidParams, "price " + std::to_string(p) + " is outside the value range");
    }
}

/// q(p) = 1 - G(p).
inline double demand(const MarketModel& m, double p) {
    require_price(p, false);
    return distributions::survival(m.value_dist(), p, m.tolerance());
}

/// Information rent (1 - G(p)) / g(p) of the marginal consumer.
inline double information_rent(const MarketModel& m, double p) {
    const double g = m.value_dist().pdf(p);
    if (!(g > m.tolerance().slack)) {
        throw Error(ErrorCode::DensityUnderflow, "g(" + std::to_string(p) + ") = " + std::to_string(g));
    }
    return distributions::survival(m.value_dist(), p, m.tolerance()) / g;
}

/// MR(p) = p - (1 - G(p)) / g(p), which is also the virtual value at p.
inline double marginal_revenue(const MarketModel& m, double p) {
    require_price(p, true);
    return p - information_rent(m, p);
}

/// eta(p) = p g(p) / (1 - G(p)).
inline double elasticity(const MarketModel& m, double p) {
    if (!(p >= 0.0 && p < 1.0)) {
        throw Error(ErrorCode::InvalidParams, "price " + std::to_string(p) + " is outside [0, 1)");
    }
    const double q = distributions::survival(m.value_dist(), p, m.tolerance());
    if (!(q > m.tolerance().slack)) {
        throw Error(ErrorCode::DemandUnderflow, "demand " + std::to_string(q) + " at p = " + std::to_string(p));
    }
    return p * m.value_dist().pdf(p) / q;
}

enum class Corner { None, AtCost, AtUpperEdge };

inline std::string_view to_string(Corner c) {
    switch (c) {
    case Corner::None: return "none";
    case Corner::AtCost: return "at_cost";
    case Corner::AtUpperEdge: return "at_upper_edge";
    }
    return "none";
}

struct PricingSolution {
    double cost = 0.0;
    double price = 0.0;
    double markup = 0.0;
    double elasticity_at_p = 0.0;
    double mr_residual = 0.0;
    int iterations = 0;
    Corner corner = Corner::None;
};

/// Distance from 1 of the upper end of the price bracket.
inline constexpr double kUpperMargin = 1e-9;

/// Solves MR(p) = c on [c, 1 - margin].
inline PricingSolution optimal_price(const MarketModel& m) {
    const auto& prof = m.tolerance();
    const double c = m.cost();
    const double lo = std::max(c, kUpperMargin);
    const double hi = 1.0 - kUpperMargin;
    PricingSolution sol;
    sol.cost = c;
    auto finish = [&](double p) {
        sol.price = p;
        sol.markup = information_rent(m, p);
        sol.elasticity_at_p = elasticity(m, p);
        sol.mr_residual = p - sol.markup - c;
        return sol;
    };
    if (!(lo < hi)) {
        sol.corner = Corner::AtUpperEdge;
        return finish(hi);
    }
    RealFn foc = [&m, c](double p) { return marginal_revenue(m, p) - c; };
    const double f_lo = foc(lo);
    const double f_hi = foc(hi);
    if (f_lo >= 0.0) {
        sol.corner = Corner::AtCost;
        return finish(lo);
    }
    if (f_hi <= 0.0) {
        sol.corner = Corner::AtUpperEdge;
        return finish(hi);
    }
    ToleranceProfile exact = prof;
    exact.slack = 0.0;
    const auto r = numerics::bracket_root(foc, lo, hi, exact);
    sol.iterations = r.iterations;
    return finish(r.root);
}

inline std::vector<PricingSolution> markup_curve(const MarketModel& m, const std::vector<double>& costs) {
    for (std::size_t i = 0; i + 1 < costs.size(); ++i) {
        if (!(costs[i] < costs[i + 1])) {
            throw Error(ErrorCode::InvalidParams, "costs must be strictly increasing");
        }
    }
    std::vector<PricingSolution> out;
    out.reserve(costs.size());
    for (double c : costs) {
        out.push_back(optimal_price(m.with_cost(c)));
    }
    return out;
}

/// Inverse demand p(q) = G^{-1}(1 - q), with the support ends at q = 0 and q = 1.
inline double inverse_demand(const MarketModel& m, double q) {
    if (!(q >= 0.0 && q <= 1.0)) {
        throw Error(ErrorCode::InvalidParams, "quantity must lie in [0, 1]");
    }
    if (q == 0.0) {
        return 1.0;
    }
    if (q == 1.0) {
        return 0.0;
    }
    return distributions::quantile(m.value_dist(), 1.0 - q, m.tolerance());
}

enum class RevenueVerdict { StrictlyConcave, NotStrictlyConcave, Inconclusive };

inline std::string_view to_string(RevenueVerdict v) {
    switch (v) {
    case RevenueVerdict::StrictlyConcave: return "StrictlyConcave";
    case RevenueVerdict::NotStrictlyConcave: return "NotStrictlyConcave";
    case RevenueVerdict::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

/// Revenue R(q) = q p(q) is strictly concave iff MR(q) = p(q) - q / g(p(q))
/// strictly decreases; checked on adjacent points of a quantity grid. Points
/// where g underflows give Inconclusive.
inline RevenueVerdict revenue_concavity_check(const MarketModel& m, std::size_t grid_size = 512) {
    if (grid_size < 16) {
        throw Error(ErrorCode::InvalidParams, "grid_size must be at least 16");
    }
    const auto& prof = m.tolerance();
    const auto qs = numerics::uniform_grid(1e-4, 1.0 - 1e-4, grid_size);
    std::vector<double> mr;
    mr.reserve(qs.size());
    for (double q : qs) {
        const double p = inverse_demand(m, q);
        const double g = m.value_dist().pdf(p);
        if (!(g > prof.slack)) {
            return RevenueVerdict::Inconclusive;
        }
        mr.push_back(p - q / g);
    }
    for (std::size_t i = 0; i + 1 < mr.size(); ++i) {
        if (!(mr[i + 1] - mr[i] < -prof.slack)) {
            return RevenueVerdict::NotStrictlyConcave;
        }
    }
    return RevenueVerdict::StrictlyConcave;
}

struct FigurePoint {
    std::string series;
    double x;
    double y;
};

/// Demand and marginal revenue over q in [0, 1] plus markup against cost.
inline std::vector<FigurePoint> figure_data(const MarketModel& m, const std::vector<double>& costs,
                                            std::size_t points = 101) {
    std::vector<FigurePoint> out;
    const auto qs = numerics::uniform_grid(0.0, 1.0, points);
    std::vector<double> prices;
    prices.reserve(qs.size());
    for (double q : qs) {
        prices.push_back(inverse_demand(m, q));
        out.push_back({"demand", q, prices.back()});
    }
    for (std::size_t i = 0; i < qs.size(); ++i) {
        const double p = prices[i];
        const double g = m.value_dist().pdf(p);
        if (!(g > m.tolerance().slack)) {
            continue;
        }
        out.push_back({"mr", qs[i], p - qs[i] / g});
    }
    for (const auto& s : markup_curve(m, costs)) {
        out.push_back({"markup", s.cost, s.markup});
    }
    return out;
}

} // namespace lcv::monopoly

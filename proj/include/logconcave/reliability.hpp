#pragma once

#include "logconcave/distributions.hpp"
#include "logconcave/logconcavity.hpp"
#include "logconcave/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lcv::reliability {

inline void require_inside(const SmoothDensity& d, double x) {
    if (!(x >= d.support().lo && x <= d.support().hi) || std::isnan(x)) {
        throw Error(ErrorCode::InvalidParams, "x = " + std::to_string(x) + " is outside the support");
    }
}

/// f(x) / Fbar(x).
inline double hazard_rate(const SmoothDensity& d, double x, const ToleranceProfile& prof = {}) {
    require_inside(d, x);
    const double s = distributions::survival(d, x, prof);
    if (!(s > prof.slack)) {
        throw Error(ErrorCode::SurvivalUnderflow, "survival " + std::to_string(s) + " at x = " + std::to_string(x));
    }
    return d.pdf(x) / s;
}

/// H(x), the integral of the survival function from x to the upper end of the
/// support. Evaluated as the integral of (t - x) f(t), which avoids a nested
/// quadrature when the survival function has no closed form.
inline double reliability_fn(const SmoothDensity& d, double x, const ToleranceProfile& prof = {}) {
    require_inside(d, x);
    const double hi = d.support().hi;
    if (x >= hi) {
        return 0.0;
    }
    const double s = distributions::survival(d, x, prof);
    if (s <= 0) {
        return 0.0;
    }
    ToleranceProfile local = prof;
    local.quad_tol = std::max(std::min(prof.quad_tol, 1e-3 * prof.quad_tol * s), 1e-300);
    RealFn integrand = [&d, x](double t) { return (t - x) * d.pdf(t); };
    // the bulk goes through a finite interval; only the clipped tail uses the infinite map
    const double split = std::isinf(hi) ? std::max(x, d.effective_hi()) : hi;
    double h = numerics::integrate_pieces(integrand, x, split, d.parts().kinks, local, 1e-13);
    if (std::isinf(hi)) {
        h += numerics::integrate(integrand, split, hi, local, 1e-13);
    }
    return std::max(h, 0.0);
}

/// H(x) / Fbar(x).
inline double mean_residual_life(const SmoothDensity& d, double x, const ToleranceProfile& prof = {}) {
    require_inside(d, x);
    const double s = distributions::survival(d, x, prof);
    if (!(s > prof.slack)) {
        throw Error(ErrorCode::SurvivalUnderflow, "survival " + std::to_string(s) + " at x = " + std::to_string(x));
    }
    return reliability_fn(d, x, prof) / s;
}

enum class Trend { Increasing, Decreasing, NotMonotone, Inconclusive };

inline std::string_view to_string(Trend t) {
    switch (t) {
    case Trend::Increasing: return "Increasing";
    case Trend::Decreasing: return "Decreasing";
    case Trend::NotMonotone: return "NotMonotone";
    case Trend::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

/// Adjacent-pair test of the requested direction. Steps against the direction
/// smaller than 100 * slack (relative to the values) count as noise.
inline Trend monotone_trend(std::span<const double> values, bool increasing, double slack) {
    bool violated = false;
    bool noise_only = true;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        const double step = increasing ? values[i + 1] - values[i] : values[i] - values[i + 1];
        const double scale = std::max({1.0, std::abs(values[i]), std::abs(values[i + 1])});
        if (step < -slack * scale) {
            violated = true;
            if (step < -100.0 * slack * scale) {
                noise_only = false;
            }
        }
    }
    if (!violated) {
        return increasing ? Trend::Increasing : Trend::Decreasing;
    }
    return noise_only ? Trend::Inconclusive : Trend::NotMonotone;
}

struct ReliabilityRecord {
    double x;
    double hazard;
    double H;
    double mrl;
};

struct ReliabilityReport {
    Trend hazard_monotone = Trend::Inconclusive;
    Trend mrl_monotone = Trend::Inconclusive;
    logconcavity::Verdict h_logconcave = logconcavity::Verdict::Inconclusive;
    logconcavity::Certificate h_certificate;
    double max_identity_residual = 0.0; // max |MRL' - (hazard * MRL - 1)| over interior records
    std::vector<ReliabilityRecord> grid;
    std::string label;
};

inline ReliabilityReport reliability_report(const SmoothDensity& d, std::size_t grid_size = 512,
                                            const ToleranceProfile& prof = {}) {
    const auto xs = logconcavity::certification_grid(d, grid_size);
    ReliabilityReport rep;
    rep.label = d.label();
    std::vector<double> survival_values;
    std::vector<double> hazards;
    std::vector<double> mrls;
    for (double x : xs) {
        const double s = distributions::survival(d, x, prof);
        if (!(s > prof.slack)) {
            continue;
        }
        const double H = reliability_fn(d, x, prof);
        ReliabilityRecord r{x, d.pdf(x) / s, H, H / s};
        if (!(r.hazard > 0) || !(r.mrl > 0)) {
            continue;
        }
        rep.grid.push_back(r);
        survival_values.push_back(s);
        hazards.push_back(r.hazard);
        mrls.push_back(r.mrl);
    }
    rep.hazard_monotone = monotone_trend(hazards, true, prof.slack);
    rep.mrl_monotone = monotone_trend(mrls, false, prof.slack);

    // log-concavity of H with H' = -Fbar and H'' = f
    std::vector<double> grid_x;
    grid_x.reserve(rep.grid.size());
    for (const auto& r : rep.grid) {
        grid_x.push_back(r.x);
    }
    auto lookup = [&rep](double x) -> std::size_t {
        auto it = std::lower_bound(rep.grid.begin(), rep.grid.end(), x,
                                   [](const ReliabilityRecord& r, double v) { return r.x < v; });
        return static_cast<std::size_t>(it - rep.grid.begin());
    };
    logconcavity::Probe probe;
    probe.score = [&](double x) {
        const auto i = lookup(x);
        return -survival_values[i] / rep.grid[i].H;
    };
    probe.determinant = [&](double x) {
        const auto i = lookup(x);
        const double s = survival_values[i];
        return d.pdf(x) * rep.grid[i].H - s * s;
    };
    probe.determinant_scale = [&](double x) {
        const auto i = lookup(x);
        return rep.grid[i].H * rep.grid[i].H;
    };
    probe.log_curvature = [&](double x) { return probe.determinant(x) / probe.determinant_scale(x); };
    if (grid_x.size() >= 2) {
        rep.h_certificate = logconcavity::certify_probe(probe, grid_x, prof.slack, "H[" + d.label() + "]");
        rep.h_logconcave = rep.h_certificate.verdict;
    }

    RealFn mrl_fn = [&d, &prof](double x) { return mean_residual_life(d, x, prof); };
    for (const auto& r : rep.grid) {
        const double h = d.safe_step(r.x, prof);
        if (distributions::survival(d, r.x + h, prof) <= prof.slack) {
            continue;
        }
        const double deriv = numerics::central_difference(mrl_fn, r.x, 1, h);
        rep.max_identity_residual = std::max(rep.max_identity_residual, std::abs(deriv - (r.hazard * r.mrl - 1.0)));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// monotone likelihood ratio for location families

struct MlrpWitness {
    double theta1;
    double theta2;
    double x;
    double x_next;
    double drop; // log-ratio at x_next minus log-ratio at x
};

enum class MlrpStatus { Holds, Fails, Inconclusive };

inline std::string_view to_string(MlrpStatus s) {
    switch (s) {
    case MlrpStatus::Holds: return "MLRPHolds";
    case MlrpStatus::Fails: return "MLRPFails";
    case MlrpStatus::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

struct MlrpResult {
    MlrpStatus status = MlrpStatus::Inconclusive;
    std::optional<MlrpWitness> witness;
    std::vector<std::pair<double, double>> pairs;
    std::size_t grid_size = 0;
    double slack = 0.0;
};

inline std::vector<std::pair<double, double>> default_theta_pairs() { return {{0.0, 0.5}, {0.0, 1.0}, {-1.0, 1.0}}; }

/// Checks that f(x - theta2) / f(x - theta1) is nondecreasing in x for each
/// pair theta1 < theta2, on the common effective support of the two shifts.
inline MlrpResult check_mlrp_location(const SmoothDensity& d, const std::vector<std::pair<double, double>>& pairs,
                                      std::size_t grid_size = 512, const ToleranceProfile& prof = {}) {
    if (grid_size < 16) {
        throw Error(ErrorCode::InvalidParams, "grid_size must be at least 16");
    }
    if (pairs.empty()) {
        throw Error(ErrorCode::InvalidParams, "at least one theta pair is required");
    }
    MlrpResult res;
    res.pairs = pairs;
    res.grid_size = grid_size;
    res.slack = prof.slack;
    bool noisy = false;
    for (const auto& [t1, t2] : pairs) {
        if (!(t1 < t2)) {
            throw Error(ErrorCode::InvalidParams, "theta pairs must satisfy theta1 < theta2");
        }
        const double lo = d.effective_lo() + t2;
        const double hi = d.effective_hi() + t1;
        if (!(lo < hi)) {
            throw Error(ErrorCode::EmptyCommonSupport, "shifted supports do not overlap for (" + std::to_string(t1) +
                                                           ", " + std::to_string(t2) + ")");
        }
        const auto xs = numerics::chebyshev_grid(lo, hi, grid_size);
        std::vector<double> ratio(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            ratio[i] = d.log_pdf(xs[i] - t2) - d.log_pdf(xs[i] - t1);
        }
        for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
            const double drop = ratio[i + 1] - ratio[i];
            if (!std::isfinite(drop)) {
                noisy = true;
                continue;
            }
            if (drop < -prof.slack) {
                if (drop < -100.0 * prof.slack) {
                    if (!res.witness || drop < res.witness->drop) {
                        res.witness = MlrpWitness{t1, t2, xs[i], xs[i + 1], drop};
                    }
                } else {
                    noisy = true;
                }
            }
        }
    }
    if (res.witness) {
        res.status = MlrpStatus::Fails;
    } else {
        res.status = noisy ? MlrpStatus::Inconclusive : MlrpStatus::Holds;
    }
    return res;
}

/// Largest value of log f(a) + log f(b) - 2 log f((a + b) / 2) over random
/// pairs drawn from the effective support; nonpositive for log-concave f.
inline double max_midpoint_excess(const SmoothDensity& d, std::size_t pairs = 200, std::uint64_t seed = 20240601) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pick(d.effective_lo(), d.effective_hi());
    double worst = -kInf;
    for (std::size_t i = 0; i < pairs; ++i) {
        const double a = pick(rng);
        const double b = pick(rng);
        worst = std::max(worst, d.log_pdf(a) + d.log_pdf(b) - 2.0 * d.log_pdf(0.5 * (a + b)));
    }
    return worst;
}

} // namespace lcv::reliability

#pragma once

#include "logconcave/distributions.hpp"
#include "logconcave/normal.hpp"
#include "logconcave/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lcv::logconcavity {

enum class Verdict { StrictlyLogConcave, LogConcave, NotLogConcave, Inconclusive };

inline std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::StrictlyLogConcave: return "StrictlyLogConcave";
    case Verdict::LogConcave: return "LogConcave";
    case Verdict::NotLogConcave: return "NotLogConcave";
    case Verdict::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

inline bool is_log_concave(Verdict v) { return v == Verdict::StrictlyLogConcave || v == Verdict::LogConcave; }

/// Ordering used to compare verdicts: strict > weak > inconclusive > violated.
inline int strength(Verdict v) {
    switch (v) {
    case Verdict::StrictlyLogConcave: return 3;
    case Verdict::LogConcave: return 2;
    case Verdict::Inconclusive: return 1;
    case Verdict::NotLogConcave: return 0;
    }
    return 0;
}

/// The three equivalent characterizations of log-concavity.
enum class Criterion {
    LogCurvature,   // (log f)'' <= 0
    ScoreSlope,     // f'/f nonincreasing
    Determinant,    // f'' f - (f')^2 <= 0
};

inline std::string_view to_string(Criterion c) {
    switch (c) {
    case Criterion::LogCurvature: return "log_curvature";
    case Criterion::ScoreSlope: return "score_slope";
    case Criterion::Determinant: return "determinant";
    }
    return "unknown";
}

struct CriterionRecord {
    double x;
    double log_curvature;
    double score;
    double determinant;       // raw f'' f - (f')^2
    double determinant_scale; // f^2; the determinant is classified relative to this
};

struct Witness {
    double x;
    Criterion criterion;
    double value; // normalized criterion value; positive means violated
};

struct Certificate {
    Verdict verdict = Verdict::Inconclusive;
    std::array<Verdict, 3> criterion_verdicts{};
    std::array<double, 3> criterion_sup{}; // sup of each normalized criterion over the grid
    std::vector<CriterionRecord> records;
    std::vector<Witness> witnesses;
    double max_violation = 0.0;
    std::size_t grid_size = 0;
    double slack = 0.0;
    std::string label;
};

/// Evaluators for the three criteria of some positive function.
struct Probe {
    RealFn log_curvature;
    RealFn score;
    RealFn determinant;
    RealFn determinant_scale;
};

namespace detail {

inline Verdict classify(double sup, double slack) {
    if (sup > slack) {
        return Verdict::NotLogConcave;
    }
    if (sup < -slack) {
        return Verdict::StrictlyLogConcave;
    }
    return Verdict::LogConcave;
}

inline constexpr std::size_t kMaxViolationWitnesses = 16;
inline constexpr std::size_t kMaxTightWitnesses = 4;

inline void collect_witnesses(std::vector<Witness>& out, std::vector<Witness> candidates, double slack) {
    std::vector<Witness> violated;
    std::vector<Witness> tight;
    for (const auto& w : candidates) {
        if (w.value > slack) {
            violated.push_back(w);
        } else if (w.value >= -slack) {
            tight.push_back(w);
        }
    }
    std::sort(violated.begin(), violated.end(), [](const Witness& a, const Witness& b) { return a.value > b.value; });
    if (violated.size() > kMaxViolationWitnesses) {
        violated.resize(kMaxViolationWitnesses);
    }
    if (tight.size() > kMaxTightWitnesses) {
        tight.resize(kMaxTightWitnesses);
    }
    out.insert(out.end(), violated.begin(), violated.end());
    if (violated.empty()) {
        out.insert(out.end(), tight.begin(), tight.end());
    }
}

} // namespace detail

/// Runs all three criteria on the same grid and cross-validates them.
inline Certificate certify_probe(const Probe& probe, std::span<const double> grid, double slack, std::string label = {}) {
    const std::size_t n = grid.size();
    Certificate cert;
    cert.grid_size = n;
    cert.slack = slack;
    cert.label = std::move(label);
    cert.records.reserve(n);
    for (double x : grid) {
        cert.records.push_back(
            {x, probe.log_curvature(x), probe.score(x), probe.determinant(x), probe.determinant_scale(x)});
    }

    std::array<std::vector<Witness>, 3> values;
    for (const auto& r : cert.records) {
        values[0].push_back({r.x, Criterion::LogCurvature, r.log_curvature});
        values[2].push_back({r.x, Criterion::Determinant, r.determinant / r.determinant_scale});
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto& a = cert.records[i];
        const auto& b = cert.records[i + 1];
        values[1].push_back({a.x, Criterion::ScoreSlope, (b.score - a.score) / (b.x - a.x)});
    }

    bool any_nan = false;
    for (std::size_t c = 0; c < 3; ++c) {
        double sup = -kInf;
        for (const auto& w : values[c]) {
            if (std::isnan(w.value)) {
                any_nan = true;
                continue;
            }
            sup = std::max(sup, w.value);
        }
        cert.criterion_sup[c] = sup;
        cert.criterion_verdicts[c] = detail::classify(sup, slack);
        detail::collect_witnesses(cert.witnesses, values[c], slack);
    }
    const double worst = *std::max_element(cert.criterion_sup.begin(), cert.criterion_sup.end());
    cert.max_violation = std::max(0.0, worst);

    const auto& v = cert.criterion_verdicts;
    if (!any_nan && v[0] == v[1] && v[1] == v[2]) {
        cert.verdict = v[0];
    } else {
        cert.verdict = Verdict::Inconclusive;
    }
    return cert;
}

inline std::vector<double> certification_grid(const SmoothDensity& d, std::size_t grid_size) {
    if (grid_size < 16) {
        throw Error(ErrorCode::InvalidParams, "grid_size must be at least 16");
    }
    return numerics::chebyshev_grid(d.effective_lo(), d.effective_hi(), grid_size);
}

/// (log f)''(x), from closed forms when available.
inline double log_curvature(const SmoothDensity& d, double x, const ToleranceProfile& prof = {}) {
    if (!d.support().contains(x)) {
        throw Error(ErrorCode::NonFiniteEvaluation, "x = " + std::to_string(x) + " is not inside the support");
    }
    const double v = distributions::log_second_derivative(d, x, prof);
    if (!std::isfinite(v)) {
        throw Error(ErrorCode::NonFiniteEvaluation, "log curvature is not finite at x = " + std::to_string(x));
    }
    return v;
}

inline Probe density_probe(const SmoothDensity& d, const ToleranceProfile& prof) {
    Probe p;
    p.log_curvature = [d, prof](double x) { return distributions::log_second_derivative(d, x, prof); };
    p.score = [d, prof](double x) { return distributions::score(d, x, prof); };
    p.determinant = [d, prof](double x) {
        const double f = d.pdf(x);
        const double f1 = distributions::pdf_derivative(d, x, prof);
        const double f2 = distributions::pdf_second_derivative(d, x, prof);
        return f2 * f - f1 * f1;
    };
    p.determinant_scale = [d](double x) {
        const double f = d.pdf(x);
        return f * f;
    };
    return p;
}

inline Certificate certify(const SmoothDensity& d, std::size_t grid_size = 512, const ToleranceProfile& prof = {}) {
    const auto grid = certification_grid(d, grid_size);
    return certify_probe(density_probe(d, prof), grid, prof.slack, d.label());
}

// ---------------------------------------------------------------------------
// unimodality

enum class Modality { Unimodal, NotUnimodal, Inconclusive };

inline std::string_view to_string(Modality m) {
    switch (m) {
    case Modality::Unimodal: return "Unimodal";
    case Modality::NotUnimodal: return "NotUnimodal";
    case Modality::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

/// A sign sequence of f' must read +...0...- for a single peak or plateau.
inline Modality unimodal_from_slopes(std::span<const double> slopes, double slack) {
    auto sign = [slack](double v) { return v > slack ? 1 : (v < -slack ? -1 : 0); };
    bool noisy_only = true;
    bool violated = false;
    for (std::size_t i = 0; i + 1 < slopes.size(); ++i) {
        if (sign(slopes[i + 1]) > sign(slopes[i])) {
            violated = true;
            const double size = std::max(std::abs(slopes[i]), std::abs(slopes[i + 1]));
            if (size > 100.0 * slack) {
                noisy_only = false;
            }
        }
    }
    if (!violated) {
        return Modality::Unimodal;
    }
    return noisy_only ? Modality::Inconclusive : Modality::NotUnimodal;
}

inline Modality certify_unimodal(const SmoothDensity& d, std::size_t grid_size = 512, const ToleranceProfile& prof = {}) {
    const auto grid = certification_grid(d, grid_size);
    std::vector<double> slopes;
    slopes.reserve(grid.size());
    for (double x : grid) {
        // the score shares its sign with f' and does not vanish in the tails
        slopes.push_back(distributions::score(d, x, prof));
    }
    return unimodal_from_slopes(slopes, prof.slack);
}

// ---------------------------------------------------------------------------
// transformations

inline SmoothDensity product(const SmoothDensity& f, const SmoothDensity& g, const ToleranceProfile& prof = {}) {
    const double lo = std::max(f.effective_lo(), g.effective_lo());
    const double hi = std::min(f.effective_hi(), g.effective_hi());
    if (!(lo < hi)) {
        throw Error(ErrorCode::ZeroMassWindow, "supports do not overlap");
    }
    const double overlap = numerics::integrate([&](double x) { return f.pdf(x) * g.pdf(x); }, lo, hi, prof);
    if (!(overlap > prof.slack)) {
        throw Error(ErrorCode::ZeroMassWindow, "overlap mass " + std::to_string(overlap) + " is below slack");
    }
    RealFn log_fn = [f, g](double x) { return f.log_pdf(x) + g.log_pdf(x); };
    RealFn score_fn;
    RealFn curvature_fn;
    if (f.has_score() && g.has_score()) {
        score_fn = [f, g](double x) { return f.parts().score(x) + g.parts().score(x); };
    }
    if (f.has_log_curvature() && g.has_log_curvature()) {
        curvature_fn = [f, g](double x) { return f.parts().log_curvature(x) + g.parts().log_curvature(x); };
    }
    std::vector<double> kinks = f.parts().kinks;
    kinks.insert(kinks.end(), g.parts().kinks.begin(), g.parts().kinks.end());
    return distributions::from_log_density(lo, hi, std::move(log_fn), "(" + f.label() + ")*(" + g.label() + ")",
                                           std::move(score_fn), std::move(curvature_fn), prof, std::move(kinks));
}

enum class Monotonicity { Increasing, Decreasing };
enum class Curvature { Concave, Convex, Linear };

struct MapProperties {
    Monotonicity monotonicity;
    Curvature curvature;
};

enum class ObservedShape { Increasing, Decreasing, Constant, Neither };
enum class ObservedCurvature { Concave, Convex, Linear, Mixed };

enum class CompositionVerdict { TheoremApplies, HypothesesFail };

inline std::string_view to_string(CompositionVerdict v) {
    return v == CompositionVerdict::TheoremApplies ? "TheoremApplies" : "HypothesesFail";
}

struct CompositionResult {
    SmoothDensity density;
    CompositionVerdict verdict;
    ObservedShape density_shape; // monotonicity of f on the image of the window
    ObservedCurvature map_curvature;
    Monotonicity map_monotonicity;
    std::string reason;
};

/// Density proportional to f(t(x)) on the window, with a check of the
/// composition hypotheses: f increasing with t concave, f decreasing with t
/// convex, or t linear. The declared properties of t are verified, not trusted.
inline CompositionResult compose(const SmoothDensity& f, RealFn t, MapProperties declared, double lo, double hi,
                                 const ToleranceProfile& prof = {}) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw Error(ErrorCode::InvalidParams, "composition window must be finite with lo < hi");
    }
    const auto grid = numerics::chebyshev_grid(lo, hi, 257);
    auto t_step = [lo, hi, &prof](double x) {
        return std::min({numerics::step_for(x, prof), 0.25 * (x - lo), 0.25 * (hi - x)});
    };

    bool pos = true;
    bool neg = true;
    bool concave = true;
    bool convex = true;
    bool linear = true;
    for (double x : grid) {
        const double h = t_step(x);
        const double d1 = numerics::central_difference(t, x, 1, h);
        const double d2 = numerics::central_difference(t, x, 2, h);
        // second differences of t carry roundoff of order eps |t| / h^2
        const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t(x))) / (h * h);
        const double tol = std::max(prof.slack * std::max({1.0, std::abs(t(x)), std::abs(d1)}), noise);
        pos = pos && d1 > 0;
        neg = neg && d1 < 0;
        concave = concave && d2 <= tol;
        convex = convex && d2 >= -tol;
        linear = linear && std::abs(d2) <= tol;
    }
    if (!pos && !neg) {
        throw Error(ErrorCode::NonMonotoneMap, "t' changes sign on the window");
    }
    const Monotonicity observed_mono = pos ? Monotonicity::Increasing : Monotonicity::Decreasing;
    const ObservedCurvature observed_curv = linear    ? ObservedCurvature::Linear
                                            : concave ? ObservedCurvature::Concave
                                            : convex  ? ObservedCurvature::Convex
                                                      : ObservedCurvature::Mixed;

    const double image_lo = std::min(t(lo), t(hi));
    const double image_hi = std::max(t(lo), t(hi));
    if (image_lo < f.support().lo || image_hi > f.support().hi) {
        throw Error(ErrorCode::InvalidParams, "t maps the window outside the support of f");
    }

    bool f_up = true;
    bool f_down = true;
    for (double x : grid) {
        const double s = distributions::score(f, t(x), prof);
        f_up = f_up && s >= -prof.slack;
        f_down = f_down && s <= prof.slack;
    }
    const ObservedShape shape = f_up && f_down ? ObservedShape::Constant
                                : f_up         ? ObservedShape::Increasing
                                : f_down       ? ObservedShape::Decreasing
                                               : ObservedShape::Neither;

    std::string reason;
    bool declared_ok = true;
    if (declared.monotonicity != observed_mono) {
        declared_ok = false;
        reason = "declared monotonicity of t not confirmed";
    }
    const bool curv_ok = (declared.curvature == Curvature::Linear && observed_curv == ObservedCurvature::Linear) ||
                         (declared.curvature == Curvature::Concave &&
                          (observed_curv == ObservedCurvature::Concave || observed_curv == ObservedCurvature::Linear)) ||
                         (declared.curvature == Curvature::Convex &&
                          (observed_curv == ObservedCurvature::Convex || observed_curv == ObservedCurvature::Linear));
    if (!curv_ok) {
        declared_ok = false;
        reason = "declared curvature of t not confirmed";
    }
    const bool t_concave = observed_curv == ObservedCurvature::Concave || observed_curv == ObservedCurvature::Linear;
    const bool t_convex = observed_curv == ObservedCurvature::Convex || observed_curv == ObservedCurvature::Linear;
    const bool f_inc = shape == ObservedShape::Increasing || shape == ObservedShape::Constant;
    const bool f_dec = shape == ObservedShape::Decreasing || shape == ObservedShape::Constant;
    bool applies = observed_curv == ObservedCurvature::Linear || (f_inc && t_concave) || (f_dec && t_convex);
    if (!applies && reason.empty()) {
        reason = "neither (f increasing, t concave) nor (f decreasing, t convex) holds";
    }
    applies = applies && declared_ok;

    RealFn log_fn = [f, t](double x) { return f.log_pdf(t(x)); };
    RealFn score_fn;
    RealFn curvature_fn;
    // a linear map has the secant as its exact slope; differences near the window edge only add roundoff
    const bool is_linear = observed_curv == ObservedCurvature::Linear;
    const double secant = (t(hi) - t(lo)) / (hi - lo);
    auto slope = [t, t_step, is_linear, secant](double x) {
        return is_linear ? secant : numerics::central_difference(t, x, 1, t_step(x));
    };
    if (f.has_score()) {
        score_fn = [f, t, slope](double x) { return slope(x) * f.parts().score(t(x)); };
        if (f.has_log_curvature()) {
            curvature_fn = [f, t, t_step, is_linear, slope](double x) {
                const double h = t_step(x);
                const double d1 = slope(x);
                const double y = t(x);
                double d2 = 0.0;
                if (!is_linear) {
                    d2 = numerics::central_difference(t, x, 2, h);
                    const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(y)) / (h * h);
                    if (std::abs(d2) <= noise) {
                        d2 = 0.0;
                    }
                }
                return d1 * d1 * f.parts().log_curvature(y) + d2 * f.parts().score(y);
            };
        }
    }
    // kinks of f pulled back through the monotone map
    std::vector<double> kinks;
    for (double k : f.parts().kinks) {
        if (k > image_lo && k < image_hi) {
            ToleranceProfile exact = prof;
            exact.slack = 0.0;
            kinks.push_back(numerics::find_root([&t, k](double x) { return t(x) - k; }, lo, hi, exact));
        }
    }
    auto density = distributions::from_log_density(lo, hi, std::move(log_fn), f.label() + " o t", std::move(score_fn),
                                                   std::move(curvature_fn), prof, std::move(kinks));
    return {std::move(density), applies ? CompositionVerdict::TheoremApplies : CompositionVerdict::HypothesesFail,
            shape, observed_curv, observed_mono, reason};
}

// ---------------------------------------------------------------------------
// Gamma ratio F/f

inline double gamma_ratio(const SmoothDensity& d, double x, const ToleranceProfile& prof = {}) {
    const double f = d.pdf(x);
    if (!(f >= std::numeric_limits<double>::min())) {
        throw Error(ErrorCode::DensityUnderflow, "density underflows at x = " + std::to_string(x));
    }
    const double g = distributions::cdf(d, x, prof) / f;
    if (!std::isfinite(g)) {
        throw Error(ErrorCode::DensityUnderflow, "ratio overflows at x = " + std::to_string(x));
    }
    return g;
}

struct GammaOptions {
    std::optional<std::pair<double, double>> window; // defaults to the effective support
    RealFn closed_second;                            // closed-form Gamma'' if known
    RealFn closed_first;                             // closed-form Gamma' if known
    std::vector<double> recurrence_points;
};

struct GammaConvexityReport {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t grid_size = 0;
    double min_second = 0.0;            // min of finite-difference Gamma''
    double max_abs_second_difference = 0.0; // plain second differences on the uniform grid
    std::optional<double> min_closed_second;
    std::optional<double> max_second_disagreement; // relative, |fd - closed| / max(1, |closed|)
    std::optional<double> max_recurrence_error;    // |Gamma'_fd - closed_first|
    bool convex = false;
    bool linear = false;
};

inline GammaConvexityReport verify_gamma_convexity(const SmoothDensity& d, std::size_t grid_size,
                                                   const GammaOptions& opts = {}, const ToleranceProfile& prof = {}) {
    if (grid_size < 16) {
        throw Error(ErrorCode::InvalidParams, "grid_size must be at least 16");
    }
    GammaConvexityReport rep;
    const auto [lo, hi] = opts.window.value_or(std::pair{d.effective_lo(), d.effective_hi()});
    if (!(lo < hi) || lo < d.support().lo || hi > d.support().hi) {
        throw Error(ErrorCode::InvalidParams, "gamma window must lie inside the support");
    }
    rep.lo = lo;
    rep.hi = hi;
    rep.grid_size = grid_size;
    const double margin = 1e-4 * (hi - lo);
    const auto grid = numerics::uniform_grid(lo + margin, hi - margin, grid_size);

    RealFn gamma = [&d, &prof](double x) { return gamma_ratio(d, x, prof); };
    auto step = [&](double x) {
        double h = prof.fd_step;
        if (!d.support().lower_infinite()) {
            h = std::min(h, 0.25 * (x - d.support().lo));
        }
        if (!d.support().upper_infinite()) {
            h = std::min(h, 0.25 * (d.support().hi - x));
        }
        return h;
    };

    std::vector<double> values;
    values.reserve(grid.size());
    rep.min_second = kInf;
    double min_closed = kInf;
    double disagreement = 0.0;
    double curvature_scale = 0.0;
    for (double x : grid) {
        const double g = gamma(x);
        values.push_back(g);
        // constant absolute step: Gamma grows like exp(x^2 / 2) for the normal
        const double second = numerics::central_difference(gamma, x, 2, step(x));
        rep.min_second = std::min(rep.min_second, second);
        curvature_scale = std::max(curvature_scale, std::abs(second));
        if (opts.closed_second) {
            const double closed = opts.closed_second(x);
            min_closed = std::min(min_closed, closed);
            disagreement = std::max(disagreement, std::abs(second - closed) / std::max(1.0, std::abs(closed)));
        }
    }
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        rep.max_abs_second_difference =
            std::max(rep.max_abs_second_difference, std::abs(values[i + 1] - 2.0 * values[i] + values[i - 1]));
    }
    if (opts.closed_second) {
        rep.min_closed_second = min_closed;
        rep.max_second_disagreement = disagreement;
    }
    if (opts.closed_first && !opts.recurrence_points.empty()) {
        double err = 0.0;
        for (double x : opts.recurrence_points) {
            // one Richardson step removes the h^2 term
            const double h = step(x);
            const double coarse = numerics::central_difference(gamma, x, 1, h);
            const double fine = numerics::central_difference(gamma, x, 1, 0.5 * h);
            const double first = (4.0 * fine - coarse) / 3.0;
            err = std::max(err, std::abs(first - opts.closed_first(x)));
        }
        rep.max_recurrence_error = err;
    }
    rep.convex = rep.min_second >= -prof.slack;
    rep.linear = curvature_scale <= 1e3 * prof.slack;
    return rep;
}

/// Gamma-convexity check for the standard normal, with the closed form
/// Gamma'' = x + (1 + x^2) Gamma and the recurrence Gamma' = 1 + x Gamma.
inline GammaConvexityReport verify_normal_gamma_convexity(std::size_t grid_size, double lo = -8.0, double hi = 8.0,
                                                          const ToleranceProfile& prof = {}) {
    const auto d = distributions::make_builtin(distributions::Family::Normal, {0.0, 1.0});
    GammaOptions opts;
    opts.window = std::pair{lo, hi};
    opts.closed_second = [](double x) { return normal::gamma_second(x); };
    opts.closed_first = [](double x) { return normal::gamma_first(x); };
    opts.recurrence_points = {-2.0, 0.0, 2.0};
    return verify_gamma_convexity(d, grid_size, opts, prof);
}

// ---------------------------------------------------------------------------
// integration preserves log-concavity

struct IntegralTheoremReport {
    std::size_t grid_size = 0;
    double sup_lower_curvature = -kInf; // sup (log F)''
    double sup_upper_curvature = -kInf; // sup (log Fbar)''
    double max_lower_core = -kInf;      // sup (f'F - f^2 + f(a) f) / F^2, must be <= 0
    double max_upper_core = -kInf;      // sup (-f'Fbar - f^2 + f(b) f) / Fbar^2, must be <= 0
    double slack = 0.0;
    bool passed = false;
};

/// With F and Fbar taken over the effective interval (a, b), checks that both
/// are strictly log-concave and that the bounds f'F - f^2 <= -f(a) f and
/// -f'Fbar - f^2 <= -f(b) f hold on the grid.
inline IntegralTheoremReport verify_integral_theorem(const SmoothDensity& d, std::size_t grid_size = 512,
                                                     const ToleranceProfile& prof = {}) {
    const auto cert = certify(d, grid_size, prof);
    if (!is_log_concave(cert.verdict)) {
        throw Error(ErrorCode::PreconditionNotCertified,
                    "density is not certified log-concave (" + std::string(to_string(cert.verdict)) + ")");
    }
    const double a = d.effective_lo();
    const double b = d.effective_hi();
    const double below = distributions::cdf(d, a, prof);
    const double above = distributions::survival(d, b, prof);
    const double fa = d.pdf(a);
    const double fb = d.pdf(b);

    IntegralTheoremReport rep;
    rep.grid_size = grid_size;
    rep.slack = prof.slack;
    for (double x : certification_grid(d, grid_size)) {
        const double f = d.pdf(x);
        const double f1 = distributions::pdf_derivative(d, x, prof);
        const double lower = distributions::cdf(d, x, prof) - below;
        const double upper = distributions::survival(d, x, prof) - above;
        const double lower_curv = f1 / lower - (f / lower) * (f / lower);
        const double upper_curv = -f1 / upper - (f / upper) * (f / upper);
        rep.sup_lower_curvature = std::max(rep.sup_lower_curvature, lower_curv);
        rep.sup_upper_curvature = std::max(rep.sup_upper_curvature, upper_curv);
        rep.max_lower_core = std::max(rep.max_lower_core, lower_curv + fa * f / (lower * lower));
        rep.max_upper_core = std::max(rep.max_upper_core, upper_curv + fb * f / (upper * upper));
    }
    rep.passed = rep.sup_lower_curvature < -prof.slack && rep.sup_upper_curvature < -prof.slack &&
                 rep.max_lower_core <= prof.slack && rep.max_upper_core <= prof.slack;
    return rep;
}

// ---------------------------------------------------------------------------
// nonnegative concave functions

struct ConcaveReport {
    double max_log_curvature = -kInf;
    Modality modality = Modality::Inconclusive;
    bool confirmed = false;
};

inline ConcaveReport verify_concave_implies_logconcave(const RealFn& fn, double lo, double hi,
                                                       std::size_t grid_size = 512, const ToleranceProfile& prof = {}) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi) || grid_size < 16) {
        throw Error(ErrorCode::InvalidParams, "need a finite window lo < hi and grid_size >= 16");
    }
    const auto grid = numerics::chebyshev_grid(lo, hi, grid_size);
    for (double x : grid) {
        if (!(fn(x) > 0)) {
            throw Error(ErrorCode::InvalidParams, "function must be positive inside the window");
        }
    }
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> pick(lo, hi);
    for (int i = 0; i < 200; ++i) {
        const double x = pick(rng);
        const double y = pick(rng);
        const double mid = fn(0.5 * (x + y));
        const double chord = 0.5 * (fn(x) + fn(y));
        if (mid < chord - prof.slack * std::max(1.0, std::abs(chord))) {
            throw Error(ErrorCode::InputNotConcave, "midpoint inequality fails for x = " + std::to_string(x) +
                                                        ", y = " + std::to_string(y));
        }
    }
    auto step = [&](double x) { return std::min({numerics::step_for(x, prof), 0.25 * (x - lo), 0.25 * (hi - x)}); };
    RealFn log_fn = [&fn](double x) { return std::log(fn(x)); };
    ConcaveReport rep;
    std::vector<double> slopes;
    slopes.reserve(grid.size());
    for (double x : grid) {
        const double h = step(x);
        rep.max_log_curvature = std::max(rep.max_log_curvature, numerics::central_difference(log_fn, x, 2, h));
        slopes.push_back(numerics::central_difference(log_fn, x, 1, h));
    }
    rep.modality = unimodal_from_slopes(slopes, prof.slack);
    rep.confirmed = rep.max_log_curvature <= prof.slack && rep.modality == Modality::Unimodal;
    return rep;
}

// ---------------------------------------------------------------------------
// normal tail bounds

struct MillsReport {
    std::size_t points = 0;
    double max_bound_gap = -kInf;  // sup of (1 - Phi(y)) - phi(y) / y, must be < 0
    double min_k = kInf;           // inf of k(y), must be >= 0
    double max_k_increase = -kInf; // sup of k(y_{i+1}) - k(y_i), must be <= 0
    bool bound_holds = false;
    bool k_nonnegative = false;
    bool k_nonincreasing = false;
};

/// 200 points in (0.01, 8] unless given otherwise.
inline std::vector<double> mills_grid(std::size_t n = 200, double lo = 0.01, double hi = 8.0) {
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        ys[i] = lo + (hi - lo) * static_cast<double>(i + 1) / static_cast<double>(n);
    }
    return ys;
}

inline MillsReport verify_mills_bound(std::span<const double> ys) {
    MillsReport rep;
    rep.points = ys.size();
    double prev = kInf;
    for (double y : ys) {
        rep.max_bound_gap = std::max(rep.max_bound_gap, normal::survival(y) - normal::pdf(y) / y);
        const double k = normal::mills_k(y);
        rep.min_k = std::min(rep.min_k, k);
        if (std::isfinite(prev)) {
            rep.max_k_increase = std::max(rep.max_k_increase, k - prev);
        }
        prev = k;
    }
    rep.bound_holds = rep.max_bound_gap < 0;
    rep.k_nonnegative = rep.min_k >= 0;
    rep.k_nonincreasing = rep.max_k_increase <= 0;
    return rep;
}

} // namespace lcv::logconcavity

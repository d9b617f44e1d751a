#pragma once

#include "logconcave/errors.hpp"
#include "logconcave/normal.hpp"
#include "logconcave/numerics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lcv {

/// Raw ingredients of a density. pdf and log_pdf are required; the rest are
/// optional closed forms (empty std::function means "not available").
struct DensityParts {
    SupportInterval support;
    RealFn pdf;
    RealFn log_pdf;
    RealFn cdf;
    RealFn survival;
    RealFn score;         // (log f)'
    RealFn log_curvature; // (log f)''
    std::vector<double> kinks; // points where f is continuous but not differentiable
    std::string label;
};

/// Positive C^2 density on an open interval. Immutable once built; copies share state.
class SmoothDensity {
public:
    SmoothDensity() = default;

    explicit SmoothDensity(DensityParts parts, const ToleranceProfile& prof = {})
        : parts_(std::make_shared<const DensityParts>(std::move(parts))) {
        const auto& p = *parts_;
        p.support.validate();
        if (!p.pdf || !p.log_pdf) {
            throw Error(ErrorCode::InvalidParams, "density requires pdf and log_pdf");
        }
        if (p.support.lower_infinite() && !p.cdf) {
            throw Error(ErrorCode::InvalidSupport, "infinite lower endpoint needs a closed-form cdf");
        }
        if (p.support.upper_infinite() && !p.survival && !p.cdf) {
            throw Error(ErrorCode::InvalidSupport, "infinite upper endpoint needs a closed-form survival");
        }
        eff_lo_ = p.support.lower_infinite() ? clip_lower(prof) : p.support.lo;
        eff_hi_ = p.support.upper_infinite() ? clip_upper(prof) : p.support.hi;
        if (!(eff_lo_ < eff_hi_)) {
            throw Error(ErrorCode::InvalidSupport, "effective support is empty");
        }
    }

    const SupportInterval& support() const { return parts_->support; }
    const std::string& label() const { return parts_->label; }
    double effective_lo() const { return eff_lo_; }
    double effective_hi() const { return eff_hi_; }

    double pdf(double x) const {
        if (x < support().lo || x > support().hi) {
            return 0.0;
        }
        return parts_->pdf(x);
    }

    double log_pdf(double x) const {
        if (x < support().lo || x > support().hi) {
            return -kInf;
        }
        return parts_->log_pdf(x);
    }

    bool has_cdf() const { return static_cast<bool>(parts_->cdf); }
    bool has_survival() const { return static_cast<bool>(parts_->survival); }
    bool has_score() const { return static_cast<bool>(parts_->score); }
    bool has_log_curvature() const { return static_cast<bool>(parts_->log_curvature); }

    const DensityParts& parts() const { return *parts_; }

    /// Largest finite-difference step that keeps x +/- 2h inside the support.
    double safe_step(double x, const ToleranceProfile& prof) const {
        double h = numerics::step_for(x, prof);
        const auto& s = support();
        if (!s.lower_infinite()) {
            h = std::min(h, 0.25 * (x - s.lo));
        }
        if (!s.upper_infinite()) {
            h = std::min(h, 0.25 * (s.hi - x));
        }
        if (!(h > 0)) {
            throw Error(ErrorCode::NonFiniteEvaluation, "x = " + std::to_string(x) + " is on the support edge");
        }
        return h;
    }

private:
    double closed_cdf(double x) const {
        return parts_->cdf ? parts_->cdf(x) : 1.0 - parts_->survival(x);
    }
    double closed_survival(double x) const {
        return parts_->survival ? parts_->survival(x) : 1.0 - parts_->cdf(x);
    }

    double clip_lower(const ToleranceProfile& prof) const {
        const double target = support().clip_mass;
        double inner = std::isfinite(support().hi) ? support().hi - 1.0 : 0.0;
        double step = 1.0;
        while (closed_cdf(inner) <= target) {
            inner += step;
            step *= 2.0;
        }
        double outer = inner - 1.0;
        step = 1.0;
        while (closed_cdf(outer) > target) {
            outer -= step;
            step *= 2.0;
            if (!std::isfinite(outer)) {
                throw Error(ErrorCode::InvalidSupport, "could not bracket lower clip point");
            }
        }
        return numerics::find_root([this, target](double x) { return closed_cdf(x) - target; }, outer, inner,
                                   prof);
    }

    double clip_upper(const ToleranceProfile& prof) const {
        const double target = support().clip_mass;
        double inner = std::isfinite(support().lo) ? support().lo + 1.0 : 0.0;
        if (std::isfinite(eff_lo_)) {
            inner = std::max(inner, eff_lo_);
        }
        double step = 1.0;
        while (closed_survival(inner) <= target) {
            inner -= step;
            step *= 2.0;
        }
        double outer = inner + 1.0;
        step = 1.0;
        while (closed_survival(outer) > target) {
            outer += step;
            step *= 2.0;
            if (!std::isfinite(outer)) {
                throw Error(ErrorCode::InvalidSupport, "could not bracket upper clip point");
            }
        }
        return numerics::find_root([this, target](double x) { return closed_survival(x) - target; }, inner,
                                   outer, prof);
    }

    std::shared_ptr<const DensityParts> parts_;
    double eff_lo_ = 0.0;
    double eff_hi_ = 0.0;
};

namespace distributions {

enum class Family { Normal, Exponential, Uniform, Logistic, Laplace, TruncNormal };

inline std::string_view family_name(Family f) {
    switch (f) {
    case Family::Normal: return "normal";
    case Family::Exponential: return "exponential";
    case Family::Uniform: return "uniform";
    case Family::Logistic: return "logistic";
    case Family::Laplace: return "laplace";
    case Family::TruncNormal: return "truncnormal";
    }
    return "unknown";
}

inline std::optional<Family> parse_family(std::string_view name) {
    for (Family f : {Family::Normal, Family::Exponential, Family::Uniform, Family::Logistic, Family::Laplace,
                     Family::TruncNormal}) {
        if (family_name(f) == name) {
            return f;
        }
    }
    return std::nullopt;
}

inline std::size_t family_arity(Family f) {
    switch (f) {
    case Family::Exponential: return 1;
    case Family::TruncNormal: return 4;
    default: return 2;
    }
}

inline std::string format_params(const std::vector<double>& params) {
    std::string out;
    for (std::size_t i = 0; i < params.size(); ++i) {
        char buf[32];
        auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), params[i]);
        out.append(buf, end);
        if (i + 1 < params.size()) {
            out += ',';
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// truncated normal closed forms

struct TruncNormalParams {
    double mu;
    double sigma;
    double a;
    double b;
    double alpha;
    double beta;
    double mass; // Phi(beta) - Phi(alpha)

    static TruncNormalParams make(double mu, double sigma, double a, double b) {
        if (!std::isfinite(mu) || !(sigma > 0) || !std::isfinite(sigma) || !std::isfinite(a) ||
            !std::isfinite(b) || !(a < b)) {
            throw Error(ErrorCode::InvalidParams, "truncated normal needs sigma > 0 and finite a < b");
        }
        const double alpha = (a - mu) / sigma;
        const double beta = (b - mu) / sigma;
        // difference on whichever side keeps the smaller tail probabilities
        const double mass = alpha > 0 ? normal::survival(alpha) - normal::survival(beta)
                                      : normal::cdf(beta) - normal::cdf(alpha);
        if (!(mass > 0)) {
            throw Error(ErrorCode::ZeroMassWindow, "window carries no normal mass");
        }
        return {mu, sigma, a, b, alpha, beta, mass};
    }
};

inline void require_in_window(const TruncNormalParams& p, double x) {
    if (!(x >= p.a && x <= p.b)) {
        throw Error(ErrorCode::OutOfWindow, "x = " + std::to_string(x) + " outside [a, b]");
    }
}

inline double trunc_normal_cdf(const TruncNormalParams& p, double x) {
    require_in_window(p, x);
    if (x == p.a) {
        return 0.0;
    }
    if (x == p.b) {
        return 1.0;
    }
    const double xi = (x - p.mu) / p.sigma;
    const double num = p.alpha > 0 ? normal::survival(p.alpha) - normal::survival(xi)
                                   : normal::cdf(xi) - normal::cdf(p.alpha);
    return std::clamp(num / p.mass, 0.0, 1.0);
}

inline double trunc_normal_survival(const TruncNormalParams& p, double x) {
    require_in_window(p, x);
    if (x == p.a) {
        return 1.0;
    }
    if (x == p.b) {
        return 0.0;
    }
    const double xi = (x - p.mu) / p.sigma;
    const double num = p.alpha > 0 ? normal::survival(xi) - normal::survival(p.beta)
                                   : normal::cdf(p.beta) - normal::cdf(xi);
    return std::clamp(num / p.mass, 0.0, 1.0);
}

inline double trunc_normal_pdf(const TruncNormalParams& p, double x) {
    require_in_window(p, x);
    const double xi = (x - p.mu) / p.sigma;
    return normal::pdf(xi) / (p.sigma * p.mass);
}

// ---------------------------------------------------------------------------
// built-in families

inline SmoothDensity make_builtin(Family family, const std::vector<double>& params, double clip_mass = 1e-6,
                                  const ToleranceProfile& prof = {}) {
    if (params.size() != family_arity(family)) {
        throw Error(ErrorCode::InvalidParams, std::string(family_name(family)) + " expects " +
                                                  std::to_string(family_arity(family)) + " parameters");
    }
    for (double v : params) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::InvalidParams, "parameters must be finite");
        }
    }
    const std::string label = std::string(family_name(family)) + ":" + format_params(params);
    DensityParts d;
    d.label = label;
    switch (family) {
    case Family::Normal: {
        const double mu = params[0];
        const double sigma = params[1];
        if (!(sigma > 0)) {
            throw Error(ErrorCode::InvalidParams, "normal sigma must be positive");
        }
        d.support = {-kInf, kInf, clip_mass};
        d.pdf = [=](double x) { return normal::pdf((x - mu) / sigma) / sigma; };
        d.log_pdf = [=](double x) { return normal::log_pdf((x - mu) / sigma) - std::log(sigma); };
        d.cdf = [=](double x) { return normal::cdf((x - mu) / sigma); };
        d.survival = [=](double x) { return normal::survival((x - mu) / sigma); };
        d.score = [=](double x) { return -(x - mu) / (sigma * sigma); };
        d.log_curvature = [=](double) { return -1.0 / (sigma * sigma); };
        break;
    }
    case Family::Exponential: {
        const double rate = params[0];
        if (!(rate > 0)) {
            throw Error(ErrorCode::InvalidParams, "exponential rate must be positive");
        }
        d.support = {0.0, kInf, clip_mass};
        d.pdf = [=](double x) { return rate * std::exp(-rate * x); };
        d.log_pdf = [=](double x) { return std::log(rate) - rate * x; };
        d.cdf = [=](double x) { return x <= 0 ? 0.0 : -std::expm1(-rate * x); };
        d.survival = [=](double x) { return x <= 0 ? 1.0 : std::exp(-rate * x); };
        d.score = [=](double) { return -rate; };
        d.log_curvature = [](double) { return 0.0; };
        break;
    }
    case Family::Uniform: {
        const double a = params[0];
        const double b = params[1];
        if (!(a < b)) {
            throw Error(ErrorCode::InvalidParams, "uniform needs a < b");
        }
        const double width = b - a;
        d.support = {a, b, 0.0};
        d.pdf = [=](double) { return 1.0 / width; };
        d.log_pdf = [=](double) { return -std::log(width); };
        d.cdf = [=](double x) { return std::clamp((x - a) / width, 0.0, 1.0); };
        d.survival = [=](double x) { return std::clamp((b - x) / width, 0.0, 1.0); };
        d.score = [](double) { return 0.0; };
        d.log_curvature = [](double) { return 0.0; };
        break;
    }
    case Family::Logistic: {
        const double mu = params[0];
        const double s = params[1];
        if (!(s > 0)) {
            throw Error(ErrorCode::InvalidParams, "logistic scale must be positive");
        }
        d.support = {-kInf, kInf, clip_mass};
        auto log_pdf = [=](double x) {
            const double z = std::abs((x - mu) / s);
            return -z - 2.0 * std::log1p(std::exp(-z)) - std::log(s);
        };
        d.log_pdf = log_pdf;
        d.pdf = [=](double x) { return std::exp(log_pdf(x)); };
        d.cdf = [=](double x) { return 1.0 / (1.0 + std::exp(-(x - mu) / s)); };
        d.survival = [=](double x) { return 1.0 / (1.0 + std::exp((x - mu) / s)); };
        d.score = [=](double x) { return -std::tanh(0.5 * (x - mu) / s) / s; };
        d.log_curvature = [=](double x) {
            const double c = std::cosh(0.5 * (x - mu) / s);
            return -0.5 / (s * s * c * c);
        };
        break;
    }
    case Family::Laplace: {
        const double mu = params[0];
        const double b = params[1];
        if (!(b > 0)) {
            throw Error(ErrorCode::InvalidParams, "laplace scale must be positive");
        }
        d.support = {-kInf, kInf, clip_mass};
        d.log_pdf = [=](double x) { return -std::abs(x - mu) / b - std::log(2.0 * b); };
        d.pdf = [=](double x) { return std::exp(-std::abs(x - mu) / b) / (2.0 * b); };
        d.cdf = [=](double x) {
            return x < mu ? 0.5 * std::exp((x - mu) / b) : 1.0 - 0.5 * std::exp(-(x - mu) / b);
        };
        d.survival = [=](double x) {
            return x < mu ? 1.0 - 0.5 * std::exp((x - mu) / b) : 0.5 * std::exp(-(x - mu) / b);
        };
        // not differentiable at mu; the one-sided values are reported there
        d.score = [=](double x) { return x < mu ? 1.0 / b : -1.0 / b; };
        d.log_curvature = [](double) { return 0.0; };
        d.kinks = {mu};
        break;
    }
    case Family::TruncNormal: {
        const auto p = TruncNormalParams::make(params[0], params[1], params[2], params[3]);
        d.support = {p.a, p.b, 0.0};
        d.pdf = [=](double x) { return normal::pdf((x - p.mu) / p.sigma) / (p.sigma * p.mass); };
        d.log_pdf = [=](double x) {
            return normal::log_pdf((x - p.mu) / p.sigma) - std::log(p.sigma * p.mass);
        };
        d.cdf = [=](double x) { return trunc_normal_cdf(p, std::clamp(x, p.a, p.b)); };
        d.survival = [=](double x) { return trunc_normal_survival(p, std::clamp(x, p.a, p.b)); };
        d.score = [=](double x) { return -(x - p.mu) / (p.sigma * p.sigma); };
        d.log_curvature = [=](double) { return -1.0 / (p.sigma * p.sigma); };
        break;
    }
    }
    return SmoothDensity(std::move(d), prof);
}

// ---------------------------------------------------------------------------
// generic evaluation

inline double cdf(const SmoothDensity& d, double x, const ToleranceProfile& prof = {}) {
    const auto& s = d.support();
    if (x <= s.lo) {
        return 0.0;
    }
    if (x >= s.hi) {
        return 1.0;
    }
    const auto& p = d.parts();
    if (p.cdf) {
        return std::clamp(p.cdf(x), 0.0, 1.0);
    }
    if (p.survival) {
        return std::clamp(1.0 - p.survival(x), 0.0, 1.0);
    }
    const double v = numerics::integrate_pieces([&d](double t) { return d.pdf(t); }, d.effective_lo(),
                                                std::min(x, d.effective_hi()), p.kinks, prof);
    return std::clamp(v, 0.0, 1.0);
}

/// Upper integral computed directly by quadrature, independent of any closed form.
inline double survival_by_quadrature(const SmoothDensity& d, double x, const ToleranceProfile& prof = {}) {
    const double lo = std::max(x, d.effective_lo());
    const double v =
        numerics::integrate_pieces([&d](double t) { return d.pdf(t); }, lo, d.effective_hi(), d.parts().kinks, prof);
    return std::clamp(v, 0.0, 1.0);
}

inline double survival(const SmoothDensity& d, double x, const ToleranceProfile& prof = {}) {
    const auto& s = d.support();
    if (x <= s.lo) {
        return 1.0;
    }
    if (x >= s.hi) {
        return 0.0;
    }
    const auto& p = d.parts();
    if (p.survival) {
        return std::clamp(p.survival(x), 0.0, 1.0);
    }
    if (p.cdf) {
        return std::clamp(1.0 - p.cdf(x), 0.0, 1.0);
    }
    return survival_by_quadrature(d, x, prof);
}

/// (log f)' from the closed form when present, else central differences on log f.
inline double score(const SmoothDensity& d, double x, const ToleranceProfile& prof = {}) {
    if (d.has_score()) {
        return d.parts().score(x);
    }
    return numerics::central_difference([&d](double t) { return d.log_pdf(t); }, x, 1, d.safe_step(x, prof));
}

/// (log f)'' from the closed form when present, else central differences on log f.
inline double log_second_derivative(const SmoothDensity& d, double x, const ToleranceProfile& prof = {}) {
    if (d.has_log_curvature()) {
        return d.parts().log_curvature(x);
    }
    return numerics::central_difference([&d](double t) { return d.log_pdf(t); }, x, 2, d.safe_step(x, prof));
}

inline double pdf_derivative(const SmoothDensity& d, double x, const ToleranceProfile& prof = {}) {
    if (d.has_score()) {
        return d.pdf(x) * d.parts().score(x);
    }
    return numerics::central_difference([&d](double t) { return d.pdf(t); }, x, 1, d.safe_step(x, prof));
}

inline double pdf_second_derivative(const SmoothDensity& d, double x, const ToleranceProfile& prof = {}) {
    if (d.has_score() && d.has_log_curvature()) {
        const double s = d.parts().score(x);
        return d.pdf(x) * (d.parts().log_curvature(x) + s * s);
    }
    return numerics::central_difference([&d](double t) { return d.pdf(t); }, x, 2, d.safe_step(x, prof));
}

/// Inverse cdf for u in (0, 1).
inline double quantile(const SmoothDensity& d, double u, const ToleranceProfile& prof = {}) {
    if (!(u > 0 && u < 1)) {
        throw Error(ErrorCode::InvalidParams, "quantile level must lie in (0, 1)");
    }
    double lo = d.effective_lo();
    double hi = d.effective_hi();
    const double span = hi - lo;
    while (cdf(d, lo, prof) > u) {
        lo -= span;
    }
    while (cdf(d, hi, prof) < u) {
        hi += span;
    }
    RealFn target;
    if (u > 0.5) {
        target = [&d, &prof, u](double x) { return (1.0 - u) - survival(d, x, prof); };
    } else {
        target = [&d, &prof, u](double x) { return cdf(d, x, prof) - u; };
    }
    ToleranceProfile tight = prof;
    tight.slack = 0.0;
    return numerics::find_root(target, lo, hi, tight);
}

/// Density proportional to exp(log_fn) on a finite interval, normalized by quadrature.
/// Optional closed-form score and curvature of log_fn carry over unchanged.
inline SmoothDensity from_log_density(double lo, double hi, RealFn log_fn, std::string label, RealFn score_fn = {},
                                      RealFn curvature_fn = {}, const ToleranceProfile& prof = {},
                                      std::vector<double> kinks = {}) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw Error(ErrorCode::InvalidSupport, "custom densities need a finite interval lo < hi");
    }
    double peak = -kInf;
    for (double x : numerics::uniform_grid(lo, hi, 257)) {
        const double v = log_fn(x);
        if (std::isfinite(v)) {
            peak = std::max(peak, v);
        }
    }
    if (!std::isfinite(peak)) {
        throw Error(ErrorCode::ZeroMassWindow, "log density is not finite anywhere on the grid");
    }
    const double scaled = numerics::integrate_pieces([&](double x) { return std::exp(log_fn(x) - peak); }, lo, hi,
                                                     kinks, prof, 1e-13);
    if (!(scaled > 0) || !std::isfinite(scaled)) {
        throw Error(ErrorCode::ZeroMassWindow, "density has no mass on the window");
    }
    const double log_norm = peak + std::log(scaled);
    DensityParts d;
    d.support = {lo, hi, 0.0};
    d.log_pdf = [log_fn, log_norm](double x) { return log_fn(x) - log_norm; };
    d.pdf = [log_fn, log_norm](double x) { return std::exp(log_fn(x) - log_norm); };
    d.score = std::move(score_fn);
    d.log_curvature = std::move(curvature_fn);
    for (double k : kinks) {
        if (k > lo && k < hi) {
            d.kinks.push_back(k);
        }
    }
    d.label = std::move(label);
    return SmoothDensity(std::move(d), prof);
}

/// Conditional density on (lo, hi) intersected with the support of d.
inline SmoothDensity truncate(const SmoothDensity& d, double lo, double hi, const ToleranceProfile& prof = {}) {
    if (std::isnan(lo) || std::isnan(hi) || !(lo < hi)) {
        throw Error(ErrorCode::InvalidParams, "truncation window needs lo < hi");
    }
    const auto& s = d.support();
    const double new_lo = std::max(lo, s.lo);
    const double new_hi = std::min(hi, s.hi);
    if (!(new_lo < new_hi)) {
        throw Error(ErrorCode::ZeroMassWindow, "window does not meet the support");
    }
    const double below = std::isinf(new_lo) ? 0.0 : cdf(d, new_lo, prof);
    const double above = std::isinf(new_hi) ? 0.0 : survival(d, new_hi, prof);
    const double mass = 1.0 - below - above;
    if (!(mass > prof.slack)) {
        throw Error(ErrorCode::ZeroMassWindow, "window mass " + std::to_string(mass) + " is below slack");
    }
    const double log_mass = std::log(mass);
    DensityParts t;
    t.support = {new_lo, new_hi, s.clip_mass};
    if (t.support.bounded()) {
        t.support.clip_mass = 0.0;
    }
    t.pdf = [d, mass](double x) { return d.pdf(x) / mass; };
    t.log_pdf = [d, log_mass](double x) { return d.log_pdf(x) - log_mass; };
    t.cdf = [d, below, mass, prof](double x) { return (cdf(d, x, prof) - below) / mass; };
    t.survival = [d, above, mass, prof](double x) { return (survival(d, x, prof) - above) / mass; };
    t.score = d.parts().score;
    t.log_curvature = d.parts().log_curvature;
    for (double k : d.parts().kinks) {
        if (k > new_lo && k < new_hi) {
            t.kinks.push_back(k);
        }
    }
    char buf[64];
    auto [end1, ec1] = std::to_chars(buf, buf + 32, new_lo);
    *end1 = ',';
    auto [end2, ec2] = std::to_chars(end1 + 1, buf + sizeof(buf), new_hi);
    t.label = "trunc[" + std::string(buf, end2) + "](" + d.label() + ")";
    return SmoothDensity(std::move(t), prof);
}

} // namespace distributions
} // namespace lcv

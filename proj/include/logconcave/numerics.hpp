#pragma once

#include "logconcave/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

namespace lcv {

using RealFn = std::function<double(double)>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Numerical knobs shared by every module.
///  - fd_step: relative finite-difference step, h = fd_step * max(1, |x|)
///  - quad_tol: absolute quadrature error target
///  - root_tol: bracket width target for root finding
///  - slack: tolerance for sign classification
struct ToleranceProfile {
    double fd_step = 1e-3;
    double quad_tol = 1e-10;
    double root_tol = 1e-12;
    double slack = 1e-7;

    void validate() const {
        if (!(fd_step > 0) || !(quad_tol > 0) || !(root_tol > 0) || !(slack >= 0) ||
            !std::isfinite(fd_step) || !std::isfinite(quad_tol) || !std::isfinite(root_tol) ||
            !std::isfinite(slack)) {
            throw Error(ErrorCode::InvalidParams, "tolerance profile fields must be positive (slack >= 0)");
        }
    }
};

/// Open interval (lo, hi). Infinite endpoints are clipped at the quantile
/// carrying clip_mass of tail probability.
struct SupportInterval {
    double lo = -kInf;
    double hi = kInf;
    double clip_mass = 1e-6;

    bool lower_infinite() const { return std::isinf(lo); }
    bool upper_infinite() const { return std::isinf(hi); }
    bool bounded() const { return !lower_infinite() && !upper_infinite(); }
    bool contains(double x) const { return x > lo && x < hi; }

    void validate() const {
        if (std::isnan(lo) || std::isnan(hi) || !(lo < hi)) {
            throw Error(ErrorCode::InvalidSupport, "support requires lo < hi");
        }
        if (!(clip_mass >= 0.0 && clip_mass <= 1e-6)) {
            throw Error(ErrorCode::InvalidSupport, "clip_mass must lie in [0, 1e-6]");
        }
        if (!bounded() && !(clip_mass > 0.0)) {
            throw Error(ErrorCode::InvalidSupport, "infinite support needs clip_mass > 0");
        }
    }
};

namespace numerics {

inline double checked_eval(const RealFn& fn, double x) {
    const double v = fn(x);
    if (!std::isfinite(v)) {
        throw Error(ErrorCode::NonFiniteEvaluation, "non-finite value at x = " + std::to_string(x));
    }
    return v;
}

/// Central difference with an explicit absolute step.
inline double central_difference(const RealFn& fn, double x, int order, double h) {
    if (order != 1 && order != 2) {
        throw Error(ErrorCode::InvalidParams, "derivative order must be 1 or 2");
    }
    if (!(h > 0)) {
        throw Error(ErrorCode::InvalidParams, "finite-difference step must be positive");
    }
    // round the step so that x +/- h is exact in floating point
    volatile double xp = x + h;
    h = xp - x;
    const double fp = checked_eval(fn, x + h);
    const double fm = checked_eval(fn, x - h);
    if (order == 1) {
        return (fp - fm) / (2.0 * h);
    }
    const double f0 = checked_eval(fn, x);
    return (fp - 2.0 * f0 + fm) / (h * h);
}

inline double step_for(double x, const ToleranceProfile& prof) {
    return prof.fd_step * std::max(1.0, std::abs(x));
}

inline double differentiate(const RealFn& fn, double x, int order, const ToleranceProfile& prof = {}) {
    return central_difference(fn, x, order, step_for(x, prof));
}

namespace detail {

// Kronrod 15-point nodes on [0, 1]; odd indices carry the embedded 7-point Gauss rule.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

inline Segment gauss_kronrod(const RealFn& fn, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = checked_eval(fn, center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = checked_eval(fn, center - dx);
        const double f2 = checked_eval(fn, center + dx);
        kronrod += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) {
            gauss += kWg[j / 2] * (f1 + f2);
        }
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

inline constexpr std::size_t kMaxSegments = std::size_t{1} << 20;
inline constexpr std::size_t kInitialSegments = 8;

inline double adaptive(const RealFn& fn, double lo, double hi, double abs_tol, double rel_tol) {
    std::priority_queue<Segment> heap;
    double total = 0.0;
    double error = 0.0;
    // a few initial pieces make it unlikely that a kink hides from every error estimate
    for (std::size_t i = 0; i < kInitialSegments; ++i) {
        const double a = lo + (hi - lo) * static_cast<double>(i) / kInitialSegments;
        const double b = i + 1 == kInitialSegments ? hi : lo + (hi - lo) * static_cast<double>(i + 1) / kInitialSegments;
        const Segment seg = gauss_kronrod(fn, a, b);
        total += seg.value;
        error += seg.error;
        heap.push(seg);
    }
    std::size_t count = kInitialSegments;
    // segments too narrow to split are parked here with their error still counted
    double frozen_error = 0.0;
    double frozen_value = 0.0;
    while (error > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (heap.empty() || count >= kMaxSegments) {
            throw Error(ErrorCode::ToleranceNotMet,
                        "quadrature budget exhausted, error estimate " + std::to_string(error));
        }
        Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b) ||
            (worst.b - worst.a) < 64.0 * std::numeric_limits<double>::epsilon() *
                                      std::max(std::abs(worst.a), std::abs(worst.b))) {
            frozen_error += worst.error;
            frozen_value += worst.value;
            if (heap.empty()) {
                error = frozen_error;
                if (error <= std::max(abs_tol, rel_tol * std::abs(total))) {
                    break;
                }
                throw Error(ErrorCode::ToleranceNotMet,
                            "quadrature cannot refine below floating-point resolution");
            }
            continue;
        }
        const Segment left = gauss_kronrod(fn, worst.a, mid);
        const Segment right = gauss_kronrod(fn, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++count;
        // resum at powers of two to wash out drift in the running totals
        if ((count & (count - 1)) == 0) {
            std::priority_queue<Segment> copy = heap;
            total = frozen_value;
            error = frozen_error;
            while (!copy.empty()) {
                total += copy.top().value;
                error += copy.top().error;
                copy.pop();
            }
        }
    }
    return total;
}

} // namespace detail

/// Adaptive Gauss-Kronrod (7/15) quadrature by interval bisection. Infinite
/// endpoints are mapped onto (0, 1] through x = a + (1 - u) / u.
/// Terminates when the error estimate is below max(quad_tol, rel_tol * |I|).
inline double integrate(const RealFn& fn, double lo, double hi, const ToleranceProfile& prof = {},
                        double rel_tol = 0.0) {
    if (std::isnan(lo) || std::isnan(hi)) {
        throw Error(ErrorCode::InvalidParams, "integration bounds must not be NaN");
    }
    if (lo == hi) {
        return 0.0;
    }
    if (lo > hi) {
        return -integrate(fn, hi, lo, prof, rel_tol);
    }
    const double tol = prof.quad_tol;
    if (std::isinf(lo) && std::isinf(hi)) {
        return integrate(fn, -kInf, 0.0, prof, rel_tol) + integrate(fn, 0.0, kInf, prof, rel_tol);
    }
    if (std::isinf(hi)) {
        RealFn mapped = [&fn, lo](double u) {
            const double t = (1.0 - u) / u;
            return fn(lo + t) / (u * u);
        };
        return detail::adaptive(mapped, 0.0, 1.0, tol, rel_tol);
    }
    if (std::isinf(lo)) {
        RealFn mapped = [&fn, hi](double u) {
            const double t = (1.0 - u) / u;
            return fn(hi - t) / (u * u);
        };
        return detail::adaptive(mapped, 0.0, 1.0, tol, rel_tol);
    }
    return detail::adaptive(fn, lo, hi, tol, rel_tol);
}

/// As integrate, with the interval split at the given interior points.
/// Use this when fn has kinks: an estimate of |K15 - G7| cannot see a kink
/// that sits close to the end of a segment.
inline double integrate_pieces(const RealFn& fn, double lo, double hi, std::vector<double> breaks,
                               const ToleranceProfile& prof = {}, double rel_tol = 0.0) {
    std::sort(breaks.begin(), breaks.end());
    double total = 0.0;
    double a = lo;
    for (double b : breaks) {
        if (b > a && b < hi) {
            total += integrate(fn, a, b, prof, rel_tol);
            a = b;
        }
    }
    return total + integrate(fn, a, hi, prof, rel_tol);
}

struct RootResult {
    double root;
    double lo;
    double hi;
    double f_lo;
    double f_hi;
    int iterations;
};

/// Bracketed root search: secant steps inside the bracket, with a forced
/// bisection whenever the previous step failed to halve the bracket.
inline RootResult bracket_root(const RealFn& fn, double lo, double hi, const ToleranceProfile& prof = {}) {
    if (std::isnan(lo) || std::isnan(hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw Error(ErrorCode::InvalidParams, "root bracket must be finite");
    }
    if (lo > hi) {
        std::swap(lo, hi);
    }
    double flo = checked_eval(fn, lo);
    double fhi = checked_eval(fn, hi);
    if (flo == 0.0) {
        return {lo, lo, lo, flo, flo, 0};
    }
    if (fhi == 0.0) {
        return {hi, hi, hi, fhi, fhi, 0};
    }
    if (std::signbit(flo) == std::signbit(fhi)) {
        const bool lo_ok = std::abs(flo) <= prof.slack;
        const bool hi_ok = std::abs(fhi) <= prof.slack;
        if (lo_ok || hi_ok) {
            const bool pick_lo = lo_ok && (!hi_ok || std::abs(flo) <= std::abs(fhi));
            return pick_lo ? RootResult{lo, lo, lo, flo, flo, 0} : RootResult{hi, hi, hi, fhi, fhi, 0};
        }
        throw Error(ErrorCode::NoSignChange, "f(" + std::to_string(lo) + ") and f(" + std::to_string(hi) +
                                                 ") share a sign");
    }

    int iterations = 0;
    bool force_bisect = false;
    constexpr int kMaxIterations = 4000;
    while (iterations < kMaxIterations) {
        const double width = hi - lo;
        const double floor = 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi));
        if (width <= std::max(prof.root_tol, floor)) {
            break;
        }
        double x = 0.5 * (lo + hi);
        if (!force_bisect) {
            const double secant = hi - fhi * (hi - lo) / (fhi - flo);
            if (secant > lo && secant < hi) {
                x = secant;
            }
        }
        if (!(x > lo && x < hi)) {
            break;
        }
        const double fx = checked_eval(fn, x);
        ++iterations;
        if (fx == 0.0) {
            return {x, x, x, fx, fx, iterations};
        }
        if (std::signbit(fx) == std::signbit(flo)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        force_bisect = (hi - lo) > 0.5 * width;
    }
    const double root = std::abs(flo) <= std::abs(fhi) ? lo : hi;
    return {root, lo, hi, flo, fhi, iterations};
}

inline double find_root(const RealFn& fn, double lo, double hi, const ToleranceProfile& prof = {}) {
    return bracket_root(fn, lo, hi, prof).root;
}

/// n Chebyshev points (ascending) on [lo + m, hi - m], with m = margin * (hi - lo).
inline std::vector<double> chebyshev_grid(double lo, double hi, std::size_t n, double margin = 1e-4) {
    if (n == 0 || !(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw Error(ErrorCode::InvalidParams, "chebyshev grid needs finite lo < hi and n > 0");
    }
    const double m = margin * (hi - lo);
    const double a = lo + m;
    const double b = hi - m;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::vector<double> grid(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double theta = std::numbers::pi * (2.0 * static_cast<double>(k) + 1.0) / (2.0 * static_cast<double>(n));
        grid[k] = mid - half * std::cos(theta);
    }
    return grid;
}

inline std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
    if (n < 2) {
        return {lo};
    }
    std::vector<double> grid(n);
    for (std::size_t k = 0; k < n; ++k) {
        grid[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    }
    grid.back() = hi;
    return grid;
}

} // namespace numerics
} // namespace lcv

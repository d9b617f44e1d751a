#pragma once

#include "logconcave/distributions.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lcv::distributions {

struct TableRow {
    double x;
    double f;
};

/// Density interpolated from samples (x_i, f_i).
///
/// The interpolant lives in log space: a C^1 piecewise-quadratic spline with
/// one extra knot per interval, placed so that the slope passes through the
/// secant slope between the two node slopes whenever the secant lies between
/// them. Node slopes come from the parabola through three neighbours, which
/// is a convex combination of the adjacent secants. Consequences:
///   - the density is positive everywhere on the grid;
///   - log-linear and log-quadratic data are reproduced exactly;
///   - concave (convex) log data give a concave (convex) interpolant.
class TabulatedDensity {
public:
    static constexpr std::size_t kMinRows = 4;
    static constexpr double kMassTolerance = 0.05;

    TabulatedDensity(std::vector<TableRow> rows, std::vector<std::size_t> line_numbers,
                     const ToleranceProfile& prof = {}) {
        if (line_numbers.size() != rows.size()) {
            line_numbers.resize(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i) {
                line_numbers[i] = i + 1;
            }
        }
        if (rows.size() < kMinRows) {
            throw TableError(0, "need at least " + std::to_string(kMinRows) + " rows, got " +
                                    std::to_string(rows.size()));
        }
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!std::isfinite(rows[i].x) || !std::isfinite(rows[i].f)) {
                throw TableError(line_numbers[i], "non-finite value");
            }
            if (!(rows[i].f > 0)) {
                throw TableError(line_numbers[i], "density value must be positive");
            }
            if (i > 0 && !(rows[i].x > rows[i - 1].x)) {
                throw TableError(line_numbers[i], "x must be strictly increasing");
            }
        }
        auto spline = std::make_shared<Spline>();
        spline->build(rows);
        spline->integrate_pieces(prof);
        raw_integral_ = spline->total;
        if (std::abs(raw_integral_ - 1.0) > kMassTolerance) {
            throw TableError(0, "raw integral " + std::to_string(raw_integral_) + " deviates from 1 by more than 5%");
        }
        rows_ = std::move(rows);

        const double log_norm = std::log(spline->total);
        DensityParts d;
        d.support = {rows_.front().x, rows_.back().x, 0.0};
        d.log_pdf = [spline, log_norm](double x) { return spline->value(x) - log_norm; };
        d.pdf = [spline, log_norm](double x) { return std::exp(spline->value(x) - log_norm); };
        d.score = [spline](double x) { return spline->slope(x); };
        d.log_curvature = [spline](double x) { return spline->curvature(x); };
        d.cdf = [spline](double x) { return spline->lower_mass(x) / spline->total; };
        d.survival = [spline](double x) { return spline->upper_mass(x) / spline->total; };
        d.label = "tabulated(" + std::to_string(rows_.size()) + " rows)";
        density_ = SmoothDensity(std::move(d), prof);
    }

    explicit TabulatedDensity(std::vector<TableRow> rows, const ToleranceProfile& prof = {})
        : TabulatedDensity(std::move(rows), {}, prof) {}

    const SmoothDensity& density() const { return density_; }
    const std::vector<TableRow>& rows() const { return rows_; }
    double raw_integral() const { return raw_integral_; }

private:
    struct Piece {
        double x0;
        double h;
        double z0;
        double s0;    // slope at x0
        double s1;    // slope at x0 + h
        double knot;  // offset of the interior knot in [0, h]
        double mid;   // slope at the interior knot
    };

    struct Spline {
        std::vector<Piece> pieces;
        std::vector<double> cum_lower; // unnormalized mass left of piece i
        std::vector<double> cum_upper; // unnormalized mass right of piece i
        std::vector<double> piece_mass;
        double total = 0.0;

        void build(const std::vector<TableRow>& rows) {
            const std::size_t n = rows.size();
            std::vector<double> z(n);
            for (std::size_t i = 0; i < n; ++i) {
                z[i] = std::log(rows[i].f);
            }
            std::vector<double> h(n - 1);
            std::vector<double> delta(n - 1);
            for (std::size_t i = 0; i + 1 < n; ++i) {
                h[i] = rows[i + 1].x - rows[i].x;
                delta[i] = (z[i + 1] - z[i]) / h[i];
            }
            std::vector<double> s(n);
            for (std::size_t i = 1; i + 1 < n; ++i) {
                s[i] = (h[i] * delta[i - 1] + h[i - 1] * delta[i]) / (h[i - 1] + h[i]);
            }
            s[0] = delta[0] + (delta[0] - delta[1]) * h[0] / (h[0] + h[1]);
            s[n - 1] = delta[n - 2] + (delta[n - 2] - delta[n - 3]) * h[n - 2] / (h[n - 3] + h[n - 2]);

            pieces.resize(n - 1);
            for (std::size_t i = 0; i + 1 < n; ++i) {
                Piece p{rows[i].x, h[i], z[i], s[i], s[i + 1], 0.5 * h[i], 0.0};
                const double d = delta[i];
                const bool between = (s[i] - d) * (d - s[i + 1]) >= 0.0;
                if (between && s[i] != s[i + 1]) {
                    p.mid = d;
                    p.knot = std::clamp(h[i] * (d - s[i + 1]) / (s[i] - s[i + 1]), 0.0, h[i]);
                } else {
                    p.mid = 2.0 * d - 0.5 * (s[i] + s[i + 1]);
                }
                pieces[i] = p;
            }
        }

        std::size_t locate(double x) const {
            auto it = std::upper_bound(pieces.begin(), pieces.end(), x,
                                       [](double v, const Piece& p) { return v < p.x0; });
            if (it == pieces.begin()) {
                return 0;
            }
            return std::min<std::size_t>(static_cast<std::size_t>(it - pieces.begin()) - 1, pieces.size() - 1);
        }

        static double eval(const Piece& p, double x) {
            const double t = x - p.x0;
            if (t <= p.knot) {
                const double c = p.knot > 0 ? (p.mid - p.s0) / (2.0 * p.knot) : 0.0;
                return p.z0 + t * (p.s0 + c * t);
            }
            const double za = p.z0 + 0.5 * (p.s0 + p.mid) * p.knot;
            const double u = t - p.knot;
            const double rest = p.h - p.knot;
            const double c = rest > 0 ? (p.s1 - p.mid) / (2.0 * rest) : 0.0;
            return za + u * (p.mid + c * u);
        }

        double value(double x) const { return eval(pieces[locate(x)], x); }

        double slope(double x) const {
            const Piece& p = pieces[locate(x)];
            const double t = x - p.x0;
            if (t <= p.knot && p.knot > 0) {
                return p.s0 + (p.mid - p.s0) * t / p.knot;
            }
            const double rest = p.h - p.knot;
            if (rest <= 0) {
                return p.mid;
            }
            return p.mid + (p.s1 - p.mid) * (t - p.knot) / rest;
        }

        double curvature(double x) const {
            const Piece& p = pieces[locate(x)];
            const double t = x - p.x0;
            if (t <= p.knot && p.knot > 0) {
                return (p.mid - p.s0) / p.knot;
            }
            const double rest = p.h - p.knot;
            return rest > 0 ? (p.s1 - p.mid) / rest : 0.0;
        }

        double partial(const Piece& p, double a, double b, const ToleranceProfile& prof) const {
            if (!(b > a)) {
                return 0.0;
            }
            // split at the interior knot so each integrand is exp(quadratic)
            const double k = p.x0 + p.knot;
            ToleranceProfile fine = prof;
            fine.quad_tol = 1e-300;
            auto fn = [&p](double x) { return std::exp(eval(p, x)); };
            double out = 0.0;
            if (a < k) {
                out += numerics::integrate(fn, a, std::min(b, k), fine, 1e-13);
            }
            if (b > k) {
                out += numerics::integrate(fn, std::max(a, k), b, fine, 1e-13);
            }
            return out;
        }

        void integrate_pieces(const ToleranceProfile& prof) {
            const std::size_t m = pieces.size();
            piece_mass.resize(m);
            for (std::size_t i = 0; i < m; ++i) {
                piece_mass[i] = partial(pieces[i], pieces[i].x0, pieces[i].x0 + pieces[i].h, prof);
            }
            cum_lower.assign(m + 1, 0.0);
            for (std::size_t i = 0; i < m; ++i) {
                cum_lower[i + 1] = cum_lower[i] + piece_mass[i];
            }
            cum_upper.assign(m + 1, 0.0);
            for (std::size_t i = m; i-- > 0;) {
                cum_upper[i] = cum_upper[i + 1] + piece_mass[i];
            }
            total = cum_lower[m];
        }

        double lower_mass(double x) const {
            if (x <= pieces.front().x0) {
                return 0.0;
            }
            const std::size_t i = locate(x);
            const Piece& p = pieces[i];
            return cum_lower[i] + partial(p, p.x0, std::min(x, p.x0 + p.h), {});
        }

        double upper_mass(double x) const {
            const Piece& last = pieces.back();
            if (x >= last.x0 + last.h) {
                return 0.0;
            }
            const std::size_t i = locate(x);
            const Piece& p = pieces[i];
            return cum_upper[i + 1] + partial(p, std::max(x, p.x0), p.x0 + p.h, {});
        }
    };

    std::vector<TableRow> rows_;
    double raw_integral_ = 0.0;
    SmoothDensity density_;
};

inline TabulatedDensity load_tabulated(std::vector<TableRow> rows, const ToleranceProfile& prof = {}) {
    return TabulatedDensity(std::move(rows), prof);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::optional<double> parse_real(std::string_view s) {
    s = trim(s);
    if (s.empty()) {
        return std::nullopt;
    }
    if (s.front() == '+') {
        s.remove_prefix(1);
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

inline std::string format_real(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

} // namespace detail

/// Parses the `x,f` CSV format. Errors carry the 1-based line of the offending row.
inline TabulatedDensity read_tabulated_csv(std::istream& in, const ToleranceProfile& prof = {}) {
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::vector<TableRow> rows;
    std::vector<std::size_t> lines;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view view = detail::trim(line);
        if (view.empty()) {
            continue;
        }
        if (!header_seen) {
            if (view != "x,f") {
                throw TableError(line_no, "expected header `x,f`");
            }
            header_seen = true;
            continue;
        }
        const auto comma = view.find(',');
        if (comma == std::string_view::npos || view.find(',', comma + 1) != std::string_view::npos) {
            throw TableError(line_no, "expected two comma-separated fields");
        }
        const auto x = detail::parse_real(view.substr(0, comma));
        const auto f = detail::parse_real(view.substr(comma + 1));
        if (!x || !f) {
            throw TableError(line_no, "could not parse a decimal real");
        }
        rows.push_back({*x, *f});
        lines.push_back(line_no);
    }
    if (!header_seen) {
        throw TableError(0, "empty input");
    }
    return TabulatedDensity(std::move(rows), std::move(lines), prof);
}

/// Samples the density at n equally spaced points across its effective support.
inline std::vector<TableRow> export_rows(const SmoothDensity& d, std::size_t n = 2001) {
    std::vector<TableRow> rows;
    rows.reserve(n);
    for (double x : numerics::uniform_grid(d.effective_lo(), d.effective_hi(), n)) {
        rows.push_back({x, d.pdf(x)});
    }
    return rows;
}

inline void write_tabulated_csv(std::ostream& out, const std::vector<TableRow>& rows) {
    out << "x,f\n";
    for (const auto& r : rows) {
        out << detail::format_real(r.x) << ',' << detail::format_real(r.f) << '\n';
    }
}

} // namespace lcv::distributions

#pragma once

#include "logconcave/logconcavity.hpp"
#include "logconcave/monopoly.hpp"
#include "logconcave/reliability.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace lcv::io {

using nlohmann::json;

/// Shortest-looking decimal at 12 significant digits, for report tables.
inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline json to_json(const ToleranceProfile& p) {
    return {{"fd_step", p.fd_step}, {"quad_tol", p.quad_tol}, {"root_tol", p.root_tol}, {"slack", p.slack}};
}

/// Infinite reals are not valid JSON numbers; they are written as strings.
inline json real(double v) {
    if (std::isfinite(v)) {
        return v;
    }
    if (std::isnan(v)) {
        return "nan";
    }
    return v > 0 ? "inf" : "-inf";
}

inline json to_json(const logconcavity::Certificate& c, const ToleranceProfile& prof) {
    json witnesses = json::array();
    for (const auto& w : c.witnesses) {
        witnesses.push_back({{"x", w.x}, {"criterion", logconcavity::to_string(w.criterion)}, {"value", real(w.value)}});
    }
    json per = json::object();
    json sup = json::object();
    for (std::size_t i = 0; i < 3; ++i) {
        const auto name = std::string(logconcavity::to_string(static_cast<logconcavity::Criterion>(i)));
        per[name] = logconcavity::to_string(c.criterion_verdicts[i]);
        sup[name] = real(c.criterion_sup[i]);
    }
    return {{"density", c.label},
            {"verdict", logconcavity::to_string(c.verdict)},
            {"grid_size", c.grid_size},
            {"slack", c.slack},
            {"max_violation", real(c.max_violation)},
            {"criterion_verdicts", per},
            {"criterion_sup", sup},
            {"witnesses", witnesses},
            {"tolerance", to_json(prof)}};
}

inline void write_certificate_csv(std::ostream& out, const logconcavity::Certificate& c) {
    out << "x,log_curvature,score,determinant\n";
    for (const auto& r : c.records) {
        out << num(r.x) << ',' << num(r.log_curvature) << ',' << num(r.score) << ',' << num(r.determinant) << '\n';
    }
}

inline json to_json(const reliability::ReliabilityReport& r, const ToleranceProfile& prof) {
    json grid = json::array();
    for (const auto& g : r.grid) {
        grid.push_back({{"x", g.x}, {"hazard", g.hazard}, {"h", g.H}, {"mrl", g.mrl}});
    }
    return {{"density", r.label},
            {"hazard_monotone", reliability::to_string(r.hazard_monotone)},
            {"mrl_monotone", reliability::to_string(r.mrl_monotone)},
            {"h_logconcave", logconcavity::to_string(r.h_logconcave)},
            {"max_identity_residual", r.max_identity_residual},
            {"grid", grid},
            {"tolerance", to_json(prof)}};
}

inline void write_reliability_csv(std::ostream& out, const reliability::ReliabilityReport& r) {
    out << "x,hazard,H,mrl\n";
    for (const auto& g : r.grid) {
        out << num(g.x) << ',' << num(g.hazard) << ',' << num(g.H) << ',' << num(g.mrl) << '\n';
    }
}

inline json to_json(const reliability::MlrpResult& m, const std::string& label, const ToleranceProfile& prof) {
    json pairs = json::array();
    for (const auto& [a, b] : m.pairs) {
        pairs.push_back({a, b});
    }
    json out = {{"density", label},
                {"status", reliability::to_string(m.status)},
                {"pairs", pairs},
                {"grid_size", m.grid_size},
                {"slack", m.slack},
                {"tolerance", to_json(prof)}};
    if (m.witness) {
        const auto& w = *m.witness;
        out["witness"] = {{"theta1", w.theta1}, {"theta2", w.theta2}, {"x", w.x}, {"x_next", w.x_next},
                          {"drop", w.drop}};
    } else {
        out["witness"] = nullptr;
    }
    return out;
}

inline json to_json(const monopoly::PricingSolution& s) {
    return {{"cost", s.cost},
            {"price", s.price},
            {"markup", s.markup},
            {"elasticity_at_p", s.elasticity_at_p},
            {"mr_residual", s.mr_residual},
            {"iterations", s.iterations},
            {"corner", monopoly::to_string(s.corner)}};
}

inline json to_json(const std::vector<monopoly::PricingSolution>& curve, const std::string& label,
                    const ToleranceProfile& prof) {
    json rows = json::array();
    for (const auto& s : curve) {
        rows.push_back(to_json(s));
    }
    return {{"density", label}, {"solutions", rows}, {"tolerance", to_json(prof)}};
}

inline void write_pricing_csv(std::ostream& out, const std::vector<monopoly::PricingSolution>& curve) {
    out << "c,p,markup,elasticity\n";
    for (const auto& s : curve) {
        out << num(s.cost) << ',' << num(s.price) << ',' << num(s.markup) << ',' << num(s.elasticity_at_p) << '\n';
    }
}

inline void write_figure_csv(std::ostream& out, const std::vector<monopoly::FigurePoint>& points) {
    out << "series,x,y\n";
    for (const auto& p : points) {
        out << p.series << ',' << num(p.x) << ',' << num(p.y) << '\n';
    }
}

} // namespace lcv::io

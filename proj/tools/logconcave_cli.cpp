#include "logconcave/io.hpp"
#include "logconcave/logconcavity.hpp"
#include "logconcave/monopoly.hpp"
#include "logconcave/parse.hpp"
#include "logconcave/reliability.hpp"
#include "logconcave/tabulated.hpp"
#include "logconcave/verify.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

enum class Format { Json, Csv };

struct Globals {
    std::size_t grid = 512;
    lcv::ToleranceProfile prof;
    double clip_mass = 1e-6;
    std::string format;
    std::string output;
};

/// Exit status and rendered document of one command.
struct Outcome {
    int status = 0;
    std::string document;
};

Format pick_format(const Globals& g, Format fallback) {
    if (g.format.empty()) {
        return fallback;
    }
    return g.format == "csv" ? Format::Csv : Format::Json;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

lcv::SmoothDensity load(const Globals& g, const std::string& text) {
    return lcv::parse::density(text, g.clip_mass, g.prof);
}

Outcome run_check(const Globals& g, const std::string& spec_text) {
    const auto d = load(g, spec_text);
    const auto cert = lcv::logconcavity::certify(d, g.grid, g.prof);
    Outcome out;
    out.status = lcv::logconcavity::is_log_concave(cert.verdict) ? 0 : 1;
    if (pick_format(g, Format::Json) == Format::Csv) {
        std::ostringstream os;
        lcv::io::write_certificate_csv(os, cert);
        out.document = os.str();
    } else {
        auto j = lcv::io::to_json(cert, g.prof);
        j["unimodal"] = lcv::logconcavity::to_string(lcv::logconcavity::certify_unimodal(d, g.grid, g.prof));
        out.document = dump(j);
    }
    return out;
}

struct TransformArgs {
    std::string density;
    std::string truncate;
    std::string times;
    std::string affine;
    std::string export_path;
};

Outcome run_transform(const Globals& g, const TransformArgs& a) {
    auto d = load(g, a.density);
    json steps = json::array();
    if (!a.truncate.empty()) {
        const auto w = lcv::parse::real_list(a.truncate);
        if (w.size() != 2) {
            throw lcv::Error(lcv::ErrorCode::InvalidParams, "--truncate expects lo,hi");
        }
        d = lcv::distributions::truncate(d, w[0], w[1], g.prof);
        steps.push_back({{"op", "truncate"}, {"lo", w[0]}, {"hi", w[1]}});
    }
    if (!a.times.empty()) {
        d = lcv::logconcavity::product(d, load(g, a.times), g.prof);
        steps.push_back({{"op", "times"}, {"with", a.times}});
    }
    std::optional<lcv::logconcavity::CompositionVerdict> composition;
    if (!a.affine.empty()) {
        const auto c = lcv::parse::real_list(a.affine);
        if (c.size() != 2 || c[0] == 0.0) {
            throw lcv::Error(lcv::ErrorCode::InvalidParams, "--affine expects a,b with a != 0 for t(x) = a x + b");
        }
        const double slope = c[0];
        const double shift = c[1];
        double lo = (d.effective_lo() - shift) / slope;
        double hi = (d.effective_hi() - shift) / slope;
        if (lo > hi) {
            std::swap(lo, hi);
        }
        using lcv::logconcavity::Curvature;
        using lcv::logconcavity::Monotonicity;
        const auto r = lcv::logconcavity::compose(
            d, [slope, shift](double x) { return slope * x + shift; },
            {slope > 0 ? Monotonicity::Increasing : Monotonicity::Decreasing, Curvature::Linear}, lo, hi, g.prof);
        d = r.density;
        composition = r.verdict;
        steps.push_back({{"op", "affine"}, {"a", slope}, {"b", shift}});
    }
    if (!a.export_path.empty()) {
        std::ofstream f(a.export_path);
        if (!f) {
            throw lcv::Error(lcv::ErrorCode::InvalidParams, "cannot write '" + a.export_path + "'");
        }
        lcv::distributions::write_tabulated_csv(f, lcv::distributions::export_rows(d));
    }
    const auto cert = lcv::logconcavity::certify(d, g.grid, g.prof);
    Outcome out;
    out.status = lcv::logconcavity::is_log_concave(cert.verdict) ? 0 : 1;
    if (pick_format(g, Format::Json) == Format::Csv) {
        std::ostringstream os;
        lcv::io::write_certificate_csv(os, cert);
        out.document = os.str();
    } else {
        auto j = lcv::io::to_json(cert, g.prof);
        j["steps"] = steps;
        if (composition) {
            j["composition"] = lcv::logconcavity::to_string(*composition);
        }
        out.document = dump(j);
    }
    return out;
}

Outcome run_reliability(const Globals& g, const std::string& spec_text) {
    const auto d = load(g, spec_text);
    const auto rep = lcv::reliability::reliability_report(d, g.grid, g.prof);
    Outcome out;
    const bool ok = rep.hazard_monotone == lcv::reliability::Trend::Increasing &&
                    rep.mrl_monotone == lcv::reliability::Trend::Decreasing &&
                    lcv::logconcavity::is_log_concave(rep.h_logconcave);
    out.status = ok ? 0 : 1;
    if (pick_format(g, Format::Json) == Format::Csv) {
        std::ostringstream os;
        lcv::io::write_reliability_csv(os, rep);
        out.document = os.str();
    } else {
        out.document = dump(lcv::io::to_json(rep, g.prof));
    }
    return out;
}

Outcome run_mlrp(const Globals& g, const std::string& spec_text, const std::string& pairs_text) {
    const auto d = load(g, spec_text);
    auto pairs = lcv::reliability::default_theta_pairs();
    for (const auto& p : lcv::parse::pair_list(pairs_text)) {
        pairs.push_back(p);
    }
    const auto res = lcv::reliability::check_mlrp_location(d, pairs, g.grid, g.prof);
    Outcome out;
    out.status = res.status == lcv::reliability::MlrpStatus::Holds ? 0 : 1;
    if (pick_format(g, Format::Json) == Format::Csv) {
        std::ostringstream os;
        os << "status,theta1,theta2,x,x_next\n" << lcv::reliability::to_string(res.status);
        if (res.witness) {
            const auto& w = *res.witness;
            os << ',' << lcv::io::num(w.theta1) << ',' << lcv::io::num(w.theta2) << ',' << lcv::io::num(w.x) << ','
               << lcv::io::num(w.x_next);
        } else {
            os << ",,,,";
        }
        os << '\n';
        out.document = os.str();
    } else {
        out.document = dump(lcv::io::to_json(res, d.label(), g.prof));
    }
    return out;
}

struct PriceArgs {
    std::string density;
    std::optional<double> cost;
    std::optional<std::string> costs;
    std::string figure;
};

Outcome run_price(const Globals& g, const PriceArgs& a) {
    const auto d = load(g, a.density);
    std::vector<double> costs;
    if (a.costs) {
        costs = lcv::parse::real_list(*a.costs);
    }
    if (a.cost) {
        costs.insert(costs.begin(), *a.cost);
    }
    if (!a.cost && !a.costs) {
        costs = {0.0};
    }
    const double base = costs.empty() ? 0.0 : costs.front();
    const lcv::monopoly::MarketModel model(d, base, g.grid, g.prof);
    const auto curve = lcv::monopoly::markup_curve(model, costs);
    if (!a.figure.empty()) {
        std::ofstream f(a.figure);
        if (!f) {
            throw lcv::Error(lcv::ErrorCode::InvalidParams, "cannot write '" + a.figure + "'");
        }
        lcv::io::write_figure_csv(f, lcv::monopoly::figure_data(model, costs));
    }
    Outcome out;
    bool ok = true;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        ok = ok && curve[i].corner == lcv::monopoly::Corner::None;
        if (i > 0) {
            ok = ok && curve[i].markup < curve[i - 1].markup;
        }
    }
    out.status = ok ? 0 : 1;
    if (pick_format(g, Format::Csv) == Format::Csv) {
        std::ostringstream os;
        lcv::io::write_pricing_csv(os, curve);
        out.document = os.str();
    } else {
        out.document = dump(lcv::io::to_json(curve, d.label(), g.prof));
    }
    return out;
}

Outcome run_verify(const Globals& g, const std::vector<std::string>& suites) {
    std::vector<std::string> names;
    for (const auto& s : suites) {
        if (s == "all") {
            names = lcv::verify::suite_names();
            break;
        }
        names.push_back(s);
    }
    std::vector<lcv::verify::SuiteResult> results;
    for (const auto& n : names) {
        results.push_back(lcv::verify::run_suite(n, g.grid, g.prof));
    }
    Outcome out;
    bool ok = true;
    for (const auto& r : results) {
        ok = ok && r.passed();
    }
    out.status = ok ? 0 : 1;
    if (pick_format(g, Format::Json) == Format::Csv) {
        std::ostringstream os;
        os << "suite,check,passed,detail\n";
        for (const auto& r : results) {
            for (const auto& c : r.checks) {
                os << r.name << ',' << c.name << ',' << (c.passed ? "true" : "false") << ',' << c.detail << '\n';
            }
        }
        out.document = os.str();
    } else {
        json js = json::array();
        for (const auto& r : results) {
            json checks = json::array();
            for (const auto& c : r.checks) {
                checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
            }
            js.push_back({{"suite", r.name}, {"passed", r.passed()}, {"checks", checks}});
        }
        out.document = dump({{"passed", ok}, {"suites", js}, {"grid_size", g.grid}, {"tolerance",
                                                                                     lcv::io::to_json(g.prof)}});
    }
    return out;
}

void emit(const Globals& g, const std::string& document) {
    if (g.output.empty() || g.output == "-") {
        std::cout << document;
        return;
    }
    std::ofstream f(g.output);
    if (!f) {
        throw lcv::Error(lcv::ErrorCode::InvalidParams, "cannot write '" + g.output + "'");
    }
    f << document;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Log-concavity certification, reliability and monopoly pricing toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--grid", g.grid, "grid size")->check(CLI::Range(std::size_t{16}, std::size_t{1} << 22));
    app.add_option("--slack", g.prof.slack, "classification slack");
    app.add_option("--fd-step", g.prof.fd_step, "finite-difference relative step");
    app.add_option("--quad-tol", g.prof.quad_tol, "quadrature absolute tolerance");
    app.add_option("--root-tol", g.prof.root_tol, "root bracket width tolerance");
    app.add_option("--clip-mass", g.clip_mass, "tail mass dropped at each infinite end");
    app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("-o,--output", g.output, "output path (default stdout)");

    std::string density;
    auto* check = app.add_subcommand("check", "certify log-concavity of a density");
    check->add_option("density", density, "family:params or csv:path")->required();

    TransformArgs targs;
    auto* transform = app.add_subcommand("transform", "truncate, multiply or reparameterize, then certify");
    transform->add_option("density", targs.density)->required();
    transform->add_option("--truncate", targs.truncate, "lo,hi");
    transform->add_option("--times", targs.times, "second density for a pointwise product");
    transform->add_option("--affine", targs.affine, "a,b for the map x -> a x + b");
    transform->add_option("--export", targs.export_path, "write the result as an x,f table");

    auto* rel = app.add_subcommand("reliability", "hazard, reliability function and mean residual life");
    rel->add_option("density", density)->required();

    std::string pairs;
    auto* mlrp = app.add_subcommand("mlrp", "likelihood ratio check for the location family");
    mlrp->add_option("density", density)->required();
    mlrp->add_option("--pairs", pairs, "extra theta pairs, e.g. 0:1,-2:3");

    PriceArgs pargs;
    auto* price = app.add_subcommand("price", "optimal monopoly price for values distributed on [0, 1]");
    price->add_option("density", pargs.density)->required();
    price->add_option("--cost", pargs.cost, "unit cost");
    price->add_option("--costs", pargs.costs, "increasing list of unit costs");
    price->add_option("--figure", pargs.figure, "write demand, mr and markup series");

    std::vector<std::string> suites{"all"};
    auto* verify = app.add_subcommand("verify", "run the property suites");
    std::vector<std::string> allowed = lcv::verify::suite_names();
    allowed.push_back("all");
    verify->add_option("--suite", suites, "suite names or all")->check(CLI::IsMember(allowed))->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        g.prof.validate();
        lcv::SupportInterval probe{-lcv::kInf, lcv::kInf, g.clip_mass};
        probe.validate();
        Outcome out;
        if (*check) {
            out = run_check(g, density);
        } else if (*transform) {
            out = run_transform(g, targs);
        } else if (*rel) {
            out = run_reliability(g, density);
        } else if (*mlrp) {
            out = run_mlrp(g, density, pairs);
        } else if (*price) {
            out = run_price(g, pargs);
        } else {
            out = run_verify(g, suites);
        }
        emit(g, out.document);
        return out.status;
    } catch (const std::exception& e) {
        std::string msg = e.what();
        for (auto& ch : msg) {
            if (ch == '\n') {
                ch = ' ';
            }
        }
        std::cerr << "error: " << msg << '\n';
        return 2;
    }
}

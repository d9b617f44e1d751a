#include "logconcave/io.hpp"
#include "logconcave/parse.hpp"
#include "logconcave/verify.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using lcv::ErrorCode;
using testing_support::error_code;
namespace dist = lcv::distributions;
namespace lc = lcv::logconcavity;
namespace io = lcv::io;
using nlohmann::json;

namespace {

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        out.push_back(line);
    }
    return out;
}

} // namespace

TEST(CertificateJson, FieldsAndRoundTrip) {
    const lcv::ToleranceProfile prof;
    const auto c = lc::certify(lcv::verify::log_convex_density(), 64, prof);
    const json j = json::parse(io::to_json(c, prof).dump());
    EXPECT_EQ(j.at("verdict"), "NotLogConcave");
    EXPECT_EQ(j.at("grid_size"), 64);
    EXPECT_EQ(j.at("slack"), 1e-7);
    EXPECT_NEAR(j.at("max_violation").get<double>(), 2.0, 1e-4);
    ASSERT_FALSE(j.at("witnesses").empty());
    for (const auto& w : j.at("witnesses")) {
        EXPECT_TRUE(w.contains("x"));
        EXPECT_TRUE(w.contains("criterion"));
        EXPECT_TRUE(w.contains("value"));
    }
    EXPECT_EQ(j.at("tolerance").at("fd_step"), 1e-3);
    EXPECT_EQ(j.at("tolerance").at("quad_tol"), 1e-10);
    EXPECT_EQ(j.at("tolerance").at("root_tol"), 1e-12);
    EXPECT_EQ(j.at("criterion_verdicts").size(), 3u);
}

TEST(CertificateJson, NonFiniteValuesAreStrings) {
    EXPECT_EQ(io::real(lcv::kInf), "inf");
    EXPECT_EQ(io::real(-lcv::kInf), "-inf");
    EXPECT_EQ(io::real(std::nan("")), "nan");
    EXPECT_EQ(io::real(1.5), 1.5);
}

TEST(Csv, CertificateAndReliabilityHeaders) {
    const auto d = dist::make_builtin(dist::Family::Uniform, {0.0, 1.0});
    std::ostringstream a;
    io::write_certificate_csv(a, lc::certify(d, 16));
    const auto la = lines(a.str());
    EXPECT_EQ(la.front(), "x,log_curvature,score,determinant");
    EXPECT_EQ(la.size(), 17u);

    std::ostringstream b;
    const auto rep = lcv::reliability::reliability_report(d, 32);
    io::write_reliability_csv(b, rep);
    const auto lb = lines(b.str());
    EXPECT_EQ(lb.front(), "x,hazard,H,mrl");
    EXPECT_EQ(lb.size(), rep.grid.size() + 1);
    EXPECT_EQ(a.str().find('\r'), std::string::npos);
}

TEST(ReliabilityJson, Keys) {
    const lcv::ToleranceProfile prof;
    const auto rep = lcv::reliability::reliability_report(dist::make_builtin(dist::Family::Exponential, {1.0}), 32);
    const auto j = io::to_json(rep, prof);
    for (const char* k : {"hazard_monotone", "mrl_monotone", "h_logconcave", "grid", "tolerance"}) {
        EXPECT_TRUE(j.contains(k)) << k;
    }
    const auto& first = j.at("grid").at(0);
    for (const char* k : {"x", "hazard", "h", "mrl"}) {
        EXPECT_TRUE(first.contains(k)) << k;
    }
}

TEST(MlrpJson, WitnessOrNull) {
    const lcv::ToleranceProfile prof;
    const auto q = lcv::verify::log_convex_density();
    const auto fails = lcv::reliability::check_mlrp_location(q, {{0.0, 0.2}});
    const auto j = io::to_json(fails, q.label(), prof);
    EXPECT_EQ(j.at("status"), "MLRPFails");
    EXPECT_EQ(j.at("witness").at("theta2"), 0.2);
    const auto n = dist::make_builtin(dist::Family::Normal, {0.0, 1.0});
    const auto holds = lcv::reliability::check_mlrp_location(n, {{0.0, 1.0}});
    EXPECT_TRUE(io::to_json(holds, n.label(), prof).at("witness").is_null());
}

TEST(PricingOutput, CsvAndJson) {
    const lcv::monopoly::MarketModel m(dist::make_builtin(dist::Family::Uniform, {0.0, 1.0}), 0.0);
    const auto curve = lcv::monopoly::markup_curve(m, {0.0, 0.25, 0.5});
    std::ostringstream out;
    io::write_pricing_csv(out, curve);
    const auto l = lines(out.str());
    ASSERT_EQ(l.size(), 4u);
    EXPECT_EQ(l[0], "c,p,markup,elasticity");
    EXPECT_EQ(l[1].substr(0, 10), "0,0.5,0.5,");
    EXPECT_EQ(l[2].substr(0, 17), "0.25,0.625,0.375,");
    const auto j = io::to_json(curve, "uniform:0,1", m.tolerance());
    EXPECT_EQ(j.at("solutions").size(), 3u);
    EXPECT_EQ(j.at("solutions").at(0).at("corner"), "none");
    EXPECT_TRUE(j.contains("tolerance"));
}

TEST(FigureOutput, SeriesRows) {
    const lcv::monopoly::MarketModel m(dist::make_builtin(dist::Family::Uniform, {0.0, 1.0}), 0.0);
    std::ostringstream out;
    io::write_figure_csv(out, lcv::monopoly::figure_data(m, {0.0, 0.5}, 11));
    const auto l = lines(out.str());
    EXPECT_EQ(l[0], "series,x,y");
    EXPECT_EQ(l[1], "demand,0,1");
    EXPECT_EQ(l.back(), "markup,0.5,0.25");
    std::ostringstream none;
    io::write_figure_csv(none, lcv::monopoly::figure_data(m, {}, 11));
    EXPECT_EQ(none.str().find("markup"), std::string::npos);
}

TEST(Parse, DensitySpecs) {
    EXPECT_EQ(lcv::parse::density("normal:0,1").label(), "normal:0,1");
    EXPECT_EQ(lcv::parse::density("truncnormal:0,1,-1,2").support().hi, 2.0);
    EXPECT_EQ(error_code([] { lcv::parse::density("normal"); }), ErrorCode::InvalidParams);
    EXPECT_EQ(error_code([] { lcv::parse::density("gamma:1,2"); }), ErrorCode::InvalidParams);
    EXPECT_EQ(error_code([] { lcv::parse::density("normal:0"); }), ErrorCode::InvalidParams);
    EXPECT_EQ(error_code([] { lcv::parse::density("normal:0,1x"); }), ErrorCode::InvalidParams);
    EXPECT_EQ(error_code([] { lcv::parse::density("normal:0;1"); }), ErrorCode::InvalidParams);
    EXPECT_EQ(error_code([] { lcv::parse::density("csv:/nonexistent/file.csv"); }), ErrorCode::MalformedTable);
    EXPECT_EQ(error_code([] { lcv::parse::density("csv:"); }), ErrorCode::InvalidParams);
}

TEST(Parse, Lists) {
    EXPECT_EQ(lcv::parse::real_list(""), std::vector<double>{});
    EXPECT_EQ(lcv::parse::real_list("0,0.25, 0.5"), (std::vector<double>{0.0, 0.25, 0.5}));
    EXPECT_EQ(error_code([] { lcv::parse::real_list("1,,2"); }), ErrorCode::InvalidParams);
    const auto p = lcv::parse::pair_list("0:1,-2:3");
    ASSERT_EQ(p.size(), 2u);
    EXPECT_EQ(p[1], std::make_pair(-2.0, 3.0));
    EXPECT_EQ(error_code([] { lcv::parse::pair_list("0-1"); }), ErrorCode::InvalidParams);
}

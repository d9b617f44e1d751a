#pragma once

#include "logconcave/distributions.hpp"
#include "logconcave/tabulated.hpp"

#include <fstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lcv::parse {

/// Comma-separated reals; an empty string gives an empty list.
inline std::vector<double> real_list(std::string_view text) {
    std::vector<double> out;
    text = distributions::detail::trim(text);
    if (text.empty()) {
        return out;
    }
    while (true) {
        const auto comma = text.find(',');
        const auto item = text.substr(0, comma);
        const auto v = distributions::detail::parse_real(item);
        if (!v) {
            throw Error(ErrorCode::InvalidParams, "not a decimal real: '" + std::string(item) + "'");
        }
        out.push_back(*v);
        if (comma == std::string_view::npos) {
            break;
        }
        text.remove_prefix(comma + 1);
    }
    return out;
}

/// Pairs written as `a:b` separated by commas, e.g. `0:1,-2:3`.
inline std::vector<std::pair<double, double>> pair_list(std::string_view text) {
    std::vector<std::pair<double, double>> out;
    text = distributions::detail::trim(text);
    if (text.empty()) {
        return out;
    }
    while (true) {
        const auto comma = text.find(',');
        const auto item = text.substr(0, comma);
        const auto colon = item.find(':');
        if (colon == std::string_view::npos) {
            throw Error(ErrorCode::InvalidParams, "expected a pair a:b, got '" + std::string(item) + "'");
        }
        const auto a = distributions::detail::parse_real(item.substr(0, colon));
        const auto b = distributions::detail::parse_real(item.substr(colon + 1));
        if (!a || !b) {
            throw Error(ErrorCode::InvalidParams, "malformed pair '" + std::string(item) + "'");
        }
        out.emplace_back(*a, *b);
        if (comma == std::string_view::npos) {
            break;
        }
        text.remove_prefix(comma + 1);
    }
    return out;
}

inline distributions::TabulatedDensity load_csv_file(const std::string& path, const ToleranceProfile& prof = {}) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::MalformedTable, "cannot open '" + path + "'");
    }
    return distributions::read_tabulated_csv(in, prof);
}

/// `family:p1,p2,...` for a built-in family, or `csv:path` for a table.
inline SmoothDensity density(std::string_view text, double clip_mass = 1e-6, const ToleranceProfile& prof = {}) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw Error(ErrorCode::InvalidParams, "density must look like family:params or csv:path");
    }
    const auto head = text.substr(0, colon);
    const auto rest = text.substr(colon + 1);
    if (head == "csv") {
        if (rest.empty()) {
            throw Error(ErrorCode::InvalidParams, "csv: needs a file path");
        }
        return load_csv_file(std::string(rest), prof).density();
    }
    const auto family = distributions::parse_family(head);
    if (!family) {
        throw Error(ErrorCode::InvalidParams, "unknown family '" + std::string(head) + "'");
    }
    return distributions::make_builtin(*family, real_list(rest), clip_mass, prof);
}

} // namespace lcv::parse

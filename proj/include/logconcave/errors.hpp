#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lcv {

enum class ErrorCode {
    NonFiniteEvaluation,
    ToleranceNotMet,
    NoSignChange,
    InvalidParams,
    InvalidSupport,
    ZeroMassWindow,
    OutOfWindow,
    MalformedTable,
    NonMonotoneMap,
    DensityUnderflow,
    SurvivalUnderflow,
    DemandUnderflow,
    PreconditionNotCertified,
    InputNotConcave,
    EmptyCommonSupport,
};

inline constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::NonFiniteEvaluation: return "NonFiniteEvaluation";
    case ErrorCode::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidSupport: return "InvalidSupport";
    case ErrorCode::ZeroMassWindow: return "ZeroMassWindow";
    case ErrorCode::OutOfWindow: return "OutOfWindow";
    case ErrorCode::MalformedTable: return "MalformedTable";
    case ErrorCode::NonMonotoneMap: return "NonMonotoneMap";
    case ErrorCode::DensityUnderflow: return "DensityUnderflow";
    case ErrorCode::SurvivalUnderflow: return "SurvivalUnderflow";
    case ErrorCode::DemandUnderflow: return "DemandUnderflow";
    case ErrorCode::PreconditionNotCertified: return "PreconditionNotCertified";
    case ErrorCode::InputNotConcave: return "InputNotConcave";
    case ErrorCode::EmptyCommonSupport: return "EmptyCommonSupport";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the ErrorCode kinds.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// MalformedTable with the offending 1-based input line (0 when not tied to a line).
class TableError : public Error {
public:
    TableError(std::size_t line, const std::string& what)
        : Error(ErrorCode::MalformedTable,
                line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace lcv

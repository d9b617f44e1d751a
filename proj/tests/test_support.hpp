#pragma once

#include "logconcave/errors.hpp"

#include <optional>
#include <random>

namespace testing_support {

/// Code of the lcv::Error thrown by f, or nullopt if nothing was thrown.
template <class F>
std::optional<lcv::ErrorCode> error_code(F&& f) {
    try {
        f();
    } catch (const lcv::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

inline std::mt19937_64 rng(std::uint64_t seed = 12345) { return std::mt19937_64(seed); }

} // namespace testing_support

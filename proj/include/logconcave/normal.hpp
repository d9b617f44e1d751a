#pragma once

#include <cmath>
#include <numbers>

namespace lcv::normal {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934381868;
inline constexpr double kLogSqrt2Pi = 0.918938533204672741780329736405617640;

inline double pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

inline double log_pdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

// erfc keeps both tails at full relative precision
inline double cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

inline double survival(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

/// Mills ratio (1 - Phi(y)) / phi(y).
inline double mills_ratio(double y) { return survival(y) / pdf(y); }

/// k(y) = -y phi(y) + (1 + y^2)(1 - Phi(y)); nonnegative and nonincreasing for y > 0.
inline double mills_k(double y) { return -y * pdf(y) + (1.0 + y * y) * survival(y); }

/// Gamma(x) = Phi(x) / phi(x) for the standard normal.
inline double gamma_ratio(double x) { return cdf(x) / pdf(x); }

/// Closed-form second derivative of Gamma: x + (1 + x^2) Gamma(x).
inline double gamma_second(double x) { return x + (1.0 + x * x) * gamma_ratio(x); }

/// Gamma'(x) = 1 + x Gamma(x), from phi'(x) = -x phi(x).
inline double gamma_first(double x) { return 1.0 + x * gamma_ratio(x); }

} // namespace lcv::normal

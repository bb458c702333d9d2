#pragma once

#include <cmath>
#include <numbers>

namespace aerialnet {

inline constexpr double pi = std::numbers::pi;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

inline constexpr double km = 1000.0;
inline constexpr double per_km = 1e-3;
inline constexpr double per_km2 = 1e-6;

} // namespace aerialnet

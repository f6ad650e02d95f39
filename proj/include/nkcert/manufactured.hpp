#pragma once

#include <cmath>
#include <numbers>

#include "nkcert/fem.hpp"

namespace nkcert::manufactured {

// u* = sin(pi x) sin(pi y) on the unit square, f = 2 pi^2 u* + (u*)^3.

inline double exact_solution(const Point& p) {
    return std::sin(std::numbers::pi * p.x()) * std::sin(std::numbers::pi * p.y());
}

inline Point exact_gradient(const Point& p) {
    constexpr double pi = std::numbers::pi;
    return {pi * std::cos(pi * p.x()) * std::sin(pi * p.y()), pi * std::sin(pi * p.x()) * std::cos(pi * p.y())};
}

inline double source(const Point& p) {
    const double u = exact_solution(p);
    return 2.0 * std::numbers::pi * std::numbers::pi * u + u * u * u;
}

inline ExactField exact_field() { return {exact_solution, exact_gradient}; }

/// int u* = 4 / pi^2.
inline constexpr double kLinearQoi = 4.0 / (std::numbers::pi * std::numbers::pi);
/// 1/2 int (u*)^2 = 1/8.
inline constexpr double kQuadraticQoi = 0.125;

}  // namespace nkcert::manufactured

#pragma once

#include <cstdint>
#include <functional>
#include <span>

namespace halfvol {

/// Adaptive Simpson quadrature of f over [a,b] to absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol);

/// Same, but pre-splits the interval at the given interior breakpoints
/// (non-smooth points of the integrand). Breakpoints outside (a,b) are
/// ignored; a and b may be in either order.
double integrate_with_breakpoints(const std::function<double(double)>& f,
                                  double a, double b,
                                  std::span<const double> breakpoints,
                                  double abs_tol);

bool is_power_of_two(int n);

}  // namespace halfvol

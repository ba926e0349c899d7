#pragma once

// Adaptive Simpson quadrature and a fixed Gauss-Legendre rule.

#include <functional>
#include <vector>

namespace twoline::numeric {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // Richardson estimate |S2 - S1| / 15 summed over leaves
  long intervals = 0;
  bool converged = true;  // false when the interval cap was hit
};

inline constexpr double kQuadratureTolerance = 1e-10;
inline constexpr long kMaxIntervals = 1L << 20;

// Absolute tolerance; the tolerance is split in half on each bisection.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double tol = kQuadratureTolerance, long max_intervals = kMaxIntervals);

// 8-point Gauss-Legendre on [a, b]. A smooth function of a and b, which
// matters when the result is differentiated numerically.
double gauss_legendre8(const std::function<double(double)>& f, double a, double b);

}  // namespace twoline::numeric

#pragma once

#include <functional>
#include <vector>

namespace twoline::numeric {

enum class Direction { Left = -1, Right = +1 };

struct RichardsonConfig {
  double initial_step = 0.125;  // reach of the widest stencil, 2^-3
  int halvings = 30;             // rounding noise usually stops higher orders sooner
  double cauchy_rel = 1e-3;
  // Levels whose rounding noise (2^n eps |f| / h^n), relative to the
  // quotient itself, exceeds this are dropped.
  double noise_floor = 1e-6;
};

struct DerivativeEstimate {
  double value = 0.0;
  double error = 0.0;  // smallest successive difference of the tableau diagonal
  int levels = 0;      // usable step sizes
  bool converged = false;
  bool diverging = false;  // not converged and the quotients grow: no derivative
  bool enough_levels() const { return levels >= 2; }
};

// Estimates the order-th one-sided derivative of f at x from samples
// f(x), f(x + s), ..., f(x + order*s) with s = +-h, extrapolating the
// O(h) error series over step halvings.
DerivativeEstimate one_sided_derivative(const std::function<double(double)>& f, double x,
                                        int order, Direction dir,
                                        const RichardsonConfig& cfg = {});

// Forward/backward difference quotient of the given order with step s (signed).
double difference_quotient(const std::function<double(double)>& f, double x, int order,
                           double s);

}  // namespace twoline::numeric

#include "twoline/quadrature.hpp"

#include "twoline/error.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace twoline::numeric {

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                                  long max_intervals) {
  if (!(tol > 0)) throw DomainError("quadrature tolerance must be positive");
  QuadratureResult out;
  if (a == b) return out;

  struct Segment {
    double l, r, fl, fm, fr, whole, tol;
  };
  auto simpson = [](double l, double r, double fl, double fm, double fr) { return (r - l) / 6.0 * (fl + 4.0 * fm + fr); };
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  std::vector<Segment> stack{{a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol}};
  long intervals = 1;
  while (!stack.empty()) {
    Segment s = stack.back();
    stack.pop_back();
    const double m = 0.5 * (s.l + s.r);
    const double flm = f(0.5 * (s.l + m)), frm = f(0.5 * (m + s.r));
    const double left = simpson(s.l, m, s.fl, flm, s.fm);
    const double right = simpson(m, s.r, s.fm, frm, s.fr);
    const double delta = left + right - s.whole;
    const bool tiny = m <= s.l || m >= s.r;
    if (std::fabs(delta) <= 15.0 * s.tol || tiny || intervals >= max_intervals) {
      if (!tiny && std::fabs(delta) > 15.0 * s.tol) out.converged = false;
      out.value += left + right + delta / 15.0;
      out.error += std::fabs(delta) / 15.0;
      continue;
    }
    ++intervals;
    stack.push_back({m, s.r, s.fm, frm, s.fr, right, 0.5 * s.tol});
    stack.push_back({s.l, m, s.fl, flm, s.fm, left, 0.5 * s.tol});
  }
  out.intervals = intervals;
  return out;
}

double gauss_legendre8(const std::function<double(double)>& f, double a, double b) {
  static constexpr std::array<double, 4> x{0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                           0.9602898564975363};
  static constexpr std::array<double, 4> w{0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                           0.1012285362903763};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += w[i] * (f(c - h * x[i]) + f(c + h * x[i]));
  return s * h;
}

}  // namespace twoline::numeric

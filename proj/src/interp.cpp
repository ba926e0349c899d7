#include "twoline/interp.hpp"

#include "twoline/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace twoline::numeric {

MonotoneCubic::MonotoneCubic(std::vector<double> xs, std::vector<double> ys) : xs_(std::move(xs)), ys_(std::move(ys)) {
  const size_t n = xs_.size();
  if (n < 2 || ys_.size() != n) throw DomainError("monotone interpolation needs at least two (x, y) pairs");
  increasing_ = ys_[1] > ys_[0];
  for (size_t i = 1; i < n; ++i) {
    if (!(xs_[i] > xs_[i - 1])) throw DomainError("sample abscissae must be strictly increasing (index " + std::to_string(i) + ")");
    const bool up = ys_[i] > ys_[i - 1];
    if (ys_[i] == ys_[i - 1] || up != increasing_)
      throw DomainError("sample values must be strictly monotone (index " + std::to_string(i) + ")");
  }
  std::vector<double> delta(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) delta[i] = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
  m_.assign(n, 0.0);
  m_[0] = delta[0];
  m_[n - 1] = delta[n - 2];
  for (size_t i = 1; i + 1 < n; ++i) m_[i] = 0.5 * (delta[i - 1] + delta[i]);
  // Limit slopes so each cubic stays monotone: alpha^2 + beta^2 <= 9.
  for (size_t i = 0; i + 1 < n; ++i) {
    const double a = m_[i] / delta[i], b = m_[i + 1] / delta[i];
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double t = 3.0 / std::sqrt(s);
      m_[i] = t * a * delta[i];
      m_[i + 1] = t * b * delta[i];
    }
  }
}

size_t MonotoneCubic::segment(double x) const {
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  size_t i = it == xs_.begin() ? 0 : static_cast<size_t>(it - xs_.begin()) - 1;
  return std::min(i, xs_.size() - 2);
}

double MonotoneCubic::operator()(double x) const {
  const size_t i = segment(x);
  const double h = xs_[i + 1] - xs_[i], t = (x - xs_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * ys_[i] + (t3 - 2 * t2 + t) * h * m_[i] + (-2 * t3 + 3 * t2) * ys_[i + 1] +
         (t3 - t2) * h * m_[i + 1];
}

double MonotoneCubic::derivative(double x) const {
  const size_t i = segment(x);
  const double h = xs_[i + 1] - xs_[i], t = (x - xs_[i]) / h;
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * ys_[i] + (-6 * t2 + 6 * t) * ys_[i + 1]) / h + (3 * t2 - 4 * t + 1) * m_[i] +
         (3 * t2 - 2 * t) * m_[i + 1];
}

double MonotoneCubic::inverse(double y) const {
  const double s = increasing_ ? 1.0 : -1.0;
  const double ylo = std::min(ys_.front(), ys_.back()), yhi = std::max(ys_.front(), ys_.back());
  if (y < ylo || y > yhi) throw DomainError("value outside the sampled range");
  // locate the segment, then bisect the (monotone) cubic on it
  size_t lo = 0, hi = xs_.size() - 1;
  while (hi - lo > 1) {
    size_t mid = (lo + hi) / 2;
    if (s * (ys_[mid] - y) <= 0) lo = mid;
    else hi = mid;
  }
  double a = xs_[lo], b = xs_[hi];
  for (int it = 0; it < 200 && b - a > 0; ++it) {
    double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    if (s * ((*this)(m) - y) <= 0) a = m;
    else b = m;
  }
  return 0.5 * (a + b);
}

}  // namespace twoline::numeric

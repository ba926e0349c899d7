#pragma once

// Monotone piecewise-cubic Hermite interpolation (Fritsch-Carlson slopes).

#include <vector>

namespace twoline::numeric {

class MonotoneCubic {
 public:
  // xs strictly increasing, ys strictly monotone; at least two points.
  // Throws DomainError otherwise.
  MonotoneCubic(std::vector<double> xs, std::vector<double> ys);

  double operator()(double x) const;
  double derivative(double x) const;
  // Solves p(x) = y inside the sampled range.
  double inverse(double y) const;

  bool increasing() const noexcept { return increasing_; }
  double lo() const { return xs_.front(); }
  double hi() const { return xs_.back(); }
  const std::vector<double>& xs() const noexcept { return xs_; }
  const std::vector<double>& ys() const noexcept { return ys_; }
  const std::vector<double>& slopes() const noexcept { return m_; }

 private:
  size_t segment(double x) const;
  std::vector<double> xs_, ys_, m_;
  bool increasing_ = true;
};

}  // namespace twoline::numeric

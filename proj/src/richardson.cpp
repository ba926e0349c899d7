#include "twoline/richardson.hpp"

#include "twoline/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace twoline::numeric {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

double difference_quotient(const std::function<double(double)>& f, double x, int order,
                           double s) {
  double sum = 0.0;
  for (int i = 0; i <= order; ++i) {
    double sign = ((order - i) % 2 == 0) ? 1.0 : -1.0;
    sum += sign * binomial(order, i) * f(x + i * s);
  }
  return sum / std::pow(s, order);
}

DerivativeEstimate one_sided_derivative(const std::function<double(double)>& f, double x,
                                        int order, Direction dir,
                                        const RichardsonConfig& cfg) {
  if (order <= 0) throw DomainError("derivative order must be positive");
  const double sign = static_cast<double>(static_cast<int>(dir));
  constexpr double eps = std::numeric_limits<double>::epsilon();

  std::vector<double> column;  // raw quotients D(h_i)
  // the farthest sample x + order*h starts at initial_step from x
  double h = cfg.initial_step / order;
  for (int i = 0; i <= cfg.halvings; ++i, h *= 0.5) {
    double magnitude = 0.0;
    for (int j = 0; j <= order; ++j) magnitude = std::max(magnitude, std::fabs(f(x + sign * j * h)));
    double noise = std::pow(2.0, order) * eps * magnitude / std::pow(h, order);
    double d = difference_quotient(f, x, order, sign * h);
    if (noise > cfg.noise_floor * std::max(1.0, std::fabs(d))) {
      if (!column.empty()) break;
      continue;
    }
    column.push_back(d);
  }

  DerivativeEstimate est;
  est.levels = static_cast<int>(column.size());
  if (column.empty()) return est;

  // Neville tableau; row i holds the extrapolations ending at h_i.
  std::vector<double> prev{column[0]};
  std::vector<double> diagonal{column[0]};
  for (size_t i = 1; i < column.size(); ++i) {
    std::vector<double> row(i + 1);
    row[0] = column[i];
    double factor = 2.0;
    for (size_t j = 1; j <= i; ++j, factor *= 2.0)
      row[j] = row[j - 1] + (row[j - 1] - prev[j - 1]) / (factor - 1.0);
    diagonal.push_back(row[i]);
    prev = std::move(row);
  }

  est.value = diagonal.back();
  est.error = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < diagonal.size(); ++i) {
    double diff = std::fabs(diagonal[i] - diagonal[i - 1]);
    if (diff <= est.error) {
      est.error = diff;
      est.value = diagonal[i];
    }
  }
  if (diagonal.size() >= 2) {
    double scale = std::max(1.0, std::fabs(est.value));
    est.converged = est.error <= cfg.cauchy_rel * scale;
  }
  // Blow-up signature of a missing derivative: the raw quotients keep
  // growing in magnitude over the last halvings.
  if (!est.converged && column.size() >= 3) {
    est.diverging = true;
    for (size_t i = column.size() - 2; i < column.size(); ++i)
      if (!(std::fabs(column[i]) > 1.1 * std::fabs(column[i - 1]))) est.diverging = false;
  }
  return est;
}

}  // namespace twoline::numeric

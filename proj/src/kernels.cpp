#include "twoline/kernels.hpp"

#include "twoline/error.hpp"
#include "twoline/quadrature.hpp"

#include <algorithm>

#include <omp.h>

namespace twoline::kernels {

namespace {

// Runs body(i) for i in [0, n), in parallel when asked. Exceptions thrown
// inside the parallel region are captured and rethrown afterwards.
template <class Body>
void for_each_index(long n, Exec exec, Body&& body) {
  if (exec == Exec::Serial) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(twoline_kernel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

int max_threads() { return omp_get_max_threads(); }

std::vector<double> cumulative_integral(const std::function<double(double)>& f, const std::vector<double>& grid,
                                        double tol, Exec exec, Rule rule) {
  if (grid.size() < 2) throw DomainError("integration grid needs at least two points");
  const double total = grid.back() - grid.front();
  if (!(total > 0)) throw DomainError("integration grid must be increasing");
  const long cells = static_cast<long>(grid.size()) - 1;
  std::vector<double> cell(cells);
  for_each_index(cells, exec, [&](long i) {
    const double w = grid[i + 1] - grid[i];
    cell[i] = rule == Rule::Gauss8 ? numeric::gauss_legendre8(f, grid[i], grid[i + 1])
                                   : numeric::adaptive_simpson(f, grid[i], grid[i + 1], tol * w / total).value;
  });
  std::vector<double> out(grid.size(), 0.0);
  for (long i = 0; i < cells; ++i) out[i + 1] = out[i] + cell[i];
  return out;
}

std::vector<double> sample(const std::function<double(double)>& f, const std::vector<double>& xs, Exec exec) {
  std::vector<double> ys(xs.size());
  for_each_index(static_cast<long>(xs.size()), exec, [&](long i) { ys[i] = f(xs[i]); });
  return ys;
}

std::vector<PointEstimates> one_sided_estimates(const std::function<double(double)>& f,
                                                const std::vector<double>& points, const std::vector<double>& reach,
                                                int k, const numeric::RichardsonConfig& base, Exec exec) {
  return one_sided_estimates(f, points, reach, std::vector<numeric::RichardsonConfig>(std::max(k, 0), base), exec);
}

std::vector<PointEstimates> one_sided_estimates(const std::function<double(double)>& f,
                                                const std::vector<double>& points, const std::vector<double>& reach,
                                                const std::vector<numeric::RichardsonConfig>& by_order, Exec exec) {
  if (points.size() != reach.size()) throw DomainError("points and reach must have equal length");
  const int k = static_cast<int>(by_order.size());
  std::vector<PointEstimates> out(points.size());
  for_each_index(static_cast<long>(points.size()), exec, [&](long i) {
    for (int j = 1; j <= k; ++j) {
      numeric::RichardsonConfig cfg = by_order[j - 1];
      cfg.initial_step = reach[i];
      out[i].left.push_back(numeric::one_sided_derivative(f, points[i], j, numeric::Direction::Left, cfg));
      out[i].right.push_back(numeric::one_sided_derivative(f, points[i], j, numeric::Direction::Right, cfg));
    }
  });
  return out;
}

std::vector<cosets::PairClassification> classify_grid(const std::vector<Param>& as, const std::vector<Param>& bs,
                                                      int k, Exec exec) {
  const long n = static_cast<long>(as.size()), m = static_cast<long>(bs.size());
  std::vector<cosets::PairClassification> out(n * m);
  for_each_index(n * m, exec, [&](long i) { out[i] = cosets::classify_wa_pair(as[i / m], bs[i % m], k); });
  return out;
}

std::vector<int> double_coset_labels(const cosets::FiniteGroup& g, const cosets::Subgroup& c,
                                     const cosets::Subgroup& d, Exec exec) {
  std::vector<int> label(g.order());
  for_each_index(g.order(), exec, [&](long h) {
    int best = g.order();
    for (int x : c.elements())
      for (int y : d.elements()) best = std::min(best, g.mul(g.mul(x, static_cast<int>(h)), g.inv(y)));
    label[h] = best;
  });
  return label;
}

}  // namespace twoline::kernels

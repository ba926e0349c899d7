#pragma once

// Batch kernels with an OpenMP version and a serial reference. Each output
// element is computed independently, so both paths return identical
// results; only prefix sums are done serially.

#include "twoline/cosets.hpp"
#include "twoline/richardson.hpp"

#include <functional>
#include <vector>

namespace twoline::kernels {

enum class Exec { Serial, Parallel };

enum class Rule { Simpson, Gauss8 };

// out[0] = 0, out[i] = integral of f over [grid[0], grid[i]]. Simpson cells
// are adaptive with their share (width / total) of the tolerance; Gauss8
// cells use the fixed rule, so a value re-integrated from a knot inside a
// cell with the same rule is continuous across knots.
std::vector<double> cumulative_integral(const std::function<double(double)>& f, const std::vector<double>& grid,
                                        double tol, Exec exec = Exec::Parallel, Rule rule = Rule::Simpson);

std::vector<double> sample(const std::function<double(double)>& f, const std::vector<double>& xs,
                           Exec exec = Exec::Parallel);

// One-sided derivative estimates of orders 1..k at each point, stencils
// reaching at most reach[i] from points[i]. by_order[j-1] configures order
// j; its initial_step is replaced by the reach.
struct PointEstimates {
  std::vector<numeric::DerivativeEstimate> left;   // index j-1 for order j
  std::vector<numeric::DerivativeEstimate> right;
};

std::vector<PointEstimates> one_sided_estimates(const std::function<double(double)>& f,
                                                const std::vector<double>& points, const std::vector<double>& reach,
                                                int k, const numeric::RichardsonConfig& base,
                                                Exec exec = Exec::Parallel);
std::vector<PointEstimates> one_sided_estimates(const std::function<double(double)>& f,
                                                const std::vector<double>& points, const std::vector<double>& reach,
                                                const std::vector<numeric::RichardsonConfig>& by_order,
                                                Exec exec = Exec::Parallel);

// Row-major: result[i * bs.size() + j] classifies (as[i], bs[j]).
std::vector<cosets::PairClassification> classify_grid(const std::vector<Param>& as, const std::vector<Param>& bs,
                                                      int k, Exec exec = Exec::Parallel);

// For each h, the smallest element index of ChD.
std::vector<int> double_coset_labels(const cosets::FiniteGroup& g, const cosets::Subgroup& c,
                                     const cosets::Subgroup& d, Exec exec = Exec::Parallel);

int max_threads();

}  // namespace twoline::kernels

#pragma once

// Gluing charts of a 1-manifold: the identity/diffeomorphism glue built
// from bump functions and quadrature, the join of two overlapping interval
// charts, collapse of finite chain-like atlases, and finite-difference C^k
// certification.

#include "twoline/kernels.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace twoline::join {

using Fn = std::function<double(double)>;

// C^inf step: 0 for t <= 0, 1 for t >= 1, built from exp(-1/t).
double smooth_step(double t);
double smooth_step_derivative(double t);

// C^inf, 0 outside (l0, r0), 1 on [l1, r1], values in [0, 1].
// Requires l0 < l1 <= r1 < r0 (DomainError otherwise).
Fn bump_plateau(double l0, double l1, double r1, double r0);

// An increasing homeomorphism of [lo, hi] onto its image, held as an
// immutable expression tree: analytic callable, monotone cubic through
// samples, composition, inverse, or extension by the identity. Inverses of
// compositions invert factor by factor.
class NumericDiffeo {
 public:
  struct Node;

  NumericDiffeo();  // identity on [0, 1]
  static NumericDiffeo identity(double lo, double hi);
  // df and inverse are optional; missing ones are computed numerically.
  static NumericDiffeo from_function(Fn f, double lo, double hi, Fn df = nullptr, Fn inverse = nullptr);
  // Strictly increasing xs and ys (DomainError otherwise).
  static NumericDiffeo from_samples(std::vector<double> xs, std::vector<double> ys);
  // outer o inner on inner's domain.
  static NumericDiffeo compose(const NumericDiffeo& outer, const NumericDiffeo& inner);
  // inner on its own domain, identity on the rest of [lo, hi]. inner must
  // map its domain onto itself.
  static NumericDiffeo extend(const NumericDiffeo& inner, double lo, double hi);

  NumericDiffeo inverse_map() const;
  // Same map on a subinterval of the domain.
  NumericDiffeo restrict(double lo, double hi) const;
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double operator()(double x) const;
  double derivative(double x) const;
  double inverse(double y) const;
  bool is_identity() const;
  bool sampled() const;
  // Interior points where the map may lose smoothness: sample knots and the
  // ends of extended pieces, carried through compositions and inverses.
  std::vector<double> breakpoints() const;
  Fn function() const;
  // Knots for sampled maps, otherwise n+1 uniform points.
  std::pair<std::vector<double>, std::vector<double>> samples(int n = 64) const;

 private:
  NumericDiffeo(std::shared_ptr<const Node> node, double lo, double hi) : node_(std::move(node)), lo_(lo), hi_(hi) {}
  std::shared_ptr<const Node> node_;
  double lo_ = 0.0, hi_ = 1.0;
};

// ---------------------------------------------------------------- certification

struct SmoothCert {
  int k = 0;
  int grid_level = 0;
  int points = 0;                    // check points used
  std::vector<double> tolerance;     // per order
  std::vector<double> max_residual;  // per order, relative |left - right|
  bool positive_derivative = true;
  // Every one-sided estimate passed its Cauchy test. Unconverged estimates
  // that still agree within tol do not fail the certificate; diverging ones do.
  bool converged = true;
  int unconverged = 0;
  bool pass = false;
  bool refinement_checked = false;
  bool refinement_stable = true;
  std::vector<double> refined_residual;
  std::vector<std::string> failures;
};

inline constexpr int kMaxCertOrder = 4;
// 1e-6, 1e-5, 1e-3, 1e-2 for orders 1..4.
std::vector<double> default_tolerances(int k);

struct VerifyOptions {
  int k = 2;
  std::vector<double> tol;  // per order; empty selects default_tolerances(k); one value applies to all
  int grid_level = 4;       // dyadic grid with 2^level cells on the domain
  std::vector<double> seams;
  bool refine = true;  // repeat on the doubled grid and compare
  bool require_increasing = false;  // first derivative must be > 0 (always on for NumericDiffeo)
  int halvings = 20;
  kernels::Exec exec = kernels::Exec::Parallel;
};

// Compares one-sided Richardson estimates of orders 1..k at every interior
// grid point and seam; stencils never cross a declared seam or the ends.
SmoothCert verify_ck_numeric(const Fn& f, double lo, double hi, const VerifyOptions& opt);
SmoothCert verify_ck_numeric(const NumericDiffeo& map, const VerifyOptions& opt);
// Worst-of merge: residuals maxed, pass and-ed, failures concatenated.
SmoothCert merge(const std::vector<SmoothCert>& certs);

// ---------------------------------------------------------------- glue

struct GlueOptions {
  int grid_cells = 1 << 12;
  double quad_tol = 1e-10;
  int max_retries = 6;
  double eps_fraction = 0.125;  // first eps as a fraction of c - b, below 1/4
  kernels::Exec exec = kernels::Exec::Parallel;
};

struct GlueResult {
  NumericDiffeo p;
  double eps = 0.0;
  double A = 0.0;
  double B = 0.0;
  double gamma_integral = 0.0;  // integral of gamma over (b, c)
  double closing_correction = 0.0;
  int retries = 0;
  Fn gamma;
  std::vector<double> grid;    // quadrature grid on [b, c]
  std::vector<double> values;  // p on the grid
};

// p = id on (b, b+eps], p = g on [c-eps, c), p' = gamma > 0 in between.
// g must be an increasing self-map of [b, c] fixing the ends; eps in
// (0, (c-b)/4). Throws GlueInfeasible when A <= 0, DomainError on bad g.
GlueResult glue_id_and_diff(const NumericDiffeo& g, double eps, const GlueOptions& opt = {});
// eps = (c-b)/8, halved on GlueInfeasible up to opt.max_retries times.
GlueResult glue_with_retry(const NumericDiffeo& g, const GlueOptions& opt = {});

// ---------------------------------------------------------------- charts

struct IntervalChart {
  std::string label;
  double lo = 0.0;
  double hi = 1.0;
};

struct JoinResult {
  IntervalChart chart;  // image (a; d)
  NumericDiffeo p;      // W o u^-1 on (a; c)
  NumericDiffeo q;      // W o v^-1 on (b; d)
  GlueResult glue;
  std::vector<double> p_seams, q_seams;
  SmoothCert cert;
};

struct JoinOptions {
  GlueOptions glue;
  VerifyOptions verify;  // k lives here; seams are filled in per map
  bool certify = true;
};

// u on (a; c), v on (b; d), transition g = v o u^-1 on (b; c) onto itself.
// Throws NotJoinable unless a < b < c < d and g lives on [b, c].
JoinResult join_charts(const IntervalChart& u, const IntervalChart& v, const NumericDiffeo& g,
                       const JoinOptions& opt = {});

// Consecutive charts overlap on (lo_{i+1}; hi_i) in both charts' coordinates;
// transitions[i] maps that interval onto itself (chart i -> chart i+1).
struct ChainAtlas {
  std::vector<IntervalChart> charts;
  std::vector<NumericDiffeo> transitions;

  // Interleaving lo_i < lo_{i+1} < hi_i < hi_{i+1}, no triple overlaps
  // (hi_i <= lo_{i+2}), transition domains. Throws NotJoinable with index.
  void validate() const;
};

enum class CollapseOrder { LeftToRight, MiddleOut };

struct CollapseResult {
  IntervalChart chart;
  std::vector<NumericDiffeo> maps;          // W o phi_i^-1 per original chart
  std::vector<std::vector<double>> seams;   // seams of each map
  std::vector<int> join_order;              // overlap indices in the order joined
  std::vector<double> eps;                  // per join, in join order
  SmoothCert cert;
};

CollapseResult collapse_chain(const ChainAtlas& atlas, CollapseOrder order = CollapseOrder::LeftToRight,
                              const JoinOptions& opt = {});

// b + (c-b) t^e with t = (x-b)/(c-b): an increasing self-map of [b, c].
NumericDiffeo rescaled_power(double b, double c, double e);

}  // namespace twoline::join

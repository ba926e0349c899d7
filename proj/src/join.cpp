#include "twoline/join.hpp"

#include "twoline/error.hpp"
#include "twoline/interp.hpp"
#include "twoline/quadrature.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace twoline::join {

namespace {

std::string num(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

}  // namespace

double smooth_step(double t) {
  if (t <= 0) return 0.0;
  if (t >= 1) return 1.0;
  const double e0 = std::exp(-1.0 / t), e1 = std::exp(-1.0 / (1.0 - t));
  return e0 / (e0 + e1);
}

double smooth_step_derivative(double t) {
  if (t <= 0 || t >= 1) return 0.0;
  const double s = smooth_step(t);
  return s * (1.0 - s) * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t)));
}

Fn bump_plateau(double l0, double l1, double r1, double r0) {
  if (!(l0 < l1 && l1 <= r1 && r1 < r0))
    throw DomainError("bump_plateau needs l0 < l1 <= r1 < r0, got " + num(l0) + ", " + num(l1) + ", " + num(r1) +
                      ", " + num(r0));
  return [=](double x) {
    if (x <= l0 || x >= r0) return 0.0;
    if (x < l1) return smooth_step((x - l0) / (l1 - l0));
    if (x <= r1) return 1.0;
    return smooth_step((r0 - x) / (r0 - r1));
  };
}

// ---------------------------------------------------------------- NumericDiffeo

struct NumericDiffeo::Node {
  enum class Kind { Identity, Function, Sampled, Composite, Inverse, Extended };
  Kind kind = Kind::Identity;
  double lo = 0.0, hi = 1.0;  // domain
  Fn f, df, inv;
  std::shared_ptr<const numeric::MonotoneCubic> cubic;
  std::shared_ptr<const Node> a, b;  // composite: a o b; inverse / extended: a

  double eval(double x) const {
    switch (kind) {
      case Kind::Identity: return x;
      case Kind::Function: return f(x);
      case Kind::Sampled: return (*cubic)(x);
      case Kind::Composite: return a->eval(b->eval(x));
      case Kind::Inverse: return a->invert(x);
      case Kind::Extended: return x < a->lo || x > a->hi ? x : a->eval(x);
    }
    return x;
  }

  double deriv(double x) const {
    switch (kind) {
      case Kind::Identity: return 1.0;
      case Kind::Function: return df ? df(x) : numeric_derivative(x);
      case Kind::Sampled: return cubic->derivative(x);
      case Kind::Composite: return a->deriv(b->eval(x)) * b->deriv(x);
      case Kind::Inverse: return 1.0 / a->deriv(a->invert(x));
      case Kind::Extended: return x < a->lo || x > a->hi ? 1.0 : a->deriv(x);
    }
    return 1.0;
  }

  double invert(double y) const {
    switch (kind) {
      case Kind::Identity: return y;
      case Kind::Function: return inv ? inv(y) : solve(y);
      case Kind::Sampled: return cubic->inverse(y);
      case Kind::Composite: return b->invert(a->invert(y));
      case Kind::Inverse: return a->eval(y);
      case Kind::Extended: return y < a->lo || y > a->hi ? y : a->invert(y);
    }
    return y;
  }

  // Fourth-order differences, one-sided near the ends.
  double numeric_derivative(double x) const {
    const double h = std::ldexp(hi - lo, -10);
    if (x - 2 * h >= lo && x + 2 * h <= hi)
      return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
    const double s = x - lo < hi - x ? h : -h;
    return (-25 * f(x) + 48 * f(x + s) - 36 * f(x + 2 * s) + 16 * f(x + 3 * s) - 3 * f(x + 4 * s)) / (12 * s);
  }

  double solve(double y) const {
    const double flo = f(lo), fhi = f(hi);
    if (y <= flo) return lo;
    if (y >= fhi) return hi;
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve([&](double x) { return f(x) - y; }, lo, hi, flo - y, fhi - y,
                                               boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (r.first + r.second);
  }
};

NumericDiffeo::NumericDiffeo() : NumericDiffeo(identity(0.0, 1.0)) {}

NumericDiffeo NumericDiffeo::identity(double lo, double hi) {
  if (!(lo < hi)) throw DomainError("empty domain [" + num(lo) + ", " + num(hi) + "]");
  auto n = std::make_shared<Node>();
  n->lo = lo;
  n->hi = hi;
  return NumericDiffeo(n, lo, hi);
}

NumericDiffeo NumericDiffeo::from_function(Fn f, double lo, double hi, Fn df, Fn inverse) {
  if (!(lo < hi)) throw DomainError("empty domain [" + num(lo) + ", " + num(hi) + "]");
  if (!f) throw DomainError("missing function");
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Function;
  n->lo = lo;
  n->hi = hi;
  n->f = std::move(f);
  n->df = std::move(df);
  n->inv = std::move(inverse);
  return NumericDiffeo(n, lo, hi);
}

NumericDiffeo NumericDiffeo::from_samples(std::vector<double> xs, std::vector<double> ys) {
  auto cubic = std::make_shared<const numeric::MonotoneCubic>(std::move(xs), std::move(ys));
  if (!cubic->increasing()) throw DomainError("sampled map must be increasing");
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Sampled;
  n->lo = cubic->lo();
  n->hi = cubic->hi();
  n->cubic = cubic;
  return NumericDiffeo(n, n->lo, n->hi);
}

NumericDiffeo NumericDiffeo::compose(const NumericDiffeo& outer, const NumericDiffeo& inner) {
  if (outer.is_identity()) return inner;
  if (inner.is_identity()) return NumericDiffeo(outer.node_, inner.lo_, inner.hi_);
  const double slack = 1e-9 * std::max(1.0, outer.hi_ - outer.lo_);
  const double ilo = inner(inner.lo_), ihi = inner(inner.hi_);
  if (ilo < outer.lo_ - slack || ihi > outer.hi_ + slack)
    throw DomainError("composition: inner image [" + num(ilo) + ", " + num(ihi) + "] leaves the outer domain [" +
                      num(outer.lo_) + ", " + num(outer.hi_) + "]");
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Composite;
  n->lo = inner.lo_;
  n->hi = inner.hi_;
  n->a = outer.node_;
  n->b = inner.node_;
  return NumericDiffeo(n, n->lo, n->hi);
}

NumericDiffeo NumericDiffeo::extend(const NumericDiffeo& inner, double lo, double hi) {
  if (!(lo <= inner.lo_ && inner.hi_ <= hi)) throw DomainError("extension domain must contain the map's domain");
  if (inner.is_identity()) return identity(lo, hi);
  const double slack = 1e-9 * std::max(1.0, hi - lo);
  if (std::fabs(inner(inner.lo_) - inner.lo_) > slack || std::fabs(inner(inner.hi_) - inner.hi_) > slack)
    throw DomainError("extension by the identity needs a map fixing its domain ends");
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Extended;
  n->lo = lo;
  n->hi = hi;
  n->a = inner.node_;
  return NumericDiffeo(n, lo, hi);
}

NumericDiffeo NumericDiffeo::inverse_map() const {
  if (is_identity()) return *this;
  const double ylo = (*this)(lo_), yhi = (*this)(hi_);
  if (node_->kind == Node::Kind::Inverse) return NumericDiffeo(node_->a, ylo, yhi);
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Inverse;
  n->lo = ylo;
  n->hi = yhi;
  n->a = node_;
  return NumericDiffeo(n, ylo, yhi);
}

NumericDiffeo NumericDiffeo::restrict(double lo, double hi) const {
  const double slack = 1e-12 * std::max(1.0, hi_ - lo_);
  if (!(lo < hi) || lo < lo_ - slack || hi > hi_ + slack)
    throw DomainError("[" + num(lo) + ", " + num(hi) + "] is not inside the domain [" + num(lo_) + ", " + num(hi_) + "]");
  return NumericDiffeo(node_, lo, hi);
}

double NumericDiffeo::operator()(double x) const { return node_->eval(x); }
double NumericDiffeo::derivative(double x) const { return node_->deriv(x); }
double NumericDiffeo::inverse(double y) const { return node_->invert(y); }
bool NumericDiffeo::is_identity() const { return node_->kind == Node::Kind::Identity; }
bool NumericDiffeo::sampled() const { return node_->kind == Node::Kind::Sampled; }

namespace {

void collect_breaks(const NumericDiffeo::Node& n, std::vector<double>& out) {
  using Kind = NumericDiffeo::Node::Kind;
  switch (n.kind) {
    case Kind::Identity:
    case Kind::Function: return;
    case Kind::Sampled: out.insert(out.end(), n.cubic->xs().begin(), n.cubic->xs().end()); return;
    case Kind::Composite: {
      collect_breaks(*n.b, out);
      std::vector<double> outer;
      collect_breaks(*n.a, outer);
      for (double t : outer) out.push_back(n.b->invert(t));
      return;
    }
    case Kind::Inverse: {
      std::vector<double> inner;
      collect_breaks(*n.a, inner);
      for (double t : inner) out.push_back(n.a->eval(t));
      return;
    }
    case Kind::Extended:
      out.push_back(n.a->lo);
      out.push_back(n.a->hi);
      collect_breaks(*n.a, out);
      return;
  }
}

}  // namespace

std::vector<double> NumericDiffeo::breakpoints() const {
  std::vector<double> all, out;
  collect_breaks(*node_, all);
  std::sort(all.begin(), all.end());
  for (double x : all)
    if (x > lo_ && x < hi_ && (out.empty() || x - out.back() > 1e-12 * (hi_ - lo_))) out.push_back(x);
  return out;
}

Fn NumericDiffeo::function() const {
  return [n = node_](double x) { return n->eval(x); };
}

std::pair<std::vector<double>, std::vector<double>> NumericDiffeo::samples(int n) const {
  if (sampled() && node_->lo == lo_ && node_->hi == hi_) return {node_->cubic->xs(), node_->cubic->ys()};
  if (n < 1) throw DomainError("need at least one sample interval");
  std::vector<double> xs(n + 1), ys(n + 1);
  for (int i = 0; i <= n; ++i) {
    xs[i] = i == n ? hi_ : lo_ + (hi_ - lo_) * i / n;
    ys[i] = (*this)(xs[i]);
  }
  return {xs, ys};
}

NumericDiffeo rescaled_power(double b, double c, double e) {
  if (!(b < c) || !(e > 0)) throw DomainError("rescaled_power needs b < c and e > 0");
  const double len = c - b;
  auto t = [=](double x) { return std::clamp((x - b) / len, 0.0, 1.0); };
  return NumericDiffeo::from_function([=](double x) { return b + len * std::pow(t(x), e); }, b, c,
                                      [=](double x) { return e * std::pow(t(x), e - 1.0); },
                                      [=](double y) { return b + len * std::pow(t(y), 1.0 / e); });
}

// ---------------------------------------------------------------- certification

std::vector<double> default_tolerances(int k) {
  static const double table[kMaxCertOrder] = {1e-6, 1e-5, 1e-3, 1e-2};
  if (k < 1 || k > kMaxCertOrder) throw DomainError("certification order must be in 1.." + std::to_string(kMaxCertOrder));
  return {table, table + k};
}

namespace {

constexpr size_t kMaxFailures = 20;

void add_failure(SmoothCert& c, std::string msg) {
  if (c.failures.size() < kMaxFailures) c.failures.push_back(std::move(msg));
}

struct LevelRun {
  int points = 0;
  std::vector<double> residual;
  int unconverged = 0;
  bool positive = true, converged = true, agree = true;
  std::vector<std::string> failures;
};

LevelRun run_level(const Fn& f, double lo, double hi, int level, const std::vector<double>& tol,
                   const VerifyOptions& opt) {
  const int k = opt.k;
  const double len = hi - lo;
  std::vector<double> seams;
  for (double s : opt.seams)
    if (s > lo + 1e-12 * len && s < hi - 1e-12 * len) seams.push_back(s);
  std::sort(seams.begin(), seams.end());
  // knots found by inverting a map may differ from declared seams by rounding
  seams.erase(std::unique(seams.begin(), seams.end(), [&](double x, double y) { return y - x < 1e-9 * len; }), seams.end());

  const long cells = 1L << level;
  const double near = std::ldexp(len, -level - 4);
  std::vector<double> points = seams;
  for (long i = 1; i < cells; ++i) {
    const double x = lo + len * static_cast<double>(i) / static_cast<double>(cells);
    bool close = false;
    for (double s : seams) close = close || std::fabs(x - s) < near;
    if (!close) points.push_back(x);
  }
  std::sort(points.begin(), points.end());

  std::vector<double> reach(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    const double x = points[i];
    double r = 0.5 * std::min(x - lo, hi - x);
    for (double s : seams)
      if (s != x) r = std::min(r, 0.5 * std::fabs(x - s));
    reach[i] = r;
  }

  // Looser tolerances admit noisier, smaller steps.
  std::vector<numeric::RichardsonConfig> cfg(k);
  for (int j = 0; j < k; ++j) {
    cfg[j].halvings = opt.halvings;
    cfg[j].noise_floor = std::max(1e-6, tol[j] / 100);
    cfg[j].cauchy_rel = std::max(1e-3, tol[j]);
  }
  const auto est = kernels::one_sided_estimates(f, points, reach, cfg, opt.exec);

  LevelRun run;
  run.points = static_cast<int>(points.size());
  run.residual.assign(k, 0.0);
  for (size_t i = 0; i < points.size(); ++i) {
    for (int j = 0; j < k; ++j) {
      const auto& l = est[i].left[j];
      const auto& r = est[i].right[j];
      const std::string where = "x=" + num(points[i]) + " order " + std::to_string(j + 1);
      if (!l.converged || !r.converged) {
        run.converged = false;
        ++run.unconverged;
      }
      if (l.diverging || r.diverging) {
        run.agree = false;
        run.failures.push_back(where + ": one-sided estimate diverges");
      }
      const double res = std::fabs(l.value - r.value) / std::max({1.0, std::fabs(l.value), std::fabs(r.value)});
      run.residual[j] = std::max(run.residual[j], res);
      if (!(res <= tol[j])) {
        run.agree = false;
        run.failures.push_back(where + ": left " + num(l.value) + " vs right " + num(r.value));
      }
      if (j == 0 && opt.require_increasing && !(l.value > 0 && r.value > 0)) {
        run.positive = false;
        run.failures.push_back(where + ": derivative not positive");
      }
    }
  }
  return run;
}

}  // namespace

SmoothCert verify_ck_numeric(const Fn& f, double lo, double hi, const VerifyOptions& opt) {
  if (!(lo < hi)) throw DomainError("empty domain");
  SmoothCert cert;
  cert.k = opt.k;
  cert.grid_level = opt.grid_level;
  if (opt.k < 1 || opt.k > kMaxCertOrder)
    throw DomainError("certification order must be in 1.." + std::to_string(kMaxCertOrder));
  if (opt.grid_level < 1 || opt.grid_level > 16) throw DomainError("grid level must be in 1..16");
  if (opt.tol.empty()) cert.tolerance = default_tolerances(opt.k);
  else if (opt.tol.size() == 1) cert.tolerance.assign(opt.k, opt.tol[0]);
  else if (static_cast<int>(opt.tol.size()) >= opt.k) cert.tolerance.assign(opt.tol.begin(), opt.tol.begin() + opt.k);
  else throw DomainError("need one tolerance or one per order");

  auto base = run_level(f, lo, hi, opt.grid_level, cert.tolerance, opt);
  cert.points = base.points;
  cert.max_residual = base.residual;
  cert.positive_derivative = base.positive;
  cert.converged = base.converged;
  cert.unconverged = base.unconverged;
  for (auto& m : base.failures) add_failure(cert, std::move(m));
  cert.pass = base.agree && base.positive;

  if (cert.pass && opt.refine) {
    auto fine = run_level(f, lo, hi, opt.grid_level + 1, cert.tolerance, opt);
    cert.refinement_checked = true;
    cert.refined_residual = fine.residual;
    cert.refinement_stable = fine.positive;
    for (auto& m : fine.failures)
      if (m.find("diverges") != std::string::npos || m.find("positive") != std::string::npos) {
        cert.refinement_stable = false;
        add_failure(cert, "refined grid: " + m);
      }
    for (int j = 0; j < opt.k; ++j)
      if (!(fine.residual[j] <= 2.0 * cert.tolerance[j])) {
        cert.refinement_stable = false;
        add_failure(cert, "refined grid: order " + std::to_string(j + 1) + " residual " + num(fine.residual[j]) +
                              " exceeds twice the tolerance");
      }
    cert.pass = cert.refinement_stable;
  }
  return cert;
}

SmoothCert verify_ck_numeric(const NumericDiffeo& map, const VerifyOptions& opt) {
  VerifyOptions o = opt;
  o.require_increasing = true;
  for (double x : map.breakpoints()) o.seams.push_back(x);
  return verify_ck_numeric(map.function(), map.lo(), map.hi(), o);
}

SmoothCert merge(const std::vector<SmoothCert>& certs) {
  SmoothCert out;
  if (certs.empty()) return out;
  out = certs.front();
  out.failures.clear();
  for (const auto& c : certs) {
    if (&c != &certs.front()) {
      out.k = std::max(out.k, c.k);
      out.grid_level = std::max(out.grid_level, c.grid_level);
      out.points += c.points;
      auto maxin = [](std::vector<double>& dst, const std::vector<double>& src) {
        if (dst.size() < src.size()) dst.resize(src.size(), 0.0);
        for (size_t j = 0; j < src.size(); ++j) dst[j] = std::max(dst[j], src[j]);
      };
      maxin(out.max_residual, c.max_residual);
      maxin(out.refined_residual, c.refined_residual);
      if (out.tolerance.size() < c.tolerance.size()) out.tolerance = c.tolerance;
      out.positive_derivative = out.positive_derivative && c.positive_derivative;
      out.converged = out.converged && c.converged;
      out.unconverged += c.unconverged;
      out.pass = out.pass && c.pass;
      out.refinement_checked = out.refinement_checked && c.refinement_checked;
      out.refinement_stable = out.refinement_stable && c.refinement_stable;
    }
    for (const auto& m : c.failures) add_failure(out, m);
  }
  return out;
}

// ---------------------------------------------------------------- glue

namespace {

void check_self_map(const NumericDiffeo& g) {
  const double b = g.lo(), c = g.hi(), len = c - b;
  const double slack = 1e-9 * std::max(1.0, len);
  if (std::fabs(g(b) - b) > slack || std::fabs(g(c) - c) > slack)
    throw DomainError("transition must fix the ends of [" + num(b) + ", " + num(c) + "], got g(b) = " + num(g(b)) +
                      ", g(c) = " + num(g(c)));
  constexpr int n = 256;
  double prev = g(b);
  for (int i = 1; i <= n; ++i) {
    const double x = i == n ? c : b + len * i / n;
    const double y = g(x);
    if (!(y > prev)) throw DomainError("transition is not increasing near x = " + num(x));
    if (i < n && !(g.derivative(x) > 0)) throw DomainError("transition derivative is not positive at x = " + num(x));
    prev = y;
  }
}

}  // namespace

GlueResult glue_id_and_diff(const NumericDiffeo& g, double eps, const GlueOptions& opt) {
  const double b = g.lo(), c = g.hi(), len = c - b;
  if (!(eps > 0 && eps < len / 4)) throw DomainError("eps must lie in (0, (c-b)/4), got " + num(eps));
  if (opt.grid_cells < 2) throw DomainError("glue grid needs at least two cells");
  check_self_map(g);

  // alpha: 1 near b, 0 in the middle, g' near c. beta vanishes on both end
  // strips, so gamma = alpha + (A/B) beta equals 1 and g' there.
  Fn gd = [g](double x) { return g.derivative(x); };
  Fn left = [=](double x) { return smooth_step((b + 2 * eps - x) / eps); };
  Fn right = [=](double x) { return smooth_step((x - (c - 2 * eps)) / eps); };
  Fn alpha = [=](double x) {
    const double r = right(x);
    return left(x) + (r > 0 ? r * gd(x) : 0.0);
  };
  Fn beta = bump_plateau(b + eps, b + 2 * eps, c - 2 * eps, c - eps);

  GlueResult out;
  out.p = NumericDiffeo::identity(b, c);
  out.eps = eps;
  out.A = len - numeric::adaptive_simpson(alpha, b, c, opt.quad_tol).value;
  out.B = numeric::adaptive_simpson(beta, b, c, opt.quad_tol).value;
  if (!(out.A > 0))
    throw GlueInfeasible("glue infeasible for eps = " + num(eps) + ": A = " + num(out.A) + " <= 0");
  const double ratio = out.A / out.B;
  Fn gamma = [=](double x) { return alpha(x) + ratio * beta(x); };
  out.gamma = gamma;
  out.gamma_integral = numeric::adaptive_simpson(gamma, b, c, opt.quad_tol).value;

  const int n = opt.grid_cells;
  out.grid.resize(n + 1);
  for (int i = 0; i <= n; ++i) out.grid[i] = i == n ? c : b + len * i / n;

  if (g.is_identity()) {
    out.values = out.grid;
    return out;
  }

  // Middle piece on [m0, m1]: cumulative Gauss table plus an in-cell Gauss
  // rule, then a flat-ended correction closing the quadrature error at m1.
  const double m0 = b + eps, m1 = c - eps, mlen = m1 - m0;
  auto mid = std::make_shared<std::vector<double>>(n + 1);
  for (int i = 0; i <= n; ++i) (*mid)[i] = i == n ? m1 : m0 + mlen * i / n;
  auto table = std::make_shared<const std::vector<double>>(
      kernels::cumulative_integral(gamma, *mid, opt.quad_tol, opt.exec, kernels::Rule::Gauss8));
  auto integral = [=](double x) {
    long i = static_cast<long>(std::floor((x - m0) / mlen * n));
    i = std::clamp(i, 0L, static_cast<long>(n) - 1);
    return m0 + (*table)[i] + numeric::gauss_legendre8(gamma, (*mid)[i], x);
  };
  const double delta = m0 + table->back() - g(m1);
  out.closing_correction = delta;

  Fn p = [=](double x) {
    if (x <= m0) return x;
    if (x >= m1) return g(x);
    return integral(x) - delta * smooth_step((x - m0) / mlen);
  };
  Fn dp = [=](double x) {
    if (x <= m0) return 1.0;
    if (x >= m1) return g.derivative(x);
    return gamma(x) - delta * smooth_step_derivative((x - m0) / mlen) / mlen;
  };
  out.p = NumericDiffeo::from_function(p, b, c, dp);
  out.values = kernels::sample(p, out.grid, opt.exec);
  return out;
}

GlueResult glue_with_retry(const NumericDiffeo& g, const GlueOptions& opt) {
  if (!(opt.eps_fraction > 0 && opt.eps_fraction < 0.25)) throw DomainError("eps fraction must be in (0, 1/4)");
  double eps = (g.hi() - g.lo()) * opt.eps_fraction;
  for (int attempt = 0;; ++attempt, eps /= 2) {
    try {
      auto r = glue_id_and_diff(g, eps, opt);
      r.retries = attempt;
      return r;
    } catch (const GlueInfeasible& e) {
      if (attempt >= opt.max_retries)
        throw GlueInfeasible(std::string(e.what()) + " (gave up after " + std::to_string(attempt) + " retries)");
    }
  }
}

// ---------------------------------------------------------------- charts

JoinResult join_charts(const IntervalChart& u, const IntervalChart& v, const NumericDiffeo& g, const JoinOptions& opt) {
  const double a = u.lo, c = u.hi, b = v.lo, d = v.hi;
  if (!(a < b && b < c && c < d))
    throw NotJoinable("charts do not interleave: need a < b < c < d, got (" + num(a) + "; " + num(c) + ") and (" +
                      num(b) + "; " + num(d) + ")");
  const double slack = 1e-9 * std::max(1.0, d - a);
  if (std::fabs(g.lo() - b) > slack || std::fabs(g.hi() - c) > slack)
    throw NotJoinable("transition domain [" + num(g.lo()) + ", " + num(g.hi()) + "] is not the overlap [" + num(b) +
                      ", " + num(c) + "]");

  JoinResult out;
  out.chart = {u.label + "+" + v.label, a, d};
  out.glue = glue_with_retry(g, opt.glue);
  const auto& P = out.glue.p;
  out.p = NumericDiffeo::extend(P, a, c);
  out.q = NumericDiffeo::extend(NumericDiffeo::compose(P, g.inverse_map()), b, d);
  const double e = out.glue.eps;
  if (!g.is_identity()) {
    out.p_seams = {b, b + e, c - e};
    out.q_seams = {g(b + e), g(c - e), c};
  }
  if (opt.certify) {
    VerifyOptions vp = opt.verify, vq = opt.verify;
    vp.seams = out.p_seams;
    vq.seams = out.q_seams;
    out.cert = merge({verify_ck_numeric(out.p, vp), verify_ck_numeric(out.q, vq)});
  }
  return out;
}

void ChainAtlas::validate() const {
  const int m = static_cast<int>(charts.size());
  if (m < 2) throw NotJoinable("a chain needs at least two charts");
  if (static_cast<int>(transitions.size()) != m - 1)
    throw NotJoinable("a chain of " + std::to_string(m) + " charts needs " + std::to_string(m - 1) + " transitions");
  for (int i = 0; i < m; ++i)
    if (!(charts[i].lo < charts[i].hi)) throw NotJoinable("chart image is empty", i);
  for (int i = 0; i + 1 < m; ++i) {
    const auto &x = charts[i], &y = charts[i + 1];
    if (!(x.lo < y.lo && y.lo < x.hi && x.hi < y.hi))
      throw NotJoinable("charts " + std::to_string(i) + " and " + std::to_string(i + 1) + " do not interleave", i);
    if (i + 2 < m && !(x.hi <= charts[i + 2].lo))
      throw NotJoinable("charts " + std::to_string(i) + ".." + std::to_string(i + 2) + " have a triple overlap", i);
    const auto& t = transitions[i];
    const double slack = 1e-9 * std::max(1.0, y.hi - x.lo);
    if (std::fabs(t.lo() - y.lo) > slack || std::fabs(t.hi() - x.hi) > slack)
      throw NotJoinable("transition " + std::to_string(i) + " is not defined on the overlap", i);
  }
}

CollapseResult collapse_chain(const ChainAtlas& atlas, CollapseOrder order, const JoinOptions& opt) {
  atlas.validate();
  const int m = static_cast<int>(atlas.charts.size());
  const auto& ch = atlas.charts;

  CollapseResult out;
  for (const auto& c : ch) {
    out.maps.push_back(NumericDiffeo::identity(c.lo, c.hi));
    out.seams.emplace_back();
  }
  if (order == CollapseOrder::LeftToRight) {
    for (int j = 0; j + 1 < m; ++j) out.join_order.push_back(j);
  } else {
    int l = (m - 2) / 2, r = l;
    out.join_order.push_back(l);
    while (static_cast<int>(out.join_order.size()) < m - 1) {
      if (l > 0) out.join_order.push_back(--l);
      if (r < m - 2) out.join_order.push_back(++r);
    }
  }

  std::vector<int> group(m);  // group id per chart: its leftmost chart
  for (int i = 0; i < m; ++i) group[i] = i;
  auto group_range = [&](int i) {
    int l = i, r = i;
    while (l > 0 && group[l - 1] == group[i]) --l;
    while (r + 1 < m && group[r + 1] == group[i]) ++r;
    return std::pair{l, r};
  };

  JoinOptions jopt = opt;
  jopt.certify = false;
  for (int j : out.join_order) {
    auto [ll, lr] = group_range(j);
    auto [rl, rr] = group_range(j + 1);
    const double b = ch[j + 1].lo, c = ch[j].hi;
    // Both sides are still their own charts on this overlap.
    for (double t : {0.25, 0.5, 0.75}) {
      const double x = b + t * (c - b);
      if (out.maps[j](x) != x || out.maps[j + 1](x) != x)
        throw NotJoinable("joined region reaches into overlap " + std::to_string(j), j);
    }
    JoinResult jr;
    try {
      jr = join_charts({"", ch[ll].lo, ch[lr].hi}, {"", ch[rl].lo, ch[rr].hi}, atlas.transitions[j], jopt);
    } catch (const GlueInfeasible& e) {
      throw GlueInfeasible("join " + std::to_string(j) + ": " + e.what());
    } catch (const NotJoinable& e) {
      throw NotJoinable("join " + std::to_string(j) + ": " + e.what(), j);
    }
    out.eps.push_back(jr.glue.eps);
    auto update = [&](int i, const NumericDiffeo& w, const std::vector<double>& seams) {
      const auto& old = out.maps[i];
      for (double s : seams)
        if (s > old(old.lo()) && s < old(old.hi())) out.seams[i].push_back(old.inverse(s));
      out.maps[i] = NumericDiffeo::compose(w, old);
    };
    for (int i = ll; i <= lr; ++i) update(i, jr.p, jr.p_seams);
    for (int i = rl; i <= rr; ++i) update(i, jr.q, jr.q_seams);
    for (int i = rl; i <= rr; ++i) group[i] = group[ll];
  }
  for (auto& s : out.seams) std::sort(s.begin(), s.end());

  std::string label;
  for (const auto& c : ch) label += (label.empty() ? "" : "+") + c.label;
  out.chart = {label, ch.front().lo, ch.back().hi};

  if (opt.certify) {
    std::vector<SmoothCert> certs;
    for (int i = 0; i < m; ++i) {
      VerifyOptions v = opt.verify;
      v.seams = out.seams[i];
      certs.push_back(verify_ck_numeric(out.maps[i], v));
    }
    out.cert = merge(certs);
  }
  return out;
}

}  // namespace twoline::join

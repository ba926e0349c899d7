#include "twoline/germs.hpp"

#include "twoline/error.hpp"
#include "twoline/param.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace twoline::germs {

namespace {

constexpr double kExponentSnap = 1e-12;
constexpr double kCancelRel = 1e-14;

// Numeric jet comparison bands: equal below, unequal above, undecided between.
constexpr double kNumericEqual = 1e-6;
constexpr double kNumericDiffer = 1e-3;

double snap_exponent(double e) {
  double r = std::round(e);
  return std::fabs(e - r) <= kExponentSnap ? r : e;
}

bool is_integer(double e) { return std::fabs(e - std::round(e)) <= kExponentSnap; }

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

std::vector<PowerTerm> multiply(const std::vector<PowerTerm>& a, const std::vector<PowerTerm>& b) {
  std::vector<PowerTerm> out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) out.push_back({x.coeff * y.coeff, snap_exponent(x.exponent + y.exponent)});
  return out;
}

// outer(inner(t)) where inner(t) > 0 near 0. nullopt when the result is not
// a finite power sum.
std::optional<SideExpansion> substitute(const SideExpansion& outer, const SideExpansion& inner) {
  if (inner.is_monomial()) {
    const auto [c, e] = inner.leading();
    std::vector<PowerTerm> out;
    for (const auto& q : outer.terms())
      out.push_back({q.coeff * std::pow(c, q.exponent), snap_exponent(e * q.exponent)});
    return SideExpansion(std::move(out));
  }
  if (!outer.all_integer_exponents()) return std::nullopt;

  std::vector<PowerTerm> out;
  std::vector<PowerTerm> power = inner.terms();
  int have = 1;
  for (const auto& q : outer.terms()) {
    int n = static_cast<int>(std::lround(q.exponent));
    for (; have < n; ++have) power = SideExpansion(multiply(power, inner.terms())).terms();
    for (const auto& t : power) out.push_back({q.coeff * t.coeff, t.exponent});
  }
  return SideExpansion(std::move(out));
}

// Inner expansion made positive: |P(t)| = sign * P(t) near 0.
SideExpansion absolute(const SideExpansion& p) {
  if (p.leading().coeff > 0) return p;
  std::vector<PowerTerm> flipped = p.terms();
  for (auto& t : flipped) t.coeff = -t.coeff;
  return SideExpansion(std::move(flipped));
}

Side landing_side(const SideExpansion& p) { return p.leading().coeff > 0 ? Side::Pos : Side::Neg; }

// Solves f(x) = y for x on the side determined by the orientation.
double solve_monotone(const std::function<double(double)>& f, Orientation o, double y) {
  if (y == 0.0) return 0.0;
  Side target_value_side = y > 0 ? Side::Pos : Side::Neg;
  Side x_side = o == Orientation::Preserving ? target_value_side : opposite(target_value_side);
  const double sx = side_sign(x_side);
  const double ay = std::fabs(y);
  auto residual = [&](double t) { return std::fabs(f(sx * t)) - ay; };

  double hi = std::max(ay, std::numeric_limits<double>::min());
  int guard = 0;
  while (residual(hi) < 0) {
    hi *= 2.0;
    if (++guard > 2100 || !std::isfinite(hi)) return std::numeric_limits<double>::quiet_NaN();
  }
  double lo = hi;
  guard = 0;
  while (residual(lo) > 0) {
    lo *= 0.5;
    if (++guard > 2100 || lo == 0.0) break;
  }
  if (residual(lo) > 0) return sx * lo;
  if (residual(lo) == 0) return sx * lo;
  std::uintmax_t iters = 200;
  auto [a, b] = boost::math::tools::toms748_solve(residual, lo, hi,
                                                  boost::math::tools::eps_tolerance<double>(52), iters);
  return sx * 0.5 * (a + b);
}

NumericGerm numeric_inverse(std::function<double(double)> f, Orientation o, std::string provenance) {
  auto inv = [f = std::move(f), o](double y) { return solve_monotone(f, o, y); };
  return NumericGerm(std::move(inv), o, std::move(provenance));
}

bool close(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

std::string to_string(Orientation o) { return o == Orientation::Preserving ? "preserving" : "reversing"; }
std::string to_string(Side s) { return s == Side::Neg ? "neg" : "pos"; }

// ---------------------------------------------------------------- SideExpansion

SideExpansion::SideExpansion(std::vector<PowerTerm> terms) {
  double scale = 0.0;
  for (auto& t : terms) {
    if (!std::isfinite(t.coeff) || !std::isfinite(t.exponent))
      throw DomainError("power term with non-finite coefficient or exponent");
    if (t.coeff == 0.0) throw DomainError("power term coefficient must be nonzero");
    if (t.exponent <= 0.0) throw DomainError("power term exponent must be positive");
    t.exponent = snap_exponent(t.exponent);
    scale = std::max(scale, std::fabs(t.coeff));
  }
  std::sort(terms.begin(), terms.end(),
            [](const PowerTerm& a, const PowerTerm& b) { return a.exponent < b.exponent; });
  for (const auto& t : terms) {
    if (!terms_.empty() && std::fabs(terms_.back().exponent - t.exponent) <= kExponentSnap)
      terms_.back().coeff += t.coeff;
    else
      terms_.push_back(t);
  }
  std::erase_if(terms_, [&](const PowerTerm& t) { return std::fabs(t.coeff) <= kCancelRel * scale; });
  if (terms_.empty()) throw DomainError("side expansion vanishes identically");
}

SideExpansion SideExpansion::monomial(double coeff, double exponent) {
  return SideExpansion({{coeff, exponent}});
}

bool SideExpansion::all_integer_exponents() const noexcept {
  return std::all_of(terms_.begin(), terms_.end(), [](const PowerTerm& t) { return is_integer(t.exponent); });
}

double SideExpansion::operator()(double t) const {
  double sum = 0.0;
  for (const auto& term : terms_) sum += term.coeff * std::pow(t, term.exponent);
  return sum;
}

// ---------------------------------------------------------------- Germ

Germ::Germ(SideExpansion neg, SideExpansion pos, Orientation orientation)
    : neg_(std::move(neg)), pos_(std::move(pos)), orientation_(orientation) {
  const double ln = neg_.leading().coeff, lp = pos_.leading().coeff;
  bool ok = orientation_ == Orientation::Preserving ? (ln < 0 && lp > 0) : (ln > 0 && lp < 0);
  if (!ok)
    throw DomainError("germ is not a bijection: leading coefficients (" + std::to_string(ln) + ", " +
                      std::to_string(lp) + ") do not match orientation " + to_string(orientation_));
}

Germ Germ::identity() { return linear(1.0); }

Germ Germ::linear(double slope) {
  if (slope == 0.0 || !std::isfinite(slope)) throw DomainError("linear germ needs a nonzero slope");
  return Germ(SideExpansion::monomial(-slope, 1.0), SideExpansion::monomial(slope, 1.0),
              slope > 0 ? Orientation::Preserving : Orientation::Reversing);
}

Germ Germ::monomial(double neg_coeff, double neg_exponent, double pos_coeff, double pos_exponent) {
  return Germ(SideExpansion::monomial(neg_coeff, neg_exponent), SideExpansion::monomial(pos_coeff, pos_exponent),
              pos_coeff > 0 ? Orientation::Preserving : Orientation::Reversing);
}

double Germ::operator()(double x) const {
  if (x < 0) return neg_(-x);
  if (x > 0) return pos_(x);
  return 0.0;
}

bool approx_equal(const Germ& a, const Germ& b, double tol) {
  if (a.orientation() != b.orientation()) return false;
  for (Side s : {Side::Neg, Side::Pos}) {
    const auto& ta = a.side(s).terms();
    const auto& tb = b.side(s).terms();
    if (ta.size() != tb.size()) return false;
    for (size_t i = 0; i < ta.size(); ++i) {
      if (std::fabs(ta[i].coeff - tb[i].coeff) > tol) return false;
      if (std::fabs(ta[i].exponent - tb[i].exponent) > tol) return false;
    }
  }
  return true;
}

bool is_identity(const Germ& g, double tol) { return approx_equal(g, Germ::identity(), tol); }

std::string to_string(const Germ& g) {
  std::ostringstream os;
  os.precision(12);
  auto side = [&](const SideExpansion& e, const char* var) {
    bool first = true;
    for (const auto& t : e.terms()) {
      if (!first) os << (t.coeff < 0 ? " - " : " + ");
      else if (t.coeff < 0) os << "-";
      first = false;
      os << std::fabs(t.coeff) << "*" << var;
      if (t.exponent != 1.0) os << "^" << t.exponent;
    }
  };
  os << "x<0: ";
  side(g.neg(), "(-x)");
  os << "; x>0: ";
  side(g.pos(), "x");
  os << " [" << to_string(g.orientation()) << "]";
  return os.str();
}

// ---------------------------------------------------------------- NumericGerm

NumericGerm::NumericGerm(std::function<double(double)> fn, Orientation orientation, std::string provenance)
    : fn_(std::make_shared<const std::function<double(double)>>(std::move(fn))),
      orientation_(orientation),
      provenance_(std::move(provenance)) {}

Orientation orientation(const AnyGerm& g) {
  return std::visit([](const auto& x) { return x.orientation(); }, g);
}

double evaluate(const AnyGerm& g, double x) {
  return std::visit([x](const auto& h) { return h(x); }, g);
}

std::function<double(double)> as_function(const AnyGerm& g) {
  return std::visit([](const auto& h) -> std::function<double(double)> { return h; }, g);
}

Germ make_wa(double a) {
  if (!(a > 0) || !std::isfinite(a)) throw DomainError("w_a needs a > 0");
  return Germ(SideExpansion::monomial(-1.0, 1.0), SideExpansion::monomial(a, 1.0), Orientation::Preserving);
}

// ---------------------------------------------------------------- group law

AnyGerm compose(const Germ& g, const Germ& h) {
  std::optional<SideExpansion> sides[2];
  for (Side s : {Side::Neg, Side::Pos}) {
    const SideExpansion& inner = h.side(s);
    const SideExpansion& outer = g.side(landing_side(inner));
    auto r = substitute(outer, absolute(inner));
    if (!r) {
      auto fn = [g, h](double x) { return g(h(x)); };
      return NumericGerm(fn, g.orientation() * h.orientation(), "compose: non-closed power sums");
    }
    sides[s == Side::Neg ? 0 : 1] = std::move(r);
  }
  return Germ(std::move(*sides[0]), std::move(*sides[1]), g.orientation() * h.orientation());
}

AnyGerm compose(const AnyGerm& g, const AnyGerm& h) {
  if (is_exact(g) && is_exact(h)) return compose(std::get<Germ>(g), std::get<Germ>(h));
  auto fg = as_function(g);
  auto fh = as_function(h);
  auto fn = [fg, fh](double x) { return fg(fh(x)); };
  return NumericGerm(fn, orientation(g) * orientation(h), "compose: numeric factor");
}

AnyGerm invert(const Germ& h) {
  if (!h.per_side_monomial()) return numeric_inverse(h, h.orientation(), "invert: root finding");
  std::optional<SideExpansion> sides[2];
  for (Side s : {Side::Neg, Side::Pos}) {
    const auto [c, e] = h.side(s).leading();
    Side image = c > 0 ? Side::Pos : Side::Neg;
    sides[image == Side::Neg ? 0 : 1] =
        SideExpansion::monomial(side_sign(s) * std::pow(std::fabs(c), -1.0 / e), 1.0 / e);
  }
  return Germ(std::move(*sides[0]), std::move(*sides[1]), h.orientation());
}

AnyGerm invert(const AnyGerm& h) {
  if (is_exact(h)) return invert(std::get<Germ>(h));
  return numeric_inverse(as_function(h), orientation(h), "invert: root finding");
}

// ---------------------------------------------------------------- jets

std::string to_string(const JetCoefficient& c) {
  switch (c.state) {
    case CoeffState::Nonexistent: return "nonexistent";
    case CoeffState::Indeterminate: return "indeterminate";
    case CoeffState::Value: break;
  }
  std::ostringstream os;
  os.precision(12);
  os << c.value;
  return os.str();
}

JetOrder::JetOrder(int k) : k_(k), infinite_(false) {
  if (k <= 0) throw DomainError("jet order must be positive");
  if (k > kMaxJetOrder) throw DomainError("jet order exceeds " + std::to_string(kMaxJetOrder));
}

JetOrder JetOrder::infinity() { return JetOrder(kMaxJetOrder, true); }

std::string JetOrder::str() const {
  return infinite_ ? "inf (capped at " + std::to_string(kMaxJetOrder) + ")" : std::to_string(k_);
}

Jet Jet::two_sided(const std::vector<double>& derivatives) {
  Jet j;
  j.order = static_cast<int>(derivatives.size());
  for (double d : derivatives) {
    j.neg.push_back(JetCoefficient::of(d));
    j.pos.push_back(JetCoefficient::of(d));
  }
  return j;
}

namespace {

std::vector<JetCoefficient> exact_jet(const SideExpansion& e, int k, Side side) {
  std::vector<JetCoefficient> out;
  for (int j = 1; j <= k; ++j) {
    bool blocked = std::any_of(e.terms().begin(), e.terms().end(), [j](const PowerTerm& t) {
      return !is_integer(t.exponent) && t.exponent < j;
    });
    if (blocked) {
      out.resize(k, JetCoefficient::nonexistent());
      break;
    }
    double c = 0.0;
    for (const auto& t : e.terms())
      if (is_integer(t.exponent) && std::lround(t.exponent) == j) c = t.coeff;
    // d^j/dx^j of c(-x)^j is c(-1)^j j!
    double sign = (side == Side::Neg && j % 2 == 1) ? -1.0 : 1.0;
    out.push_back(JetCoefficient::of(sign * c * factorial(j)));
  }
  return out;
}

std::vector<JetCoefficient> numeric_jet(const std::function<double(double)>& f, int k, Side side) {
  std::vector<JetCoefficient> out;
  auto dir = side == Side::Neg ? numeric::Direction::Left : numeric::Direction::Right;
  for (int j = 1; j <= k; ++j) {
    if (j > kMaxNumericOrder) {
      out.resize(k, JetCoefficient::indeterminate());
      break;
    }
    auto est = numeric::one_sided_derivative(f, 0.0, j, dir);
    if (est.converged) {
      out.push_back(JetCoefficient::of(est.value));
      continue;
    }
    out.resize(k, est.diverging ? JetCoefficient::nonexistent() : JetCoefficient::indeterminate());
    break;
  }
  return out;
}

}  // namespace

std::vector<JetCoefficient> one_sided_jet(const AnyGerm& h, int k, Side side) {
  if (k <= 0) throw DomainError("jet order must be positive");
  if (k > kMaxJetOrder) throw DomainError("jet order exceeds " + std::to_string(kMaxJetOrder));
  if (is_exact(h)) return exact_jet(std::get<Germ>(h).side(side), k, side);
  return numeric_jet(as_function(h), k, side);
}

Jet jet(const AnyGerm& h, int k) {
  Jet j;
  j.order = k;
  j.neg = one_sided_jet(h, k, Side::Neg);
  j.pos = one_sided_jet(h, k, Side::Pos);
  j.numeric = !is_exact(h);
  return j;
}

std::string describe(const SmoothnessReport& r) {
  std::ostringstream os;
  os << "C^" << r.max_order << " at 0 (checked through order " << r.requested_order
     << (r.capped ? ", capped" : "") << ")";
  if (r.obstruction)
    os << "; obstruction at order " << r.obstruction->order << ": one-sided derivatives "
       << to_string(r.obstruction->neg) << " (x<0) vs " << to_string(r.obstruction->pos) << " (x>0)";
  if (!r.conclusive) os << "; numeric estimate inconclusive";
  os << "; " << (r.is_diffeo_Ck ? "diffeomorphism" : "not a diffeomorphism");
  return os.str();
}

SmoothnessReport compare_sides(const Jet& j) {
  SmoothnessReport r;
  r.requested_order = j.order;
  r.max_order = 0;
  for (int i = 1; i <= j.order; ++i) {
    const auto& ln = j.neg[i - 1];
    const auto& lp = j.pos[i - 1];
    if (ln.state == CoeffState::Nonexistent || lp.state == CoeffState::Nonexistent) {
      r.obstruction = Obstruction{i, ln, lp};
      break;
    }
    if (ln.state == CoeffState::Indeterminate || lp.state == CoeffState::Indeterminate) {
      r.conclusive = false;
      break;
    }
    if (j.numeric) {
      double scale = std::max({1.0, std::fabs(ln.value), std::fabs(lp.value)});
      double diff = std::fabs(ln.value - lp.value);
      if (diff > kNumericDiffer * scale) {
        r.obstruction = Obstruction{i, ln, lp};
        break;
      }
      if (diff > kNumericEqual * scale) {
        r.conclusive = false;
        break;
      }
    } else if (!close(ln.value, lp.value, kExactTolerance)) {
      r.obstruction = Obstruction{i, ln, lp};
      break;
    }
    r.max_order = i;
  }
  if (r.max_order == j.order && j.order >= 1) {
    double slope = j.pos[0].value;
    if (j.numeric && std::fabs(slope) <= kNumericEqual) r.conclusive = false;
    r.is_diffeo_Ck = std::fabs(slope) > (j.numeric ? kNumericEqual : kExactTolerance);
  }
  return r;
}

SmoothnessReport smoothness_at_zero(const AnyGerm& h, JetOrder k) {
  auto r = compare_sides(jet(h, k.effective()));
  r.capped = k.infinite();
  return r;
}

SmoothnessReport sandwich_smoothness(const Jet& f, double a, double b, int n) {
  if (!(a > 0) || !(b > 0)) throw DomainError("sandwich needs a, b > 0");
  if (n < 1 || n > f.order) throw DomainError("sandwich order must satisfy 1 <= n <= jet order");
  for (int i = 0; i < n; ++i) {
    if (!f.neg[i].exists() || !f.pos[i].exists() || !close(f.neg[i].value, f.pos[i].value, kExactTolerance))
      throw DomainError("sandwich needs the two-sided jet of a C^k diffeomorphism");
  }
  const double slope = f.pos[0].value;
  if (std::fabs(slope) <= kExactTolerance) throw DomainError("f'(0) = 0: not a diffeomorphism jet");

  // q = w_b o f o w_a: for x < 0 either f(x) or b f(x), for x > 0 either
  // b f(ax) or f(ax), depending on which side f sends each half-line.
  Jet q;
  q.order = n;
  double apow = 1.0;
  for (int i = 0; i < n; ++i) {
    apow *= a;
    double d = f.pos[i].value;
    if (slope > 0) {
      q.neg.push_back(JetCoefficient::of(d));
      q.pos.push_back(JetCoefficient::of(b * apow * d));
    } else {
      q.neg.push_back(JetCoefficient::of(b * d));
      q.pos.push_back(JetCoefficient::of(apow * d));
    }
  }
  return compare_sides(q);
}

// ---------------------------------------------------------------- memberships

std::string to_string(Certainty c) {
  switch (c) {
    case Certainty::True: return "true";
    case Certainty::False: return "false";
    case Certainty::Indeterminate: return "indeterminate";
  }
  return "?";
}

Certainty diff_membership(const AnyGerm& h, JetOrder k) {
  auto r = smoothness_at_zero(h, k);
  if (r.obstruction) return Certainty::False;
  if (!r.conclusive) return Certainty::Indeterminate;
  if (!r.is_diffeo_Ck) return Certainty::False;
  // The inverse of a C^k map with nonzero derivative is C^k; the exact
  // inverse is checked as well whenever it is available.
  auto inv = invert(h);
  if (is_exact(inv) && !smoothness_at_zero(inv, k).is_diffeo_Ck) return Certainty::False;
  return Certainty::True;
}

bool in_diff(const AnyGerm& h, JetOrder k) { return diff_membership(h, k) == Certainty::True; }

bool in_jdiff(const AnyGerm& h, JetOrder k) {
  if (!in_diff(h, k)) return false;
  auto j = jet(h, k.effective());
  const double tol = j.numeric ? kNumericEqual : kExactTolerance;
  for (int i = 1; i < j.order; ++i) {
    if (!j.pos[i].exists() || std::fabs(j.pos[i].value) > tol * std::max(1.0, std::fabs(j.pos[0].value)))
      return false;
  }
  return true;
}

bool fixed_near_zero(const AnyGerm& h, double radius) {
  if (!(radius > 0)) throw DomainError("radius must be positive");
  auto f = as_function(h);
  constexpr int kSamples = 64;
  for (int i = 1; i <= kSamples; ++i) {
    // linear samples plus a geometric cluster toward 0
    for (double x : {radius * i / (kSamples + 1.0), radius * std::pow(2.0, -i / 2.0)}) {
      for (double s : {-x, x}) {
        if (std::fabs(f(s) - s) > 1e-12 * std::max(1.0, std::fabs(s))) return false;
      }
    }
  }
  return true;
}

}  // namespace twoline::germs

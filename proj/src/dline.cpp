#include "twoline/dline.hpp"

#include "twoline/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace twoline::dline {

using germs::SideExpansion;

namespace {

// Distances from 0 for germ comparisons, clustered toward 0 and kept
// inside |x| < 1/2 since only a neighbourhood of 0 matters.
std::vector<double> probe_points() {
  std::vector<double> xs;
  for (int j = 2; j <= 40; j += 2) xs.push_back(std::ldexp(1.0, -j));
  for (int i = 1; i <= 9; ++i) xs.push_back(i / 20.0);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

std::string describe_residual(const AnyGerm& residual) {
  if (const auto* g = std::get_if<Germ>(&residual)) return germs::to_string(*g);
  double worst = 0.0;
  for (double t : probe_points())
    for (double x : {-t, t}) worst = std::max(worst, std::fabs(germs::evaluate(residual, x) - x));
  std::ostringstream os;
  os << "numeric germ, max |r(x) - x| = " << worst << " on probe points";
  return os.str();
}

bool same_atlas(const SpecialMinimalAtlas& x, const SpecialMinimalAtlas& y) {
  return germs::approx_equal(x.h, y.h);
}

}  // namespace

std::string to_string(const PointL& p) {
  if (p.tilde) return "0~";
  std::ostringstream os;
  os << p.x;
  return os.str();
}

std::vector<PointL> hausdorff_closure(const PointL& p) {
  if (p.is_origin()) return {PointL::real(0.0), PointL::origin_tilde()};
  return {p};
}

MinimalAtlas SpecialMinimalAtlas::atlas() const {
  return {ChartL{Domain::U, Germ::identity()}, ChartL{Domain::V, h}};
}

AnyGerm transition_extension(const MinimalAtlas& atlas) {
  if (atlas.u.domain != Domain::U || atlas.v.domain != Domain::V)
    throw InvalidAtlas("a minimal atlas needs one chart over U and one over V");
  AnyGerm g = germs::compose(atlas.v.map, germs::invert(atlas.u.map));
  if (germs::is_exact(g)) return g;
  // Numeric transitions: confirm strict monotonicity on probe points.
  const double s = germs::orientation(g) == Orientation::Preserving ? 1.0 : -1.0;
  auto xs = probe_points();
  std::vector<double> line;
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) line.push_back(-*it);
  line.push_back(0.0);
  line.insert(line.end(), xs.begin(), xs.end());
  for (size_t i = 1; i < line.size(); ++i) {
    double d = s * (germs::evaluate(g, line[i]) - germs::evaluate(g, line[i - 1]));
    if (!(d > 0)) throw InvalidAtlas("transition map is not monotone near " + std::to_string(line[i]));
  }
  return g;
}

Germ transition_extension(const SpecialMinimalAtlas& atlas) { return atlas.h; }

bool is_orientable(const MinimalAtlas& atlas) {
  return germs::orientation(transition_extension(atlas)) == Orientation::Preserving;
}

SpecialReduction reduce_to_special(const MinimalAtlas& atlas) {
  auto g = transition_extension(atlas);
  if (germs::orientation(atlas.u.map) != Orientation::Preserving)
    throw DomainError("reduction to a special atlas is implemented for orientation-preserving u only");
  const auto* exact = std::get_if<Germ>(&g);
  if (!exact) throw DomainError("transition map is not an exact germ; no special atlas can be formed");
  return {SpecialMinimalAtlas{*exact}, atlas.u.map};
}

Certainty same_structure(const Germ& h, const Germ& g, JetOrder k) {
  return germs::diff_membership(germs::compose(g, germs::invert(h)), k);
}

std::string to_string(OriginAction a) { return a == OriginAction::Fix ? "fix" : "exchange"; }

DiffeoL::DiffeoL(AnyGerm restriction, OriginAction action, SpecialMinimalAtlas source, SpecialMinimalAtlas target,
                 int k)
    : restriction_(std::move(restriction)),
      action_(action),
      source_(std::move(source)),
      target_(std::move(target)),
      k_(k) {
  if (k < 1) throw DomainError("order k must be at least 1");
  for (const auto& p : {u_presentation(), v_presentation()}) {
    switch (germs::diff_membership(p, k)) {
      case Certainty::True: break;
      case Certainty::Indeterminate: certified_ = false; break;
      case Certainty::False:
        throw DomainError("local presentation is not a C^" + std::to_string(k) + " diffeomorphism germ: " +
                          describe_residual(p));
    }
  }
}

AnyGerm DiffeoL::u_presentation() const {
  if (action_ == OriginAction::Fix) return restriction_;
  return germs::compose(AnyGerm(target_.h), restriction_);
}

AnyGerm DiffeoL::v_presentation() const {
  AnyGerm hs_inv = germs::invert(source_.h);
  if (action_ == OriginAction::Fix) return germs::compose(AnyGerm(target_.h), germs::compose(restriction_, hs_inv));
  return germs::compose(restriction_, hs_inv);
}

PointL DiffeoL::operator()(const PointL& p) const {
  if (p.is_origin()) {
    const bool to_tilde = (action_ == OriginAction::Fix) == p.tilde;
    return to_tilde ? PointL::origin_tilde() : PointL::real(0.0);
  }
  return PointL::real(germs::evaluate(restriction_, p.x));
}

DiffeoL build_diffeo(const AnyGerm& a, const AnyGerm& b, const SpecialMinimalAtlas& source,
                     const SpecialMinimalAtlas& target, OriginAction action, int k) {
  AnyGerm hs_inv = germs::invert(source.h);
  AnyGerm r = action == OriginAction::Fix ? a : germs::compose(germs::invert(target.h), a);
  AnyGerm expected = action == OriginAction::Fix ? germs::compose(AnyGerm(target.h), germs::compose(a, hs_inv))
                                                 : germs::compose(r, hs_inv);
  if (!germs_agree(b, expected)) {
    throw IncompatiblePresentations("presentations do not satisfy the transition identity",
                                    describe_residual(germs::compose(b, germs::invert(expected))));
  }
  return DiffeoL(r, action, source, target, k);
}

AnyGerm phi_fix(const DiffeoL& d) {
  if (d.origin_action() != OriginAction::Fix) throw DomainError("phi_fix needs a map fixing the origins");
  return d.v_presentation();
}

AnyGerm phi_ex(const DiffeoL& d) {
  if (d.origin_action() != OriginAction::Exchange) throw DomainError("phi_ex needs a map exchanging the origins");
  return d.v_presentation();
}

namespace {

Germ psi_restriction(double a) {
  const double r = std::sqrt(a);
  return Germ(SideExpansion::monomial(1.0 / r, 1.0), SideExpansion::monomial(-r, 1.0), Orientation::Reversing);
}

}  // namespace

DiffeoL psi(double a, int k) {
  if (!(a > 0)) throw DomainError("psi needs a > 0");
  SpecialMinimalAtlas w{germs::make_wa(a)};
  return DiffeoL(psi_restriction(a), OriginAction::Exchange, w, w, k);
}

DiffeoL compose_diffeo(const DiffeoL& d2, const DiffeoL& d1) {
  if (!same_atlas(d1.target(), d2.source()))
    throw DomainError("cannot compose: structures in the middle differ");
  OriginAction action = d1.origin_action() == d2.origin_action() ? OriginAction::Fix : OriginAction::Exchange;
  return DiffeoL(germs::compose(d2.restriction(), d1.restriction()), action, d1.source(), d2.target(),
                 std::min(d1.k(), d2.k()));
}

bool same_map(const DiffeoL& x, const DiffeoL& y, double tol) {
  return x.origin_action() == y.origin_action() && germs_agree(x.restriction(), y.restriction(), tol);
}

bool germs_agree(const AnyGerm& x, const AnyGerm& y, double tol) {
  const auto* gx = std::get_if<Germ>(&x);
  const auto* gy = std::get_if<Germ>(&y);
  if (gx && gy) return germs::approx_equal(*gx, *gy, tol);
  if (germs::orientation(x) != germs::orientation(y)) return false;
  for (double t : probe_points())
    for (double s : {-t, t}) {
      double vx = germs::evaluate(x, s), vy = germs::evaluate(y, s);
      if (std::fabs(vx - vy) > tol * std::max(1.0, std::fabs(vy))) return false;
    }
  return true;
}

DiffeoClasses diffeo_classes(const Param& a, const Param& b, int k) {
  DiffeoClasses out;
  out.cells = cosets::classify_wa_pair(a, b, k);
  SpecialMinimalAtlas source{germs::make_wa(a.value())};
  SpecialMinimalAtlas target{germs::make_wa(b.value())};
  const double r = std::sqrt(a.value());
  for (cosets::Cell cell : cosets::kCells) {
    if (!out.cells[cell]) continue;
    switch (cell) {
      case cosets::Cell::FixPlus:
        out.witnesses.push_back({cell, "identity", DiffeoL(Germ::identity(), OriginAction::Fix, source, target, k)});
        break;
      case cosets::Cell::FixMinus:
        out.witnesses.push_back({cell, "flip", DiffeoL(Germ::linear(-1.0), OriginAction::Fix, source, target, k)});
        break;
      case cosets::Cell::ExPlus: {
        Germ flip_psi(SideExpansion::monomial(-1.0 / r, 1.0), SideExpansion::monomial(r, 1.0),
                      Orientation::Preserving);
        out.witnesses.push_back({cell, "flip*psi", DiffeoL(flip_psi, OriginAction::Exchange, source, target, k)});
        break;
      }
      case cosets::Cell::ExMinus:
        out.witnesses.push_back(
            {cell, "psi", DiffeoL(psi_restriction(a.value()), OriginAction::Exchange, source, target, k)});
        break;
    }
  }
  return out;
}

}  // namespace twoline::dline

#pragma once

// The line with two origins L = R u {0~}: points, minimal atlases,
// diffeomorphisms between structures given by special minimal atlases, and
// explicit witnesses for the pairs (W_a, W_b).

#include "twoline/cosets.hpp"
#include "twoline/germs.hpp"

#include <optional>
#include <string>
#include <vector>

namespace twoline::dline {

using germs::AnyGerm;
using germs::Certainty;
using germs::Germ;
using germs::JetOrder;
using germs::Orientation;

struct PointL {
  bool tilde = false;  // the added origin 0~
  double x = 0.0;      // meaningful when !tilde

  static PointL real(double x) { return {false, x}; }
  static PointL origin_tilde() { return {true, 0.0}; }
  bool is_origin() const { return tilde || x == 0.0; }
  bool operator==(const PointL&) const = default;
};

std::string to_string(const PointL& p);

// Intersection of the closures of all neighbourhoods of p.
std::vector<PointL> hausdorff_closure(const PointL& p);

enum class Domain { U, V };  // U = L \ {0~}, V = L \ {0}

// A chart on U or V, given in the identity coordinate of its domain
// (0~ read as 0 on V).
struct ChartL {
  Domain domain;
  AnyGerm map;
};

struct MinimalAtlas {
  ChartL u;
  ChartL v;
};

// P_h = {(U, id), (V, h o id_V)}.
struct SpecialMinimalAtlas {
  Germ h;

  MinimalAtlas atlas() const;
};

// 0-extension of v o u^-1. Throws InvalidAtlas on charts over the wrong
// domain or a transition that is not monotone on sampled points.
AnyGerm transition_extension(const MinimalAtlas& atlas);
Germ transition_extension(const SpecialMinimalAtlas& atlas);
bool is_orientable(const MinimalAtlas& atlas);

// For u preserving orientation: the special atlas of g_A together with the
// fixing diffeomorphism A -> P_{g_A}, which is u on U.
struct SpecialReduction {
  SpecialMinimalAtlas special;
  AnyGerm u_restriction;
};
SpecialReduction reduce_to_special(const MinimalAtlas& atlas);

// P_h and P_g define the same structure iff g o h^-1 lies in Diff^k.
Certainty same_structure(const Germ& h, const Germ& g, JetOrder k);

enum class OriginAction { Fix, Exchange };
std::string to_string(OriginAction a);

// A diffeomorphism (L, P_{h_s}) -> (L, P_{h_t}) stored as its restriction to
// R \ 0 in the identity coordinates, plus the origin action.
class DiffeoL {
 public:
  // Certifies both chart presentations at order k. Throws DomainError when
  // either is not in Diff^k or the restriction contradicts the stated
  // orientation; an inconclusive numeric check is accepted and recorded.
  DiffeoL(AnyGerm restriction, OriginAction action, SpecialMinimalAtlas source, SpecialMinimalAtlas target,
          int k = 1);

  const AnyGerm& restriction() const noexcept { return restriction_; }
  OriginAction origin_action() const noexcept { return action_; }
  Orientation orientation() const { return germs::orientation(restriction_); }
  const SpecialMinimalAtlas& source() const noexcept { return source_; }
  const SpecialMinimalAtlas& target() const noexcept { return target_; }
  int k() const noexcept { return k_; }
  bool certified() const noexcept { return certified_; }

  // Presentation in the chart around 0 (U for fixing maps) and around 0~.
  AnyGerm u_presentation() const;
  AnyGerm v_presentation() const;

  PointL operator()(const PointL& p) const;

 private:
  AnyGerm restriction_;
  OriginAction action_;
  SpecialMinimalAtlas source_;
  SpecialMinimalAtlas target_;
  int k_;
  bool certified_ = true;
};

// The map with U-presentation a and V-presentation b. Compatibility:
// fixing b = h_t a h_s^-1; exchanging b = h_t^-1 a h_s^-1.
// Throws IncompatiblePresentations with the residual b o expected^-1.
DiffeoL build_diffeo(const AnyGerm& a, const AnyGerm& b, const SpecialMinimalAtlas& source,
                     const SpecialMinimalAtlas& target, OriginAction action, int k = 1);

// V-chart presentations; DomainError on the wrong origin action.
AnyGerm phi_fix(const DiffeoL& d);
AnyGerm phi_ex(const DiffeoL& d);

// x -> -x/sqrt(a) on x < 0, -x sqrt(a) on x > 0, swapping the origins;
// a self-diffeomorphism of W_a of order 2.
DiffeoL psi(double a, int k = 1);

// d2 o d1; DomainError unless d1's target structure is d2's source.
DiffeoL compose_diffeo(const DiffeoL& d2, const DiffeoL& d1);

// Equality of restrictions and origin actions.
bool same_map(const DiffeoL& x, const DiffeoL& y, double tol = 1e-9);

struct Witness {
  cosets::Cell cell;
  std::string kind;  // "identity", "flip", "flip*psi", "psi"
  DiffeoL map;
};

struct DiffeoClasses {
  cosets::PairClassification cells;
  std::vector<Witness> witnesses;  // one per nonempty cell, in cell order
};

DiffeoClasses diffeo_classes(const Param& a, const Param& b, int k = 1);

// Agreement of two germs: exact term lists, else sampled values.
bool germs_agree(const AnyGerm& x, const AnyGerm& y, double tol = 1e-9);

}  // namespace twoline::dline

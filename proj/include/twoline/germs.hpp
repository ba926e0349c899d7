#pragma once

// Homeomorphisms of R fixing 0, represented per side as finite sums of power
// terms, together with their one-sided jets at 0 and the C^k membership tests
// built on them.
//
// A Germ stores, for each side, an expansion P(t) = sum c_i t^{e_i} in the
// distance t = |x| > 0 from the origin; the value at x is P_side(|x|), so
// the coefficient signs encode which side the point lands on.

#include "twoline/richardson.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace twoline::germs {

enum class Side { Neg, Pos };
enum class Orientation { Preserving, Reversing };

inline Orientation operator*(Orientation a, Orientation b) {
  return a == b ? Orientation::Preserving : Orientation::Reversing;
}
inline Side opposite(Side s) { return s == Side::Neg ? Side::Pos : Side::Neg; }
inline double side_sign(Side s) { return s == Side::Neg ? -1.0 : 1.0; }

std::string to_string(Orientation o);
std::string to_string(Side s);

inline constexpr int kMaxJetOrder = 12;
// Orders a numeric germ can be differentiated to before rounding dominates.
inline constexpr int kMaxNumericOrder = 4;

struct PowerTerm {
  double coeff;
  double exponent;
};

class SideExpansion {
 public:
  // Sorts by exponent, merges equal exponents, drops cancelled terms.
  // Throws DomainError on zero/non-finite coefficients, non-positive
  // exponents, or an empty list.
  explicit SideExpansion(std::vector<PowerTerm> terms);
  static SideExpansion monomial(double coeff, double exponent);

  const std::vector<PowerTerm>& terms() const noexcept { return terms_; }
  const PowerTerm& leading() const noexcept { return terms_.front(); }
  bool is_monomial() const noexcept { return terms_.size() == 1; }
  bool all_integer_exponents() const noexcept;

  // P(t) for t >= 0.
  double operator()(double t) const;

 private:
  std::vector<PowerTerm> terms_;
};

class Germ {
 public:
  // Validates that the assembled map is a bijection germ: preserving needs
  // neg-leading < 0 < pos-leading, reversing the opposite signs.
  Germ(SideExpansion neg, SideExpansion pos, Orientation orientation);

  static Germ identity();
  static Germ linear(double slope);
  static Germ monomial(double neg_coeff, double neg_exponent, double pos_coeff,
                       double pos_exponent);

  const SideExpansion& side(Side s) const { return s == Side::Neg ? neg_ : pos_; }
  const SideExpansion& neg() const noexcept { return neg_; }
  const SideExpansion& pos() const noexcept { return pos_; }
  Orientation orientation() const noexcept { return orientation_; }
  bool per_side_monomial() const noexcept { return neg_.is_monomial() && pos_.is_monomial(); }

  double operator()(double x) const;

 private:
  SideExpansion neg_;
  SideExpansion pos_;
  Orientation orientation_;
};

// Term-list equality with kExactTolerance on coefficients and exponents.
bool approx_equal(const Germ& a, const Germ& b, double tol = 1e-9);
bool is_identity(const Germ& g, double tol = 1e-9);
std::string to_string(const Germ& g);

// A germ known only through a callable, used when exact composition or
// inversion does not stay inside finite power sums.
class NumericGerm {
 public:
  NumericGerm(std::function<double(double)> fn, Orientation orientation, std::string provenance);

  double operator()(double x) const { return x == 0.0 ? 0.0 : (*fn_)(x); }
  Orientation orientation() const noexcept { return orientation_; }
  const std::string& provenance() const noexcept { return provenance_; }

 private:
  std::shared_ptr<const std::function<double(double)>> fn_;
  Orientation orientation_;
  std::string provenance_;
};

using AnyGerm = std::variant<Germ, NumericGerm>;

inline bool is_exact(const AnyGerm& g) { return std::holds_alternative<Germ>(g); }
Orientation orientation(const AnyGerm& g);
double evaluate(const AnyGerm& g, double x);
std::function<double(double)> as_function(const AnyGerm& g);

Germ make_wa(double a);

// g o h. Exact when each side of h is a monomial or the receiving side of g
// has only positive integer exponents; otherwise a NumericGerm.
AnyGerm compose(const AnyGerm& g, const AnyGerm& h);
AnyGerm compose(const Germ& g, const Germ& h);
AnyGerm invert(const AnyGerm& h);
AnyGerm invert(const Germ& h);

// ---------------------------------------------------------------- jets

enum class CoeffState { Value, Nonexistent, Indeterminate };

struct JetCoefficient {
  CoeffState state = CoeffState::Value;
  double value = 0.0;

  static JetCoefficient of(double v) { return {CoeffState::Value, v}; }
  static JetCoefficient nonexistent() { return {CoeffState::Nonexistent, 0.0}; }
  static JetCoefficient indeterminate() { return {CoeffState::Indeterminate, 0.0}; }
  bool exists() const { return state == CoeffState::Value; }
};

std::string to_string(const JetCoefficient& c);

// Requested order; "infinity" is evaluated at kMaxJetOrder and flagged.
class JetOrder {
 public:
  JetOrder(int k);  // NOLINT: implicit from int is the common case
  static JetOrder infinity();
  int effective() const noexcept { return infinite_ ? kMaxJetOrder : k_; }
  bool infinite() const noexcept { return infinite_; }
  std::string str() const;

 private:
  JetOrder(int k, bool inf) : k_(k), infinite_(inf) {}
  int k_;
  bool infinite_;
};

// One-sided derivatives at 0, index j-1 holds the j-th derivative.
struct Jet {
  int order = 0;
  std::vector<JetCoefficient> neg;
  std::vector<JetCoefficient> pos;
  bool numeric = false;

  // Two-sided jet of a C^k map from its derivatives f'(0), f''(0), ...
  static Jet two_sided(const std::vector<double>& derivatives);
};

std::vector<JetCoefficient> one_sided_jet(const AnyGerm& h, int k, Side side);
Jet jet(const AnyGerm& h, int k);

struct Obstruction {
  int order;
  JetCoefficient neg;
  JetCoefficient pos;
};

struct SmoothnessReport {
  int requested_order = 0;
  int max_order = 0;
  std::optional<Obstruction> obstruction;
  bool is_diffeo_Ck = false;
  bool capped = false;      // infinity requested, evaluated at kMaxJetOrder
  bool conclusive = true;   // false when numeric estimates could not decide
};

std::string describe(const SmoothnessReport& r);

// Compares the two sides of a jet through its order.
SmoothnessReport compare_sides(const Jet& j);
SmoothnessReport smoothness_at_zero(const AnyGerm& h, JetOrder k);

// Smoothness of q = w_b o f o w_a at 0, read off the jet of f in Diff^k(R,0).
SmoothnessReport sandwich_smoothness(const Jet& f, double a, double b, int n);

bool in_diff(const AnyGerm& h, JetOrder k);
bool in_jdiff(const AnyGerm& h, JetOrder k);
bool fixed_near_zero(const AnyGerm& h, double radius);

enum class Certainty { True, False, Indeterminate };
std::string to_string(Certainty c);

// in_diff with an honest third answer for numeric germs.
Certainty diff_membership(const AnyGerm& h, JetOrder k);

}  // namespace twoline::germs

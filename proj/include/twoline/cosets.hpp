#pragma once

// Finite groups given by multiplication tables, double cosets, the
// (D,+-)-double cosets coming from the wreath product D wr Z2, and the
// closed-form classification of the pairs (W_a, W_b).

#include "twoline/param.hpp"

#include <array>
#include <string>
#include <vector>

namespace twoline::cosets {

inline constexpr int kMaxGroupOrder = 64;

class FiniteGroup {
 public:
  // Validates the Latin-square property, finds the identity and checks
  // associativity exhaustively. Throws DomainError.
  FiniteGroup(std::vector<std::string> names, std::vector<std::vector<int>> table);

  static FiniteGroup cyclic(int n);
  // Symmetries of the regular n-gon: r^i and s r^i, i < n.
  static FiniteGroup dihedral(int n);
  static FiniteGroup direct_product(const FiniteGroup& g, const FiniteGroup& h);
  // Closure of the given permutations of {0..m-1} under composition
  // (p*q)(i) = p(q(i)). Element names are the permutations in one-line form.
  static FiniteGroup generated_by(const std::vector<std::vector<int>>& permutations);

  int order() const noexcept { return static_cast<int>(names_.size()); }
  int identity() const noexcept { return identity_; }
  int mul(int a, int b) const { return table_[a][b]; }
  int inv(int a) const { return inverse_[a]; }
  const std::string& name(int a) const { return names_[a]; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<std::vector<int>>& table() const noexcept { return table_; }
  // Throws InputError for unknown names.
  int index_of(const std::string& name) const;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<int>> table_;
  std::vector<int> inverse_;
  int identity_ = 0;
};

class Subgroup {
 public:
  // Throws DomainError unless the indices are closed under the group law
  // and contain the identity.
  Subgroup(const FiniteGroup& g, std::vector<int> elements);
  static Subgroup trivial(const FiniteGroup& g);
  static Subgroup whole(const FiniteGroup& g);

  const std::vector<int>& elements() const noexcept { return elements_; }
  int size() const noexcept { return static_cast<int>(elements_.size()); }
  bool contains(int a) const;

 private:
  std::vector<int> elements_;  // sorted
};

bool is_normal(const FiniteGroup& g, const Subgroup& d);
// Every subgroup, found by closing cyclic subgroups under joins.
std::vector<Subgroup> all_subgroups(const FiniteGroup& g);

enum class PartitionKind { Double, PmDouble, Left, Right };
std::string to_string(PartitionKind k);

struct CosetPartition {
  PartitionKind kind = PartitionKind::Double;
  // Each block sorted; blocks ordered by their smallest element.
  std::vector<std::vector<int>> blocks;

  // Index of the block holding a, or -1.
  int block_of(int a) const;
  bool operator==(const CosetPartition& o) const { return blocks == o.blocks; }
};

bool is_partition(const CosetPartition& p, int order);

// Orbits of (c,d).h = c h d^-1.
CosetPartition double_cosets(const FiniteGroup& g, const Subgroup& c, const Subgroup& d);
CosetPartition left_cosets(const FiniteGroup& g, const Subgroup& d);   // blocks hD
CosetPartition right_cosets(const FiniteGroup& g, const Subgroup& d);  // blocks Dh

struct WreathElement {
  int a;
  int b;
  int delta;  // +1 or -1
  bool operator==(const WreathElement&) const = default;
};

WreathElement wreath_mul(const FiniteGroup& g, const WreathElement& x, const WreathElement& y);
// (a,b,delta).h = a h^delta b^-1
int wreath_act(const FiniteGroup& g, const WreathElement& x, int h);

// Blocks DhD u Dh^-1D. The orbit partition of the D wr Z2 action is
// computed as well and a std::logic_error is thrown if the two differ.
CosetPartition pm_double_cosets(const FiniteGroup& g, const Subgroup& d);
CosetPartition pm_union_partition(const FiniteGroup& g, const Subgroup& d);
CosetPartition wreath_orbit_partition(const FiniteGroup& g, const Subgroup& d);

// g in ChD, cross-checked against C n gDh^-1 != {} (logic_error on mismatch).
bool coset_membership_equiv(const FiniteGroup& grp, const Subgroup& c, const Subgroup& d, int g, int h);

// ---------------------------------------------------------------- w_a pairs

// Shape of Diff^k(R,0) n w_b Diff^k(R,0) w_a.
enum class IntersectionType { Empty, JPlus, JMinus, FullD };
std::string to_string(IntersectionType t);

IntersectionType intersection_type(const Param& a, const Param& b, int k = 1);

enum class Cell { FixPlus = 0, FixMinus = 1, ExPlus = 2, ExMinus = 3 };
inline constexpr std::array<Cell, 4> kCells = {Cell::FixPlus, Cell::FixMinus, Cell::ExPlus, Cell::ExMinus};
std::string to_string(Cell c);  // "fix+", "fix-", "ex+", "ex-"

struct PairClassification {
  std::array<bool, 4> nonempty{};
  // Intersection type that makes the cell nonempty, per cell.
  std::array<IntersectionType, 4> source{};
  IntersectionType fix_type = IntersectionType::Empty;
  IntersectionType ex_type = IntersectionType::Empty;

  bool operator[](Cell c) const { return nonempty[static_cast<int>(c)]; }
  bool any() const { return nonempty[0] || nonempty[1] || nonempty[2] || nonempty[3]; }
};

// Diffeomorphisms W_a -> W_b sorted by origin action and orientation.
// Fixing maps are read off Diff n w_b Diff w_{1/a}, exchanging ones off
// Diff n w_b Diff w_a (the exchange swaps which origin carries w_a).
PairClassification classify_wa_pair(const Param& a, const Param& b, int k = 1);

}  // namespace twoline::cosets

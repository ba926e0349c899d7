#include "twoline/cosets.hpp"

#include "twoline/error.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace twoline::cosets {

namespace {

// Canonical order: sort each block, then order blocks by first element.
CosetPartition canonical(PartitionKind kind, std::vector<std::vector<int>> blocks) {
  for (auto& b : blocks) std::sort(b.begin(), b.end());
  std::sort(blocks.begin(), blocks.end(), [](const auto& x, const auto& y) { return x.front() < y.front(); });
  return {kind, std::move(blocks)};
}

// Blocks from a per-element label, labels arbitrary.
CosetPartition from_labels(PartitionKind kind, const std::vector<int>& label) {
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < static_cast<int>(label.size()); ++i) groups[label[i]].push_back(i);
  std::vector<std::vector<int>> blocks;
  for (auto& [_, b] : groups) blocks.push_back(std::move(b));
  return canonical(kind, std::move(blocks));
}

std::string perm_name(const std::vector<int>& p) {
  std::string s = "(";
  for (size_t i = 0; i < p.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(p[i]);
  }
  return s + ")";
}

}  // namespace

FiniteGroup::FiniteGroup(std::vector<std::string> names, std::vector<std::vector<int>> table)
    : names_(std::move(names)), table_(std::move(table)) {
  const int n = static_cast<int>(names_.size());
  if (n == 0) throw DomainError("group must have at least one element");
  if (n > kMaxGroupOrder) throw DomainError("group order " + std::to_string(n) + " exceeds " + std::to_string(kMaxGroupOrder));
  if (static_cast<int>(table_.size()) != n) throw DomainError("table has wrong number of rows");
  if (std::set<std::string>(names_.begin(), names_.end()).size() != names_.size())
    throw DomainError("duplicate element names");
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(table_[i].size()) != n) throw DomainError("table row " + std::to_string(i) + " has wrong length");
    std::vector<bool> seen(n, false);
    for (int v : table_[i]) {
      if (v < 0 || v >= n) throw DomainError("table entry out of range");
      if (seen[v]) throw DomainError("table is not a Latin square (row " + std::to_string(i) + ")");
      seen[v] = true;
    }
  }
  for (int j = 0; j < n; ++j) {
    std::vector<bool> seen(n, false);
    for (int i = 0; i < n; ++i) {
      if (seen[table_[i][j]]) throw DomainError("table is not a Latin square (column " + std::to_string(j) + ")");
      seen[table_[i][j]] = true;
    }
  }
  identity_ = -1;
  for (int e = 0; e < n && identity_ < 0; ++e) {
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) ok = table_[e][i] == i && table_[i][e] == i;
    if (ok) identity_ = e;
  }
  if (identity_ < 0) throw DomainError("table has no identity element");
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (table_[table_[a][b]][c] != table_[a][table_[b][c]])
          throw DomainError("table is not associative at (" + names_[a] + ", " + names_[b] + ", " + names_[c] + ")");
  inverse_.assign(n, -1);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (table_[a][b] == identity_) inverse_[a] = b;
}

FiniteGroup FiniteGroup::cyclic(int n) {
  if (n < 1) throw DomainError("cyclic group order must be positive");
  std::vector<std::string> names;
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  for (int i = 0; i < n; ++i) {
    names.push_back(std::to_string(i));
    for (int j = 0; j < n; ++j) t[i][j] = (i + j) % n;
  }
  return FiniteGroup(std::move(names), std::move(t));
}

FiniteGroup FiniteGroup::dihedral(int n) {
  if (n < 1) throw DomainError("dihedral group needs n >= 1");
  // index i < n is r^i, index n + i is s r^i; s r^i s = r^-i.
  auto power = [](const std::string& base, int i) -> std::string {
    if (i == 0) return "";
    return i == 1 ? base : base + std::to_string(i);
  };
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(i == 0 ? "e" : power("r", i));
  for (int i = 0; i < n; ++i) names.push_back("s" + power("r", i));
  const int m = 2 * n;
  std::vector<std::vector<int>> t(m, std::vector<int>(m));
  for (int x = 0; x < m; ++x) {
    for (int y = 0; y < m; ++y) {
      int fx = x / n, ix = x % n, fy = y / n, iy = y % n;
      // (s^fx r^ix)(s^fy r^iy) = s^(fx+fy) r^(iy + (fy ? -ix : ix))
      int f = (fx + fy) % 2;
      int i = ((fy ? -ix : ix) + iy) % n;
      if (i < 0) i += n;
      t[x][y] = f * n + i;
    }
  }
  return FiniteGroup(std::move(names), std::move(t));
}

FiniteGroup FiniteGroup::direct_product(const FiniteGroup& g, const FiniteGroup& h) {
  const int n = g.order(), m = h.order();
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) names.push_back("(" + g.name(i) + "," + h.name(j) + ")");
  std::vector<std::vector<int>> t(n * m, std::vector<int>(n * m));
  for (int x = 0; x < n * m; ++x)
    for (int y = 0; y < n * m; ++y) t[x][y] = g.mul(x / m, y / m) * m + h.mul(x % m, y % m);
  return FiniteGroup(std::move(names), std::move(t));
}

FiniteGroup FiniteGroup::generated_by(const std::vector<std::vector<int>>& permutations) {
  if (permutations.empty()) throw DomainError("need at least one generator");
  const size_t m = permutations.front().size();
  for (const auto& p : permutations) {
    std::vector<int> s(p);
    std::sort(s.begin(), s.end());
    std::vector<int> iota(m);
    std::iota(iota.begin(), iota.end(), 0);
    if (p.size() != m || s != iota) throw DomainError("generator is not a permutation of the same set");
  }
  auto compose = [m](const std::vector<int>& p, const std::vector<int>& q) {
    std::vector<int> r(m);
    for (size_t i = 0; i < m; ++i) r[i] = p[q[i]];
    return r;
  };
  std::vector<int> id(m);
  std::iota(id.begin(), id.end(), 0);
  std::vector<std::vector<int>> elems{id};
  std::map<std::vector<int>, int> index{{id, 0}};
  for (size_t k = 0; k < elems.size(); ++k) {
    for (const auto& g : permutations) {
      auto next = compose(elems[k], g);
      if (!index.count(next)) {
        if (static_cast<int>(elems.size()) >= kMaxGroupOrder) throw DomainError("generated group exceeds order cap");
        index[next] = static_cast<int>(elems.size());
        elems.push_back(next);
      }
    }
  }
  const int n = static_cast<int>(elems.size());
  std::vector<std::string> names;
  for (const auto& p : elems) names.push_back(perm_name(p));
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) t[a][b] = index.at(compose(elems[a], elems[b]));
  return FiniteGroup(std::move(names), std::move(t));
}

int FiniteGroup::index_of(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw InputError("unknown group element '" + name + "'");
  return static_cast<int>(it - names_.begin());
}

Subgroup::Subgroup(const FiniteGroup& g, std::vector<int> elements) : elements_(std::move(elements)) {
  std::sort(elements_.begin(), elements_.end());
  elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
  for (int a : elements_)
    if (a < 0 || a >= g.order()) throw DomainError("subgroup element index out of range");
  if (!contains(g.identity())) throw DomainError("subgroup must contain the identity");
  for (int a : elements_)
    for (int b : elements_)
      if (!contains(g.mul(a, g.inv(b))))
        throw DomainError("not a subgroup: " + g.name(a) + " * " + g.name(b) + "^-1 is missing");
}

Subgroup Subgroup::trivial(const FiniteGroup& g) { return Subgroup(g, {g.identity()}); }

Subgroup Subgroup::whole(const FiniteGroup& g) {
  std::vector<int> all(g.order());
  std::iota(all.begin(), all.end(), 0);
  return Subgroup(g, std::move(all));
}

bool Subgroup::contains(int a) const { return std::binary_search(elements_.begin(), elements_.end(), a); }

bool is_normal(const FiniteGroup& g, const Subgroup& d) {
  for (int x = 0; x < g.order(); ++x)
    for (int a : d.elements())
      if (!d.contains(g.mul(g.mul(x, a), g.inv(x)))) return false;
  return true;
}

std::vector<Subgroup> all_subgroups(const FiniteGroup& g) {
  const int n = g.order();
  auto closure = [&](std::vector<bool> in) {
    std::vector<int> members;
    for (int i = 0; i < n; ++i)
      if (in[i]) members.push_back(i);
    for (size_t i = 0; i < members.size(); ++i)
      for (size_t j = 0; j <= i; ++j)
        for (int p : {g.mul(members[i], members[j]), g.mul(members[j], members[i])})
          if (!in[p]) {
            in[p] = true;
            members.push_back(p);
          }
    return in;
  };
  std::set<std::vector<bool>> found;
  std::vector<bool> e(n, false);
  e[g.identity()] = true;
  found.insert(e);
  for (int x = 0; x < n; ++x) {
    auto s = e;
    s[x] = true;
    found.insert(closure(s));
  }
  // Joins of everything found so far until nothing new appears.
  for (bool grew = true; grew;) {
    grew = false;
    std::vector<std::vector<bool>> current(found.begin(), found.end());
    for (size_t i = 0; i < current.size(); ++i)
      for (size_t j = i + 1; j < current.size(); ++j) {
        std::vector<bool> u(n);
        for (int k = 0; k < n; ++k) u[k] = current[i][k] || current[j][k];
        if (found.insert(closure(u)).second) grew = true;
      }
  }
  std::vector<Subgroup> out;
  for (const auto& s : found) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (s[i]) idx.push_back(i);
    out.emplace_back(g, std::move(idx));
  }
  std::sort(out.begin(), out.end(), [](const Subgroup& a, const Subgroup& b) {
    return a.size() != b.size() ? a.size() < b.size() : a.elements() < b.elements();
  });
  return out;
}

std::string to_string(PartitionKind k) {
  switch (k) {
    case PartitionKind::Double: return "double";
    case PartitionKind::PmDouble: return "pm_double";
    case PartitionKind::Left: return "left";
    case PartitionKind::Right: return "right";
  }
  return "?";
}

int CosetPartition::block_of(int a) const {
  for (size_t i = 0; i < blocks.size(); ++i)
    if (std::binary_search(blocks[i].begin(), blocks[i].end(), a)) return static_cast<int>(i);
  return -1;
}

bool is_partition(const CosetPartition& p, int order) {
  std::vector<int> count(order, 0);
  for (const auto& b : p.blocks) {
    if (b.empty()) return false;
    for (int a : b) {
      if (a < 0 || a >= order) return false;
      ++count[a];
    }
  }
  return std::all_of(count.begin(), count.end(), [](int c) { return c == 1; });
}

CosetPartition double_cosets(const FiniteGroup& g, const Subgroup& c, const Subgroup& d) {
  std::vector<int> label(g.order(), -1);
  for (int h = 0; h < g.order(); ++h) {
    if (label[h] >= 0) continue;
    for (int x : c.elements())
      for (int y : d.elements()) label[g.mul(g.mul(x, h), g.inv(y))] = h;
  }
  return from_labels(PartitionKind::Double, label);
}

CosetPartition left_cosets(const FiniteGroup& g, const Subgroup& d) {
  std::vector<int> label(g.order(), -1);
  for (int h = 0; h < g.order(); ++h)
    if (label[h] < 0)
      for (int y : d.elements()) label[g.mul(h, y)] = h;
  return from_labels(PartitionKind::Left, label);
}

CosetPartition right_cosets(const FiniteGroup& g, const Subgroup& d) {
  std::vector<int> label(g.order(), -1);
  for (int h = 0; h < g.order(); ++h)
    if (label[h] < 0)
      for (int y : d.elements()) label[g.mul(y, h)] = h;
  return from_labels(PartitionKind::Right, label);
}

WreathElement wreath_mul(const FiniteGroup& g, const WreathElement& x, const WreathElement& y) {
  if (x.delta == 1) return {g.mul(x.a, y.a), g.mul(x.b, y.b), y.delta};
  return {g.mul(x.a, y.b), g.mul(x.b, y.a), -y.delta};
}

int wreath_act(const FiniteGroup& g, const WreathElement& x, int h) {
  int hd = x.delta == 1 ? h : g.inv(h);
  return g.mul(g.mul(x.a, hd), g.inv(x.b));
}

CosetPartition pm_union_partition(const FiniteGroup& g, const Subgroup& d) {
  // Block of h is DhD u Dh^-1D; collect the set for each h and deduplicate.
  std::set<std::vector<int>> blocks;
  for (int h = 0; h < g.order(); ++h) {
    std::set<int> block;
    for (int x : d.elements())
      for (int y : d.elements()) {
        block.insert(g.mul(g.mul(x, h), y));
        block.insert(g.mul(g.mul(x, g.inv(h)), y));
      }
    blocks.insert(std::vector<int>(block.begin(), block.end()));
  }
  return canonical(PartitionKind::PmDouble, {blocks.begin(), blocks.end()});
}

CosetPartition wreath_orbit_partition(const FiniteGroup& g, const Subgroup& d) {
  std::vector<int> label(g.order(), -1);
  for (int h = 0; h < g.order(); ++h) {
    if (label[h] >= 0) continue;
    for (int a : d.elements())
      for (int b : d.elements())
        for (int delta : {1, -1}) label[wreath_act(g, {a, b, delta}, h)] = h;
  }
  return from_labels(PartitionKind::PmDouble, label);
}

CosetPartition pm_double_cosets(const FiniteGroup& g, const Subgroup& d) {
  auto by_union = pm_union_partition(g, d);
  auto by_orbit = wreath_orbit_partition(g, d);
  if (!(by_union == by_orbit) || !is_partition(by_union, g.order()))
    throw std::logic_error("(D,+-)-double cosets differ from the wreath-product orbits");
  return by_union;
}

bool coset_membership_equiv(const FiniteGroup& grp, const Subgroup& c, const Subgroup& d, int g, int h) {
  bool in_chd = false;
  for (int x : c.elements())
    for (int y : d.elements())
      if (grp.mul(grp.mul(x, h), y) == g) in_chd = true;
  bool meets = false;
  for (int y : d.elements())
    if (c.contains(grp.mul(grp.mul(g, y), grp.inv(h)))) meets = true;
  if (in_chd != meets) throw std::logic_error("double coset membership criterion failed");
  return in_chd;
}

// ---------------------------------------------------------------- w_a pairs

std::string to_string(IntersectionType t) {
  switch (t) {
    case IntersectionType::Empty: return "Empty";
    case IntersectionType::JPlus: return "JPlus";
    case IntersectionType::JMinus: return "JMinus";
    case IntersectionType::FullD: return "FullD";
  }
  return "?";
}

std::string to_string(Cell c) {
  switch (c) {
    case Cell::FixPlus: return "fix+";
    case Cell::FixMinus: return "fix-";
    case Cell::ExPlus: return "ex+";
    case Cell::ExMinus: return "ex-";
  }
  return "?";
}

IntersectionType intersection_type(const Param& a, const Param& b, int k) {
  if (!a.positive() || !b.positive()) throw DomainError("w_a parameters must be positive");
  if (k < 1) throw DomainError("order k must be at least 1");
  const bool a1 = a.is_one(), b1 = b.is_one();
  if (a1 && b1) return IntersectionType::FullD;
  if (a1 || b1) return IntersectionType::Empty;
  if ((a * b).is_one()) return IntersectionType::JPlus;
  if (a.equals(b)) return IntersectionType::JMinus;
  return IntersectionType::Empty;
}

PairClassification classify_wa_pair(const Param& a, const Param& b, int k) {
  PairClassification out;
  out.fix_type = intersection_type(a.reciprocal(), b, k);
  out.ex_type = intersection_type(a, b, k);
  // JPlus holds the preserving elements, JMinus the reversing ones.
  auto fill = [&](IntersectionType t, Cell plus, Cell minus) {
    const bool p = t == IntersectionType::JPlus || t == IntersectionType::FullD;
    const bool m = t == IntersectionType::JMinus || t == IntersectionType::FullD;
    out.nonempty[static_cast<int>(plus)] = p;
    out.nonempty[static_cast<int>(minus)] = m;
    out.source[static_cast<int>(plus)] = p ? t : IntersectionType::Empty;
    out.source[static_cast<int>(minus)] = m ? t : IntersectionType::Empty;
  };
  fill(out.fix_type, Cell::FixPlus, Cell::FixMinus);
  fill(out.ex_type, Cell::ExPlus, Cell::ExMinus);
  return out;
}

}  // namespace twoline::cosets

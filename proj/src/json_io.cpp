#include "twoline/json_io.hpp"

#include "twoline/error.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <fstream>
#include <sstream>

namespace twoline::io {

using germs::Germ;
using germs::Orientation;
using germs::PowerTerm;
using germs::SideExpansion;
using join::NumericDiffeo;

namespace {

[[noreturn]] void bad(const std::string& at, const std::string& what) {
  throw InputError((at.empty() ? std::string("/") : at) + ": " + what);
}

const Json& need(const Json& j, const char* key, const std::string& at) {
  if (!j.is_object()) bad(at, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(at, std::string("missing \"") + key + "\"");
  return *it;
}

double number(const Json& j, const std::string& at) {
  if (!j.is_number()) bad(at, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) bad(at, "expected a finite number");
  return v;
}

int integer(const Json& j, const std::string& at) {
  if (!j.is_number_integer()) bad(at, "expected an integer");
  return j.get<int>();
}

std::string text(const Json& j, const std::string& at) {
  if (!j.is_string()) bad(at, "expected a string");
  return j.get<std::string>();
}

const Json& array(const Json& j, const std::string& at) {
  if (!j.is_array()) bad(at, "expected an array");
  return j;
}

std::pair<double, double> interval(const Json& j, const std::string& at) {
  array(j, at);
  if (j.size() != 2) bad(at, "expected [lo, hi]");
  double lo = number(j[0], at + "/0"), hi = number(j[1], at + "/1");
  if (!(lo < hi)) bad(at, "interval must have lo < hi");
  return {lo, hi};
}

std::vector<double> numbers(const Json& j, const std::string& at) {
  std::vector<double> out;
  for (size_t i = 0; i < array(j, at).size(); ++i) out.push_back(number(j[i], at + "/" + std::to_string(i)));
  return out;
}

std::string key(const std::string& at, const std::string& k) { return at + "/" + k; }

Json samples_json(const std::vector<double>& xs, const std::vector<double>& ys) {
  Json out = Json::array();
  for (size_t i = 0; i < xs.size(); ++i) out.push_back(Json::array({xs[i], ys[i]}));
  return out;
}

}  // namespace

Json parse(const std::string& input, const std::string& source) {
  try {
    return Json::parse(input);
  } catch (const Json::parse_error& e) {
    throw InputError(source + ": " + e.what());
  }
}

Json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- germs

namespace {

Json side_json(const SideExpansion& s) {
  Json out = Json::array();
  for (const auto& t : s.terms()) out.push_back(Json{{"c", t.coeff}, {"e", t.exponent}});
  return out;
}

SideExpansion side_from(const Json& j, const std::string& at) {
  std::vector<PowerTerm> terms;
  for (size_t i = 0; i < array(j, at).size(); ++i) {
    const std::string ai = at + "/" + std::to_string(i);
    terms.push_back({number(need(j[i], "c", ai), key(ai, "c")), number(need(j[i], "e", ai), key(ai, "e"))});
  }
  try {
    return SideExpansion(std::move(terms));
  } catch (const DomainError& e) {
    bad(at, e.what());
  }
}

}  // namespace

Json to_json(const Germ& g) {
  return Json{{"neg", side_json(g.neg())}, {"pos", side_json(g.pos())}, {"orientation", germs::to_string(g.orientation())}};
}

Germ germ_from_json(const Json& j, const std::string& at) {
  auto neg = side_from(need(j, "neg", at), key(at, "neg"));
  auto pos = side_from(need(j, "pos", at), key(at, "pos"));
  const std::string o = text(need(j, "orientation", at), key(at, "orientation"));
  if (o != "preserving" && o != "reversing") bad(key(at, "orientation"), "expected \"preserving\" or \"reversing\"");
  try {
    return Germ(std::move(neg), std::move(pos), o == "preserving" ? Orientation::Preserving : Orientation::Reversing);
  } catch (const DomainError& e) {
    bad(at, e.what());
  }
}

Json to_json(const germs::AnyGerm& g) {
  if (const auto* exact = std::get_if<Germ>(&g)) return to_json(*exact);
  const auto& n = std::get<germs::NumericGerm>(g);
  std::vector<double> xs, ys;
  for (int j = 12; j >= 2; j -= 2) xs.push_back(-std::ldexp(1.0, -j));
  for (int j = 2; j <= 12; j += 2) xs.push_back(std::ldexp(1.0, -j));
  std::sort(xs.begin(), xs.end());
  for (double x : xs) ys.push_back(n(x));
  return Json{{"numeric", true},
              {"orientation", germs::to_string(n.orientation())},
              {"provenance", n.provenance()},
              {"samples", samples_json(xs, ys)}};
}

Json to_json(const germs::JetCoefficient& c) {
  switch (c.state) {
    case germs::CoeffState::Value: return c.value;
    case germs::CoeffState::Nonexistent: return "nonexistent";
    case germs::CoeffState::Indeterminate: return "indeterminate";
  }
  return nullptr;
}

Json to_json(const germs::Jet& j) {
  Json neg = Json::array(), pos = Json::array();
  for (const auto& c : j.neg) neg.push_back(to_json(c));
  for (const auto& c : j.pos) pos.push_back(to_json(c));
  return Json{{"order", j.order}, {"numeric", j.numeric}, {"neg", neg}, {"pos", pos}};
}

Json to_json(const germs::SmoothnessReport& r) {
  Json out{{"requested_order", r.requested_order},
           {"max_order", r.max_order},
           {"is_diffeo", r.is_diffeo_Ck},
           {"conclusive", r.conclusive},
           {"capped", r.capped}};
  if (r.obstruction)
    out["obstruction"] = Json{{"order", r.obstruction->order},
                              {"neg", to_json(r.obstruction->neg)},
                              {"pos", to_json(r.obstruction->pos)}};
  else
    out["obstruction"] = nullptr;
  out["summary"] = germs::describe(r);
  return out;
}

// ---------------------------------------------------------------- groups

cosets::Subgroup GroupSpec::subgroup(const std::string& name) const {
  auto it = subgroups.find(name);
  if (it == subgroups.end()) throw InputError("/subgroups: no subgroup named \"" + name + "\"");
  std::vector<int> idx;
  for (const auto& e : it->second) idx.push_back(group.index_of(e));
  try {
    return cosets::Subgroup(group, idx);
  } catch (const DomainError& e) {
    throw InputError("/subgroups/" + name + ": " + e.what());
  }
}

GroupSpec group_from_json(const Json& j) {
  const auto& el = array(need(j, "elements", ""), "/elements");
  std::vector<std::string> names;
  for (size_t i = 0; i < el.size(); ++i) names.push_back(text(el[i], "/elements/" + std::to_string(i)));
  const auto& tab = array(need(j, "table", ""), "/table");
  std::vector<std::vector<int>> table;
  for (size_t r = 0; r < tab.size(); ++r) {
    const std::string ar = "/table/" + std::to_string(r);
    std::vector<int> row;
    for (size_t c = 0; c < array(tab[r], ar).size(); ++c) {
      const auto& v = tab[r][c];
      const std::string ac = ar + "/" + std::to_string(c);
      if (v.is_string()) {
        auto it = std::find(names.begin(), names.end(), v.get<std::string>());
        if (it == names.end()) bad(ac, "unknown element \"" + v.get<std::string>() + "\"");
        row.push_back(static_cast<int>(it - names.begin()));
      } else {
        row.push_back(integer(v, ac));
      }
    }
    table.push_back(std::move(row));
  }
  std::map<std::string, std::vector<std::string>> subs;
  if (auto it = j.find("subgroups"); it != j.end()) {
    if (!it->is_object()) bad("/subgroups", "expected an object");
    for (const auto& [name, members] : it->items()) {
      const std::string at = "/subgroups/" + name;
      std::vector<std::string> m;
      for (size_t i = 0; i < array(members, at).size(); ++i) m.push_back(text(members[i], at + "/" + std::to_string(i)));
      subs[name] = std::move(m);
    }
  }
  try {
    GroupSpec spec{cosets::FiniteGroup(names, table), subs};
    for (const auto& [name, m] : subs) spec.subgroup(name);  // validate early
    return spec;
  } catch (const DomainError& e) {
    throw InputError(std::string("/table: ") + e.what());
  }
}

Json to_json(const cosets::CosetPartition& p, const cosets::FiniteGroup& g) {
  Json blocks = Json::array();
  for (const auto& b : p.blocks) {
    Json block = Json::array();
    for (int e : b) block.push_back(g.name(e));
    blocks.push_back(block);
  }
  return Json{{"kind", cosets::to_string(p.kind)}, {"blocks", blocks}};
}

cosets::CosetPartition partition_from_json(const Json& j, const cosets::FiniteGroup& g) {
  cosets::CosetPartition p;
  const std::string kind = text(need(j, "kind", ""), "/kind");
  bool found = false;
  for (auto k : {cosets::PartitionKind::Double, cosets::PartitionKind::PmDouble, cosets::PartitionKind::Left,
                 cosets::PartitionKind::Right})
    if (cosets::to_string(k) == kind) {
      p.kind = k;
      found = true;
    }
  if (!found) bad("/kind", "unknown partition kind \"" + kind + "\"");
  const auto& blocks = array(need(j, "blocks", ""), "/blocks");
  for (size_t i = 0; i < blocks.size(); ++i) {
    const std::string at = "/blocks/" + std::to_string(i);
    std::vector<int> b;
    for (size_t e = 0; e < array(blocks[i], at).size(); ++e) b.push_back(g.index_of(text(blocks[i][e], at)));
    std::sort(b.begin(), b.end());
    p.blocks.push_back(std::move(b));
  }
  std::sort(p.blocks.begin(), p.blocks.end());
  return p;
}

// ---------------------------------------------------------------- structures

StructureSpec structure_from_json(const Json& j) {
  StructureSpec s;
  if (j.is_object() && j.contains("special_atlas")) {
    s.h = germ_from_json(need(j["special_atlas"], "h", "/special_atlas"), "/special_atlas/h");
    if (j.contains("k")) s.k = integer(j["k"], "/k");
  } else {
    s.h = germ_from_json(j);
  }
  if (s.k < 1) bad("/k", "order must be at least 1");
  return s;
}

Json to_json(const StructureSpec& s) { return Json{{"special_atlas", Json{{"h", to_json(s.h)}}}, {"k", s.k}}; }

std::string intersection_name(cosets::IntersectionType t) { return cosets::to_string(t); }

Json classification_json(const Param& a, const Param& b, int k, const dline::DiffeoClasses& c) {
  Json cells = Json::object();
  for (auto cell : cosets::kCells) cells[cosets::to_string(cell)] = c.cells[cell];
  Json witnesses = Json::array();
  for (const auto& w : c.witnesses)
    witnesses.push_back(Json{{"cell", cosets::to_string(w.cell)},
                             {"name", w.kind},
                             {"restriction", to_json(w.map.restriction())},
                             {"origin_action", dline::to_string(w.map.origin_action())},
                             {"certified", w.map.certified()}});
  Json out{{"a", a.str()},
           {"b", b.str()},
           {"k", k},
           {"diffeomorphic", c.cells.any()},
           {"cells", cells},
           {"intersection_type", Json{{"fix", intersection_name(c.cells.fix_type)}, {"ex", intersection_name(c.cells.ex_type)}}},
           {"witnesses", witnesses}};
  if (!c.cells.any())
    out["obstruction"] = "intersection_type Empty for both the origin-fixing (" + b.str() + ", " +
                         a.reciprocal().str() + ") and origin-exchanging (" + b.str() + ", " + a.str() +
                         ") double cosets: no C^" + std::to_string(k) + " diffeomorphism W_a -> W_b";
  return out;
}

// ---------------------------------------------------------------- join

namespace {

void check_increasing(const NumericDiffeo& m, const std::string& at) {
  constexpr int n = 256;
  double prev = m(m.lo());
  for (int i = 1; i <= n; ++i) {
    const double x = i == n ? m.hi() : m.lo() + (m.hi() - m.lo()) * i / n;
    const double y = m(x);
    if (!(y > prev)) bad(at, "map is not increasing near x = " + std::to_string(x));
    prev = y;
  }
}

}  // namespace

NumericDiffeo map_from_json(const Json& j, double lo, double hi, const std::string& at) {
  if (j.is_string()) {
    if (j.get<std::string>() != "identity") bad(at, "unknown map \"" + j.get<std::string>() + "\"");
    return NumericDiffeo::identity(lo, hi);
  }
  if (!j.is_object()) bad(at, "expected a map: \"identity\", {\"samples\"}, {\"poly\"} or {\"rescaled_power\"}");
  if (j.contains("map")) return map_from_json(j["map"], lo, hi, key(at, "map"));
  if (j.contains("domain")) std::tie(lo, hi) = interval(j["domain"], key(at, "domain"));
  if (j.contains("identity")) return NumericDiffeo::identity(lo, hi);
  if (j.contains("samples")) {
    const auto& s = array(j["samples"], key(at, "samples"));
    std::vector<double> xs, ys;
    for (size_t i = 0; i < s.size(); ++i) {
      const std::string ai = key(at, "samples") + "/" + std::to_string(i);
      if (!s[i].is_array() || s[i].size() != 2) bad(ai, "expected [x, y]");
      xs.push_back(number(s[i][0], ai + "/0"));
      ys.push_back(number(s[i][1], ai + "/1"));
    }
    try {
      return NumericDiffeo::from_samples(xs, ys);
    } catch (const DomainError& e) {
      bad(key(at, "samples"), e.what());
    }
  }
  if (j.contains("poly")) {
    auto c = numbers(j["poly"], key(at, "poly"));
    if (c.empty()) bad(key(at, "poly"), "needs at least one coefficient");
    auto f = [c](double x) {
      double r = 0.0;
      for (size_t i = c.size(); i-- > 0;) r = r * x + c[i];
      return r;
    };
    auto df = [c](double x) {
      double r = 0.0;
      for (size_t i = c.size(); i-- > 1;) r = r * x + c[i] * static_cast<double>(i);
      return r;
    };
    auto m = NumericDiffeo::from_function(f, lo, hi, df);
    check_increasing(m, key(at, "poly"));
    return m;
  }
  if (j.contains("rescaled_power")) {
    double e = number(j["rescaled_power"], key(at, "rescaled_power"));
    if (!(e > 0)) bad(key(at, "rescaled_power"), "exponent must be positive");
    return join::rescaled_power(lo, hi, e);
  }
  bad(at, "expected a map: \"identity\", {\"samples\"}, {\"poly\"} or {\"rescaled_power\"}");
}

namespace {

std::vector<double> tolerances(const Json& j, const std::string& at) {
  if (j.is_number()) return {number(j, at)};
  auto t = numbers(j, at);
  for (double x : t)
    if (!(x > 0)) bad(at, "tolerances must be positive");
  return t;
}

}  // namespace

JoinSpec join_spec_from_json(const Json& j) {
  JoinSpec spec;
  const auto& charts = array(need(j, "charts", ""), "/charts");
  if (charts.size() < 2) bad("/charts", "need at least two charts");
  std::vector<NumericDiffeo> maps;
  for (size_t i = 0; i < charts.size(); ++i) {
    const std::string at = "/charts/" + std::to_string(i);
    auto [lo, hi] = interval(need(charts[i], "image", at), at + "/image");
    join::IntervalChart c{"c" + std::to_string(i), lo, hi};
    if (charts[i].contains("label")) c.label = text(charts[i]["label"], at + "/label");
    auto m = charts[i].contains("map") ? map_from_json(charts[i]["map"], lo, hi, at + "/map")
                                       : NumericDiffeo::identity(lo, hi);
    const double slack = 1e-9 * std::max(1.0, hi - lo);
    if (std::fabs(m(m.lo()) - lo) > slack || std::fabs(m(m.hi()) - hi) > slack)
      bad(at + "/map", "map does not send its domain onto the image");
    spec.atlas.charts.push_back(c);
    maps.push_back(m);
  }
  const size_t n = charts.size();
  std::vector<std::optional<NumericDiffeo>> trans(n - 1);
  if (j.contains("transitions")) {
    const auto& ts = array(j["transitions"], "/transitions");
    for (size_t t = 0; t < ts.size(); ++t) {
      const std::string at = "/transitions/" + std::to_string(t);
      const auto& bw = array(need(ts[t], "between", at), at + "/between");
      if (bw.size() != 2) bad(at + "/between", "expected [i, i+1]");
      int i = integer(bw[0], at + "/between/0"), i1 = integer(bw[1], at + "/between/1");
      if (i < 0 || i1 != i + 1 || i1 >= static_cast<int>(n)) bad(at + "/between", "expected consecutive chart indices");
      const auto &ci = spec.atlas.charts[i], &cn = spec.atlas.charts[i1];
      if (!(cn.lo < ci.hi)) bad(at, "charts do not overlap");
      trans[i] = map_from_json(ts[t], cn.lo, ci.hi, at);
    }
  }
  for (size_t i = 0; i + 1 < n; ++i) {
    if (trans[i]) {
      spec.atlas.transitions.push_back(*trans[i]);
      continue;
    }
    const auto &ci = spec.atlas.charts[i], &cn = spec.atlas.charts[i + 1];
    if (!(cn.lo < ci.hi)) bad("/charts/" + std::to_string(i + 1), "charts do not overlap");
    try {
      auto back = maps[i].inverse_map().restrict(cn.lo, ci.hi);
      spec.atlas.transitions.push_back(NumericDiffeo::compose(maps[i + 1], back));
    } catch (const DomainError& e) {
      bad("/charts/" + std::to_string(i + 1), std::string("cannot derive the transition: ") + e.what());
    }
  }
  if (j.contains("k")) spec.k = integer(j["k"], "/k");
  if (spec.k < 1 || spec.k > join::kMaxCertOrder) bad("/k", "order must be in 1..4");
  if (j.contains("tol")) spec.tol = tolerances(j["tol"], "/tol");
  if (j.contains("grid_level")) spec.grid_level = integer(j["grid_level"], "/grid_level");
  if (spec.grid_level < 1 || spec.grid_level > 16) bad("/grid_level", "must be in 1..16");
  if (j.contains("samples")) spec.samples = integer(j["samples"], "/samples");
  if (spec.samples < 1) bad("/samples", "must be positive");
  if (j.contains("order")) {
    const std::string o = text(j["order"], "/order");
    if (o == "left-to-right") spec.order = join::CollapseOrder::LeftToRight;
    else if (o == "middle-out") spec.order = join::CollapseOrder::MiddleOut;
    else bad("/order", "expected \"left-to-right\" or \"middle-out\"");
  }
  return spec;
}

Json to_json(const join::SmoothCert& c) {
  return Json{{"k", c.k},
              {"pass", c.pass},
              {"grid_level", c.grid_level},
              {"points", c.points},
              {"tolerance", c.tolerance},
              {"max_residual", c.max_residual},
              {"positive_derivative", c.positive_derivative},
              {"converged", c.converged},
              {"unconverged", c.unconverged},
              {"refinement", Json{{"checked", c.refinement_checked},
                                  {"stable", c.refinement_stable},
                                  {"residual", c.refined_residual}}},
              {"failures", c.failures}};
}

join::SmoothCert cert_from_json(const Json& j) {
  join::SmoothCert c;
  auto flag = [&](const Json& o, const char* k, const std::string& at) {
    const auto& v = need(o, k, at);
    if (!v.is_boolean()) bad(key(at, k), "expected true or false");
    return v.get<bool>();
  };
  c.k = integer(need(j, "k", ""), "/k");
  c.pass = flag(j, "pass", "");
  c.grid_level = integer(need(j, "grid_level", ""), "/grid_level");
  c.points = integer(need(j, "points", ""), "/points");
  c.tolerance = numbers(need(j, "tolerance", ""), "/tolerance");
  c.max_residual = numbers(need(j, "max_residual", ""), "/max_residual");
  c.positive_derivative = flag(j, "positive_derivative", "");
  c.converged = flag(j, "converged", "");
  c.unconverged = integer(need(j, "unconverged", ""), "/unconverged");
  const auto& r = need(j, "refinement", "");
  c.refinement_checked = flag(r, "checked", "/refinement");
  c.refinement_stable = flag(r, "stable", "/refinement");
  c.refined_residual = numbers(need(r, "residual", "/refinement"), "/refinement/residual");
  const auto& f = array(need(j, "failures", ""), "/failures");
  for (size_t i = 0; i < f.size(); ++i) c.failures.push_back(text(f[i], "/failures/" + std::to_string(i)));
  return c;
}

Json collapse_json(const join::CollapseResult& r, int samples) {
  Json maps = Json::array();
  for (size_t i = 0; i < r.maps.size(); ++i) {
    auto [xs, ys] = r.maps[i].samples(samples);
    maps.push_back(Json{{"chart", i}, {"seams", r.seams[i]}, {"samples", samples_json(xs, ys)}});
  }
  return Json{{"chart", Json{{"label", r.chart.label}, {"image", Json::array({r.chart.lo, r.chart.hi})}}},
              {"join_order", r.join_order},
              {"eps", r.eps},
              {"maps", maps},
              {"certificate", to_json(r.cert)}};
}

VerifySpec verify_spec_from_json(const Json& j) {
  if (!j.is_object()) bad("", "expected an object");
  double lo = 0.0, hi = 1.0;
  if (j.contains("domain")) std::tie(lo, hi) = interval(j["domain"], "/domain");
  else if (!j.contains("samples") && !(j.contains("map") && j["map"].is_object() && j["map"].contains("samples")))
    bad("", "missing \"domain\"");
  VerifySpec spec{map_from_json(j, lo, hi, ""), {}};
  if (j.contains("k")) spec.options.k = integer(j["k"], "/k");
  if (spec.options.k < 1 || spec.options.k > join::kMaxCertOrder) bad("/k", "order must be in 1..4");
  if (j.contains("tol")) spec.options.tol = tolerances(j["tol"], "/tol");
  if (j.contains("seams")) spec.options.seams = numbers(j["seams"], "/seams");
  if (j.contains("grid_level")) spec.options.grid_level = integer(j["grid_level"], "/grid_level");
  if (spec.options.grid_level < 1 || spec.options.grid_level > 16) bad("/grid_level", "must be in 1..16");
  return spec;
}

}  // namespace twoline::io

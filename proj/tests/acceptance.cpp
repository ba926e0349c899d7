// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria, so ctest reports any regression.

#include "support/groups.hpp"
#include "support/oracles.hpp"
#include "twoline/cli.hpp"
#include "twoline/cosets.hpp"
#include "twoline/dline.hpp"
#include "twoline/germs.hpp"
#include "twoline/join.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

using namespace twoline;
using Clock = std::chrono::steady_clock;

namespace {

int failed = 0;

void report(int n, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
  if (!ok) ++failed;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string data(const std::string& file) {
  const char* dir = std::getenv("TWOLINE_DATA");
  return std::string(dir ? dir : "data") + "/" + file;
}

int cli(const std::vector<std::string>& args, std::string& out) {
  std::ostringstream o, e;
  int code = cli::run(args, o, e);
  out = o.str() + e.str();
  return code;
}

using Blocks = std::set<std::set<std::string>>;

Blocks named(const cosets::FiniteGroup& g, const cosets::CosetPartition& p) {
  Blocks out;
  for (const auto& b : p.blocks) {
    std::set<std::string> s;
    for (int i : b) s.insert(g.name(i));
    out.insert(s);
  }
  return out;
}

// --------------------------------------------------------------- 1

void criterion1() {
  auto g = cosets::FiniteGroup::dihedral(3);
  auto sub = [&](std::initializer_list<const char*> n) {
    std::vector<int> idx;
    for (auto s : n) idx.push_back(g.index_of(s));
    return cosets::Subgroup(g, idx);
  };
  auto A = sub({"e", "s"}), B = sub({"e", "sr"});
  cosets::double_cosets(g, A, B);  // warm up
  auto t0 = Clock::now();
  auto ab = cosets::double_cosets(g, A, B);
  auto aa = cosets::double_cosets(g, A, A);
  const double ms = seconds_since(t0) * 1e3;
  const Blocks want_ab{{"e", "s", "r", "sr"}, {"r2", "sr2"}}, want_aa{{"e", "s"}, {"r", "r2", "sr", "sr2"}};

  std::string out;
  int code = cli({"cosets", data("d3.json"), "--C", "A", "--D", "B"}, out);
  const bool cli_ok = code == 0 && out.find("{e, r, s, sr}") != std::string::npos &&
                      out.find("{r2, sr2}") != std::string::npos;
  const bool ok = named(g, ab) == want_ab && named(g, aa) == want_aa && ms < 1.0 && cli_ok;
  char buf[160];
  std::snprintf(buf, sizeof buf, "D3 A\\G/B and A\\G/A exact, both in %.4f ms, cli exit %d", ms, code);
  report(1, ok, buf);
}

// --------------------------------------------------------------- 2

// Orbits of D wr Z2 on G by closure: h -> d1 h d2^-1 and h -> h^-1.
Blocks orbit_oracle(const cosets::FiniteGroup& g, const std::vector<int>& d) {
  std::vector<int> seen(g.order(), 0);
  Blocks out;
  for (int start = 0; start < g.order(); ++start) {
    if (seen[start]) continue;
    std::vector<int> stack{start};
    std::set<std::string> orbit;
    seen[start] = 1;
    while (!stack.empty()) {
      int h = stack.back();
      stack.pop_back();
      orbit.insert(g.name(h));
      std::vector<int> next{g.inv(h)};
      for (int x : d)
        for (int y : d) next.push_back(g.mul(g.mul(x, h), g.inv(y)));
      for (int n : next)
        if (!seen[n]) {
          seen[n] = 1;
          stack.push_back(n);
        }
    }
    out.insert(orbit);
  }
  return out;
}

void criterion2() {
  auto groups = corpus::small_groups();
  groups.emplace_back("D3", cosets::FiniteGroup::dihedral(3));
  groups.emplace_back("Z6", cosets::FiniteGroup::cyclic(6));
  int pairs = 0, mismatches = 0;
  for (const auto& [name, g] : groups)
    for (const auto& d : cosets::all_subgroups(g)) {
      ++pairs;
      auto want = orbit_oracle(g, d.elements());
      if (named(g, cosets::pm_union_partition(g, d)) != want) ++mismatches;
      if (named(g, cosets::wreath_orbit_partition(g, d)) != want) ++mismatches;
      if (named(g, cosets::pm_double_cosets(g, d)) != want) ++mismatches;
    }
  report(2, mismatches == 0,
         std::to_string(groups.size()) + " groups, " + std::to_string(pairs) + " (G, D) pairs, " +
             std::to_string(mismatches) + " mismatches");
}

// --------------------------------------------------------------- 3

struct Frac {
  long p, q;
};
bool same(Frac x, Frac y) { return x.p * y.q == y.p * x.q; }
Frac inv(Frac x) { return {x.q, x.p}; }

// fix+/fix- live in w_b Diff w_{1/a}, ex+/ex- in w_b Diff w_a; the cell
// pattern by hand: b = a gives {fix+, ex-}, b = 1/a gives {fix-, ex+}.
std::array<bool, 4> rule(Frac a, Frac b) {
  const bool eq = same(a, b), rec = same(inv(a), b);
  return {eq, rec, rec, eq};
}

void criterion3() {
  auto& rng = oracle::rng();
  rng.seed(20261019);
  std::vector<std::pair<Frac, Frac>> cases{{{2, 1}, {3, 1}}, {{2, 1}, {1, 2}}, {{2, 1}, {2, 1}}};
  auto random_frac = [] {
    for (;;) {
      long q = oracle::uniform_int(1, 12), p = oracle::uniform_int(1, 120);
      const double v = double(p) / double(q);
      if (v > 0.1 && v < 10) return Frac{p, q};
    }
  };
  while (cases.size() < 53) {
    Frac a = random_frac(), b = random_frac();
    const int pick = oracle::uniform_int(0, 3);  // force related pairs often enough to see every pattern
    if (pick == 1) b = {a.p * 2, a.q * 2};
    if (pick == 2) b = inv(a);
    cases.push_back({a, b});
  }
  auto param = [](Frac f) { return Param(Rational(f.p, f.q)); };
  int mismatches = 0, nonempty = 0;
  for (auto [a, b] : cases) {
    auto c = cosets::classify_wa_pair(param(a), param(b));
    if (c.nonempty != rule(a, b)) ++mismatches;
    if (c.any()) ++nonempty;
  }
  const bool worked = cosets::classify_wa_pair(param({2, 1}), param({3, 1})).nonempty ==
                         std::array<bool, 4>{false, false, false, false} &&
                     cosets::classify_wa_pair(param({2, 1}), param({1, 2})).nonempty ==
                         std::array<bool, 4>{false, true, true, false} &&
                     cosets::classify_wa_pair(param({2, 1}), param({2, 1})).nonempty ==
                         std::array<bool, 4>{true, false, false, true};

  // injectivity of a -> [W_a] on a >= 1
  std::vector<Frac> big;
  for (long q = 1; q <= 7; ++q)
    for (long p = q; p <= 10 * q; p += 3) big.push_back({p, q});
  int collisions = 0, distinct_pairs = 0;
  for (size_t i = 0; i < big.size(); ++i)
    for (size_t j = 0; j < big.size(); ++j) {
      if (same(big[i], big[j])) continue;
      ++distinct_pairs;
      if (cosets::classify_wa_pair(param(big[i]), param(big[j])).any()) ++collisions;
    }
  report(3, mismatches == 0 && worked && collisions == 0,
         std::to_string(cases.size()) + " rational pairs (" + std::to_string(nonempty) + " nonempty), " +
             std::to_string(mismatches) + " mismatches, worked cases " + (worked ? "ok" : "WRONG") +
             ", injectivity: " + std::to_string(collisions) + " collisions in " + std::to_string(distinct_pairs) +
             " pairs with a, a' >= 1");
}

// --------------------------------------------------------------- 4

germs::Germ poly_germ(const oracle::Poly& a) {
  std::vector<germs::PowerTerm> pos, neg;
  for (size_t m = 1; m < a.size(); ++m) {
    if (a[m] == 0) continue;
    pos.push_back({a[m], double(m)});
    neg.push_back({m % 2 ? -a[m] : a[m], double(m)});  // a_m x^m = a_m (-1)^m t^m
  }
  return germs::Germ(germs::SideExpansion(neg), germs::SideExpansion(pos),
                     a[1] > 0 ? germs::Orientation::Preserving : germs::Orientation::Reversing);
}

void criterion4() {
  using namespace germs;
  auto r = sandwich_smoothness(Jet::two_sided({1, 2}), 2, 0.5, 2);
  const oracle::Poly q = oracle::scale(oracle::scale_argument({0, 1, 1}, 2.0), 0.5);  // (1/2) f(2x) for x > 0
  const double left = oracle::nth_derivative({0, 1, 1}, 2, 0), right = oracle::nth_derivative(q, 2, 0);
  bool ok1 = r.max_order == 1 && r.obstruction && r.obstruction->order == 2 &&
             std::fabs(r.obstruction->neg.value - left) < 1e-12 && std::fabs(r.obstruction->pos.value - right) < 1e-12 &&
             left == 2 && right == 4;
  bool ok2 = sandwich_smoothness(Jet::two_sided({1, 0, 6}), 2, 0.5, 2).is_diffeo_Ck;

  oracle::rng().seed(7);
  int mismatches = 0;
  for (int trial = 0; trial < 20; ++trial) {
    oracle::Poly a(oracle::uniform_int(2, 5), 0.0);
    a[1] = (oracle::uniform_int(0, 1) ? 1 : -1) * oracle::uniform(0.5, 2.0);
    for (size_t m = 2; m < a.size(); ++m) a[m] = oracle::uniform_int(0, 2) ? 0.0 : oracle::uniform(-1, 1);
    const double choices[] = {0.5, 2.0, 3.0, 1.0 / 3, 1.0};
    double wa = choices[oracle::uniform_int(0, 4)], wb = choices[oracle::uniform_int(0, 4)];
    int n = oracle::uniform_int(1, 4);
    std::vector<double> d;
    for (int j = 1; j <= n; ++j) d.push_back(oracle::nth_derivative(a, j, 0));
    auto via_jet = sandwich_smoothness(Jet::two_sided(d), wa, wb, n);
    auto composed = compose(AnyGerm(make_wa(wb)), compose(AnyGerm(poly_germ(a)), AnyGerm(make_wa(wa))));
    auto via_germ = smoothness_at_zero(composed, n);
    if (via_jet.max_order != via_germ.max_order || via_jet.is_diffeo_Ck != via_germ.is_diffeo_Ck) ++mismatches;
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "x+x^2: max_order %d, second derivatives %g / %g (oracle %g / %g); x+x^3 C^2 %s; probe family "
                "20 cases, %d mismatches",
                r.max_order, r.obstruction ? r.obstruction->neg.value : NAN,
                r.obstruction ? r.obstruction->pos.value : NAN, left, right, ok2 ? "passes" : "FAILS", mismatches);
  report(4, ok1 && ok2 && mismatches == 0, buf);
}

// --------------------------------------------------------------- 5

bool linear_exact(const germs::AnyGerm& g, double slope) {
  const auto* e = std::get_if<germs::Germ>(&g);
  if (!e || !e->per_side_monomial()) return false;
  const auto &n = e->neg().leading(), &p = e->pos().leading();
  // slope * x on both sides: x > 0 gives slope t, x < 0 gives -slope t
  return p.exponent == 1 && n.exponent == 1 && p.coeff == slope && n.coeff == -slope;
}

void criterion5() {
  std::string detail;
  bool ok = true;
  for (double a : {1.0, 4.0, 9.0}) {
    const double r = std::sqrt(a);
    auto p = dline::psi(a, 2);
    dline::SpecialMinimalAtlas w{germs::make_wa(a)};
    dline::DiffeoL id(germs::Germ::identity(), dline::OriginAction::Fix, w, w, 2);
    const bool involution = dline::same_map(dline::compose_diffeo(p, p), id, 0.0);
    const bool exchange = p.origin_action() == dline::OriginAction::Exchange &&
                          p(dline::PointL::real(0.0)) == dline::PointL::origin_tilde() &&
                          p(dline::PointL::origin_tilde()) == dline::PointL::real(0.0);
    const bool u = linear_exact(p.u_presentation(), -r), v = linear_exact(p.v_presentation(), -1.0 / r);
    const bool order2 = p.certified() && germs::smoothness_at_zero(p.u_presentation(), 2).is_diffeo_Ck &&
                        germs::smoothness_at_zero(p.v_presentation(), 2).is_diffeo_Ck;
    const bool phi = germs::diff_membership(dline::phi_ex(p), 2) == germs::Certainty::True;
    std::string out;
    const bool cli_ok = cli({"psi", "--a", std::to_string(int(a)), "--selfcheck"}, out) == 0;
    const bool all = involution && exchange && u && v && order2 && phi && cli_ok;
    ok = ok && all;
    detail += "a=" + std::to_string(int(a)) + (all ? " ok " : " FAILED ");
  }
  report(5, ok, detail + "(psi^2 = id, origin exchange, -sqrt(a)x and -x/sqrt(a) exact, phi_ex in Diff^2)");
}

// --------------------------------------------------------------- 6

void criterion6() {
  auto g = join::NumericDiffeo::from_function([](double x) { return x * x; }, 0, 1, [](double x) { return 2 * x; },
                                              [](double y) { return std::sqrt(y); });
  join::GlueOptions opt;
  opt.grid_cells = 1 << 12;
  auto t0 = Clock::now();
  auto r = join::glue_with_retry(g, opt);
  const double secs = seconds_since(t0);
  const double eps = r.eps;
  int bad_id = 0, bad_g = 0, bad_slope = 0, n_id = 0, n_g = 0;
  for (size_t i = 0; i < r.grid.size(); ++i) {
    const double x = r.grid[i];
    if (x > 0 && x <= eps) {
      ++n_id;
      if (r.values[i] != x || r.p(x) != x) ++bad_id;
    }
    if (x >= 1 - eps && x < 1) {
      ++n_g;
      if (r.values[i] != x * x || r.p(x) != x * x) ++bad_g;
    }
  }
  for (int i = 0; i <= 20000; ++i) {
    const double x = i / 20000.0;
    if (!(r.p.derivative(x) > 0)) ++bad_slope;
  }
  const double oracle_integral = oracle::simpson(r.gamma, 0.0, 1.0, 1e-13);
  const bool integral = std::fabs(r.gamma_integral - 1) <= 1e-8 && std::fabs(oracle_integral - 1) <= 1e-8;
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "eps %g, id exact at %d/%d grid points, x^2 exact at %d/%d, p' <= 0 at %d points, "
                "int gamma - 1 = %.2e (oracle %.2e), %.3f s",
                eps, n_id - bad_id, n_id, n_g - bad_g, n_g, bad_slope, r.gamma_integral - 1, oracle_integral - 1, secs);
  report(6, bad_id == 0 && bad_g == 0 && n_id > 0 && n_g > 0 && bad_slope == 0 && integral && secs < 1.0, buf);
}

// --------------------------------------------------------------- 7

void criterion7() {
  join::ChainAtlas atlas;
  atlas.charts = {{"c0", 0, 2}, {"c1", 1, 4}, {"c2", 3, 6}, {"c3", 5, 8}};
  for (int i = 0; i < 3; ++i)
    atlas.transitions.push_back(join::rescaled_power(atlas.charts[i + 1].lo, atlas.charts[i].hi, 2));
  join::JoinOptions opt;
  opt.verify.k = 2;
  opt.verify.tol = {1e-4};
  opt.verify.refine = true;
  auto t0 = Clock::now();
  auto r = join::collapse_chain(atlas, join::CollapseOrder::LeftToRight, opt);
  const double secs = seconds_since(t0);
  // the collapsed chart must stay compatible with every original chart
  double worst = 0;
  for (int i = 0; i < 3; ++i) {
    const auto& t = atlas.transitions[i];
    for (int s = 1; s < 50; ++s) {
      const double x = t.lo() + s * (t.hi() - t.lo()) / 50;
      worst = std::max(worst, std::fabs(r.maps[i + 1](t(x)) - r.maps[i](x)));
    }
  }
  const auto& c = r.cert;
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "chart (%g; %g), C^2 certificate %s on %d points, residuals %.2e / %.2e, refinement x2 %s (%.2e), "
                "compatibility %.1e, %.3f s",
                r.chart.lo, r.chart.hi, c.pass ? "pass" : "FAIL", c.points, c.max_residual.at(0), c.max_residual.at(1),
                c.refinement_stable ? "stable" : "UNSTABLE",
                c.refined_residual.empty() ? NAN : *std::max_element(c.refined_residual.begin(), c.refined_residual.end()),
                worst, secs);
  report(7, c.pass && c.refinement_checked && c.refinement_stable && worst < 1e-9 && secs < 10.0, buf);
}

// --------------------------------------------------------------- 8

void criterion8() {
  std::string out1, out2;
  const int c1 = cli({"classify", "--a", "2", "--b", "3"}, out1);
  const int c2 = cli({"structure", "same", "--h", data("w2.json"), "--g", data("id.json")}, out2);
  const bool cites = out1.find("intersection_type Empty") != std::string::npos;
  const bool slopes = out2.rfind("false\n", 0) == 0 && out2.find("obstruction at order 1") != std::string::npos &&
                      out2.find("one-sided derivatives 1 (x<0) vs 2 (x>0)") != std::string::npos;
  report(8, c1 == 1 && cites && c2 == 1 && slopes,
         "classify 2 3 exit " + std::to_string(c1) + (cites ? " citing intersection_type Empty" : " WITHOUT citation") +
             "; structure same w2 id exit " + std::to_string(c2) + (slopes ? " false via slopes 1 vs 2" : " WRONG"));
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<void()>>> all{{1, criterion1}, {2, criterion2}, {3, criterion3},
                                                                {4, criterion4}, {5, criterion5}, {6, criterion6},
                                                                {7, criterion7}, {8, criterion8}};
  for (const auto& [n, f] : all) {
    try {
      f();
    } catch (const std::exception& e) {
      report(n, false, std::string("threw: ") + e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", failed, all.size());
  return failed;
}

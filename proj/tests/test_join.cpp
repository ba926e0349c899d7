#include "doctest.h"

#include "twoline/error.hpp"
#include "twoline/join.hpp"

#include <chrono>
#include <cmath>
#include <random>

using namespace twoline;
using namespace twoline::join;

namespace {

// composite Simpson on n (even) panels, test-only
double simpson_oracle(const Fn& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

NumericDiffeo square01() { return rescaled_power(0.0, 1.0, 2.0); }

VerifyOptions vk(int k, double tol = 0.0) {
  VerifyOptions v;
  v.k = k;
  if (tol > 0) v.tol = {tol};
  return v;
}

}  // namespace

TEST_CASE("smooth step and bump") {
  CHECK(smooth_step(-1) == 0.0);
  CHECK(smooth_step(0) == 0.0);
  CHECK(smooth_step(1) == 1.0);
  CHECK(smooth_step(0.5) == doctest::Approx(0.5));
  for (double t : {0.1, 0.3, 0.77}) CHECK(smooth_step(t) + smooth_step(1 - t) == doctest::Approx(1.0));
  for (double t : {0.05, 0.2, 0.5, 0.9}) {
    const double h = 1e-6;
    CHECK(smooth_step_derivative(t) == doctest::Approx((smooth_step(t + h) - smooth_step(t - h)) / (2 * h)).epsilon(1e-6));
  }

  auto bump = bump_plateau(0, 1, 2, 3);
  CHECK(bump(1.5) == 1.0);
  CHECK(bump(1.0) == 1.0);
  CHECK(bump(2.0) == 1.0);
  CHECK(bump(-0.5) == 0.0);
  CHECK(bump(3.5) == 0.0);
  double prev = 0;
  for (int i = 0; i <= 300; ++i) {
    const double x = i / 100.0, y = bump(x);
    CHECK(y >= 0.0);
    CHECK(y <= 1.0);
    if (x <= 1.0) CHECK(y >= prev);
    prev = y;
  }
  const double area = simpson_oracle(bump, 0, 3);
  CHECK(area > 1.0);
  CHECK(area < 3.0);
  CHECK(area == doctest::Approx(2.0).epsilon(1e-9));  // the edges are mirror images

  CHECK_THROWS_AS(bump_plateau(0, 0, 1, 2), DomainError);
  CHECK_THROWS_AS(bump_plateau(0, 2, 1, 3), DomainError);
  CHECK_THROWS_AS(bump_plateau(0, 1, 3, 3), DomainError);
  CHECK_NOTHROW(bump_plateau(0, 1, 1, 2));
}

TEST_CASE("bump is smooth") {
  auto bump = bump_plateau(0, 1, 2, 3);
  auto cert = verify_ck_numeric(bump, -1, 4, vk(3, 1e-4));
  CHECK(cert.pass);
}

TEST_CASE("numeric diffeo nodes") {
  auto sq = square01();
  CHECK(sq(0.5) == doctest::Approx(0.25));
  CHECK(sq.derivative(0.5) == doctest::Approx(1.0));
  CHECK(sq.inverse(0.25) == doctest::Approx(0.5));

  auto numeric = NumericDiffeo::from_function([](double x) { return x * x; }, 0, 1);
  CHECK(numeric.inverse(0.49) == doctest::Approx(0.7).epsilon(1e-13));
  CHECK(numeric.derivative(0.3) == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(numeric.derivative(0.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));

  auto inv = sq.inverse_map();
  CHECK(inv(0.25) == doctest::Approx(0.5));
  CHECK(inv.derivative(0.25) == doctest::Approx(1.0));
  CHECK(inv.inverse_map()(0.3) == doctest::Approx(0.09));

  auto c = NumericDiffeo::compose(sq, sq);
  CHECK(c(0.5) == doctest::Approx(0.0625));
  CHECK(c.derivative(0.5) == doctest::Approx(4 * 0.125));
  CHECK(c.inverse(0.0625) == doctest::Approx(0.5));

  auto ext = NumericDiffeo::extend(rescaled_power(1, 2, 2), 0, 3);
  CHECK(ext(0.5) == 0.5);
  CHECK(ext(2.5) == 2.5);
  CHECK(ext(1.5) == doctest::Approx(1.25));
  CHECK(ext.inverse(1.25) == doctest::Approx(1.5));
  CHECK(ext.derivative(2.5) == 1.0);
  CHECK_THROWS_AS(NumericDiffeo::extend(NumericDiffeo::from_function([](double x) { return 2 * x; }, 0, 1), -1, 2),
                  DomainError);

  auto s = NumericDiffeo::from_samples({0, 0.5, 1}, {0, 0.2, 1});
  CHECK(s.sampled());
  CHECK(s(0.5) == doctest::Approx(0.2));
  CHECK(s.samples().first.size() == 3);
  CHECK_THROWS_AS(NumericDiffeo::from_samples({0, 1}, {1, 0}), DomainError);
  CHECK_THROWS_AS(NumericDiffeo::from_samples({0, 0.5, 1}, {0, 0.6, 0.5}), DomainError);

  CHECK(NumericDiffeo::compose(NumericDiffeo::identity(0, 1), NumericDiffeo::identity(0, 1)).is_identity());
  CHECK_THROWS_AS(NumericDiffeo::compose(sq, rescaled_power(0, 2, 1)), DomainError);
}

TEST_CASE("glue of the identity is the identity") {
  auto r = glue_id_and_diff(NumericDiffeo::identity(0, 1), 0.1);
  CHECK(r.p.is_identity());
  for (int i = 0; i <= 20; ++i) CHECK(r.gamma(i / 20.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("glue of x^2 on (0;1)") {
  const auto g = square01();
  auto r = glue_id_and_diff(g, 0.1);
  CHECK(r.A > 0);
  CHECK(r.p(0.05) == 0.05);
  CHECK(r.p(0.1) == 0.1);
  CHECK(r.p(0.95) == g(0.95));
  CHECK(r.p(0.95) == doctest::Approx(0.9025).epsilon(1e-15));
  CHECK(std::fabs(r.gamma_integral - 1.0) < 1e-8);
  CHECK(std::fabs(r.closing_correction) < 1e-10);

  // p = b + integral of gamma, against an independent Simpson oracle
  for (double x : {0.2, 0.35, 0.5, 0.71, 0.88}) CHECK(r.p(x) == doctest::Approx(simpson_oracle(r.gamma, 0, x)).epsilon(1e-10));

  // exact on the end strips at every grid point, increasing throughout
  for (size_t i = 0; i < r.grid.size(); ++i) {
    const double x = r.grid[i];
    if (x <= 0.1) CHECK(r.values[i] == x);
    if (x >= 0.9) CHECK(r.values[i] == g(x));
    if (i > 0) CHECK(r.values[i] > r.values[i - 1]);
    if (x > 0) CHECK(r.p.derivative(x) > 0);
  }

  auto cert = verify_ck_numeric(r.p, [&] {
    auto v = vk(2, 1e-4);
    v.seams = {0.1, 0.9};
    return v;
  }());
  CHECK(cert.pass);
  CHECK(cert.refinement_checked);
  CHECK(cert.refinement_stable);
}

TEST_CASE("glue on a shifted interval") {
  auto g = NumericDiffeo::from_function([](double x) { return 1 + (x - 1) * (x - 1); }, 1, 2,
                                        [](double x) { return 2 * (x - 1); });
  auto r = glue_with_retry(g);
  CHECK(r.eps == doctest::Approx(0.125));
  CHECK(r.retries == 0);
  CHECK(r.p(1.05) == 1.05);
  CHECK(r.p(1.95) == g(1.95));
  CHECK(std::fabs(r.gamma_integral - 1.0) < 1e-8);
}

TEST_CASE("glue eps retry and infeasibility") {
  // a steep power has almost all of its growth at the right end; large eps
  // leaves no room for the correction term
  auto steep = rescaled_power(0, 1, 40);
  CHECK_THROWS_AS(glue_id_and_diff(steep, 0.2), GlueInfeasible);
  auto r = glue_with_retry(steep);
  CHECK(r.retries > 0);
  CHECK(r.A > 0);
  CHECK(r.eps < 0.125);

  GlueOptions none;
  none.max_retries = 0;
  CHECK_THROWS_AS(glue_with_retry(steep, none), GlueInfeasible);

  CHECK_THROWS_AS(glue_id_and_diff(square01(), 0.3), DomainError);
  CHECK_THROWS_AS(glue_id_and_diff(square01(), 0.0), DomainError);
  auto bad = NumericDiffeo::from_function([](double x) { return x * x * 0.9; }, 0, 1);
  CHECK_THROWS_AS(glue_id_and_diff(bad, 0.1), DomainError);
  auto wiggle = NumericDiffeo::from_function([](double x) { return x + 0.2 * std::sin(6.283185307179586 * x); }, 0, 1);
  CHECK_THROWS_AS(glue_id_and_diff(wiggle, 0.1), DomainError);
}

TEST_CASE("glue meets the runtime budget") {
  auto t0 = std::chrono::steady_clock::now();
  auto r = glue_id_and_diff(square01(), 0.1);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(r.grid.size() == (1u << 12) + 1);
  CHECK(secs < 1.0);
}

TEST_CASE("glue property: random power transitions") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ex(0.4, 3.0), lo(-5, 5), w(0.5, 4);
  GlueOptions opt;
  opt.grid_cells = 1 << 9;
  for (int trial = 0; trial < 12; ++trial) {
    const double b = lo(rng), c = b + w(rng);
    // powers below 1 have an infinite slope at b, but the glue only uses g near c
    auto g = rescaled_power(b, c, ex(rng));
    auto r = glue_with_retry(g, opt);
    const double len = c - b;
    CHECK(std::fabs(r.gamma_integral - len) <= 1e-8 * len);
    CHECK(r.p(b + 0.5 * r.eps) == b + 0.5 * r.eps);
    CHECK(r.p(c - 0.5 * r.eps) == g(c - 0.5 * r.eps));
    for (size_t i = 1; i < r.values.size(); ++i) CHECK(r.values[i] > r.values[i - 1]);
  }
}

TEST_CASE("verify_ck_numeric reference functions") {
  auto xabs = [](double x) { return x * std::fabs(x); };
  auto c1 = verify_ck_numeric(xabs, -1, 1, vk(1));
  CHECK(c1.pass);
  auto c2 = verify_ck_numeric(xabs, -1, 1, vk(2));
  CHECK_FALSE(c2.pass);
  CHECK(c2.max_residual[1] == doctest::Approx(2.0).epsilon(1e-4));  // |-2 - 2| / 2
  CHECK_FALSE(c2.failures.empty());
  CHECK(c2.failures.front().find("x=0 ") != std::string::npos);

  // second derivative blows up at 0: estimates diverge rather than disagree
  auto blow = verify_ck_numeric([](double x) { return x * std::sqrt(std::fabs(x)); }, -1, 1, vk(2));
  CHECK_FALSE(blow.pass);
  CHECK(verify_ck_numeric([](double x) { return x * std::sqrt(std::fabs(x)); }, -1, 1, vk(1)).pass);

  auto a1 = verify_ck_numeric([](double x) { return std::fabs(x); }, -1, 1, vk(1));
  CHECK_FALSE(a1.pass);

  // a kink off the dyadic grid, declared as a seam
  auto kink = [](double x) { return x < 0.3 ? x : 0.3 + 2 * (x - 0.3); };
  auto v = vk(1);
  v.seams = {0.3};
  CHECK_FALSE(verify_ck_numeric(kink, 0, 1, v).pass);

  // smooth maps pass at k = 4 with the default schedule
  auto smooth = verify_ck_numeric([](double x) { return std::exp(x) + x * x * x; }, -1, 1, vk(4));
  CHECK(smooth.pass);
  CHECK(smooth.tolerance == std::vector<double>{1e-6, 1e-5, 1e-3, 1e-2});

  // increasing required for maps
  auto dec = NumericDiffeo::from_function([](double x) { return -x; }, 0, 1);
  CHECK_FALSE(verify_ck_numeric(dec, vk(1)).positive_derivative);

  CHECK_THROWS_AS(verify_ck_numeric(xabs, -1, 1, vk(5)), DomainError);
}

TEST_CASE("verify serial and parallel agree") {
  auto f = [](double x) { return std::sin(x) + x * std::fabs(x); };
  auto vs = vk(3);
  vs.exec = kernels::Exec::Serial;
  auto vp = vk(3);
  vp.exec = kernels::Exec::Parallel;
  auto s = verify_ck_numeric(f, -2, 2, vs), p = verify_ck_numeric(f, -2, 2, vp);
  CHECK(s.max_residual == p.max_residual);
  CHECK(s.failures == p.failures);
}

TEST_CASE("join charts") {
  IntervalChart u{"U", -1, 1}, v{"V", 0, 2};
  auto g = square01();
  auto jr = join_charts(u, v, g);
  CHECK(jr.chart.lo == -1);
  CHECK(jr.chart.hi == 2);
  // W = u off the overlap, W = v off the overlap
  for (double x = -1; x <= 0; x += 0.05) CHECK(jr.p(x) == x);
  for (double x = 1; x <= 2; x += 0.05) CHECK(jr.q(x) == x);
  // the transition identity p = q o g on the overlap
  for (double x = 0.01; x < 1; x += 0.07) CHECK(jr.p(x) == doctest::Approx(jr.q(g(x))).epsilon(1e-12));
  CHECK(jr.cert.pass);

  auto ident = join_charts(u, v, NumericDiffeo::identity(0, 1));
  CHECK(ident.p.is_identity());
  CHECK(ident.q.is_identity());

  CHECK_THROWS_AS(join_charts({"U", -1, 3}, {"V", 0, 2}, g), NotJoinable);
  CHECK_THROWS_AS(join_charts({"U", 0, 1}, {"V", 0, 2}, g), NotJoinable);
  CHECK_THROWS_AS(join_charts(u, v, rescaled_power(0, 0.5, 2)), NotJoinable);
}

namespace {

ChainAtlas quad_chain() {
  // charts (0;2), (1;4), (3;6), (5;8); quadratic transitions on each overlap
  ChainAtlas atlas;
  atlas.charts = {{"c0", 0, 2}, {"c1", 1, 4}, {"c2", 3, 6}, {"c3", 5, 8}};
  for (int i = 0; i < 3; ++i) atlas.transitions.push_back(rescaled_power(atlas.charts[i + 1].lo, atlas.charts[i].hi, 2));
  return atlas;
}

JoinOptions opts(int k, double tol) {
  JoinOptions o;
  o.verify.k = k;
  o.verify.tol = {tol};
  return o;
}

}  // namespace

TEST_CASE("chain validation") {
  auto a = quad_chain();
  CHECK_NOTHROW(a.validate());
  auto triple = a;
  triple.charts[2].lo = 1.5;
  triple.transitions[1] = rescaled_power(1.5, 4, 2);
  try {
    triple.validate();
    FAIL("expected NotJoinable");
  } catch (const NotJoinable& e) {
    CHECK(e.index() == 0);
  }
  auto gap = a;
  gap.charts[2] = {"c2", 4.5, 6};
  CHECK_THROWS_AS(gap.validate(), NotJoinable);
  auto short_t = a;
  short_t.transitions.pop_back();
  CHECK_THROWS_AS(short_t.validate(), NotJoinable);
  auto wrong_dom = a;
  wrong_dom.transitions[2] = rescaled_power(5, 5.5, 2);
  try {
    collapse_chain(wrong_dom);
    FAIL("expected NotJoinable");
  } catch (const NotJoinable& e) {
    CHECK(e.index() == 2);
  }
}

TEST_CASE("collapse identity chain") {
  ChainAtlas a;
  a.charts = {{"a", 0, 2}, {"b", 1, 4}, {"c", 3, 5}};
  a.transitions = {NumericDiffeo::identity(1, 2), NumericDiffeo::identity(3, 4)};
  auto r = collapse_chain(a);
  for (const auto& m : r.maps) CHECK(m.is_identity());
  CHECK(r.chart.lo == 0);
  CHECK(r.chart.hi == 5);
  CHECK(r.cert.pass);
}

TEST_CASE("two-chart chain equals join_charts") {
  ChainAtlas a;
  a.charts = {{"U", -1, 1}, {"V", 0, 2}};
  a.transitions = {square01()};
  auto r = collapse_chain(a);
  auto jr = join_charts(a.charts[0], a.charts[1], a.transitions[0]);
  for (double x = -0.99; x < 1; x += 0.03) CHECK(r.maps[0](x) == jr.p(x));
  for (double x = 0.01; x < 2; x += 0.03) CHECK(r.maps[1](x) == jr.q(x));
  CHECK(r.cert.pass == jr.cert.pass);
}

TEST_CASE("collapse four-chart quadratic chain") {
  auto atlas = quad_chain();
  auto t0 = std::chrono::steady_clock::now();
  auto r = collapse_chain(atlas, CollapseOrder::LeftToRight, opts(2, 1e-4));
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  MESSAGE("collapse + certification: " << secs << " s");
  CHECK(r.cert.pass);
  CHECK(r.cert.refinement_stable);
  CHECK(secs < 10.0);
  CHECK(r.chart.lo == 0);
  CHECK(r.chart.hi == 8);

  // chart compatibility: w_{i+1} o T_i = w_i on every overlap
  for (int i = 0; i < 3; ++i) {
    const auto& t = atlas.transitions[i];
    for (double s = 0.02; s < 1; s += 0.06) {
      const double x = t.lo() + s * (t.hi() - t.lo());
      CHECK(r.maps[i + 1](t(x)) == doctest::Approx(r.maps[i](x)).epsilon(1e-12));
    }
  }
  // unchanged away from overlaps
  CHECK(r.maps[0](0.5) == 0.5);
  CHECK(r.maps[1](2.5) == 2.5);
  CHECK(r.maps[3](7) == 7);
}

TEST_CASE("collapse orders agree up to a certified reparametrization") {
  auto atlas = quad_chain();
  auto o = opts(2, 1e-4);
  auto l2r = collapse_chain(atlas, CollapseOrder::LeftToRight, o);
  auto mid = collapse_chain(atlas, CollapseOrder::MiddleOut, o);
  CHECK(mid.join_order == std::vector<int>{1, 0, 2});
  CHECK(l2r.join_order == std::vector<int>{0, 1, 2});
  for (size_t i = 0; i < atlas.charts.size(); ++i) {
    auto rep = NumericDiffeo::compose(l2r.maps[i], mid.maps[i].inverse_map());
    auto v = o.verify;
    for (double s : mid.seams[i]) v.seams.push_back(mid.maps[i](s));
    CHECK(verify_ck_numeric(rep, v).pass);
  }
}

TEST_CASE("collapse middle-out on five charts") {
  ChainAtlas a;
  a.charts = {{"a", 0, 2}, {"b", 1, 4}, {"c", 3, 6}, {"d", 5, 8}, {"e", 7, 9}};
  for (int i = 0; i < 4; ++i) a.transitions.push_back(rescaled_power(a.charts[i + 1].lo, a.charts[i].hi, i % 2 ? 0.5 : 3));
  auto r = collapse_chain(a, CollapseOrder::MiddleOut, opts(2, 1e-4));
  CHECK(r.join_order == std::vector<int>{1, 0, 2, 3});
  CHECK(r.cert.pass);
}

#include "doctest.h"

#include "support/oracles.hpp"
#include "twoline/error.hpp"
#include "twoline/interp.hpp"
#include "twoline/quadrature.hpp"

#include <cmath>

using namespace twoline;
using namespace twoline::numeric;

TEST_CASE("adaptive simpson against closed forms") {
  CHECK(adaptive_simpson([](double x) { return x * x; }, 0, 3).value == doctest::Approx(9.0).epsilon(1e-14));
  auto r = adaptive_simpson([](double x) { return std::sin(x); }, 0, M_PI);
  CHECK(std::fabs(r.value - 2.0) < 1e-10);
  CHECK(r.converged);
  CHECK(std::fabs(adaptive_simpson([](double x) { return std::exp(-x * x); }, -6, 6).value - std::sqrt(M_PI)) < 1e-10);
  CHECK(adaptive_simpson([](double) { return 1.0; }, 2, 2).value == 0.0);
  CHECK(adaptive_simpson([](double x) { return x; }, 1, 0).value == doctest::Approx(-0.5));
  CHECK_THROWS_AS(adaptive_simpson([](double x) { return x; }, 0, 1, 0.0), DomainError);
}

TEST_CASE("simpson interval cap is reported") {
  auto r = adaptive_simpson([](double x) { return 1.0 / std::sqrt(std::fabs(x - 0.3) + 1e-14); }, 0, 1, 1e-14, 64);
  CHECK_FALSE(r.converged);
  CHECK(r.intervals <= 64);
}

TEST_CASE("simpson agrees with an independent oracle") {
  for (int i = 0; i < 30; ++i) {
    const double a = oracle::uniform(-2, 0), b = oracle::uniform(0.1, 3), w = oracle::uniform(0.5, 6);
    auto f = [w](double x) { return std::cos(w * x) * std::exp(0.3 * x) + x * x * x; };
    CHECK(adaptive_simpson(f, a, b).value == doctest::Approx(oracle::simpson(f, a, b, 1e-12)).epsilon(1e-9));
  }
}

TEST_CASE("gauss-legendre 8 is exact to degree 15") {
  oracle::Poly p(16);
  for (auto& c : p) c = oracle::uniform(-1, 1);
  auto f = [&](double x) { return oracle::eval(p, x); };
  oracle::Poly prim(17, 0.0);
  for (size_t i = 0; i < p.size(); ++i) prim[i + 1] = p[i] / double(i + 1);
  const double exact = oracle::eval(prim, 1.3) - oracle::eval(prim, -0.4);
  CHECK(gauss_legendre8(f, -0.4, 1.3) == doctest::Approx(exact).epsilon(1e-13));
  CHECK(gauss_legendre8(f, 0.5, 0.5) == 0.0);
}

TEST_CASE("monotone cubic interpolates and stays monotone") {
  std::vector<double> xs{0, 0.1, 0.5, 0.55, 2, 3}, ys{0, 1, 1.01, 5, 5.001, 9};
  MonotoneCubic m(xs, ys);
  CHECK(m.increasing());
  for (size_t i = 0; i < xs.size(); ++i) CHECK(m(xs[i]) == doctest::Approx(ys[i]));
  double prev = m(0);
  for (int i = 1; i <= 3000; ++i) {
    const double x = 3.0 * i / 3000, y = m(x);
    CHECK(y >= prev);
    CHECK(m.derivative(x) >= -1e-12);
    prev = y;
  }
  for (double y : {0.3, 1.005, 4.2, 8.9}) CHECK(m(m.inverse(y)) == doctest::Approx(y).epsilon(1e-12));
  CHECK_THROWS_AS(m.inverse(10), DomainError);

  MonotoneCubic down({0, 1, 2}, {3, 2, 0});
  CHECK_FALSE(down.increasing());
  CHECK(down(down.inverse(1.0)) == doctest::Approx(1.0));

  CHECK_THROWS_AS(MonotoneCubic({0}, {0}), DomainError);
  CHECK_THROWS_AS(MonotoneCubic({0, 0}, {0, 1}), DomainError);
  CHECK_THROWS_AS(MonotoneCubic({0, 1, 2}, {0, 1, 1}), DomainError);
  CHECK_THROWS_AS(MonotoneCubic({0, 1, 2}, {0, 2, 1}), DomainError);
}

TEST_CASE("property: monotone cubic on random monotone data") {
  for (int trial = 0; trial < 50; ++trial) {
    const int n = oracle::uniform_int(2, 30);
    std::vector<double> xs{0}, ys{0};
    for (int i = 1; i < n; ++i) {
      xs.push_back(xs.back() + oracle::uniform(0.01, 1));
      ys.push_back(ys.back() + std::pow(10.0, oracle::uniform(-3, 1)));
    }
    MonotoneCubic m(xs, ys);
    double prev = m(xs.front());
    for (int i = 1; i <= 500; ++i) {
      const double x = xs.front() + (xs.back() - xs.front()) * i / 500, y = m(x);
      CHECK(y >= prev - 1e-12);
      prev = y;
    }
    // reproduces straight lines exactly
    std::vector<double> line;
    for (double x : xs) line.push_back(2 * x + 1);
    MonotoneCubic l(xs, line);
    CHECK(l(0.5 * (xs.front() + xs.back())) == doctest::Approx(xs.front() + xs.back() + 1));
  }
}

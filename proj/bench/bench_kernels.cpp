// Serial reference vs OpenMP for each batch kernel. Arg 0 = serial, 1 = parallel.

#include "twoline/join.hpp"
#include "twoline/kernels.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace twoline;
using kernels::Exec;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::Parallel : Exec::Serial; }

std::vector<double> uniform_grid(double lo, double hi, int cells) {
  std::vector<double> g(cells + 1);
  for (int i = 0; i <= cells; ++i) g[i] = lo + (hi - lo) * i / cells;
  return g;
}

// the glue's middle integrand is a representative load
const auto bump = join::bump_plateau(0.1, 0.2, 0.8, 0.9);

void BM_cumulative_integral(benchmark::State& s) {
  auto grid = uniform_grid(0, 1, 1 << 12);
  for (auto _ : s) benchmark::DoNotOptimize(kernels::cumulative_integral(bump, grid, 1e-10, exec_of(s)));
}

void BM_cumulative_integral_gauss8(benchmark::State& s) {
  auto grid = uniform_grid(0, 1, 1 << 12);
  for (auto _ : s)
    benchmark::DoNotOptimize(kernels::cumulative_integral(bump, grid, 1e-10, exec_of(s), kernels::Rule::Gauss8));
}

void BM_one_sided_estimates(benchmark::State& s) {
  auto f = [](double x) { return std::exp(x) + x * x * x; };
  auto points = uniform_grid(0.1, 0.9, 256);
  std::vector<double> reach(points.size(), 0.05);
  numeric::RichardsonConfig cfg;
  cfg.halvings = 20;
  for (auto _ : s) benchmark::DoNotOptimize(kernels::one_sided_estimates(f, points, reach, 3, cfg, exec_of(s)));
}

void BM_classify_grid(benchmark::State& s) {
  std::vector<Param> as, bs;
  for (int p = 1; p <= 40; ++p) {
    as.push_back(Param(Rational(p, 7)));
    bs.push_back(Param(Rational(7, p)));
  }
  for (auto _ : s) benchmark::DoNotOptimize(kernels::classify_grid(as, bs, 2, exec_of(s)));
}

void BM_double_coset_labels(benchmark::State& s) {
  auto g = cosets::FiniteGroup::dihedral(32);  // order 64, the cap
  auto subs = cosets::all_subgroups(g);
  const auto& d = subs[subs.size() / 2];
  for (auto _ : s) benchmark::DoNotOptimize(kernels::double_coset_labels(g, subs[1], d, exec_of(s)));
}

}  // namespace

BENCHMARK(BM_cumulative_integral)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cumulative_integral_gauss8)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_one_sided_estimates)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_classify_grid)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_double_coset_labels)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();

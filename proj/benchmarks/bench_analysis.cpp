#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "anderson/bulk.hpp"
#include "anderson/scaling.hpp"

using namespace anderson;

namespace {

std::vector<double> synthetic_series(int n_max) {
  std::vector<double> v(static_cast<std::size_t>(n_max) + 1, 1.0);
  for (int n = 1; n <= n_max; ++n)
    v[static_cast<std::size_t>(n)] =
        0.95 + 0.3 * std::pow(static_cast<double>(n), -1.25);
  return v;
}

void BM_optimal_a(benchmark::State& state) {
  const auto series = synthetic_series(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimal_a(series, 44));
  }
}

void BM_shell_profile(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const LatticeSpec spec = make_lattice(3, M);
  Field f = delta_field(spec, {0, 0, 0});
  for (auto _ : state) {
    benchmark::DoNotOptimize(shell_profile(f));
  }
}

} // namespace

BENCHMARK(BM_optimal_a)->Arg(200)->Arg(500);
BENCHMARK(BM_shell_profile)->Arg(16)->Arg(48);

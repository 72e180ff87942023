#include <benchmark/benchmark.h>

#include "anderson/lanczos.hpp"

using namespace anderson;

namespace {

void BM_probe(benchmark::State& state) {
  const int n_max = static_cast<int>(state.range(0));
  const LatticeSpec spec = make_lattice(3, n_max + 1);
  const Potential pot = sample_potential(spec, 0.5, 7);
  for (auto _ : state) {
    const DistanceSeries s = probe(pot, {0, 0, 0}, {1, 1, 1}, n_max);
    benchmark::DoNotOptimize(s.values.data());
  }
}

void BM_ortho_diagnostic(benchmark::State& state) {
  const int n_max = static_cast<int>(state.range(0));
  const LatticeSpec spec = make_lattice(3, 10);
  const Potential pot = sample_potential(spec, 1.0, 3);
  ProbeOptions opts;
  opts.truncation = TruncationPolicy::Allow;
  auto [series, basis] = probe_with_basis(pot, {0, 0, 0}, {1, 1, 1}, n_max, opts);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ortho_diagnostic(basis));
  }
}

} // namespace

BENCHMARK(BM_probe)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ortho_diagnostic)->Arg(30)->Arg(60)->Unit(benchmark::kMillisecond);

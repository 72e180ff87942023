#include <benchmark/benchmark.h>

#include "anderson/hamiltonian.hpp"

using namespace anderson;

namespace {

void BM_apply_free(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const LatticeSpec spec = make_lattice(3, M);
  const Potential pot = sample_potential(spec, 0.0, 1);
  Field f = delta_field(spec, {0, 0, 0});
  f.set_active_radius(M - 1); // full fast-path box
  Field out(spec);
  for (auto _ : state) {
    apply(pot, f, out);
    benchmark::DoNotOptimize(out.data());
  }
  const auto side = 2 * static_cast<std::int64_t>(M) - 1;
  state.SetItemsProcessed(state.iterations() * side * side * side);
}

void BM_apply_disordered(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const LatticeSpec spec = make_lattice(3, M);
  const Potential pot = sample_potential(spec, 1.0, 1);
  Field f = delta_field(spec, {0, 0, 0});
  f.set_active_radius(M - 1);
  Field out(spec);
  for (auto _ : state) {
    apply(pot, f, out);
    benchmark::DoNotOptimize(out.data());
  }
  const auto side = 2 * static_cast<std::int64_t>(M) - 1;
  state.SetItemsProcessed(state.iterations() * side * side * side);
}

void BM_inner(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const LatticeSpec spec = make_lattice(3, M);
  Field f = delta_field(spec, {0, 0, 0});
  Field g = delta_field(spec, {1, 0, 0});
  f.set_active_radius(spec.max_taxicab());
  g.set_active_radius(spec.max_taxicab());
  for (auto _ : state) {
    benchmark::DoNotOptimize(inner(f, g));
  }
  state.SetItemsProcessed(state.iterations() * spec.total_sites());
}

} // namespace

BENCHMARK(BM_apply_free)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_apply_disordered)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_inner)->Arg(32)->Arg(64);

BENCHMARK_MAIN();

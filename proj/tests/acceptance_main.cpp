// Acceptance suite. Runs every criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion; the exit code is the number of failures.
//
// Scale notes: the full n_max=500 free-operator run needs ~24 GB of RAM for
// its three field buffers. Set ANDERSON_EXTENDED_SCALE=1 to attempt it; by
// default criterion 2 runs its documented reduced-scale substitute.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "anderson/bulk.hpp"
#include "anderson/io.hpp"
#include "anderson/reference.hpp"
#include "anderson/rng.hpp"
#include "anderson/runner.hpp"

using namespace anderson;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

const Coord kOrigin{0, 0, 0};
const Coord kCorner{1, 1, 1};

DistanceSeries free_series_200; // shared by criteria 1-4

std::string g17(double v) { return format_g17(v); }

Outcome criterion1_free_intercepts() {
  const LatticeSpec spec = make_lattice(3, 201);
  const Potential pot = sample_potential(spec, 0.0, 1);
  free_series_200 = probe(pot, kOrigin, kCorner, 200);
  const RescaleFit fit = optimal_a(free_series_200, 44);
  Outcome o;
  o.pass = !free_series_200.truncation_flag && std::abs(fit.y - 0.95869) <= 5e-5 &&
           std::abs(fit.L - 0.95869) <= 5e-5 && fit.usable;
  std::ostringstream d;
  d << "y=" << g17(fit.y) << " L=" << g17(fit.L) << " a=" << fit.a
    << " (want 0.95869 +- 5e-5)";
  o.detail = d.str();
  return o;
}

Outcome criterion2_free_interval() {
  Outcome o;
  if (std::getenv("ANDERSON_EXTENDED_SCALE")) {
    const LatticeSpec spec = make_lattice(3, 501);
    const Potential pot = sample_potential(spec, 0.0, 1);
    const DistanceSeries s = probe(pot, kOrigin, kCorner, 500);
    const double d500 = s.values.back();
    o.pass = d500 >= 0.9586936 && d500 <= 0.9586939;
    o.detail = "extended scale: D^500=" + g17(d500) +
               " (want within [0.9586936, 0.9586939])";
    return o;
  }
  // reduced-scale substitute: D^200 >= 0.9586939 and monotone toward the
  // interval
  const auto& v = free_series_200.values;
  bool monotone = true;
  for (std::size_t n = 1; n < v.size(); ++n)
    if (v[n] > v[n - 1]) monotone = false;
  const double d200 = v.back();
  o.pass = monotone && d200 >= 0.9586939 && d200 < 0.96;
  o.detail = "substitute: D^200=" + g17(d200) +
             " (want >= 0.9586939, nonincreasing); set "
             "ANDERSON_EXTENDED_SCALE=1 (~24 GB) for the n=500 run";
  return o;
}

Outcome criterion3_free_lower_bound() {
  double min_v = 1.0;
  for (double v : free_series_200.values) min_v = std::min(min_v, v);
  Outcome o;
  o.pass = min_v >= 0.93541;
  o.detail = "min_n D^n=" + g17(min_v) + " (want >= 0.93541)";
  return o;
}

Outcome criterion4_parity() {
  const auto& v = free_series_200.values;
  bool flat_even = true, strict_odd = true, at_floor = false;
  int first_bad = -1;
  for (int k = 1; k <= 200; ++k) {
    const double step = v[static_cast<std::size_t>(k - 1)] -
                        v[static_cast<std::size_t>(k)];
    if (k % 2 == 0) {
      if (v[static_cast<std::size_t>(k)] != v[static_cast<std::size_t>(k - 1)]) {
        flat_even = false;
        if (first_bad < 0) first_bad = k;
      }
    } else if (k >= 3 && !at_floor) {
      if (step <= 0.0) {
        strict_odd = false;
        if (first_bad < 0) first_bad = k;
      }
      if (step <= 1e-14) at_floor = true;
    }
  }
  Outcome o;
  o.pass = flat_even && strict_odd;
  std::ostringstream d;
  d << "even steps bitwise flat: " << (flat_even ? "yes" : "no")
    << ", odd steps strictly decreasing: " << (strict_odd ? "yes" : "no");
  if (first_bad >= 0) d << " (first violation at k=" << first_bad << ")";
  o.detail = d.str();
  return o;
}

Outcome criterion5_oracle_equivalence() {
  const LatticeSpec spec = make_lattice(3, 3);
  ProbeOptions opts;
  opts.truncation = TruncationPolicy::Allow;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Potential pot = sample_potential(spec, 2.0, seed);
    const DistanceSeries fast = probe(pot, kOrigin, kCorner, 30, opts);
    const DistanceSeries exact = brute_force_distance(pot, kOrigin, kCorner, 30);
    for (std::size_t n = 0; n < fast.values.size(); ++n)
      worst = std::max(worst, std::abs(fast.values[n] - exact.values[n]));
  }
  Outcome o;
  o.pass = worst <= 1e-10;
  o.detail = "max |probe - oracle| = " + g17(worst) + " over 5 seeds (want <= 1e-10)";
  return o;
}

Outcome criterion6_orthogonality() {
  const LatticeSpec spec = make_lattice(3, 40);
  ProbeOptions opts;
  opts.truncation = TruncationPolicy::Allow;
  double worst = 0.0;
  std::ostringstream d;
  for (double c : {0.0, 1.0, 2.0, 3.5}) {
    const std::uint64_t seed = cell_seed(2024, static_cast<int>(c * 2), 0);
    const Potential pot = sample_potential(spec, c, seed);
    auto [series, basis] = probe_with_basis(pot, kOrigin, kCorner, 150, opts,
                                            std::int64_t{2} << 30);
    const double q = ortho_diagnostic(basis);
    worst = std::max(worst, q);
    d << "Q(c=" << c << ")=" << g17(q) << " ";
  }
  Outcome o;
  o.pass = worst <= 1e-8;
  o.detail = d.str() + "(want all <= 1e-8)";
  return o;
}

Outcome criterion7_fit_recovery() {
  std::vector<double> series(501, 1.0);
  for (int n = 1; n <= 500; ++n)
    series[static_cast<std::size_t>(n)] =
        0.95 + 0.3 * std::pow(static_cast<double>(n), -1.25);
  const RescaleFit fit = optimal_a(series, 44);
  Outcome o;
  o.pass = std::abs(fit.a - 1.25) <= 1e-12 && std::abs(fit.y - 0.95) <= 1e-6 &&
           fit.L <= fit.y + 1e-12 && fit.residual <= 1e-16 && fit.usable;
  std::ostringstream d;
  d << "a=" << fit.a << " y=" << g17(fit.y) << " L=" << g17(fit.L)
    << " residual=" << g17(fit.residual);
  o.detail = d.str();
  return o;
}

Outcome criterion8_criterion_logic() {
  auto ensemble = [](int passing, int total, double gap) {
    std::vector<FitSummary> v;
    for (int i = 0; i < total; ++i)
      v.push_back(i < passing ? FitSummary{true, 0.95 + gap, 0.95}
                              : FitSummary{true, 0.9501, 0.5});
    return v;
  };
  const bool full = evaluate_criterion(ensemble(10, 10, 1e-4), 0.5).delocalized;
  const bool boundary = evaluate_criterion(ensemble(9, 10, 1e-4), 0.5).delocalized;
  const bool below = evaluate_criterion(ensemble(8, 10, 1e-4), 0.5).delocalized;
  // gap_threshold respected: 6e-3 gap fails with the default 5e-3 threshold
  const bool wide_gap = evaluate_criterion(ensemble(10, 10, 6e-3), 0.5).delocalized;
  const bool narrow_gap = evaluate_criterion(ensemble(10, 10, 4e-3), 0.5).delocalized;
  Outcome o;
  o.pass = full && boundary && !below && !wide_gap && narrow_gap;
  std::ostringstream d;
  d << "100%:" << full << " 90%:" << boundary << " 80%:" << below
    << " gap6e-3:" << wide_gap << " gap4e-3:" << narrow_gap;
  o.detail = d.str();
  return o;
}

Outcome criterion9_profile_normalization() {
  Outcome o;
  double worst_norm_err = 0.0, worst_parity = 0.0;
  // c = 0: parity-zero shells
  {
    const LatticeSpec spec = make_lattice(3, 13);
    const Potential pot = sample_potential(spec, 0.0, 1);
    ProbeOptions opts;
    opts.observer = [&](int n, const Field& v) {
      const ShellProfile p = shell_profile(v);
      double sum_sq = 0.0;
      for (double e : p.values) sum_sq += e * e;
      worst_norm_err = std::max(worst_norm_err, std::abs(sum_sq - 1.0));
      for (std::size_t l = 0; l < p.values.size(); ++l)
        if ((static_cast<int>(l) % 2) != (n % 2))
          worst_parity = std::max(worst_parity, p.values[l]);
    };
    probe(pot, kOrigin, kCorner, 12, opts);
  }
  // disordered realizations: normalization only
  {
    const LatticeSpec spec = make_lattice(3, 21);
    for (std::uint64_t seed : {1ull, 2ull}) {
      const Potential pot = sample_potential(spec, 1.0, seed);
      ProbeOptions opts;
      opts.observer = [&](int, const Field& v) {
        const ShellProfile p = shell_profile(v);
        double sum_sq = 0.0;
        for (double e : p.values) sum_sq += e * e;
        worst_norm_err = std::max(worst_norm_err, std::abs(sum_sq - 1.0));
      };
      probe(pot, kOrigin, kCorner, 20, opts);
    }
  }
  o.pass = worst_norm_err <= 1e-12 && worst_parity <= 1e-11;
  o.detail = "max |sum E^2 - 1| = " + g17(worst_norm_err) +
             ", max wrong-parity E = " + g17(worst_parity);
  return o;
}

fs::path acceptance_dir() {
  return fs::temp_directory_path() /
         ("anderson_acceptance_" + std::to_string(::getpid()));
}

Outcome criterion10_statistical_regime() {
  ExperimentConfig cfg;
  cfg.d = 3;
  cfg.n_max = 200; // reduced scale; the n=500 ensemble needs ~32 GB per cell
  cfg.c_values = {0.5};
  cfg.realizations_per_c = 10;
  cfg.master_seed = 2024;
  cfg.output_dir = (acceptance_dir() / "c05").string();
  cfg.worker_count = 2;
  cfg.ram_budget_gb = 9.0;
  const SweepOutcome outcome = run_sweep(cfg);
  Outcome o;
  if (outcome.failed_cells > 0 || outcome.verdicts.empty()) {
    o.detail = "sweep failed";
    return o;
  }
  const CriterionVerdict& v = outcome.verdicts.front();
  o.pass = v.fraction_usable >= 0.9 - 1e-12 && v.has_minima && v.min_L > 0.94 &&
           v.delocalized;
  std::ostringstream d;
  d << "usable=" << v.fraction_usable << " min_y=" << g17(v.min_y)
    << " min_L=" << g17(v.min_L) << " verdict="
    << (v.delocalized ? "delocalized" : "none")
    << " (want usable >= 0.9, min_L > 0.94, delocalized)";
  o.detail = d.str();
  return o;
}

Outcome criterion11_determinism() {
  Outcome o;
  // (a) re-probe one cell of the criterion-10 sweep from its recorded seed
  const fs::path cell = acceptance_dir() / "c05" / "c=0.5" / "r=3";
  const DistanceSeries persisted = read_series((cell / "series.csv").string());
  const LatticeSpec spec = make_lattice(3, 201);
  const Potential pot =
      sample_potential(spec, persisted.c, persisted.seed, persisted.convention);
  const DistanceSeries fresh =
      probe(pot, persisted.source, persisted.target, persisted.n_max);
  bool identical_probe = fresh.values.size() == persisted.values.size();
  if (identical_probe)
    for (std::size_t n = 0; n < fresh.values.size(); ++n)
      if (fresh.values[n] != persisted.values[n]) identical_probe = false;

  // (b) a full sweep rerun reproduces every persisted byte (timing aside)
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
  };
  ExperimentConfig cfg;
  cfg.d = 3;
  cfg.n_max = 60;
  cfg.M = 61;
  cfg.c_values = {0.0, 1.0};
  cfg.realizations_per_c = 2;
  cfg.master_seed = 7;
  cfg.crop = 15;
  cfg.worker_count = 2;
  cfg.output_dir = (acceptance_dir() / "det1").string();
  run_sweep(cfg);
  cfg.output_dir = (acceptance_dir() / "det2").string();
  run_sweep(cfg);
  bool identical_sweep = true;
  for (const char* rel :
       {"c=0/r=0/series.csv", "c=0/r=1/series.csv", "c=1/r=0/series.csv",
        "c=1/r=1/series.csv", "report.csv", "report_averages.csv",
        "report_verdicts.csv"})
    if (slurp(acceptance_dir() / "det1" / rel) !=
        slurp(acceptance_dir() / "det2" / rel))
      identical_sweep = false;

  o.pass = identical_probe && identical_sweep;
  o.detail = std::string("re-probed cell bitwise identical: ") +
             (identical_probe ? "yes" : "no") +
             ", sweep rerun byte-identical: " + (identical_sweep ? "yes" : "no");
  return o;
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"free-operator intercepts (c=0, n=200, crop=44)", criterion1_free_intercepts},
      {"free-operator limit interval", criterion2_free_interval},
      {"free-operator lower bound sqrt(7)/(2 sqrt(2))", criterion3_free_lower_bound},
      {"free-operator parity pattern", criterion4_parity},
      {"streaming probe vs brute-force oracle", criterion5_oracle_equivalence},
      {"orthogonality diagnostic Q at M=40, n=150", criterion6_orthogonality},
      {"synthetic power-law fit recovery", criterion7_fit_recovery},
      {"ensemble criterion boundary logic", criterion8_criterion_logic},
      {"shell profile normalization and parity", criterion9_profile_normalization},
      {"statistical regime at c=0.5", criterion10_statistical_regime},
      {"determinism of persisted numbers", criterion11_determinism},
  };

  fs::create_directories(acceptance_dir());
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::printf("[%2zu] %s  %s — %s (%.1fs)\n", i + 1,
                o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  std::error_code ec;
  fs::remove_all(acceptance_dir(), ec);
  std::printf("%zu/%zu acceptance criteria passed\n", criteria.size() - failures,
              criteria.size());
  return failures;
}

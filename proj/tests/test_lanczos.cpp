#include <doctest.h>

#include <cmath>

#include "anderson/lanczos.hpp"
#include "anderson/reference.hpp"
#include "anderson/scaling.hpp"
#include "anderson/rng.hpp"
#include "test_support.hpp"

using namespace anderson;

namespace {

const Coord kOrigin{0, 0, 0};
const Coord kCorner{1, 1, 1};

} // namespace

TEST_SUITE("lanczos") {

TEST_CASE("free operator: target at taxicab 3 is unreachable in under 3 hops") {
  const LatticeSpec spec = make_lattice(3, 10);
  const Potential pot = sample_potential(spec, 0.0, 1);
  const DistanceSeries s = probe(pot, kOrigin, kCorner, 6);
  CHECK(s.values[0] == 1.0);
  CHECK(s.values[1] == 1.0);
  CHECK(s.values[2] == 1.0);
  CHECK(s.values[3] < 1.0);
  CHECK(s.truncation_flag == false);
}

TEST_CASE("free operator recurrence constants: alpha_0 = 6, beta_1 = sqrt(6)") {
  const LatticeSpec spec = make_lattice(3, 8);
  const Potential pot = sample_potential(spec, 0.0, 1);
  const DistanceSeries s = probe(pot, kOrigin, kCorner, 5);
  REQUIRE(s.alpha.size() >= 1);
  REQUIRE(s.beta.size() >= 1);
  CHECK(s.alpha[0] == 6.0);
  CHECK(s.beta[0] == doctest::Approx(std::sqrt(6.0)).epsilon(1e-15));
}

TEST_CASE("argument domain errors") {
  const LatticeSpec spec = make_lattice(3, 4);
  const Potential pot = sample_potential(spec, 0.0, 1);
  CHECK_THROWS_AS(probe(pot, kOrigin, kOrigin, 3), DomainError);
  CHECK_THROWS_AS(probe(pot, kOrigin, {9, 0, 0}, 3), DomainError);
  CHECK_THROWS_AS(probe(pot, kOrigin, kCorner, -1), DomainError);
}

TEST_CASE("streaming probe agrees with the brute-force oracle") {
  // 343-site lattice, disordered, truncated evolution on both sides.
  const LatticeSpec spec = make_lattice(3, 3);
  ProbeOptions opts;
  opts.truncation = TruncationPolicy::Allow;
  for (std::uint64_t seed : {11ull, 12ull}) {
    const Potential pot = sample_potential(spec, 2.0, seed);
    const DistanceSeries fast = probe(pot, kOrigin, kCorner, 30, opts);
    const DistanceSeries exact = brute_force_distance(pot, kOrigin, kCorner, 30);
    REQUIRE(fast.values.size() == exact.values.size());
    for (std::size_t n = 0; n < fast.values.size(); ++n)
      CHECK(std::abs(fast.values[n] - exact.values[n]) <= 1e-10);
  }
}

TEST_CASE("oracle basics: D^0 = 1 and rank saturation keeps D constant") {
  const LatticeSpec spec = make_lattice(2, 2); // 25 sites
  const Potential pot = sample_potential(spec, 1.0, 5);
  const DistanceSeries s = brute_force_distance(pot, kOrigin, {1, 1, 0}, 40);
  CHECK(s.values[0] == 1.0);
  // Krylov dimension is capped by the site count, so the tail is flat.
  const double tail = s.values[30];
  for (std::size_t n = 30; n < s.values.size(); ++n)
    CHECK(s.values[n] == doctest::Approx(tail).epsilon(1e-12));
}

TEST_CASE("recorded alpha/beta reproduce the projected operator (tridiagonality)") {
  const LatticeSpec spec = make_lattice(3, 2); // 125 sites
  const Potential pot = sample_potential(spec, 1.5, 3);
  ProbeOptions opts;
  opts.truncation = TruncationPolicy::Allow;
  const int n_max = 20;
  auto [series, basis] = probe_with_basis(pot, kOrigin, kCorner, n_max, opts);
  const DenseMatrix dm = dense_matrix(pot);
  const std::size_t cols = basis.columns.size();
  REQUIRE(cols == static_cast<std::size_t>(n_max) + 1);

  // t_ij = v_i^T H v_j via the dense oracle
  const std::int64_t N = spec.total_sites();
  std::vector<double> hv(static_cast<std::size_t>(N));
  double max_err = 0.0;
  for (std::size_t j = 0; j < cols; ++j) {
    for (std::int64_t r = 0; r < N; ++r) {
      double acc = 0.0;
      for (std::int64_t k = 0; k < N; ++k)
        acc += dm.at(r, k) * basis.columns[j].data()[k];
      hv[static_cast<std::size_t>(r)] = acc;
    }
    for (std::size_t i = 0; i < cols; ++i) {
      // the recurrence stops before computing alpha for the final vector
      if (i == j && i == cols - 1) continue;
      double t = 0.0;
      for (std::int64_t r = 0; r < N; ++r)
        t += basis.columns[i].data()[r] * hv[static_cast<std::size_t>(r)];
      double want = 0.0;
      if (i == j) want = series.alpha[j];
      else if (i + 1 == j) want = series.beta[i];
      else if (j + 1 == i) want = series.beta[j];
      max_err = std::max(max_err, std::abs(t - want));
    }
  }
  CHECK(max_err <= 1e-8);
}

TEST_CASE("distance series is monotone nonincreasing and within [0, 1]") {
  const LatticeSpec spec = make_lattice(3, 3);
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const Potential pot = sample_potential(spec, 3.0, seed);
    ProbeOptions opts;
    opts.truncation = TruncationPolicy::Allow;
    const DistanceSeries s = probe(pot, kOrigin, kCorner, 40, opts);
    for (std::size_t n = 1; n < s.values.size(); ++n) {
      CHECK(s.values[n] <= s.values[n - 1] + 1e-12);
      CHECK(s.values[n] >= 0.0);
      CHECK(s.values[n] <= 1.0);
    }
  }
}

TEST_CASE("free-operator parity: flat at even steps, strict decrease at odd") {
  const LatticeSpec spec = make_lattice(3, 31);
  const Potential pot = sample_potential(spec, 0.0, 1);
  const DistanceSeries s = probe(pot, kOrigin, kCorner, 30);
  bool at_floor = false;
  for (int k = 1; k <= 30; ++k) {
    const double step = s.values[k - 1] - s.values[k];
    if (k % 2 == 0) {
      CHECK(s.values[k] == s.values[k - 1]); // bitwise flat
    } else if (k >= 3 && !at_floor) {
      CHECK(step > 0.0);
      if (step <= 1e-14) at_floor = true;
    }
  }
  // free lower bound sqrt(7)/(2 sqrt(2))
  for (double v : s.values) CHECK(v >= 0.93541);
}

TEST_CASE("breakdown pads the series with the invariant-subspace value") {
  // 9-site free lattice: the orbit of the center spans only a few symmetric
  // vectors, so the recurrence terminates long before n_max.
  const LatticeSpec spec = make_lattice(2, 1);
  const Potential pot = sample_potential(spec, 0.0, 1);
  ProbeOptions opts;
  opts.truncation = TruncationPolicy::Allow;
  const DistanceSeries s = probe(pot, kOrigin, {1, 1, 0}, 12, opts);
  REQUIRE(s.breakdown_step.has_value());
  CHECK(*s.breakdown_step < 12);
  CHECK(s.values.size() == 13);
  const double last = s.values[static_cast<std::size_t>(*s.breakdown_step)];
  for (std::size_t n = static_cast<std::size_t>(*s.breakdown_step);
       n < s.values.size(); ++n)
    CHECK(s.values[n] == last);
  // the oracle agrees on the padded tail
  const DistanceSeries exact = brute_force_distance(pot, kOrigin, {1, 1, 0}, 12);
  for (std::size_t n = 0; n < s.values.size(); ++n)
    CHECK(std::abs(s.values[n] - exact.values[n]) <= 1e-10);
}

TEST_CASE("probe_with_basis: same series, orthonormal columns") {
  const LatticeSpec spec = make_lattice(3, 12);
  const Potential pot = sample_potential(spec, 1.0, 8);
  const int n_max = 10;
  const DistanceSeries plain = probe(pot, kOrigin, kCorner, n_max);
  auto [series, basis] = probe_with_basis(pot, kOrigin, kCorner, n_max);
  REQUIRE(series.values.size() == plain.values.size());
  for (std::size_t n = 0; n < plain.values.size(); ++n)
    CHECK(series.values[n] == plain.values[n]); // identical arithmetic
  REQUIRE(basis.columns.size() == static_cast<std::size_t>(n_max) + 1);
  for (std::size_t j = 0; j < basis.columns.size(); ++j) {
    CHECK(std::abs(norm(basis.columns[j]) - 1.0) <= 1e-10);
    if (j > 0)
      CHECK(std::abs(inner(basis.columns[j - 1], basis.columns[j])) <= 1e-10);
  }
  CHECK_THROWS_AS(
      probe_with_basis(pot, kOrigin, kCorner, n_max, {}, /*budget=*/1 << 20),
      SizingError);
}

TEST_CASE("ortho diagnostic: zero for exactly orthonormal columns") {
  const LatticeSpec spec = make_lattice(3, 2);
  KrylovBasis basis;
  basis.columns.push_back(delta_field(spec, {0, 0, 0}));
  CHECK(ortho_diagnostic(basis) == 0.0);
  basis.columns.push_back(delta_field(spec, {1, 0, 0}));
  basis.columns.push_back(delta_field(spec, {0, 1, 0}));
  CHECK(ortho_diagnostic(basis) == 0.0);
  CHECK_THROWS_AS(ortho_diagnostic(KrylovBasis{}), DomainError);
}

TEST_CASE("orthogonality loss stays tiny on a truncated disordered run") {
  const LatticeSpec spec = make_lattice(3, 8);
  const Potential pot = sample_potential(spec, 2.0, 6);
  ProbeOptions opts;
  opts.truncation = TruncationPolicy::Allow;
  auto [series, basis] = probe_with_basis(pot, kOrigin, kCorner, 40, opts);
  CHECK(series.truncation_flag);
  CHECK(ortho_diagnostic(basis) <= 1e-9);
}

TEST_CASE("mid-scale disordered run lands in the weak-disorder regime") {
  // one c = 0.3 realization at reduced depth; intercepts sit just below the
  // free-operator limit and the two extrapolations agree to ~2e-4
  const LatticeSpec spec = make_lattice(3, 121);
  const Potential pot = sample_potential(spec, 0.3, 5);
  const DistanceSeries s = probe(pot, {0, 0, 0}, {1, 1, 1}, 120);
  CHECK_FALSE(s.truncation_flag);
  const RescaleFit fit = optimal_a(s, 26);
  CHECK(fit.usable);
  CHECK(fit.a >= 1.0);
  CHECK(fit.y > 0.957);
  CHECK(fit.y < 0.960);
  CHECK(fit.L <= fit.y + 1e-12);
  CHECK(fit.L > 0.956);
}

TEST_CASE("truncation flag reflects whether the orbit hits the boundary") {
  const Potential small = sample_potential(make_lattice(3, 5), 0.7, 2);
  ProbeOptions opts;
  opts.truncation = TruncationPolicy::Allow;
  CHECK(probe(small, kOrigin, kCorner, 10, opts).truncation_flag);
  const Potential big = sample_potential(make_lattice(3, 12), 0.7, 2);
  CHECK_FALSE(probe(big, kOrigin, kCorner, 10, opts).truncation_flag);
}

} // TEST_SUITE

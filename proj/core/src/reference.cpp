#include "anderson/reference.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <Eigen/QR>

namespace anderson {

namespace {

constexpr std::int64_t kSiteCap = 5000;

void check_cap(const LatticeSpec& spec, const char* op) {
  if (spec.total_sites() > kSiteCap)
    throw SizingError(std::string(op) + ": lattice has " +
                      std::to_string(spec.total_sites()) +
                      " sites, reference cap is " + std::to_string(kSiteCap));
}

} // namespace

DenseMatrix dense_matrix(const Potential& pot) {
  const LatticeSpec& spec = pot.spec();
  check_cap(spec, "dense_matrix");
  const std::int64_t n = spec.total_sites();
  DenseMatrix m;
  m.n = n;
  m.a.assign(static_cast<std::size_t>(n * n), 0.0);
  const double diag = 2.0 * spec.d();
  for (std::int64_t o = 0; o < n; ++o) {
    const Coord site = spec.site_of(o);
    m.a[static_cast<std::size_t>(o * n + o)] = diag + pot.omega_at(o);
    for (int axis = 0; axis < spec.d(); ++axis) {
      for (int dir : {-1, +1}) {
        Coord nb = site;
        nb[axis] += dir;
        if (!spec.contains(nb)) continue;
        m.a[static_cast<std::size_t>(o * n + spec.offset_of(nb))] = -1.0;
      }
    }
  }
  return m;
}

DistanceSeries brute_force_distance(const Potential& pot, const Coord& source,
                                    const Coord& target, int n_max) {
  const LatticeSpec& spec = pot.spec();
  check_cap(spec, "brute_force_distance");
  if (!spec.contains(source) || !spec.contains(target))
    throw DomainError("brute_force_distance: source or target outside lattice");
  if (source == target)
    throw DomainError("brute_force_distance: source and target must differ");

  const std::int64_t m = spec.total_sites();
  const DenseMatrix dm = dense_matrix(pot);
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>>
      A(dm.a.data(), m, m);

  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  b[spec.offset_of(target)] = 1.0;

  DistanceSeries series;
  series.d = spec.d();
  series.M = spec.M();
  series.c = pot.c();
  series.seed = pot.seed();
  series.convention = pot.convention();
  series.source = source;
  series.target = target;
  series.n_max = n_max;
  series.values.reserve(static_cast<std::size_t>(n_max) + 1);

  // Rank-revealing incremental QR of the Krylov matrix: each new direction
  // A q_n is orthogonalized against every previous basis vector (two full
  // Gram-Schmidt passes). Raw powers H^n delta collapse onto the dominant
  // eigenvector in floating point long before n_max, so the factorization
  // must be built column by column to keep the late subspace directions.
  std::vector<Eigen::VectorXd> basis;
  Eigen::VectorXd next = Eigen::VectorXd::Zero(m);
  next[spec.offset_of(source)] = 1.0;
  bool saturated = false;
  double proj_sq = 0.0;

  for (int n = 0; n <= n_max; ++n) {
    if (!saturated) {
      const double scale = next.norm();
      if (scale == 0.0) {
        saturated = true;
      } else {
        for (int pass = 0; pass < 2; ++pass)
          for (const Eigen::VectorXd& q : basis) next -= q.dot(next) * q;
        const double residual = next.norm();
        if (residual <= 1e-10 * scale) {
          saturated = true; // rank stalled: the subspace is invariant
        } else {
          next /= residual;
          basis.push_back(next);
          const double coeff = basis.back().dot(b);
          proj_sq += coeff * coeff;
          next = A * basis.back();
        }
      }
    }
    const double dist_sq = 1.0 - proj_sq;
    series.values.push_back(std::sqrt(dist_sq > 0.0 ? dist_sq : 0.0));
  }
  return series;
}

} // namespace anderson

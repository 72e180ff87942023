#pragma once

// Reference implementations used as independent oracles by the test and
// acceptance suites. They are deliberately size-capped and share no kernel
// code with the streaming production path.

#include <cstdint>
#include <vector>

#include "anderson/hamiltonian.hpp"
#include "anderson/lanczos.hpp"

namespace anderson {

/// Explicit dense operator matrix, row-major. Built directly from the
/// stencil definition (2d + omega on the diagonal, -1 per axis neighbor),
/// not by applying the matrix-free kernel.
struct DenseMatrix {
  std::int64_t n = 0;
  std::vector<double> a;
  double at(std::int64_t i, std::int64_t j) const {
    return a[static_cast<std::size_t>(i * n + j)];
  }
};

/// Capped at 5000 sites.
DenseMatrix dense_matrix(const Potential& pot);

/// Exact distance series via explicit Krylov columns and a rank-revealing
/// orthogonal factorization per step. Capped at 5000 sites. breakdown_step
/// is not populated; rank saturation simply leaves the values constant.
DistanceSeries brute_force_distance(const Potential& pot, const Coord& source,
                                    const Coord& target, int n_max);

} // namespace anderson

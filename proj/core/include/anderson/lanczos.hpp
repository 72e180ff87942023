#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "anderson/hamiltonian.hpp"
#include "anderson/lattice.hpp"

namespace anderson {

/// The distance sequence D^0..D^n_max from the target delta vector to the
/// growing Krylov orbit of the source delta vector, plus the tridiagonal
/// coefficients recorded along the way.
struct DistanceSeries {
  int d = 3;
  int M = 0;
  double c = 0.0;
  std::uint64_t seed = 0;
  Convention convention = Convention::Half;
  Coord source{0, 0, 0};
  Coord target{1, 1, 1};
  int n_max = 0;
  std::vector<double> values;         // D^0 .. D^n_max
  bool truncation_flag = false;       // some apply clipped support at the boundary
  std::optional<int> breakdown_step;  // index of the last computed Krylov vector
  std::vector<double> alpha;          // alpha_0 .. (diagonal)
  std::vector<double> beta;           // beta_1 .. (off-diagonal)
};

/// Called with (k, v_k) for every orthonormal Krylov vector the recurrence
/// produces, in order, starting at k = 0.
using StepObserver = std::function<void(int, const Field&)>;

struct ProbeOptions {
  TruncationPolicy truncation = TruncationPolicy::Forbid;
  /// Stop when beta_{k+1} <= breakdown_rtol * ||H v_k||; the Krylov space is
  /// then invariant and the remaining distances repeat the last value.
  double breakdown_rtol = 1e-12;
  StepObserver observer;
};

/// Streaming Lanczos three-term recurrence on H_omega starting from the
/// source delta vector. Exactly three field buffers are live. At each step k
/// the projection coefficient c_k = v_k(target) updates the squared distance
/// dist_sq <- dist_sq - c_k^2 (clamped at 0), so D^k = sqrt(dist_sq) without
/// storing any basis.
DistanceSeries probe(const Potential& pot, const Coord& source,
                     const Coord& target, int n_max,
                     const ProbeOptions& options = {});

/// All orthonormal Krylov vectors of one probe, kept as columns.
struct KrylovBasis {
  std::vector<Field> columns;
};

/// Like probe (identical arithmetic and series) but additionally retains
/// every Krylov vector. Memory: total_sites * (n_max + 1) * 8 bytes, checked
/// against the budget before running.
std::pair<DistanceSeries, KrylovBasis> probe_with_basis(
    const Potential& pot, const Coord& source, const Coord& target, int n_max,
    const ProbeOptions& options = {},
    std::int64_t max_basis_bytes = std::int64_t{8} << 30);

/// Orthogonality loss Q = ||K^T K - I||_inf (maximum absolute row sum).
/// Zero for exactly orthonormal columns.
double ortho_diagnostic(const KrylovBasis& basis);

} // namespace anderson

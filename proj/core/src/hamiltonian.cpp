#include "anderson/hamiltonian.hpp"

#include <algorithm>
#include <cstring>

#include "anderson/rng.hpp"

namespace anderson {

const char* to_string(Convention c) {
  return c == Convention::Half ? "half" : "full";
}

Convention convention_from_string(const std::string& s) {
  if (s == "half" || s == "HALF") return Convention::Half;
  if (s == "full" || s == "FULL") return Convention::Full;
  throw DomainError("unknown disorder convention '" + s + "' (want half|full)");
}

Potential sample_potential(const LatticeSpec& spec, double c, std::uint64_t seed,
                           Convention convention) {
  if (c < 0.0) throw DomainError("disorder strength must be >= 0");
  if (c == 0.0) return Potential(spec, c, seed, convention, {});
  std::vector<double> omega(static_cast<std::size_t>(spec.total_sites()));
  Xoshiro256pp rng(seed);
  if (convention == Convention::Half) {
    for (auto& w : omega) w = c * (rng.uniform() - 0.5);
  } else {
    for (auto& w : omega) w = c * (2.0 * rng.uniform() - 1.0);
  }
  return Potential(spec, c, seed, convention, std::move(omega));
}

namespace {

// Interior kernel for one contiguous row: every neighbor offset is valid and
// holds the correct (possibly zero) value.
inline void row_free(double* out, const double* f, std::int64_t len, double diag,
                     std::int64_t sx, std::int64_t sy) {
  for (std::int64_t i = 0; i < len; ++i)
    out[i] = diag * f[i] - (f[i - 1] + f[i + 1] + f[i - sy] + f[i + sy] +
                            f[i - sx] + f[i + sx]);
}

inline void row_disordered(double* out, const double* f, const double* om,
                           std::int64_t len, double diag, std::int64_t sx,
                           std::int64_t sy) {
  for (std::int64_t i = 0; i < len; ++i)
    out[i] = (diag + om[i]) * f[i] - (f[i - 1] + f[i + 1] + f[i - sy] + f[i + sy] +
                                      f[i - sx] + f[i + sx]);
}

inline void row_free_2d(double* out, const double* f, std::int64_t len,
                        double diag, std::int64_t sx) {
  for (std::int64_t i = 0; i < len; ++i)
    out[i] = diag * f[i] - (f[i - 1] + f[i + 1] + f[i - sx] + f[i + sx]);
}

inline void row_disordered_2d(double* out, const double* f, const double* om,
                              std::int64_t len, double diag, std::int64_t sx) {
  for (std::int64_t i = 0; i < len; ++i)
    out[i] = (diag + om[i]) * f[i] - (f[i - 1] + f[i + 1] + f[i - sx] + f[i + sx]);
}

// Boundary-aware fallback over the whole cube, used once the support may
// touch the boundary. Missing neighbors read as zero (Dirichlet truncation).
void apply_guarded(const Potential& pot, const Field& f, Field& out) {
  const LatticeSpec& spec = f.spec();
  const int M = spec.M();
  const int d = spec.d();
  const double diag = 2.0 * d;
  const double* fp = f.data();
  double* op = out.data();
  const std::int64_t sx = spec.stride(0);
  if (d == 2) {
    for (int x = -M; x <= M; ++x)
      for (int y = -M; y <= M; ++y) {
        const std::int64_t o = spec.offset_of({x, y, 0});
        double acc = (diag + pot.omega_at(o)) * fp[o];
        if (x > -M) acc -= fp[o - sx];
        if (x < M) acc -= fp[o + sx];
        if (y > -M) acc -= fp[o - 1];
        if (y < M) acc -= fp[o + 1];
        op[o] = acc;
      }
    return;
  }
  const std::int64_t sy = spec.stride(1);
  for (int x = -M; x <= M; ++x)
    for (int y = -M; y <= M; ++y)
      for (int z = -M; z <= M; ++z) {
        const std::int64_t o = spec.offset_of({x, y, z});
        double acc = (diag + pot.omega_at(o)) * fp[o];
        if (x > -M) acc -= fp[o - sx];
        if (x < M) acc -= fp[o + sx];
        if (y > -M) acc -= fp[o - sy];
        if (y < M) acc -= fp[o + sy];
        if (z > -M) acc -= fp[o - 1];
        if (z < M) acc -= fp[o + 1];
        op[o] = acc;
      }
}

} // namespace

bool apply(const Potential& pot, const Field& f, Field& out,
           TruncationPolicy policy) {
  if (&f == &out) throw ContractError("apply: out must be distinct from f");
  if (!(f.spec() == out.spec()) || !(f.spec() == pot.spec()))
    throw ContractError("apply: potential, input and output lattices differ");

  const LatticeSpec& spec = f.spec();
  const int M = spec.M();
  const bool truncated = f.active_radius() >= M;
  if (truncated && policy == TruncationPolicy::Forbid)
    throw ContractError("apply: support reaches the cube boundary (active_radius=" +
                        std::to_string(f.active_radius()) + ", M=" + std::to_string(M) +
                        "); enlarge M or allow truncation");

  const int new_radius = std::min(f.active_radius() + 1, spec.max_taxicab());
  if (out.active_radius() > new_radius)
    std::fill(out.values().begin(), out.values().end(), 0.0);

  const int b = detail::box_extent(spec, f.active_radius() + 1);
  if (b == M) {
    apply_guarded(pot, f, out);
    out.set_active_radius(new_radius);
    return truncated;
  }

  const double diag = 2.0 * spec.d();
  const double* fp = f.data();
  double* op = out.data();
  const std::int64_t sx = spec.stride(0);
  const std::int64_t len = 2 * static_cast<std::int64_t>(b) + 1;
  if (spec.d() == 2) {
    for (int x = -b; x <= b; ++x) {
      const std::int64_t base = spec.offset_of({x, -b, 0});
      if (pot.is_zero())
        row_free_2d(op + base, fp + base, len, diag, sx);
      else
        row_disordered_2d(op + base, fp + base, pot.omega().data() + base, len,
                          diag, sx);
    }
  } else {
    const std::int64_t sy = spec.stride(1);
    for (int x = -b; x <= b; ++x)
      for (int y = -b; y <= b; ++y) {
        const std::int64_t base = spec.offset_of({x, y, -b});
        if (pot.is_zero())
          row_free(op + base, fp + base, len, diag, sx, sy);
        else
          row_disordered(op + base, fp + base, pot.omega().data() + base, len,
                         diag, sx, sy);
      }
  }
  out.set_active_radius(new_radius);
  return truncated;
}

} // namespace anderson

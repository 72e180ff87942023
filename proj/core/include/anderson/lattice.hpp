#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "anderson/errors.hpp"

namespace anderson {

/// Lattice site. For d == 2 the third component must be zero.
using Coord = std::array<int, 3>;

inline int taxicab(const Coord& site) {
  auto a = [](int v) { return v < 0 ? -v : v; };
  return a(site[0]) + a(site[1]) + a(site[2]);
}

/// Geometry of the truncated cube {-M..M}^d, d in {2,3}, with a fixed
/// row-major layout: axis 0 slowest, last axis contiguous. Every axis
/// neighbor of a site is a fixed stride away in the value vector, so the
/// stencil can run on raw offsets.
class LatticeSpec {
public:
  LatticeSpec() = default;
  LatticeSpec(int d, int M);

  int d() const { return d_; }
  int M() const { return M_; }
  int side() const { return side_; }
  std::int64_t total_sites() const { return total_; }
  std::int64_t stride(int axis) const { return strides_[axis]; }
  /// Largest taxicab radius that fits in the cube.
  int max_taxicab() const { return d_ * M_; }

  bool contains(const Coord& site) const;
  std::int64_t offset_of(const Coord& site) const;
  Coord site_of(std::int64_t offset) const;

  friend bool operator==(const LatticeSpec& a, const LatticeSpec& b) {
    return a.d_ == b.d_ && a.M_ == b.M_;
  }

private:
  int d_ = 3;
  int M_ = 1;
  int side_ = 3;
  std::int64_t total_ = 27;
  std::int64_t strides_[3] = {9, 3, 1};
};

/// Default per-field allocation budget (bytes).
inline constexpr std::int64_t kDefaultFieldBudget = std::int64_t{64} << 30;

/// Validates d and M and checks the dense value array against the budget.
/// Throws SizingError naming the requested byte count when it does not fit.
LatticeSpec make_lattice(int d, int M,
                         std::int64_t max_field_bytes = kDefaultFieldBudget);

/// One real-valued wavefunction on the lattice, stored dense. active_radius
/// is an upper bound on the taxicab radius of the support: every entry
/// farther out is exactly zero. Kernels use it to skip inactive sites.
class Field {
public:
  explicit Field(const LatticeSpec& spec)
      : spec_(spec), values_(static_cast<std::size_t>(spec.total_sites()), 0.0) {}

  const LatticeSpec& spec() const { return spec_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  const double* data() const { return values_.data(); }
  double* data() { return values_.data(); }

  int active_radius() const { return active_radius_; }
  void set_active_radius(int r) {
    const int cap = spec_.max_taxicab();
    active_radius_ = r < 0 ? 0 : (r > cap ? cap : r);
  }

private:
  LatticeSpec spec_;
  std::vector<double> values_;
  int active_radius_ = 0;
};

/// Unit vector concentrated on one site.
Field delta_field(const LatticeSpec& spec, const Coord& site);

/// l2 inner product. Reduction runs over the intersection of the active
/// boxes only; entries outside are zero by the Field invariant.
double inner(const Field& f, const Field& g);
double norm(const Field& f);

/// g <- g + alpha * f. g's active radius becomes the max of the two.
void axpy(double alpha, const Field& f, Field& g);
void scale(double alpha, Field& f);

double entry_at(const Field& f, const Coord& site);

/// Offsets of all sites with taxicab norm exactly l (a "diamond" shell).
/// Complete for 0 <= l <= d*M; empty beyond.
std::vector<std::int64_t> shell_offsets(const LatticeSpec& spec, int l);

namespace detail {
/// Per-axis half-extent of the box that encloses taxicab radius r.
inline int box_extent(const LatticeSpec& spec, int r) {
  return r < spec.M() ? (r < 0 ? 0 : r) : spec.M();
}
} // namespace detail

} // namespace anderson

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "anderson/lattice.hpp"

namespace anderson {

/// Width convention for the uniform on-site disorder:
///   Half -> omega_i drawn from [-c/2, c/2)
///   Full -> omega_i drawn from [-c, c)
enum class Convention { Half, Full };

const char* to_string(Convention c);
Convention convention_from_string(const std::string& s);

/// One i.i.d. disorder realization. Immutable after creation; shareable
/// across threads. For c == 0 no value array is allocated (the potential is
/// identically zero regardless of seed).
class Potential {
public:
  Potential(const LatticeSpec& spec, double c, std::uint64_t seed,
            Convention convention, std::vector<double> omega)
      : spec_(spec), c_(c), seed_(seed), convention_(convention),
        omega_(std::move(omega)) {}

  const LatticeSpec& spec() const { return spec_; }
  double c() const { return c_; }
  std::uint64_t seed() const { return seed_; }
  Convention convention() const { return convention_; }
  bool is_zero() const { return omega_.empty(); }
  double omega_at(std::int64_t offset) const {
    return omega_.empty() ? 0.0 : omega_[static_cast<std::size_t>(offset)];
  }
  std::span<const double> omega() const { return omega_; }

private:
  LatticeSpec spec_;
  double c_;
  std::uint64_t seed_;
  Convention convention_;
  std::vector<double> omega_;
};

/// Draws one uniform value per site with xoshiro256++, in layout order.
/// Identical (spec, c, seed, convention) reproduce identical arrays.
Potential sample_potential(const LatticeSpec& spec, double c, std::uint64_t seed,
                           Convention convention = Convention::Half);

/// What to do when the support of the input field may touch the cube
/// boundary, so that mass would be clipped relative to the infinite lattice.
enum class TruncationPolicy { Forbid, Allow };

/// out(x) = 2d f(x) - sum_{axis neighbors e} f(x+e) + omega_x f(x), with
/// f == 0 outside the cube (zero-Dirichlet truncation). Matrix-free; only
/// the box enclosing the support plus one step is visited. Returns true when
/// the support could reach the boundary and was clipped (only permitted
/// under TruncationPolicy::Allow). out and f must be distinct fields on the
/// same lattice.
bool apply(const Potential& pot, const Field& f, Field& out,
           TruncationPolicy policy = TruncationPolicy::Forbid);

} // namespace anderson

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "anderson/hamiltonian.hpp"
#include "anderson/lattice.hpp"

namespace anderson {

/// Which normalized vector a bulk profile describes.
enum class ProfileKind { LanczosBasisVector, NormalizedPower };

const char* to_string(ProfileKind k);
ProfileKind profile_kind_from_string(const std::string& s);

/// Mass of a normalized wave packet per taxicab shell: E(l) is the Euclidean
/// norm of the entries on the diamond at distance l from the origin, so
/// sum_l E(l)^2 = 1.
struct ShellProfile {
  int n = 0;
  double c = 0.0;
  std::uint64_t seed = 0;
  ProfileKind kind = ProfileKind::LanczosBasisVector;
  std::vector<double> values; // E(0) .. E(l_max)
};

/// Profiles a normalized field (verified to ||f|| = 1 +- 1e-10). Metadata
/// fields (n, c, seed, kind) are left for the caller to fill in.
ShellProfile shell_profile(const Field& f);

/// Pointwise mean of profiles with identical shape and metadata; averaging
/// the E curves themselves, not the underlying vectors.
ShellProfile averaged_profile(std::span<const ShellProfile> profiles);

/// m_n = H^n delta_source / ||H^n delta_source||, computed with per-step
/// renormalization (two live buffers).
Field normalized_power_field(const Potential& pot, const Coord& source, int n,
                             TruncationPolicy policy = TruncationPolicy::Forbid);

} // namespace anderson

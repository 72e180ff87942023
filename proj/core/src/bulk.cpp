#include "anderson/bulk.hpp"

#include <cmath>

namespace anderson {

const char* to_string(ProfileKind k) {
  return k == ProfileKind::LanczosBasisVector ? "lanczos" : "power";
}

ProfileKind profile_kind_from_string(const std::string& s) {
  if (s == "lanczos") return ProfileKind::LanczosBasisVector;
  if (s == "power") return ProfileKind::NormalizedPower;
  throw DomainError("unknown profile kind '" + s + "' (want lanczos|power)");
}

ShellProfile shell_profile(const Field& f) {
  const double nrm = norm(f);
  if (std::abs(nrm - 1.0) > 1e-10)
    throw ContractError("shell_profile: field is not normalized, ||f|| = " +
                        std::to_string(nrm));
  const LatticeSpec& spec = f.spec();
  const int l_max = std::min(f.active_radius(), spec.max_taxicab());
  std::vector<double> e2(static_cast<std::size_t>(l_max) + 1, 0.0);
  const int b = detail::box_extent(spec, f.active_radius());
  const double* fp = f.data();
  if (spec.d() == 2) {
    for (int x = -b; x <= b; ++x)
      for (int y = -b; y <= b; ++y) {
        const int l = std::abs(x) + std::abs(y);
        if (l > l_max) continue;
        const double v = fp[spec.offset_of({x, y, 0})];
        e2[static_cast<std::size_t>(l)] += v * v;
      }
  } else {
    for (int x = -b; x <= b; ++x)
      for (int y = -b; y <= b; ++y) {
        const std::int64_t base = spec.offset_of({x, y, -b});
        const int lxy = std::abs(x) + std::abs(y);
        for (int z = -b; z <= b; ++z) {
          const int l = lxy + std::abs(z);
          if (l > l_max) continue;
          const double v = fp[base + (z + b)];
          e2[static_cast<std::size_t>(l)] += v * v;
        }
      }
  }
  ShellProfile profile;
  profile.values.resize(e2.size());
  for (std::size_t i = 0; i < e2.size(); ++i) profile.values[i] = std::sqrt(e2[i]);
  return profile;
}

ShellProfile averaged_profile(std::span<const ShellProfile> profiles) {
  if (profiles.empty()) throw AnalysisError("averaged_profile: empty input");
  const ShellProfile& first = profiles.front();
  ShellProfile avg;
  avg.n = first.n;
  avg.c = first.c;
  avg.seed = 0;
  avg.kind = first.kind;
  avg.values.assign(first.values.size(), 0.0);
  for (const ShellProfile& p : profiles) {
    if (p.values.size() != first.values.size() || p.n != first.n ||
        p.c != first.c || p.kind != first.kind)
      throw AnalysisError("averaged_profile: mismatched profiles");
    for (std::size_t i = 0; i < avg.values.size(); ++i) avg.values[i] += p.values[i];
  }
  const double inv = 1.0 / static_cast<double>(profiles.size());
  for (double& v : avg.values) v *= inv;
  return avg;
}

Field normalized_power_field(const Potential& pot, const Coord& source, int n,
                             TruncationPolicy policy) {
  if (n < 0) throw DomainError("normalized_power_field: n must be >= 0");
  Field f = delta_field(pot.spec(), source);
  Field work(pot.spec());
  for (int k = 0; k < n; ++k) {
    apply(pot, f, work, policy);
    const double nrm = norm(work);
    if (nrm == 0.0)
      throw AnalysisError("normalized_power_field: iterate vanished at step " +
                          std::to_string(k + 1));
    scale(1.0 / nrm, work);
    std::swap(f, work);
  }
  return f;
}

} // namespace anderson

#include "anderson/lattice.hpp"

#include <cmath>
#include <string>

namespace anderson {

LatticeSpec::LatticeSpec(int d, int M) : d_(d), M_(M), side_(2 * M + 1) {
  total_ = 1;
  for (int k = 0; k < d_; ++k) total_ *= side_;
  if (d_ == 3) {
    strides_[0] = static_cast<std::int64_t>(side_) * side_;
    strides_[1] = side_;
    strides_[2] = 1;
  } else {
    strides_[0] = side_;
    strides_[1] = 1;
    strides_[2] = 0;
  }
}

bool LatticeSpec::contains(const Coord& site) const {
  for (int k = 0; k < d_; ++k)
    if (site[k] < -M_ || site[k] > M_) return false;
  if (d_ == 2 && site[2] != 0) return false;
  return true;
}

std::int64_t LatticeSpec::offset_of(const Coord& site) const {
  std::int64_t off = 0;
  for (int k = 0; k < d_; ++k)
    off += strides_[k] * static_cast<std::int64_t>(site[k] + M_);
  return off;
}

Coord LatticeSpec::site_of(std::int64_t offset) const {
  Coord site{0, 0, 0};
  for (int k = d_ - 1; k >= 0; --k) {
    site[k] = static_cast<int>(offset % side_) - M_;
    offset /= side_;
  }
  return site;
}

LatticeSpec make_lattice(int d, int M, std::int64_t max_field_bytes) {
  if (d != 2 && d != 3)
    throw DomainError("lattice dimension must be 2 or 3, got " + std::to_string(d));
  if (M < 1) throw DomainError("lattice half-width must be >= 1, got " + std::to_string(M));
  std::int64_t total = 1;
  for (int k = 0; k < d; ++k) total *= 2 * static_cast<std::int64_t>(M) + 1;
  const std::int64_t bytes = total * static_cast<std::int64_t>(sizeof(double));
  if (bytes > max_field_bytes)
    throw SizingError("field for d=" + std::to_string(d) + " M=" + std::to_string(M) +
                      " requires " + std::to_string(bytes) + " bytes, budget is " +
                      std::to_string(max_field_bytes) + " bytes");
  return LatticeSpec(d, M);
}

Field delta_field(const LatticeSpec& spec, const Coord& site) {
  if (!spec.contains(site))
    throw DomainError("delta site (" + std::to_string(site[0]) + "," +
                      std::to_string(site[1]) + "," + std::to_string(site[2]) +
                      ") outside lattice with M=" + std::to_string(spec.M()));
  Field f(spec);
  f.data()[spec.offset_of(site)] = 1.0;
  f.set_active_radius(taxicab(site));
  return f;
}

namespace {

void require_same_spec(const Field& f, const Field& g, const char* op) {
  if (!(f.spec() == g.spec()))
    throw ContractError(std::string(op) + ": fields live on different lattices");
}

// Walks the box of half-extent b and hands each row [base, base + side) to fn.
template <typename RowFn>
void for_each_row(const LatticeSpec& spec, int b, RowFn&& fn) {
  const std::int64_t row_len = 2 * static_cast<std::int64_t>(b) + 1;
  if (spec.d() == 2) {
    for (int x = -b; x <= b; ++x) {
      const std::int64_t base = spec.offset_of({x, -b, 0});
      fn(base, row_len);
    }
  } else {
    for (int x = -b; x <= b; ++x)
      for (int y = -b; y <= b; ++y) {
        const std::int64_t base = spec.offset_of({x, y, -b});
        fn(base, row_len);
      }
  }
}

} // namespace

double inner(const Field& f, const Field& g) {
  require_same_spec(f, g, "inner");
  const int r = f.active_radius() < g.active_radius() ? f.active_radius()
                                                      : g.active_radius();
  const int b = detail::box_extent(f.spec(), r);
  const double* fp = f.data();
  const double* gp = g.data();
  double acc = 0.0;
  for_each_row(f.spec(), b, [&](std::int64_t base, std::int64_t len) {
    for (std::int64_t i = 0; i < len; ++i) acc += fp[base + i] * gp[base + i];
  });
  return acc;
}

double norm(const Field& f) {
  const int b = detail::box_extent(f.spec(), f.active_radius());
  const double* fp = f.data();
  double acc = 0.0;
  for_each_row(f.spec(), b, [&](std::int64_t base, std::int64_t len) {
    for (std::int64_t i = 0; i < len; ++i) acc += fp[base + i] * fp[base + i];
  });
  return std::sqrt(acc);
}

void axpy(double alpha, const Field& f, Field& g) {
  require_same_spec(f, g, "axpy");
  const int b = detail::box_extent(f.spec(), f.active_radius());
  const double* fp = f.data();
  double* gp = g.data();
  for_each_row(f.spec(), b, [&](std::int64_t base, std::int64_t len) {
    for (std::int64_t i = 0; i < len; ++i) gp[base + i] += alpha * fp[base + i];
  });
  if (f.active_radius() > g.active_radius()) g.set_active_radius(f.active_radius());
}

void scale(double alpha, Field& f) {
  const int b = detail::box_extent(f.spec(), f.active_radius());
  double* fp = f.data();
  for_each_row(f.spec(), b, [&](std::int64_t base, std::int64_t len) {
    for (std::int64_t i = 0; i < len; ++i) fp[base + i] *= alpha;
  });
}

double entry_at(const Field& f, const Coord& site) {
  if (!f.spec().contains(site))
    throw DomainError("entry_at: site outside lattice");
  return f.data()[f.spec().offset_of(site)];
}

std::vector<std::int64_t> shell_offsets(const LatticeSpec& spec, int l) {
  if (l < 0) throw DomainError("shell radius must be >= 0");
  std::vector<std::int64_t> out;
  if (l > spec.max_taxicab()) return out;
  const int M = spec.M();
  auto clamp = [M](int v) { return v > M ? M : v; };
  if (l == 0) {
    out.push_back(spec.offset_of({0, 0, 0}));
    return out;
  }
  if (spec.d() == 2) {
    for (int x = -clamp(l); x <= clamp(l); ++x) {
      const int rem = l - (x < 0 ? -x : x);
      if (rem > M) continue;
      if (rem == 0) {
        out.push_back(spec.offset_of({x, 0, 0}));
      } else {
        out.push_back(spec.offset_of({x, -rem, 0}));
        out.push_back(spec.offset_of({x, rem, 0}));
      }
    }
    return out;
  }
  for (int x = -clamp(l); x <= clamp(l); ++x) {
    const int remx = l - (x < 0 ? -x : x);
    for (int y = -clamp(remx); y <= clamp(remx); ++y) {
      const int rem = remx - (y < 0 ? -y : y);
      if (rem > M) continue;
      if (rem == 0) {
        out.push_back(spec.offset_of({x, y, 0}));
      } else {
        out.push_back(spec.offset_of({x, y, -rem}));
        out.push_back(spec.offset_of({x, y, rem}));
      }
    }
  }
  return out;
}

} // namespace anderson

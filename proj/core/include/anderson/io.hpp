#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "anderson/bulk.hpp"
#include "anderson/hamiltonian.hpp"
#include "anderson/lanczos.hpp"
#include "anderson/lattice.hpp"
#include "anderson/scaling.hpp"

namespace anderson {

/// Shortest text form of a double that round-trips exactly (17 significant
/// digits).
std::string format_g17(double v);

/// Distance series CSV: header `n,distance`, one row per step, full
/// precision so re-analysis reproduces in-run fits bit-for-bit.
void write_series_csv(const std::string& path, const DistanceSeries& series);
std::vector<double> read_series_values(const std::string& path);

/// JSON sidecar carrying the run metadata and the recorded tridiagonal
/// coefficients.
void write_series_sidecar(const std::string& path, const DistanceSeries& series);
DistanceSeries read_series(const std::string& csv_path); // csv + sidecar

/// Fit record: {c, seed, crop, a, slope, y, L, residual, usable,
/// concave_at_floor}.
void write_fit_json(const std::string& path, double c, std::uint64_t seed,
                    const RescaleFit& fit);
std::string fit_record_string(double c, std::uint64_t seed, const RescaleFit& fit);

/// Shell profile CSV: header `l,E`.
void write_profile_csv(const std::string& path, const ShellProfile& profile);

/// Field dump: 16-byte header (d, M as little-endian int32, 8 reserved
/// zero bytes) followed by the raw values in layout order (little-endian
/// IEEE 754 doubles).
void write_field_dump(const std::string& path, const Field& field);
Field read_field_dump(const std::string& path,
                      std::int64_t max_field_bytes = kDefaultFieldBudget);

/// Potential dump: same binary layout as a field (omega values; zeros when
/// c == 0) plus a JSON sidecar {c, seed, convention}.
void write_potential_dump(const std::string& bin_path,
                          const std::string& sidecar_path, const Potential& pot);
Potential read_potential_dump(const std::string& bin_path,
                              const std::string& sidecar_path,
                              std::int64_t max_field_bytes = kDefaultFieldBudget);

} // namespace anderson

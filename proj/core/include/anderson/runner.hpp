#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "anderson/io.hpp"
#include "anderson/scaling.hpp"

namespace anderson {

/// Full description of a sweep over disorder values and realizations.
struct ExperimentConfig {
  int d = 3;
  int n_max = 200;
  int M = 0;  // 0 -> n_max + 1
  std::vector<double> c_values;
  int realizations_per_c = 1;
  std::uint64_t master_seed = 1;
  int crop = -1;  // -1 -> 119 for n_max=500, else ~22% of n_max
  Mesh mesh;
  CriterionThresholds thresholds;
  Convention convention = Convention::Half;
  std::string output_dir;
  int worker_count = 0;  // 0 -> hardware concurrency
  double ram_budget_gb = 8.0;
  bool store_basis = false;  // also record the orthogonality diagnostic Q
  TruncationPolicy truncation = TruncationPolicy::Forbid;
  bool emit_svg = false;
  Coord source{0, 0, 0};
  Coord target{1, 1, 1};  // z dropped automatically when d == 2

  int resolved_M() const { return M > 0 ? M : n_max + 1; }
  int resolved_crop() const;
  Coord resolved_target() const;
  /// Bytes one probe keeps live: three field buffers, plus the disorder
  /// array when c != 0, plus the stored basis if requested.
  std::int64_t cell_footprint_bytes(double c) const;
};

/// Throws DomainError on an invalid configuration; never touches the disk.
void validate(const ExperimentConfig& config);

/// Outcome of one (c, realization) cell.
struct CellResult {
  int c_index = 0;
  int r_index = 0;
  double c = 0.0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  std::string dir;  // cell directory relative to output_dir
  DistanceSeries series;
  RescaleFit fit;
  std::optional<double> ortho_q;
  double wall_seconds = 0.0;
  std::int64_t peak_bytes_estimate = 0;
};

struct SweepOutcome {
  std::vector<CellResult> cells;  // ordered by (c_index, r_index)
  std::vector<CriterionVerdict> verdicts;
  int failed_cells = 0;
  std::string report_text;
};

/// Runs every (c, realization) cell on a worker pool, persists cell outputs
/// under output_dir/c=<value>/r=<index>/, writes the run manifest and the
/// report files. Results are keyed by indices, so output is byte-identical
/// for any worker count. A failing cell is recorded in the manifest and does
/// not abort the sweep.
SweepOutcome run_sweep(const ExperimentConfig& config, std::ostream* log = nullptr);

/// Re-analysis of persisted series files without recomputation.
struct AnalyzeItem {
  std::string file;
  bool ok = false;
  std::string error;
  double c = 0.0;
  std::uint64_t seed = 0;
  RescaleFit fit;
};

struct AnalyzeOutcome {
  std::vector<AnalyzeItem> items;
  int failures = 0;
};

/// Fits every series file with the given crop and mesh. When
/// write_refit_json is set, a fit record is written as refit.json next to
/// each input. Schema violations are reported per file.
AnalyzeOutcome analyze_series_files(const std::vector<std::string>& files,
                                    int crop, const Mesh& mesh,
                                    bool write_refit_json);

struct ReportFiles {
  std::string minima_csv;    // columns: c,P,y,L
  std::string averages_csv;  // columns: c,a_tilde,y_tilde,L_tilde
  std::string verdicts_csv;
  std::string text;          // formatted tables with the criterion footnote
  std::vector<CriterionVerdict> verdicts;
};

/// Rebuilds the report from a results directory (requires the manifest
/// written by run_sweep). Reads persisted series and fit records only, so a
/// regenerated report matches the in-run one byte for byte.
ReportFiles generate_report(const std::string& results_dir);

} // namespace anderson

#include "anderson/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "anderson/rng.hpp"
#include "anderson/svg.hpp"
#include "json_util.hpp"

namespace anderson {

namespace fs = std::filesystem;
using detail::coord_from_json;
using detail::coord_json;
using detail::fit_from_json;
using detail::fit_record_json;
using detail::read_json_file;
using detail::write_json_file;
using ordered_json = nlohmann::ordered_json;

int ExperimentConfig::resolved_crop() const {
  if (crop >= 0) return crop;
  if (n_max == 500) return 119;
  return std::max(1, static_cast<int>(std::lround(0.22 * n_max)));
}

Coord ExperimentConfig::resolved_target() const {
  Coord t = target;
  if (d == 2) t[2] = 0;
  return t;
}

std::int64_t ExperimentConfig::cell_footprint_bytes(double c) const {
  std::int64_t total = 1;
  for (int k = 0; k < d; ++k) total *= 2 * static_cast<std::int64_t>(resolved_M()) + 1;
  const std::int64_t field = total * static_cast<std::int64_t>(sizeof(double));
  std::int64_t n_buffers = 3 + (c != 0.0 ? 1 : 0);
  std::int64_t bytes = n_buffers * field;
  if (store_basis) bytes += field * (static_cast<std::int64_t>(n_max) + 1);
  return bytes;
}

namespace {

std::string format_c(double c) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", c);
  return buf;
}

std::string cell_dir_name(double c, int r_index) {
  return "c=" + format_c(c) + "/r=" + std::to_string(r_index);
}

} // namespace

void validate(const ExperimentConfig& config) {
  if (config.d != 2 && config.d != 3)
    throw DomainError("config: d must be 2 or 3");
  if (config.n_max < 4)
    throw DomainError("config: n_max must be at least 4");
  if (config.c_values.empty())
    throw DomainError("config: c_values must not be empty");
  for (double c : config.c_values)
    if (c < 0.0) throw DomainError("config: disorder strengths must be >= 0");
  std::set<std::string> names;
  for (double c : config.c_values)
    if (!names.insert(format_c(c)).second)
      throw DomainError("config: duplicate disorder value " + format_c(c));
  if (config.realizations_per_c < 1)
    throw DomainError("config: realizations_per_c must be >= 1");
  const int crop = config.resolved_crop();
  if (crop < 0 || config.n_max - std::max(crop, 1) + 1 < 3)
    throw DomainError("config: crop " + std::to_string(crop) +
                      " leaves fewer than 3 points below n_max " +
                      std::to_string(config.n_max));
  config.mesh.values(); // throws on a bad mesh
  if (config.thresholds.l_min <= 0 || config.thresholds.gap <= 0 ||
      config.thresholds.fraction <= 0 || config.thresholds.fraction > 1)
    throw DomainError("config: criterion thresholds must be positive (fraction <= 1)");
  if (config.output_dir.empty())
    throw DomainError("config: output_dir must be set");
  if (config.ram_budget_gb <= 0)
    throw DomainError("config: ram_budget_gb must be positive");
  if (config.worker_count < 0)
    throw DomainError("config: worker_count must be >= 0");

  const LatticeSpec spec(config.d, config.resolved_M());
  const Coord target = config.resolved_target();
  if (!spec.contains(config.source) || !spec.contains(target))
    throw DomainError("config: source or target outside the lattice");
  if (config.source == target)
    throw DomainError("config: source and target must differ");
  if (config.truncation == TruncationPolicy::Forbid &&
      config.resolved_M() < config.n_max + taxicab(config.source))
    throw DomainError("config: truncation-free run needs M >= n_max + |source|_1 = " +
                      std::to_string(config.n_max + taxicab(config.source)) +
                      "; got M = " + std::to_string(config.resolved_M()) +
                      " (enlarge M or set truncation=allow)");

  const std::int64_t field_bytes = spec.total_sites() * 8;
  const auto budget = static_cast<std::int64_t>(config.ram_budget_gb * (1 << 30));
  if (field_bytes * 3 > budget)
    throw SizingError("config: one probe needs " + std::to_string(field_bytes * 3) +
                      " bytes for its three field buffers, RAM budget is " +
                      std::to_string(budget) + " bytes");
}

namespace {

ordered_json config_json(const ExperimentConfig& config) {
  ordered_json j;
  j["d"] = config.d;
  j["n_max"] = config.n_max;
  j["M"] = config.resolved_M();
  j["c_values"] = config.c_values;
  j["realizations_per_c"] = config.realizations_per_c;
  j["master_seed"] = config.master_seed;
  j["crop"] = config.resolved_crop();
  j["mesh"] = {{"min", config.mesh.min}, {"step", config.mesh.step}, {"max", config.mesh.max}};
  j["thresholds"] = {{"l_min", config.thresholds.l_min},
                     {"gap", config.thresholds.gap},
                     {"fraction", config.thresholds.fraction}};
  j["convention"] = to_string(config.convention);
  j["worker_count"] = config.worker_count;
  j["ram_budget_gb"] = config.ram_budget_gb;
  j["store_basis"] = config.store_basis;
  j["truncation"] = config.truncation == TruncationPolicy::Allow ? "allow" : "forbid";
  j["emit_svg"] = config.emit_svg;
  j["source"] = coord_json(config.source);
  j["target"] = coord_json(config.resolved_target());
  return j;
}

void run_cell(const ExperimentConfig& config, CellResult& cell) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = fs::path(config.output_dir) / cell.dir;
  fs::create_directories(dir);

  const LatticeSpec spec = make_lattice(config.d, config.resolved_M());
  const Potential pot =
      sample_potential(spec, cell.c, cell.seed, config.convention);
  ProbeOptions opts;
  opts.truncation = config.truncation;

  if (config.store_basis) {
    const auto budget = static_cast<std::int64_t>(config.ram_budget_gb * (1 << 30));
    auto [series, basis] = probe_with_basis(pot, config.source,
                                            config.resolved_target(),
                                            config.n_max, opts, budget);
    cell.series = std::move(series);
    cell.ortho_q = ortho_diagnostic(basis);
  } else {
    cell.series = probe(pot, config.source, config.resolved_target(),
                        config.n_max, opts);
  }

  write_series_csv((dir / "series.csv").string(), cell.series);
  write_series_sidecar((dir / "series.json").string(), cell.series);

  cell.fit = optimal_a(cell.series, config.resolved_crop(), config.mesh);
  cell.peak_bytes_estimate = config.cell_footprint_bytes(cell.c);
  cell.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  ordered_json j;
  j["c"] = cell.c;
  j["c_index"] = cell.c_index;
  j["r_index"] = cell.r_index;
  j["seed"] = cell.seed;
  j["d"] = config.d;
  j["M"] = config.resolved_M();
  j["n_max"] = config.n_max;
  j["convention"] = to_string(config.convention);
  j["source"] = coord_json(config.source);
  j["target"] = coord_json(config.resolved_target());
  j["series_csv"] = "series.csv";
  j["truncation_flag"] = cell.series.truncation_flag;
  if (cell.series.breakdown_step)
    j["breakdown_step"] = *cell.series.breakdown_step;
  else
    j["breakdown_step"] = nullptr;
  if (cell.ortho_q) j["ortho_q"] = *cell.ortho_q;
  j["fit"] = fit_record_json(cell.c, cell.seed, cell.fit);
  j["timing"] = {{"wall_seconds", cell.wall_seconds},
                 {"peak_bytes_estimate", cell.peak_bytes_estimate}};
  write_json_file((dir / "result.json").string(), j);
}

} // namespace

SweepOutcome run_sweep(const ExperimentConfig& config, std::ostream* log) {
  validate(config);
  fs::create_directories(config.output_dir);

  SweepOutcome outcome;
  for (int ci = 0; ci < static_cast<int>(config.c_values.size()); ++ci)
    for (int ri = 0; ri < config.realizations_per_c; ++ri) {
      CellResult cell;
      cell.c_index = ci;
      cell.r_index = ri;
      cell.c = config.c_values[static_cast<std::size_t>(ci)];
      cell.seed = cell_seed(config.master_seed, ci, ri);
      cell.dir = cell_dir_name(cell.c, ri);
      outcome.cells.push_back(std::move(cell));
    }

  // Memory governor: cap concurrency so that simultaneous probes fit the
  // configured RAM budget.
  std::int64_t worst_footprint = 0;
  for (double c : config.c_values)
    worst_footprint = std::max(worst_footprint, config.cell_footprint_bytes(c));
  const auto budget = static_cast<std::int64_t>(config.ram_budget_gb * (1 << 30));
  const int by_memory =
      static_cast<int>(std::max<std::int64_t>(1, budget / std::max<std::int64_t>(1, worst_footprint)));
  int workers = config.worker_count > 0
                    ? config.worker_count
                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min({workers, by_memory, static_cast<int>(outcome.cells.size())});

  std::mutex log_mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= outcome.cells.size()) return;
      CellResult& cell = outcome.cells[i];
      try {
        run_cell(config, cell);
        if (log) {
          std::lock_guard<std::mutex> lock(log_mutex);
          *log << "[" << cell.dir << "] done in " << std::fixed
               << std::setprecision(2) << cell.wall_seconds
               << "s  D_end=" << cell.series.values.back()
               << (cell.series.truncation_flag ? "  (truncated)" : "") << "\n";
        }
      } catch (const std::exception& e) {
        cell.failed = true;
        cell.error = e.what();
        if (log) {
          std::lock_guard<std::mutex> lock(log_mutex);
          *log << "[" << cell.dir << "] FAILED: " << cell.error << "\n";
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  for (const CellResult& cell : outcome.cells)
    if (cell.failed) ++outcome.failed_cells;

  ordered_json manifest;
  manifest["config"] = config_json(config);
  ordered_json cells_json = ordered_json::array();
  for (const CellResult& cell : outcome.cells) {
    ordered_json cj;
    cj["c_index"] = cell.c_index;
    cj["r_index"] = cell.r_index;
    cj["c"] = cell.c;
    cj["seed"] = cell.seed;
    cj["status"] = cell.failed ? "failed" : "done";
    cj["dir"] = cell.dir;
    if (cell.failed) cj["error"] = cell.error;
    cells_json.push_back(std::move(cj));
  }
  manifest["cells"] = std::move(cells_json);
  write_json_file((fs::path(config.output_dir) / "manifest.json").string(), manifest);

  // Averaged distance curves are part of the plot data the sweep always emits.
  for (int ci = 0; ci < static_cast<int>(config.c_values.size()); ++ci) {
    std::vector<DistanceSeries> group;
    for (const CellResult& cell : outcome.cells)
      if (cell.c_index == ci && !cell.failed) group.push_back(cell.series);
    if (group.empty()) continue;
    const DistanceSeries avg = average_series(group);
    const fs::path cdir = fs::path(config.output_dir) /
                          ("c=" + format_c(config.c_values[static_cast<std::size_t>(ci)]));
    write_series_csv((cdir / "averaged_series.csv").string(), avg);
  }

  ReportFiles report = generate_report(config.output_dir);
  outcome.verdicts = std::move(report.verdicts);
  outcome.report_text = std::move(report.text);

  if (config.emit_svg) {
    std::vector<ChartSeries> curves;
    for (int ci = 0; ci < static_cast<int>(config.c_values.size()); ++ci) {
      std::vector<DistanceSeries> group;
      for (const CellResult& cell : outcome.cells)
        if (cell.c_index == ci && !cell.failed) group.push_back(cell.series);
      if (group.empty()) continue;
      const DistanceSeries avg = average_series(group);
      ChartSeries cs;
      cs.label = "c=" + format_c(avg.c);
      for (std::size_t n = 0; n < avg.values.size(); ++n) {
        cs.x.push_back(static_cast<double>(n));
        cs.y.push_back(avg.values[n]);
      }
      curves.push_back(std::move(cs));
    }
    if (!curves.empty()) {
      const fs::path plots = fs::path(config.output_dir) / "plots";
      fs::create_directories(plots);
      ChartOptions copts;
      copts.title = "Averaged Krylov distance";
      copts.x_label = "n";
      copts.y_label = "D^n";
      write_line_chart_svg((plots / "distance_averaged.svg").string(), curves, copts);
    }
  }

  return outcome;
}

AnalyzeOutcome analyze_series_files(const std::vector<std::string>& files,
                                    int crop, const Mesh& mesh,
                                    bool write_refit_json) {
  AnalyzeOutcome outcome;
  for (const std::string& file : files) {
    AnalyzeItem item;
    item.file = file;
    try {
      const DistanceSeries series = read_series(file);
      item.c = series.c;
      item.seed = series.seed;
      item.fit = optimal_a(series, crop, mesh);
      item.ok = true;
      if (write_refit_json) {
        fs::path p(file);
        const std::string stem = p.stem().string();
        const fs::path refit = p.parent_path() / (stem + ".refit.json");
        write_fit_json(refit.string(), item.c, item.seed, item.fit);
      }
    } catch (const std::exception& e) {
      item.ok = false;
      item.error = e.what();
      ++outcome.failures;
    }
    outcome.items.push_back(std::move(item));
  }
  return outcome;
}

namespace {

struct CGroup {
  double c = 0.0;
  std::vector<FitSummary> summaries;
  int done = 0;
  bool have_average = false;
  RescaleFit average_fit;
};

std::string na_or(double v, bool have) { return have ? format_g17(v) : "N/A"; }

} // namespace

ReportFiles generate_report(const std::string& results_dir) {
  const fs::path root(results_dir);
  if (!fs::exists(root / "manifest.json"))
    throw SchemaError("no manifest.json under '" + results_dir +
                      "'; run a sweep first");
  const ordered_json manifest = read_json_file((root / "manifest.json").string());
  const ordered_json& cfg = manifest.at("config");
  const auto c_values = cfg.at("c_values").get<std::vector<double>>();
  const int crop = cfg.at("crop").get<int>();
  Mesh mesh;
  mesh.min = cfg.at("mesh").at("min").get<double>();
  mesh.step = cfg.at("mesh").at("step").get<double>();
  mesh.max = cfg.at("mesh").at("max").get<double>();
  CriterionThresholds thresholds;
  thresholds.l_min = cfg.at("thresholds").at("l_min").get<double>();
  thresholds.gap = cfg.at("thresholds").at("gap").get<double>();
  thresholds.fraction = cfg.at("thresholds").at("fraction").get<double>();

  std::vector<CGroup> groups(c_values.size());
  for (std::size_t ci = 0; ci < c_values.size(); ++ci) groups[ci].c = c_values[ci];

  std::vector<std::vector<std::vector<double>>> series_per_c(c_values.size());
  int total_done = 0;
  for (const ordered_json& cj : manifest.at("cells")) {
    if (cj.at("status").get<std::string>() != "done") continue;
    const auto ci = cj.at("c_index").get<std::size_t>();
    const fs::path dir = root / cj.at("dir").get<std::string>();
    const ordered_json rj = read_json_file((dir / "result.json").string());
    const RescaleFit fit = fit_from_json(rj.at("fit"));
    groups[ci].summaries.push_back({fit.usable, fit.y, fit.L});
    ++groups[ci].done;
    series_per_c[ci].push_back(
        read_series_values((dir / rj.at("series_csv").get<std::string>()).string()));
    ++total_done;
  }
  if (total_done == 0)
    throw AnalysisError("no completed cells under '" + results_dir + "'");

  for (std::size_t ci = 0; ci < groups.size(); ++ci) {
    if (series_per_c[ci].empty()) continue;
    const std::size_t len = series_per_c[ci].front().size();
    std::vector<double> avg(len, 0.0);
    bool consistent = true;
    for (const auto& vals : series_per_c[ci]) {
      if (vals.size() != len) {
        consistent = false;
        break;
      }
      for (std::size_t i = 0; i < len; ++i) avg[i] += vals[i];
    }
    if (!consistent) continue;
    for (double& v : avg) v /= static_cast<double>(series_per_c[ci].size());
    groups[ci].average_fit = optimal_a(std::span<const double>(avg), crop, mesh);
    groups[ci].have_average = true;
  }

  ReportFiles out;
  std::vector<CriterionVerdict>& verdicts = out.verdicts;
  for (const CGroup& g : groups) {
    if (g.summaries.empty()) continue;
    verdicts.push_back(evaluate_criterion(g.summaries, g.c, thresholds));
  }

  // ---- CSV tables ----
  std::ostringstream minima;
  minima << "c,P,y,L\n";
  for (const CGroup& g : groups) {
    if (g.summaries.empty()) {
      minima << format_c(g.c) << ",N/A,N/A,N/A\n";
      continue;
    }
    const CriterionVerdict v = evaluate_criterion(g.summaries, g.c, thresholds);
    minima << format_c(g.c) << ',' << v.fraction_usable << ','
           << na_or(v.min_y, v.has_minima) << ',' << na_or(v.min_L, v.has_minima)
           << '\n';
  }

  std::ostringstream averages;
  averages << "c,a_tilde,y_tilde,L_tilde\n";
  for (const CGroup& g : groups) {
    if (!g.have_average) {
      averages << format_c(g.c) << ",N/A,N/A,N/A\n";
      continue;
    }
    averages << format_c(g.c) << ','
             << (g.average_fit.usable ? format_c(g.average_fit.a) : "N/A") << ','
             << format_g17(g.average_fit.y) << ',' << format_g17(g.average_fit.L)
             << '\n';
  }

  std::ostringstream verdict_csv;
  verdict_csv << "c,n_realizations,fraction_usable,fraction_passing,min_y,min_L,"
                 "delocalized\n";
  for (const CriterionVerdict& v : verdicts) {
    verdict_csv << format_c(v.c) << ',' << v.n_realizations << ','
                << v.fraction_usable << ',' << v.fraction_passing << ','
                << na_or(v.min_y, v.has_minima) << ','
                << na_or(v.min_L, v.has_minima) << ','
                << (v.delocalized ? "true" : "false") << '\n';
  }

  // ---- formatted text ----
  std::ostringstream text;
  text << "Ensemble minima (per disorder value)\n";
  text << std::left << std::setw(10) << "c" << std::setw(10) << "P"
       << std::setw(14) << "y" << std::setw(14) << "L" << "\n";
  for (const CGroup& g : groups) {
    text << std::setw(10) << format_c(g.c);
    if (g.summaries.empty()) {
      text << std::setw(10) << "N/A" << std::setw(14) << "N/A" << std::setw(14)
           << "N/A" << "\n";
      continue;
    }
    const CriterionVerdict v = evaluate_criterion(g.summaries, g.c, thresholds);
    std::ostringstream p;
    p << std::setprecision(3) << v.fraction_usable;
    text << std::setw(10) << p.str();
    if (v.has_minima) {
      text << std::setw(14) << std::setprecision(7) << v.min_y << std::setw(14)
           << std::setprecision(7) << v.min_L;
    } else {
      text << std::setw(14) << "N/A" << std::setw(14) << "N/A";
    }
    text << "\n";
  }
  text << "\nAveraged-series fits\n";
  text << std::left << std::setw(10) << "c" << std::setw(10) << "a~"
       << std::setw(14) << "y~" << std::setw(14) << "L~" << "\n";
  for (const CGroup& g : groups) {
    text << std::setw(10) << format_c(g.c);
    if (!g.have_average) {
      text << std::setw(10) << "N/A" << std::setw(14) << "N/A" << std::setw(14)
           << "N/A" << "\n";
      continue;
    }
    text << std::setw(10) << (g.average_fit.usable ? format_c(g.average_fit.a) : "N/A")
         << std::setw(14) << std::setprecision(7) << g.average_fit.y
         << std::setw(14) << std::setprecision(7) << g.average_fit.L << "\n";
  }
  text << "\nDelocalization criterion: a disorder value passes when at least "
       << thresholds.fraction * 100 << "% of its realizations have a usable "
       << "rescaling exponent, L > " << thresholds.l_min << ", and y - L <= "
       << thresholds.gap << ".\n";
  text << std::left << std::setw(10) << "c" << std::setw(8) << "n"
       << std::setw(10) << "usable" << std::setw(10) << "passing"
       << std::setw(12) << "verdict" << "\n";
  for (const CriterionVerdict& v : verdicts) {
    std::ostringstream fu, fp;
    fu << std::setprecision(3) << v.fraction_usable;
    fp << std::setprecision(3) << v.fraction_passing;
    text << std::setw(10) << format_c(v.c) << std::setw(8) << v.n_realizations
         << std::setw(10) << fu.str() << std::setw(10) << fp.str()
         << std::setw(12) << (v.delocalized ? "delocalized" : "no verdict") << "\n";
  }
  text << "\nNote: the criterion is one-sided. A row without a verdict (or a\n"
          "distance limit that tends to zero) does not establish localization;\n"
          "no conclusion follows in that direction.\n";

  // ---- write files ----
  out.minima_csv = (root / "report.csv").string();
  out.averages_csv = (root / "report_averages.csv").string();
  out.verdicts_csv = (root / "report_verdicts.csv").string();
  out.text = text.str();
  {
    std::ofstream f(out.minima_csv);
    f << minima.str();
    if (!f) throw SchemaError("cannot write '" + out.minima_csv + "'");
  }
  {
    std::ofstream f(out.averages_csv);
    f << averages.str();
    if (!f) throw SchemaError("cannot write '" + out.averages_csv + "'");
  }
  {
    std::ofstream f(out.verdicts_csv);
    f << verdict_csv.str();
    if (!f) throw SchemaError("cannot write '" + out.verdicts_csv + "'");
  }
  {
    std::ofstream f((root / "report.txt").string());
    f << out.text;
    if (!f) throw SchemaError("cannot write report.txt");
  }
  return out;
}

} // namespace anderson

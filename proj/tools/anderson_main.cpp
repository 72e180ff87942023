// anderson — matrix-free Lanczos probe of delocalization for the discrete
// random Schrodinger operator on {-M..M}^d.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "anderson/bulk.hpp"
#include "anderson/io.hpp"
#include "anderson/reference.hpp"
#include "anderson/rng.hpp"
#include "anderson/runner.hpp"
#include "anderson/svg.hpp"

namespace fs = std::filesystem;
using namespace anderson;

namespace {

Coord to_coord(const std::vector<int>& v, int d, const char* what) {
  if (static_cast<int>(v.size()) != d)
    throw DomainError(std::string(what) + " needs exactly " + std::to_string(d) +
                      " components");
  Coord c{0, 0, 0};
  for (int k = 0; k < d; ++k) c[k] = v[static_cast<std::size_t>(k)];
  return c;
}

// ---- key=value config files (mirror of ExperimentConfig) ----

std::map<std::string, std::string> load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DomainError(path + ":" + std::to_string(lineno) +
                        ": expected key=value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  return out;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw DomainError("expected a boolean, got '" + s + "'");
}

// Applies config-file values for every key the command line left untouched.
void merge_config_file(const std::string& path, const CLI::App* cmd,
                       ExperimentConfig& cfg, std::string& convention,
                       std::string& truncation, std::vector<int>& source,
                       std::vector<int>& target) {
  const auto kv = load_config_file(path);
  std::set<std::string> known;
  auto take = [&](const char* key, const char* flag, auto&& apply) {
    known.insert(key);
    const auto it = kv.find(key);
    if (it == kv.end()) return;
    if (cmd->count(flag) > 0) return; // explicit flags win
    apply(it->second);
  };
  take("d", "--d", [&](const std::string& v) { cfg.d = std::stoi(v); });
  take("n-max", "--n-max", [&](const std::string& v) { cfg.n_max = std::stoi(v); });
  take("M", "--M", [&](const std::string& v) { cfg.M = std::stoi(v); });
  take("c-values", "--c-values",
       [&](const std::string& v) { cfg.c_values = parse_double_list(v); });
  take("realizations", "--realizations",
       [&](const std::string& v) { cfg.realizations_per_c = std::stoi(v); });
  take("master-seed", "--master-seed",
       [&](const std::string& v) { cfg.master_seed = std::stoull(v); });
  take("crop", "--crop", [&](const std::string& v) { cfg.crop = std::stoi(v); });
  take("mesh-min", "--mesh-min",
       [&](const std::string& v) { cfg.mesh.min = std::stod(v); });
  take("mesh-step", "--mesh-step",
       [&](const std::string& v) { cfg.mesh.step = std::stod(v); });
  take("mesh-max", "--mesh-max",
       [&](const std::string& v) { cfg.mesh.max = std::stod(v); });
  take("l-threshold", "--l-threshold",
       [&](const std::string& v) { cfg.thresholds.l_min = std::stod(v); });
  take("gap-threshold", "--gap-threshold",
       [&](const std::string& v) { cfg.thresholds.gap = std::stod(v); });
  take("pass-fraction", "--pass-fraction",
       [&](const std::string& v) { cfg.thresholds.fraction = std::stod(v); });
  take("convention", "--convention",
       [&](const std::string& v) { convention = v; });
  take("output-dir", "--output-dir",
       [&](const std::string& v) { cfg.output_dir = v; });
  take("workers", "--workers",
       [&](const std::string& v) { cfg.worker_count = std::stoi(v); });
  take("ram-budget-gb", "--ram-budget-gb",
       [&](const std::string& v) { cfg.ram_budget_gb = std::stod(v); });
  take("store-basis", "--store-basis",
       [&](const std::string& v) { cfg.store_basis = parse_bool(v); });
  take("truncation", "--truncation",
       [&](const std::string& v) { truncation = v; });
  take("svg", "--svg", [&](const std::string& v) { cfg.emit_svg = parse_bool(v); });
  take("source", "--source",
       [&](const std::string& v) { source = parse_int_list(v); });
  take("target", "--target",
       [&](const std::string& v) { target = parse_int_list(v); });
  for (const auto& [key, value] : kv)
    if (!known.count(key))
      throw DomainError("unknown config key '" + key + "' in " + path);
}

std::string format_c_value(double c) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", c);
  return buf;
}

int cmd_probe(int d, int n_max, int M, double c, std::uint64_t seed,
              const std::string& convention, const std::vector<int>& source_v,
              const std::vector<int>& target_v, bool allow_truncation,
              bool dump_potential, const std::string& out) {
  const int m = M > 0 ? M : n_max + 1;
  const LatticeSpec spec = make_lattice(d, m);
  const Coord source = source_v.empty() ? Coord{0, 0, 0}
                                        : to_coord(source_v, d, "--source");
  Coord target{1, 1, d == 3 ? 1 : 0};
  if (!target_v.empty()) target = to_coord(target_v, d, "--target");

  const Potential pot =
      sample_potential(spec, c, seed, convention_from_string(convention));
  ProbeOptions opts;
  opts.truncation =
      allow_truncation ? TruncationPolicy::Allow : TruncationPolicy::Forbid;
  const DistanceSeries series = probe(pot, source, target, n_max, opts);

  fs::create_directories(out);
  write_series_csv((fs::path(out) / "series.csv").string(), series);
  write_series_sidecar((fs::path(out) / "series.json").string(), series);
  if (dump_potential)
    write_potential_dump((fs::path(out) / "potential.bin").string(),
                         (fs::path(out) / "potential.json").string(), pot);

  std::cout << "probe d=" << d << " M=" << m << " c=" << format_c_value(c)
            << " seed=" << seed << " n_max=" << n_max << "\n"
            << "  D^0 = " << format_g17(series.values.front()) << "\n"
            << "  D^" << n_max << " = " << format_g17(series.values.back()) << "\n"
            << "  truncated: " << (series.truncation_flag ? "yes" : "no") << "\n";
  if (series.breakdown_step)
    std::cout << "  breakdown at step " << *series.breakdown_step << "\n";
  std::cout << "  wrote " << (fs::path(out) / "series.csv").string() << "\n";
  return 0;
}

int cmd_analyze(const std::vector<std::string>& files, int crop, const Mesh& mesh,
                bool to_stdout) {
  const AnalyzeOutcome outcome =
      analyze_series_files(files, crop, mesh, /*write_refit_json=*/!to_stdout);
  for (const AnalyzeItem& item : outcome.items) {
    if (!item.ok) {
      std::cerr << "error: " << item.file << ": " << item.error << "\n";
      continue;
    }
    if (to_stdout)
      std::cout << fit_record_string(item.c, item.seed, item.fit) << "\n";
    else
      std::cout << item.file << ": a=" << item.fit.a << " y="
                << format_g17(item.fit.y) << " L=" << format_g17(item.fit.L)
                << (item.fit.usable ? "" : "  [unusable]") << "\n";
  }
  return outcome.failures == 0 ? 0 : 1;
}

int cmd_bulk(int d, int n_max, int M, const std::vector<double>& c_values,
             int realizations, std::uint64_t master_seed,
             std::vector<int> at_steps, const std::string& kind_str,
             const std::string& convention, bool allow_truncation, bool svg,
             const std::string& out) {
  const int m = M > 0 ? M : n_max + 1;
  const LatticeSpec spec = make_lattice(d, m);
  const ProfileKind kind = profile_kind_from_string(kind_str);
  const Convention conv = convention_from_string(convention);
  if (at_steps.empty()) at_steps.push_back(n_max);
  std::set<int> wanted(at_steps.begin(), at_steps.end());
  for (int n : wanted)
    if (n < 0 || n > n_max) throw DomainError("--at step outside [0, n_max]");
  const TruncationPolicy policy =
      allow_truncation ? TruncationPolicy::Allow : TruncationPolicy::Forbid;

  const Coord source{0, 0, 0};
  const Coord target{1, 1, d == 3 ? 1 : 0};

  // profiles[n][c_index] -> averaged curve, built incrementally
  std::vector<std::vector<ShellProfile>> per_cell(c_values.size() * wanted.size());

  for (std::size_t ci = 0; ci < c_values.size(); ++ci) {
    const double c = c_values[ci];
    const fs::path cdir = fs::path(out) / ("c=" + format_c_value(c));
    fs::create_directories(cdir);
    for (int ri = 0; ri < realizations; ++ri) {
      const std::uint64_t seed = cell_seed(master_seed, static_cast<int>(ci), ri);
      const Potential pot = sample_potential(spec, c, seed, conv);
      std::vector<ShellProfile> profiles;
      if (kind == ProfileKind::LanczosBasisVector) {
        ProbeOptions opts;
        opts.truncation = policy;
        opts.observer = [&](int n, const Field& v) {
          if (!wanted.count(n)) return;
          ShellProfile p = shell_profile(v);
          p.n = n;
          p.c = c;
          p.seed = seed;
          p.kind = kind;
          profiles.push_back(std::move(p));
        };
        probe(pot, source, target, n_max, opts);
      } else {
        for (int n : wanted) {
          const Field f = normalized_power_field(pot, source, n, policy);
          ShellProfile p = shell_profile(f);
          p.n = n;
          p.c = c;
          p.seed = seed;
          p.kind = kind;
          profiles.push_back(std::move(p));
        }
      }
      for (const ShellProfile& p : profiles) {
        const std::string name =
            "profile_n" + std::to_string(p.n) + "_r" + std::to_string(ri) + ".csv";
        write_profile_csv((cdir / name).string(), p);
        std::size_t slot = 0;
        for (int n : wanted) {
          if (n == p.n) break;
          ++slot;
        }
        per_cell[ci * wanted.size() + slot].push_back(p);
      }
    }
  }

  // averaged profile per (c, n) + optional chart per n
  std::size_t slot = 0;
  for (int n : wanted) {
    std::vector<ChartSeries> chart;
    for (std::size_t ci = 0; ci < c_values.size(); ++ci) {
      const auto& group = per_cell[ci * wanted.size() + slot];
      if (group.empty()) continue;
      const ShellProfile avg = averaged_profile(group);
      const fs::path cdir = fs::path(out) / ("c=" + format_c_value(c_values[ci]));
      write_profile_csv(
          (cdir / ("profile_n" + std::to_string(n) + "_avg.csv")).string(), avg);
      if (svg) {
        ChartSeries cs;
        cs.label = "c=" + format_c_value(c_values[ci]);
        for (std::size_t l = 0; l < avg.values.size(); ++l) {
          cs.x.push_back(static_cast<double>(l));
          cs.y.push_back(avg.values[l]);
        }
        chart.push_back(std::move(cs));
      }
    }
    if (svg && !chart.empty()) {
      fs::create_directories(fs::path(out) / "plots");
      ChartOptions copts;
      copts.title = "Shell profile at n=" + std::to_string(n);
      copts.x_label = "taxicab shell l";
      copts.y_label = "E(l)";
      write_line_chart_svg(
          (fs::path(out) / "plots" / ("bulk_n" + std::to_string(n) + ".svg"))
              .string(),
          chart, copts);
    }
    ++slot;
  }
  std::cout << "bulk profiles written under " << out << "\n";
  return 0;
}

int cmd_ortho(int d, int M, int n_max, const std::vector<double>& c_values,
              std::uint64_t master_seed, const std::string& convention,
              double budget_gb, const std::string& out) {
  const LatticeSpec spec = make_lattice(d, M);
  const Convention conv = convention_from_string(convention);
  const Coord source{0, 0, 0};
  const Coord target{1, 1, d == 3 ? 1 : 0};
  ProbeOptions opts;
  opts.truncation = TruncationPolicy::Allow;
  const auto budget =
      static_cast<std::int64_t>(budget_gb * static_cast<double>(1 << 30));

  std::vector<std::pair<double, double>> rows;
  for (std::size_t ci = 0; ci < c_values.size(); ++ci) {
    const double c = c_values[ci];
    const std::uint64_t seed = cell_seed(master_seed, static_cast<int>(ci), 0);
    const Potential pot = sample_potential(spec, c, seed, conv);
    auto [series, basis] =
        probe_with_basis(pot, source, target, n_max, opts, budget);
    const double q = ortho_diagnostic(basis);
    rows.emplace_back(c, q);
    std::cout << "c=" << format_c_value(c) << "  Q=" << format_g17(q)
              << "  (seed " << seed << ", " << basis.columns.size()
              << " vectors)\n";
  }
  if (!out.empty()) {
    fs::create_directories(out);
    std::ofstream f(fs::path(out) / "ortho.csv");
    f << "c,Q\n";
    for (const auto& [c, q] : rows)
      f << format_c_value(c) << ',' << format_g17(q) << '\n';
    std::cout << "wrote " << (fs::path(out) / "ortho.csv").string() << "\n";
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "anderson: streaming Lanczos distance probe for the discrete random "
      "Schrodinger operator (delocalization experiments)"};
  app.require_subcommand(1);
  int rc = 0;

  // ---- probe ----
  auto* probe_cmd =
      app.add_subcommand("probe", "Run one disorder realization and persist "
                                  "the distance series");
  struct {
    int d = 3, n_max = 200, M = 0;
    double c = 0.0;
    std::uint64_t seed = 1;
    std::string convention = "half", out;
    std::vector<int> source, target;
    bool allow_truncation = false, dump_potential = false;
  } p;
  probe_cmd->add_option("--d", p.d, "lattice dimension")->check(CLI::IsMember({2, 3}));
  probe_cmd->add_option("--n-max", p.n_max, "number of Krylov steps");
  probe_cmd->add_option("--M", p.M, "half-width (default n_max + 1)");
  probe_cmd->add_option("--c", p.c, "disorder strength");
  probe_cmd->add_option("--seed", p.seed, "realization seed");
  probe_cmd->add_option("--convention", p.convention, "half | full");
  probe_cmd->add_option("--source", p.source, "source site (d integers)");
  probe_cmd->add_option("--target", p.target, "target site (d integers)");
  probe_cmd->add_flag("--allow-truncation", p.allow_truncation,
                      "permit the orbit to clip at the cube boundary");
  probe_cmd->add_flag("--dump-potential", p.dump_potential,
                      "also dump the disorder realization");
  probe_cmd->add_option("--out", p.out, "output directory")
      ->envname("ANDERSON_OUTPUT_DIR")
      ->required();
  probe_cmd->callback([&] {
    rc = cmd_probe(p.d, p.n_max, p.M, p.c, p.seed, p.convention, p.source,
                   p.target, p.allow_truncation, p.dump_potential, p.out);
  });

  // ---- run ----
  auto* run_cmd = app.add_subcommand(
      "run", "Full sweep over disorder values and realizations");
  ExperimentConfig cfg;
  std::string run_config_file, run_convention = "half", run_truncation = "forbid";
  std::vector<int> run_source, run_target;
  run_cmd->add_option("--config", run_config_file,
                      "key=value config file (flags override file entries)");
  run_cmd->add_option("--d", cfg.d)->check(CLI::IsMember({2, 3}));
  run_cmd->add_option("--n-max", cfg.n_max);
  run_cmd->add_option("--M", cfg.M, "half-width (0 -> n_max + 1)");
  run_cmd->add_option("--c-values", cfg.c_values, "disorder strengths")
      ->delimiter(',');
  run_cmd->add_option("--realizations", cfg.realizations_per_c);
  run_cmd->add_option("--master-seed", cfg.master_seed);
  run_cmd->add_option("--crop", cfg.crop, "first retained index (-1 -> default)");
  run_cmd->add_option("--mesh-min", cfg.mesh.min);
  run_cmd->add_option("--mesh-step", cfg.mesh.step);
  run_cmd->add_option("--mesh-max", cfg.mesh.max);
  run_cmd->add_option("--l-threshold", cfg.thresholds.l_min);
  run_cmd->add_option("--gap-threshold", cfg.thresholds.gap);
  run_cmd->add_option("--pass-fraction", cfg.thresholds.fraction);
  run_cmd->add_option("--convention", run_convention, "half | full");
  run_cmd->add_option("--output-dir", cfg.output_dir)
      ->envname("ANDERSON_OUTPUT_DIR");
  run_cmd->add_option("--workers", cfg.worker_count, "0 -> hardware");
  run_cmd->add_option("--ram-budget-gb", cfg.ram_budget_gb);
  run_cmd->add_flag("--store-basis", cfg.store_basis,
                    "record the orthogonality diagnostic per cell");
  run_cmd->add_option("--truncation", run_truncation, "forbid | allow");
  run_cmd->add_flag("--svg", cfg.emit_svg, "emit SVG charts");
  run_cmd->add_option("--source", run_source, "source site (d integers)");
  run_cmd->add_option("--target", run_target, "target site (d integers)");
  run_cmd->callback([&] {
    if (!run_config_file.empty())
      merge_config_file(run_config_file, run_cmd, cfg, run_convention,
                        run_truncation, run_source, run_target);
    if (cfg.c_values.empty())
      throw DomainError("no disorder values: pass --c-values or a config file");
    if (cfg.output_dir.empty())
      throw DomainError("no output directory: pass --output-dir, set "
                        "ANDERSON_OUTPUT_DIR, or use a config file");
    cfg.convention = convention_from_string(run_convention);
    if (run_truncation == "allow")
      cfg.truncation = TruncationPolicy::Allow;
    else if (run_truncation != "forbid")
      throw DomainError("--truncation must be forbid or allow");
    if (!run_source.empty()) cfg.source = to_coord(run_source, cfg.d, "--source");
    if (!run_target.empty()) cfg.target = to_coord(run_target, cfg.d, "--target");
    const SweepOutcome outcome = run_sweep(cfg, &std::cout);
    std::cout << "\n" << outcome.report_text;
    if (outcome.failed_cells > 0) {
      std::cerr << outcome.failed_cells << " cell(s) failed; see manifest.json\n";
      rc = 1;
    }
  });

  // ---- analyze ----
  auto* analyze_cmd = app.add_subcommand(
      "analyze", "Refit persisted series files without recomputation");
  struct {
    std::vector<std::string> files;
    int crop = -1;
    Mesh mesh;
    bool to_stdout = false;
  } an;
  analyze_cmd->add_option("files", an.files, "series.csv files")->required();
  analyze_cmd->add_option("--crop", an.crop, "first retained index")->required();
  analyze_cmd->add_option("--mesh-min", an.mesh.min);
  analyze_cmd->add_option("--mesh-step", an.mesh.step);
  analyze_cmd->add_option("--mesh-max", an.mesh.max);
  analyze_cmd->add_flag("--stdout", an.to_stdout,
                        "print fit records instead of writing refit.json");
  analyze_cmd->callback(
      [&] { rc = cmd_analyze(an.files, an.crop, an.mesh, an.to_stdout); });

  // ---- report ----
  auto* report_cmd = app.add_subcommand(
      "report", "Regenerate report tables from a results directory");
  std::string report_dir;
  report_cmd->add_option("--dir", report_dir, "results directory")
      ->envname("ANDERSON_OUTPUT_DIR")
      ->required();
  report_cmd->callback([&] {
    const ReportFiles files = generate_report(report_dir);
    std::cout << files.text;
  });

  // ---- bulk ----
  auto* bulk_cmd = app.add_subcommand(
      "bulk", "Taxicab-shell mass profiles of the evolved wave packet");
  struct {
    int d = 3, n_max = 60, M = 0, realizations = 1;
    std::vector<double> c_values;
    std::uint64_t master_seed = 1;
    std::vector<int> at;
    std::string kind = "lanczos", convention = "half", out;
    bool allow_truncation = false, svg = false;
  } b;
  bulk_cmd->add_option("--d", b.d)->check(CLI::IsMember({2, 3}));
  bulk_cmd->add_option("--n-max", b.n_max);
  bulk_cmd->add_option("--M", b.M, "half-width (default n_max + 1)");
  bulk_cmd->add_option("--c-values", b.c_values, "disorder strengths")
      ->required()
      ->delimiter(',');
  bulk_cmd->add_option("--realizations", b.realizations);
  bulk_cmd->add_option("--master-seed", b.master_seed);
  bulk_cmd->add_option("--at", b.at, "profile steps (default n_max)")
      ->delimiter(',');
  bulk_cmd->add_option("--kind", b.kind, "lanczos | power");
  bulk_cmd->add_option("--convention", b.convention, "half | full");
  bulk_cmd->add_flag("--allow-truncation", b.allow_truncation);
  bulk_cmd->add_flag("--svg", b.svg, "emit SVG charts");
  bulk_cmd->add_option("--out", b.out, "output directory")
      ->envname("ANDERSON_OUTPUT_DIR")
      ->required();
  bulk_cmd->callback([&] {
    rc = cmd_bulk(b.d, b.n_max, b.M, b.c_values, b.realizations, b.master_seed,
                  b.at, b.kind, b.convention, b.allow_truncation, b.svg, b.out);
  });

  // ---- ortho ----
  auto* ortho_cmd = app.add_subcommand(
      "ortho", "Orthogonality diagnostic with a stored Krylov basis");
  struct {
    int d = 3, M = 40, n_max = 150;
    std::vector<double> c_values;
    std::uint64_t master_seed = 1;
    std::string convention = "half", out;
    double budget_gb = 4.0;
  } o;
  ortho_cmd->add_option("--d", o.d)->check(CLI::IsMember({2, 3}));
  ortho_cmd->add_option("--M", o.M, "half-width of the small instance");
  ortho_cmd->add_option("--n-max", o.n_max);
  ortho_cmd->add_option("--c-values", o.c_values, "disorder strengths")
      ->required()
      ->delimiter(',');
  ortho_cmd->add_option("--master-seed", o.master_seed);
  ortho_cmd->add_option("--convention", o.convention, "half | full");
  ortho_cmd->add_option("--basis-budget-gb", o.budget_gb);
  ortho_cmd->add_option("--out", o.out, "directory for ortho.csv (optional)");
  ortho_cmd->callback([&] {
    rc = cmd_ortho(o.d, o.M, o.n_max, o.c_values, o.master_seed, o.convention,
                   o.budget_gb, o.out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}

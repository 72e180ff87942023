#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "anderson/runner.hpp"
#include "test_support.hpp"

using namespace anderson;
using testsupport::TempDir;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny_config(const std::string& out) {
  ExperimentConfig cfg;
  cfg.d = 2;
  cfg.n_max = 40;
  cfg.M = 41;
  cfg.c_values = {0.0, 0.8};
  cfg.realizations_per_c = 2;
  cfg.master_seed = 9001;
  cfg.crop = 10;
  cfg.output_dir = out;
  cfg.worker_count = 2;
  return cfg;
}

// result.json with the timing block removed (wall time differs run to run)
nlohmann::ordered_json result_without_timing(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  nlohmann::ordered_json j;
  in >> j;
  j.erase("timing");
  return j;
}

} // namespace

TEST_SUITE("runner") {

TEST_CASE("config defaults: M and crop follow n_max") {
  ExperimentConfig cfg;
  cfg.n_max = 200;
  CHECK(cfg.resolved_M() == 201);
  CHECK(cfg.resolved_crop() == 44);
  cfg.n_max = 500;
  CHECK(cfg.resolved_crop() == 119);
  cfg.crop = 60;
  CHECK(cfg.resolved_crop() == 60);
  cfg.M = 700;
  CHECK(cfg.resolved_M() == 700);
  cfg.d = 2;
  cfg.target = {1, 1, 1};
  CHECK(cfg.resolved_target() == Coord{1, 1, 0});
}

TEST_CASE("per-cell footprint: three buffers, plus disorder, plus basis") {
  ExperimentConfig cfg;
  cfg.d = 2;
  cfg.n_max = 10;
  cfg.M = 5;
  const std::int64_t field = 11 * 11 * 8;
  CHECK(cfg.cell_footprint_bytes(0.0) == 3 * field);
  CHECK(cfg.cell_footprint_bytes(1.0) == 4 * field);
  cfg.store_basis = true;
  CHECK(cfg.cell_footprint_bytes(0.0) == 3 * field + 11 * field);
}

TEST_CASE("cell seeds are deterministic and distinct") {
  std::set<std::uint64_t> seen;
  for (int ci = 0; ci < 5; ++ci)
    for (int ri = 0; ri < 20; ++ri) {
      const std::uint64_t s = cell_seed(123, ci, ri);
      CHECK(s == cell_seed(123, ci, ri));
      CHECK(seen.insert(s).second);
    }
  CHECK(cell_seed(123, 0, 0) != cell_seed(124, 0, 0));
}

TEST_CASE("config validation rejects bad setups") {
  TempDir tmp("validate");
  ExperimentConfig cfg = tiny_config(tmp.str());
  CHECK_NOTHROW(validate(cfg));

  ExperimentConfig bad = cfg;
  bad.c_values.clear();
  CHECK_THROWS_AS(validate(bad), DomainError);

  bad = cfg;
  bad.c_values = {0.5, 0.5};
  CHECK_THROWS_AS(validate(bad), DomainError);

  bad = cfg;
  bad.c_values = {-1.0};
  CHECK_THROWS_AS(validate(bad), DomainError);

  bad = cfg;
  bad.M = 20; // < n_max + |source| with truncation forbidden
  CHECK_THROWS_AS(validate(bad), DomainError);
  bad.truncation = TruncationPolicy::Allow;
  CHECK_NOTHROW(validate(bad));

  bad = cfg;
  bad.crop = 39; // 2 points left
  CHECK_THROWS_AS(validate(bad), DomainError);

  bad = cfg;
  bad.thresholds.fraction = 1.5;
  CHECK_THROWS_AS(validate(bad), DomainError);

  bad = cfg;
  bad.output_dir.clear();
  CHECK_THROWS_AS(validate(bad), DomainError);

  bad = cfg;
  bad.ram_budget_gb = 1e-6; // three buffers no longer fit
  CHECK_THROWS_AS(validate(bad), SizingError);
}

TEST_CASE("sweep: layout, manifest, report, determinism") {
  TempDir tmp("sweep");
  const ExperimentConfig cfg = tiny_config((tmp.path() / "run1").string());
  const SweepOutcome outcome = run_sweep(cfg);
  CHECK(outcome.failed_cells == 0);
  REQUIRE(outcome.cells.size() == 4);
  REQUIRE(outcome.verdicts.size() == 2);

  const fs::path root = tmp.path() / "run1";
  for (const char* rel :
       {"c=0/r=0/series.csv", "c=0/r=0/series.json", "c=0/r=0/result.json",
        "c=0/r=1/series.csv", "c=0.8/r=1/result.json", "c=0/averaged_series.csv",
        "c=0.8/averaged_series.csv", "manifest.json", "report.csv",
        "report_averages.csv", "report_verdicts.csv", "report.txt"})
    CHECK(fs::exists(root / rel));

  // manifest lists every cell exactly once, all done
  nlohmann::ordered_json manifest;
  std::ifstream(root / "manifest.json") >> manifest;
  std::set<std::pair<int, int>> cells;
  for (const auto& cj : manifest["cells"]) {
    CHECK(cj["status"] == "done");
    cells.insert({cj["c_index"].get<int>(), cj["r_index"].get<int>()});
  }
  CHECK(cells.size() == 4);

  // csv headers
  const std::string report = testsupport::slurp(root / "report.csv");
  CHECK(report.rfind("c,P,y,L\n", 0) == 0);
  const std::string averages = testsupport::slurp(root / "report_averages.csv");
  CHECK(averages.rfind("c,a_tilde,y_tilde,L_tilde\n", 0) == 0);

  // rerun: identical persisted numbers (timing aside)
  ExperimentConfig cfg2 = cfg;
  cfg2.output_dir = (tmp.path() / "run2").string();
  run_sweep(cfg2);
  const fs::path root2 = tmp.path() / "run2";
  for (const char* rel : {"c=0/r=0/series.csv", "c=0.8/r=1/series.csv"})
    CHECK(testsupport::slurp(root / rel) == testsupport::slurp(root2 / rel));
  CHECK(result_without_timing(root / "c=0.8/r=0/result.json") ==
        result_without_timing(root2 / "c=0.8/r=0/result.json"));
  CHECK(testsupport::slurp(root / "report.csv") ==
        testsupport::slurp(root2 / "report.csv"));

  // report regeneration from disk is byte-stable
  const std::string before = testsupport::slurp(root / "report.csv");
  generate_report(root.string());
  CHECK(testsupport::slurp(root / "report.csv") == before);
}

TEST_CASE("sweep results do not depend on the worker count") {
  TempDir tmp("workers");
  ExperimentConfig cfg1 = tiny_config((tmp.path() / "w1").string());
  cfg1.worker_count = 1;
  ExperimentConfig cfg3 = tiny_config((tmp.path() / "w3").string());
  cfg3.worker_count = 3;
  run_sweep(cfg1);
  run_sweep(cfg3);
  for (const char* rel :
       {"report.csv", "report_verdicts.csv", "c=0/r=1/series.csv",
        "c=0.8/r=0/series.csv"})
    CHECK(testsupport::slurp(tmp.path() / "w1" / rel) ==
          testsupport::slurp(tmp.path() / "w3" / rel));
}

TEST_CASE("analyze reproduces in-sweep fits bit for bit") {
  TempDir tmp("analyze");
  const ExperimentConfig cfg = tiny_config((tmp.path() / "run").string());
  run_sweep(cfg);
  const fs::path root = tmp.path() / "run";

  std::vector<std::string> files;
  for (int ci : {0, 1})
    for (int ri : {0, 1})
      files.push_back((root / ("c=" + std::string(ci == 0 ? "0" : "0.8")) /
                       ("r=" + std::to_string(ri)) / "series.csv")
                          .string());
  const AnalyzeOutcome out =
      analyze_series_files(files, cfg.resolved_crop(), cfg.mesh, true);
  CHECK(out.failures == 0);
  REQUIRE(out.items.size() == 4);
  for (const AnalyzeItem& item : out.items) {
    REQUIRE(item.ok);
    const fs::path dir = fs::path(item.file).parent_path();
    // the refit record equals the "fit" object inside result.json, textually
    nlohmann::ordered_json result;
    std::ifstream(dir / "result.json") >> result;
    nlohmann::ordered_json refit;
    std::ifstream(dir / "series.refit.json") >> refit;
    CHECK(refit.dump() == result["fit"].dump());
  }
}

TEST_CASE("analyze reports schema violations per file") {
  TempDir tmp("malformed");
  const std::string good_dir = (tmp.path() / "run").string();
  ExperimentConfig cfg = tiny_config(good_dir);
  cfg.c_values = {0.5};
  cfg.realizations_per_c = 1;
  run_sweep(cfg);

  const std::string bad = (tmp.path() / "bad.csv").string();
  std::ofstream(bad) << "nope\n1,2\n";
  const std::string missing = (tmp.path() / "missing.csv").string();

  const AnalyzeOutcome out = analyze_series_files(
      {(fs::path(good_dir) / "c=0.5/r=0/series.csv").string(), bad, missing}, 10,
      Mesh{}, false);
  CHECK(out.failures == 2);
  CHECK(out.items[0].ok);
  CHECK_FALSE(out.items[1].ok);
  CHECK(out.items[1].error.find("header") != std::string::npos);
  CHECK_FALSE(out.items[2].ok);
}

TEST_CASE("report: failed cells produce N/A rows; empty dirs are errors") {
  TempDir tmp("report");
  CHECK_THROWS_AS(generate_report(tmp.str()), SchemaError); // no manifest

  ExperimentConfig cfg = tiny_config((tmp.path() / "run").string());
  cfg.realizations_per_c = 1;
  run_sweep(cfg);
  const fs::path root = tmp.path() / "run";

  // mark the c=0.8 cell failed and regenerate
  {
    std::ifstream in(root / "manifest.json");
    nlohmann::ordered_json manifest;
    in >> manifest;
    in.close();
    for (auto& cj : manifest["cells"])
      if (cj["c_index"].get<int>() == 1) cj["status"] = "failed";
    std::ofstream out(root / "manifest.json");
    out << manifest.dump(2) << "\n";
  }
  const ReportFiles report = generate_report(root.string());
  CHECK(report.verdicts.size() == 1);
  const std::string csv = testsupport::slurp(root / "report.csv");
  CHECK(csv.find("0.8,N/A,N/A,N/A") != std::string::npos);

  // all cells failed -> analysis error
  {
    std::ifstream in(root / "manifest.json");
    nlohmann::ordered_json manifest;
    in >> manifest;
    in.close();
    for (auto& cj : manifest["cells"]) cj["status"] = "failed";
    std::ofstream out(root / "manifest.json");
    out << manifest.dump(2) << "\n";
  }
  CHECK_THROWS_AS(generate_report(root.string()), AnalysisError);
}

TEST_CASE("store_basis records the orthogonality diagnostic") {
  TempDir tmp("basis");
  ExperimentConfig cfg = tiny_config((tmp.path() / "run").string());
  cfg.c_values = {1.0};
  cfg.realizations_per_c = 1;
  cfg.n_max = 20;
  cfg.M = 21;
  cfg.crop = 5;
  cfg.store_basis = true;
  const SweepOutcome outcome = run_sweep(cfg);
  CHECK(outcome.failed_cells == 0);
  REQUIRE(outcome.cells[0].ortho_q.has_value());
  CHECK(*outcome.cells[0].ortho_q <= 1e-9);
  nlohmann::ordered_json result;
  std::ifstream(tmp.path() / "run/c=1/r=0/result.json") >> result;
  CHECK(result.contains("ortho_q"));
}

TEST_CASE("svg plot emission") {
  TempDir tmp("svg");
  ExperimentConfig cfg = tiny_config((tmp.path() / "run").string());
  cfg.emit_svg = true;
  run_sweep(cfg);
  const std::string svg =
      testsupport::slurp(tmp.path() / "run/plots/distance_averaged.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("c=0.8") != std::string::npos);
}

} // TEST_SUITE

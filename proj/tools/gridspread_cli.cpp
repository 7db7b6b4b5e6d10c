// Copyright (c) 2026 gridspread contributors
// Licensed under Apache License 2.0

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gridspread/csv.hpp"
#include "gridspread/error.hpp"
#include "gridspread/geojson.hpp"
#include "gridspread/pipeline.hpp"
#include "gridspread/synth.hpp"
#include "gridspread/weights.hpp"

namespace gs = gridspread;
using nlohmann::json;

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw gs::Error(gs::ErrorKind::io, "cannot open " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw gs::Error(gs::ErrorKind::io, "cannot write " + path);
  return out;
}

void make_output_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw gs::Error(gs::ErrorKind::io, "cannot create " + dir + ": " + ec.message());
}

std::vector<gs::AdminUnit> load_admin(const std::string& path) {
  std::ifstream in = open_input(path);
  return gs::load_admin_geojson(in, path);
}

std::vector<gs::DisplacementRecord> load_records(const std::string& path) {
  std::ifstream in = open_input(path);
  return gs::load_records_csv(in, path);
}

std::vector<gs::GeoPoint> load_buildings(const std::string& path) {
  std::ifstream in = open_input(path);
  return gs::load_buildings_csv(in, path);
}

std::vector<gs::Settlement> load_settlements(const std::string& path) {
  std::ifstream in = open_input(path);
  return gs::load_settlements_csv(in, path);
}

void require(bool condition, const std::string& message) {
  if (!condition) throw gs::Error(gs::ErrorKind::config, message);
}

json report_json(const gs::MetricsReport& report) {
  return json{{"accuracy", report.accuracy},
              {"precision", report.precision},
              {"recall", report.recall},
              {"f1", report.f1},
              {"mode", gs::to_string(report.mode)},
              {"support", report.support},
              {"per_admin2", report.per_admin2}};
}

int do_ingest(const gs::PipelineConfig& cfg) {
  require(!cfg.admin_path.empty() || !cfg.records_path.empty() || !cfg.buildings_path.empty() ||
              !cfg.settlements_path.empty(),
          "ingest needs at least one input (--admin, --records, --buildings, --settlements)");
  json summary;
  if (!cfg.admin_path.empty()) {
    const std::vector<gs::AdminUnit> units = load_admin(cfg.admin_path);
    std::map<std::string, std::int64_t> by_level;
    for (const gs::AdminUnit& unit : units) ++by_level[gs::to_string(unit.level)];
    summary["admin_units"] = {{"total", units.size()}, {"by_level", by_level}};
  }
  if (!cfg.records_path.empty()) {
    const std::vector<gs::DisplacementRecord> records = load_records(cfg.records_path);
    std::map<std::string, std::int64_t> by_country;
    for (const gs::DisplacementRecord& r : records) ++by_country[r.origin_country];
    summary["records"] = {{"total", records.size()}, {"by_country", by_country}};
  }
  if (!cfg.buildings_path.empty()) {
    const std::vector<gs::GeoPoint> buildings = load_buildings(cfg.buildings_path);
    std::int64_t with_confidence = 0;
    for (const gs::GeoPoint& b : buildings) {
      if (b.confidence.has_value()) ++with_confidence;
    }
    summary["buildings"] = {{"total", buildings.size()}, {"with_confidence", with_confidence}};
  }
  if (!cfg.settlements_path.empty()) {
    const std::vector<gs::Settlement> settlements = load_settlements(cfg.settlements_path);
    std::int64_t with_admin2 = 0;
    for (const gs::Settlement& s : settlements) {
      if (!s.admin2_id.empty()) ++with_admin2;
    }
    summary["settlements"] = {{"total", settlements.size()}, {"with_admin2", with_admin2}};
  }
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int do_weights(const gs::PipelineConfig& cfg) {
  require(!cfg.admin_path.empty(), "weights needs an admin geometry input (--admin)");
  require(!cfg.buildings_path.empty(), "weights needs a buildings input (--buildings)");
  const std::vector<gs::AdminUnit> units = load_admin(cfg.admin_path);
  std::vector<gs::AdminUnit> admin2_units;
  for (const gs::AdminUnit& unit : units) {
    if (unit.level == gs::AdminLevel::admin2) admin2_units.push_back(unit);
  }
  const std::vector<gs::GeoPoint> buildings = load_buildings(cfg.buildings_path);
  std::vector<std::string> expected;
  for (const gs::AdminUnit& unit : admin2_units) expected.push_back(unit.canonical_id);
  std::sort(expected.begin(), expected.end());
  gs::AssignmentStats stats;
  const std::vector<gs::BuildingAssignment> assignments =
      gs::assign_buildings(buildings, admin2_units, cfg.grid, cfg.min_confidence, &stats);
  const gs::MatrixBuild build = gs::build_proportion_matrix(assignments, expected);

  if (!cfg.output_dir.empty()) {
    make_output_dir(cfg.output_dir);
    const std::filesystem::path dir(cfg.output_dir);
    {
      std::ofstream out = open_output((dir / "proportions_wide.csv").string());
      gs::write_matrix_wide_csv(build.matrix, out);
    }
    {
      std::ofstream out = open_output((dir / "proportions_long.csv").string());
      gs::write_matrix_long_csv(build.matrix, out);
    }
  }
  json summary = {{"admin2s_with_rows", build.matrix.row_count()},
                  {"single_cell_admin2s", gs::single_cell_admins(build.matrix).size()},
                  {"excluded_admin2s", build.excluded_admin2s},
                  {"buildings",
                   {{"included", stats.included},
                    {"outside_admin", stats.outside_admin},
                    {"below_confidence", stats.below_confidence}}}};
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int do_resolve(const gs::PipelineConfig& cfg) {
  require(!cfg.admin_path.empty(), "resolve needs an admin geometry input (--admin)");
  require(!cfg.records_path.empty(), "resolve needs a records input (--records)");
  const std::vector<gs::AdminUnit> units = load_admin(cfg.admin_path);
  const std::vector<gs::DisplacementRecord> records = load_records(cfg.records_path);
  std::vector<gs::Settlement> settlements;
  if (!cfg.settlements_path.empty()) settlements = load_settlements(cfg.settlements_path);
  const gs::AdminIndex index = gs::build_admin_index(units);
  const gs::ResolveOutcome outcome =
      gs::resolve_records(records, index, settlements, cfg.matching);

  std::map<std::string, std::int64_t> by_method;
  for (const gs::ResolvedRecord& r : outcome.resolved) ++by_method[gs::to_string(r.resolution_method)];
  std::map<std::string, std::int64_t> by_reason;
  for (const gs::RejectedRecord& r : outcome.rejected) ++by_reason[gs::to_string(r.reason)];

  if (!cfg.output_dir.empty()) {
    make_output_dir(cfg.output_dir);
    const std::filesystem::path dir(cfg.output_dir);
    {
      std::ofstream out = open_output((dir / "resolutions.csv").string());
      gs::write_csv_row(out,
                        std::vector<std::string>{"record_id", "admin2_id", "method", "settlement"});
      for (const gs::ResolvedRecord& r : outcome.resolved) {
        gs::write_csv_row(
            out, std::vector<std::string>{
                     r.record.record_id, r.admin2_id, gs::to_string(r.resolution_method),
                     r.admin3_settlement ? r.admin3_settlement->name : std::string()});
      }
    }
    {
      std::ofstream out = open_output((dir / "rejections.csv").string());
      gs::write_csv_row(out, std::vector<std::string>{"record_id", "reason"});
      for (const gs::RejectedRecord& r : outcome.rejected) {
        gs::write_csv_row(out, std::vector<std::string>{r.record_id, gs::to_string(r.reason)});
      }
    }
  }
  const json summary = {{"resolved", outcome.resolved.size()},
                        {"rejected", outcome.rejected.size()},
                        {"by_method", by_method},
                        {"by_reason", by_reason}};
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int do_run(const gs::PipelineConfig& cfg) {
  require(!cfg.output_dir.empty(), "run needs an output directory (--out or config output_dir)");
  const gs::RunResult result = gs::run_pipeline(cfg);
  gs::export_outputs(result, cfg);

  json metrics;
  metrics["modeled_only"] = result.evaluation.modeled_only
                                ? report_json(*result.evaluation.modeled_only)
                                : json(nullptr);
  metrics["combined"] = report_json(result.evaluation.combined);
  const json summary = {
      {"resolved", result.resolved.size()},
      {"rejected", result.rejected.size()},
      {"placements",
       {{"admin3_deterministic", result.method_counts.admin3_deterministic},
        {"single_cell_deterministic", result.method_counts.single_cell_deterministic},
        {"modeled", result.method_counts.modeled},
        {"fallback", result.method_counts.fallback},
        {"total", result.placements.size()}}},
      {"occupied_cells", result.counts.occupied_cells},
      {"metrics", metrics},
      {"warnings", result.warnings.size()},
      {"output_dir", cfg.output_dir}};
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int do_evaluate(const gs::PipelineConfig& cfg, const std::string& placements_path,
                const std::string& truth_path) {
  require(!placements_path.empty(), "evaluate needs a placements input (--placements)");
  require(!truth_path.empty(), "evaluate needs a truth input (--truth)");
  std::vector<gs::PlacementResult> placements;
  {
    std::ifstream in = open_input(placements_path);
    placements = gs::load_placements_csv(in, placements_path);
  }
  std::map<std::string, gs::GridCellId> truth;
  {
    std::ifstream in = open_input(truth_path);
    truth = gs::load_truth_csv(in, truth_path);
  }
  const gs::TruthEvaluation evaluation = gs::evaluate_against_truth(placements, truth);
  const json summary = {{"overall",
                         {{"accuracy", evaluation.overall.accuracy},
                          {"precision", evaluation.overall.precision},
                          {"recall", evaluation.overall.recall},
                          {"f1", evaluation.overall.f1}}},
                        {"support", evaluation.support},
                        {"accuracy_by_method", evaluation.accuracy_by_method},
                        {"support_by_method", evaluation.support_by_method}};
  if (!cfg.output_dir.empty()) {
    make_output_dir(cfg.output_dir);
    std::ofstream out =
        open_output((std::filesystem::path(cfg.output_dir) / "evaluation.json").string());
    out << summary.dump(2) << "\n";
  }
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int do_synth(const gs::PipelineConfig& cfg, const gs::WorldConfig& world_cfg) {
  require(!cfg.output_dir.empty(), "synth needs an output directory (--out)");
  gs::WorldConfig wc = world_cfg;
  wc.grid = cfg.grid;
  const gs::SyntheticWorld world = gs::generate_synthetic(wc, cfg.seed);

  make_output_dir(cfg.output_dir);
  const std::filesystem::path dir(cfg.output_dir);
  {
    std::ofstream out = open_output((dir / "admin.geojson").string());
    out << gs::admin_units_to_geojson(world.admin2_units);
  }
  {
    std::ofstream out = open_output((dir / "records.csv").string());
    gs::write_records_csv(world.records, out);
  }
  {
    std::ofstream out = open_output((dir / "buildings.csv").string());
    gs::write_buildings_csv(world.buildings, out);
  }
  {
    std::ofstream out = open_output((dir / "settlements.csv").string());
    gs::write_settlements_csv(world.settlements, out);
  }
  {
    std::ofstream out = open_output((dir / "truth.csv").string());
    gs::write_truth_csv(world.truth, out);
  }
  {
    const json config = {
        {"grid",
         {{"origin_lon", cfg.grid.origin_lon},
          {"origin_lat", cfg.grid.origin_lat},
          {"cell_size", cfg.grid.cell_size},
          {"n_cols", cfg.grid.n_cols},
          {"n_rows", cfg.grid.n_rows}}},
        {"matching", {{"threshold", cfg.matching.threshold}}},
        {"model",
         {{"alpha", cfg.model.alpha},
          {"kernel", gs::to_string(cfg.model.kernel)},
          {"split", cfg.model.train_fraction}}},
        {"seed", cfg.seed},
        {"min_confidence", cfg.min_confidence},
        {"inputs",
         {{"admin", "admin.geojson"},
          {"records", "records.csv"},
          {"buildings", "buildings.csv"},
          {"settlements", "settlements.csv"}}},
        {"output_dir", "out"}};
    std::ofstream out = open_output((dir / "config.json").string());
    out << config.dump(2) << "\n";
  }
  const json summary = {{"admin2_units", world.admin2_units.size()},
                        {"buildings", world.buildings.size()},
                        {"settlements", world.settlements.size()},
                        {"records", world.records.size()},
                        {"seed", world.seed},
                        {"output_dir", cfg.output_dir}};
  std::cout << summary.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Disaggregates admin-level displacement records onto a regular grid."};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 42;
  std::string out_dir;
  double min_confidence = 0.0;
  double threshold = 80.0;
  double alpha = 0.9;
  std::string kernel = "rbf";
  double split = 0.8;

  CLI::Option* config_opt = app.add_option("--config", config_path, "pipeline config JSON");
  CLI::Option* seed_opt = app.add_option("--seed", seed, "deterministic RNG seed");
  CLI::Option* out_opt = app.add_option("--out", out_dir, "output directory");
  CLI::Option* min_confidence_opt = app.add_option(
      "--min-confidence", min_confidence, "building confidence floor in [0, 1]");
  CLI::Option* threshold_opt =
      app.add_option("--threshold", threshold, "fuzzy-match acceptance threshold in [0, 100]");
  CLI::Option* alpha_opt =
      app.add_option("--alpha", alpha, "label-spreading clamping factor in (0, 1)");
  CLI::Option* kernel_opt = app.add_option("--kernel", kernel, "similarity kernel: rbf or knn");
  CLI::Option* split_opt =
      app.add_option("--split", split, "train fraction for validation in (0, 1)");

  std::string admin_path;
  std::string records_path;
  std::string buildings_path;
  std::string settlements_path;
  std::string placements_path;
  std::string truth_path;

  CLI::App* ingest = app.add_subcommand("ingest", "validate and summarize input files");
  ingest->add_option("--admin", admin_path, "admin units GeoJSON");
  ingest->add_option("--records", records_path, "displacement records CSV");
  ingest->add_option("--buildings", buildings_path, "building centroids CSV");
  ingest->add_option("--settlements", settlements_path, "settlement gazetteer CSV");

  CLI::App* weights_cmd =
      app.add_subcommand("weights", "build building-based proportion rows per admin2");
  weights_cmd->add_option("--admin", admin_path, "admin units GeoJSON");
  weights_cmd->add_option("--buildings", buildings_path, "building centroids CSV");

  CLI::App* resolve_cmd =
      app.add_subcommand("resolve", "resolve record origins to canonical admin2 units");
  resolve_cmd->add_option("--admin", admin_path, "admin units GeoJSON");
  resolve_cmd->add_option("--records", records_path, "displacement records CSV");
  resolve_cmd->add_option("--settlements", settlements_path, "settlement gazetteer CSV");

  CLI::App* run_cmd = app.add_subcommand("run", "run the full pipeline and export outputs");
  run_cmd->add_option("--admin", admin_path, "admin units GeoJSON");
  run_cmd->add_option("--records", records_path, "displacement records CSV");
  run_cmd->add_option("--buildings", buildings_path, "building centroids CSV");
  run_cmd->add_option("--settlements", settlements_path, "settlement gazetteer CSV");

  CLI::App* evaluate_cmd =
      app.add_subcommand("evaluate", "score saved placements against known true cells");
  evaluate_cmd->add_option("--placements", placements_path, "placements CSV from a run");
  evaluate_cmd->add_option("--truth", truth_path, "record_id,grid_id truth CSV");

  CLI::App* synth_cmd =
      app.add_subcommand("synth", "generate a synthetic test world with known truth");
  gs::WorldConfig world_cfg;
  synth_cmd->add_option("--units", world_cfg.n_units, "number of admin2 units");
  synth_cmd->add_option("--cells-per-unit", world_cfg.cells_per_unit,
                        "grid cells spanned by each unit");
  synth_cmd->add_option("--buildings-per-unit", world_cfg.buildings_per_unit,
                        "buildings per unit");
  synth_cmd->add_option("--records-per-unit", world_cfg.records_per_unit, "records per unit");
  synth_cmd->add_option("--hide-fraction", world_cfg.hide_fraction,
                        "chance a record's settlement name is withheld");
  synth_cmd->add_option("--signal", world_cfg.signal_strength,
                        "demographic tilt of the truth distribution, in [0, 1)");
  synth_cmd->add_option("--misspell", world_cfg.misspell_fraction,
                        "chance the admin2 name gets a one-letter typo");
  synth_cmd->add_option("--year-min", world_cfg.year_min, "first year records can carry");
  synth_cmd->add_option("--year-max", world_cfg.year_max, "last year records can carry");

  for (CLI::App* sub : {ingest, weights_cmd, resolve_cmd, run_cmd, evaluate_cmd, synth_cmd}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const std::string stage = app.get_subcommands().front()->get_name();
  try {
    gs::PipelineConfig cfg;
    if (config_opt->count() > 0) cfg = gs::load_pipeline_config(config_path);
    if (seed_opt->count() > 0) cfg.seed = seed;
    if (out_opt->count() > 0) cfg.output_dir = out_dir;
    if (min_confidence_opt->count() > 0) cfg.min_confidence = min_confidence;
    if (threshold_opt->count() > 0) cfg.matching.threshold = threshold;
    if (alpha_opt->count() > 0) cfg.model.alpha = alpha;
    if (kernel_opt->count() > 0) cfg.model.kernel = gs::parse_kernel(kernel);
    if (split_opt->count() > 0) cfg.model.train_fraction = split;
    if (!admin_path.empty()) cfg.admin_path = admin_path;
    if (!records_path.empty()) cfg.records_path = records_path;
    if (!buildings_path.empty()) cfg.buildings_path = buildings_path;
    if (!settlements_path.empty()) cfg.settlements_path = settlements_path;

    if (ingest->parsed()) return do_ingest(cfg);
    if (weights_cmd->parsed()) return do_weights(cfg);
    if (resolve_cmd->parsed()) return do_resolve(cfg);
    if (run_cmd->parsed()) return do_run(cfg);
    if (evaluate_cmd->parsed()) return do_evaluate(cfg, placements_path, truth_path);
    if (synth_cmd->parsed()) return do_synth(cfg, world_cfg);
  } catch (const gs::Error& e) {
    std::cerr << e.with_stage(stage).what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "[" << stage << "] internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

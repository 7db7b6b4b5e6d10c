// Copyright (c) 2026 gridspread contributors
// Licensed under Apache License 2.0

#include "gridspread/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "gridspread/csv.hpp"
#include "gridspread/error.hpp"
#include "gridspread/geojson.hpp"
#include "gridspread/rng.hpp"
#include "gridspread/util.hpp"

namespace gridspread {

namespace {

using nlohmann::json;

template <typename Fn>
decltype(auto) run_stage(const char* name, Fn&& fn) {
  try {
    return std::forward<Fn>(fn)();
  } catch (const Error& e) {
    throw e.with_stage(name);
  }
}

void check_keys(const json& obj, const std::string& context,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* k) { return it.key() == k; }) == allowed.end()) {
      throw Error(ErrorKind::config, "config",
                  context + ": unknown key \"" + it.key() + "\"");
    }
  }
}

const json* child(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_number(const json& obj, const char* key, double fallback, const std::string& context) {
  const json* v = child(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_number()) {
    throw Error(ErrorKind::config, "config", context + "." + key + " must be a number");
  }
  return v->get<double>();
}

std::int64_t get_integer(const json& obj, const char* key, std::int64_t fallback,
                         const std::string& context) {
  const json* v = child(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_number_integer()) {
    throw Error(ErrorKind::config, "config", context + "." + key + " must be an integer");
  }
  return v->get<std::int64_t>();
}

bool get_bool(const json& obj, const char* key, bool fallback, const std::string& context) {
  const json* v = child(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_boolean()) {
    throw Error(ErrorKind::config, "config", context + "." + key + " must be a boolean");
  }
  return v->get<bool>();
}

std::string get_string(const json& obj, const char* key, const std::string& fallback,
                       const std::string& context) {
  const json* v = child(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_string()) {
    throw Error(ErrorKind::config, "config", context + "." + key + " must be a string");
  }
  return v->get<std::string>();
}

std::string resolve_path(const std::string& raw, const std::filesystem::path& base) {
  if (raw.empty()) return raw;
  std::filesystem::path p(raw);
  if (p.is_absolute()) return raw;
  return (base / p).lexically_normal().string();
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::io, "cannot open " + path);
  }
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::io, "cannot write " + path);
  }
  return out;
}

json report_to_json(const MetricsReport& report) {
  return json{{"accuracy", report.accuracy},
              {"precision", report.precision},
              {"recall", report.recall},
              {"f1", report.f1},
              {"mode", to_string(report.mode)},
              {"support", report.support},
              {"per_admin2", report.per_admin2}};
}

json evaluation_to_json(const EvaluationSummary& evaluation) {
  json j;
  j["modeled_only"] =
      evaluation.modeled_only ? report_to_json(*evaluation.modeled_only) : json(nullptr);
  j["combined"] = report_to_json(evaluation.combined);
  return j;
}

void write_metrics_text(const EvaluationSummary& evaluation, std::ostream& out) {
  out << "placement evaluation\n";
  out << "====================\n\n";
  out << "mode          accuracy  precision  recall  f1  support\n";
  auto line = [&out](const MetricsReport& r) {
    out << to_string(r.mode) << "  " << format_double(r.accuracy) << "  "
        << format_double(r.precision) << "  " << format_double(r.recall) << "  "
        << format_double(r.f1) << "  " << r.support << "\n";
  };
  if (evaluation.modeled_only) {
    line(*evaluation.modeled_only);
  } else {
    out << "modeled_only  (no admin2 produced a validation split)\n";
  }
  line(evaluation.combined);
  if (!evaluation.combined.per_admin2.empty()) {
    out << "\nper-admin2 validation accuracy\n";
    out << "------------------------------\n";
    for (const auto& [admin2_id, accuracy] : evaluation.combined.per_admin2) {
      out << admin2_id << "  " << format_double(accuracy) << "\n";
    }
  }
}

json input_entry(const std::string& path) {
  if (path.empty()) return json(nullptr);
  return json{{"path", path}, {"digest", file_digest(path)}};
}

}  // namespace

PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::io, "config", "cannot open config file: " + path);
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, "config", path + ": " + e.what());
  }
  if (!j.is_object()) {
    throw Error(ErrorKind::config, "config", path + ": top level must be a JSON object");
  }
  check_keys(j, path,
             {"grid", "matching", "model", "schema", "seed", "min_confidence", "inputs",
              "output_dir"});

  PipelineConfig cfg;
  if (const json* grid = child(j, "grid")) {
    if (!grid->is_object()) throw Error(ErrorKind::config, "config", "grid must be an object");
    check_keys(*grid, "grid", {"origin_lon", "origin_lat", "cell_size", "n_cols", "n_rows"});
    cfg.grid.origin_lon = get_number(*grid, "origin_lon", cfg.grid.origin_lon, "grid");
    cfg.grid.origin_lat = get_number(*grid, "origin_lat", cfg.grid.origin_lat, "grid");
    cfg.grid.cell_size = get_number(*grid, "cell_size", cfg.grid.cell_size, "grid");
    cfg.grid.n_cols = get_integer(*grid, "n_cols", cfg.grid.n_cols, "grid");
    cfg.grid.n_rows = get_integer(*grid, "n_rows", cfg.grid.n_rows, "grid");
  }
  if (const json* matching = child(j, "matching")) {
    if (!matching->is_object()) {
      throw Error(ErrorKind::config, "config", "matching must be an object");
    }
    check_keys(*matching, "matching", {"threshold", "normalize"});
    cfg.matching.threshold = get_number(*matching, "threshold", cfg.matching.threshold, "matching");
    cfg.matching.normalize = get_bool(*matching, "normalize", cfg.matching.normalize, "matching");
  }
  if (const json* model = child(j, "model")) {
    if (!model->is_object()) throw Error(ErrorKind::config, "config", "model must be an object");
    check_keys(*model, "model",
               {"alpha", "kernel", "gamma", "k_neighbors", "tol", "max_iter", "split"});
    cfg.model.alpha = get_number(*model, "alpha", cfg.model.alpha, "model");
    cfg.model.kernel = parse_kernel(get_string(*model, "kernel", to_string(cfg.model.kernel), "model"));
    cfg.model.gamma = get_number(*model, "gamma", cfg.model.gamma, "model");
    cfg.model.k_neighbors =
        static_cast<int>(get_integer(*model, "k_neighbors", cfg.model.k_neighbors, "model"));
    cfg.model.tol = get_number(*model, "tol", cfg.model.tol, "model");
    cfg.model.max_iter = static_cast<int>(get_integer(*model, "max_iter", cfg.model.max_iter, "model"));
    cfg.model.train_fraction = get_number(*model, "split", cfg.model.train_fraction, "model");
  }
  if (const json* schema = child(j, "schema")) {
    if (!schema->is_object()) throw Error(ErrorKind::config, "config", "schema must be an object");
    check_keys(*schema, "schema", {"fields", "include_year"});
    if (const json* fields = child(*schema, "fields")) {
      if (!fields->is_array()) {
        throw Error(ErrorKind::config, "config", "schema.fields must be an array of strings");
      }
      cfg.schema.fields.clear();
      for (const json& f : *fields) {
        if (!f.is_string()) {
          throw Error(ErrorKind::config, "config", "schema.fields must be an array of strings");
        }
        cfg.schema.fields.push_back(f.get<std::string>());
      }
    }
    cfg.schema.include_year = get_bool(*schema, "include_year", cfg.schema.include_year, "schema");
  }
  if (const json* seed = child(j, "seed")) {
    if (!seed->is_number_integer() && !seed->is_number_unsigned()) {
      throw Error(ErrorKind::config, "config", "seed must be an integer");
    }
    cfg.seed = seed->get<std::uint64_t>();
  }
  cfg.min_confidence = get_number(j, "min_confidence", cfg.min_confidence, "config");

  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  if (const json* inputs = child(j, "inputs")) {
    if (!inputs->is_object()) throw Error(ErrorKind::config, "config", "inputs must be an object");
    check_keys(*inputs, "inputs", {"admin", "records", "buildings", "settlements"});
    cfg.admin_path = resolve_path(get_string(*inputs, "admin", "", "inputs"), base);
    cfg.records_path = resolve_path(get_string(*inputs, "records", "", "inputs"), base);
    cfg.buildings_path = resolve_path(get_string(*inputs, "buildings", "", "inputs"), base);
    cfg.settlements_path = resolve_path(get_string(*inputs, "settlements", "", "inputs"), base);
  }
  cfg.output_dir = resolve_path(get_string(j, "output_dir", "", "config"), base);
  return cfg;
}

std::int64_t GriddedCounts::total() const {
  std::int64_t sum = 0;
  for (const auto& [key, value] : counts) sum += value;
  return sum;
}

std::map<GridCellId, std::int64_t> GriddedCounts::cell_totals() const {
  std::map<GridCellId, std::int64_t> totals;
  for (const auto& [key, value] : counts) totals[key.first] += value;
  return totals;
}

GriddedCounts aggregate_counts(std::span<const PlacementResult> placements,
                               std::span<const ResolvedRecord> records, const GridSpec& grid) {
  std::map<std::string, int> year_of;
  for (const ResolvedRecord& r : records) year_of[r.record.record_id] = r.record.year;

  GriddedCounts out;
  std::set<GridCellId> occupied;
  for (const PlacementResult& p : placements) {
    auto it = year_of.find(p.record_id);
    if (it == year_of.end()) {
      throw Error(ErrorKind::integrity, "placement references unknown record: " + p.record_id);
    }
    if (p.cell.index < 0 || p.cell.index >= grid.cell_count()) {
      throw Error(ErrorKind::extent, "placement cell outside the grid: " + to_string(p.cell));
    }
    ++out.counts[{p.cell, it->second}];
    occupied.insert(p.cell);
  }
  out.occupied_cells = static_cast<std::int64_t>(occupied.size());
  out.occupied_fraction = grid.cell_count() > 0 ? static_cast<double>(out.occupied_cells) /
                                                      static_cast<double>(grid.cell_count())
                                                : 0.0;
  return out;
}

RunResult run_pipeline(const PipelineConfig& cfg) {
  RunResult out;

  run_stage("config", [&] {
    cfg.grid.validate();
    if (cfg.admin_path.empty()) {
      throw Error(ErrorKind::config, "no admin geometry input configured");
    }
    if (cfg.records_path.empty()) {
      throw Error(ErrorKind::config, "no records input configured");
    }
    if (!(cfg.min_confidence >= 0.0 && cfg.min_confidence <= 1.0)) {
      throw Error(ErrorKind::config,
                  "min_confidence must lie in [0, 1], got " + format_double(cfg.min_confidence));
    }
    if (!(cfg.matching.threshold >= 0.0 && cfg.matching.threshold <= 100.0)) {
      throw Error(ErrorKind::config, "matching threshold must lie in [0, 100], got " +
                                         format_double(cfg.matching.threshold));
    }
    if (!(cfg.model.alpha > 0.0 && cfg.model.alpha < 1.0)) {
      throw Error(ErrorKind::config,
                  "alpha must lie in (0, 1), got " + format_double(cfg.model.alpha));
    }
    if (!(cfg.model.train_fraction > 0.0 && cfg.model.train_fraction < 1.0)) {
      throw Error(ErrorKind::config,
                  "split must lie in (0, 1), got " + format_double(cfg.model.train_fraction));
    }
  });

  std::vector<AdminUnit> units;
  std::vector<DisplacementRecord> records;
  std::vector<GeoPoint> buildings;
  std::vector<Settlement> settlements;
  run_stage("ingest", [&] {
    {
      std::ifstream in = open_input(cfg.admin_path);
      units = load_admin_geojson(in, cfg.admin_path);
    }
    std::set<std::string> seen_ids;
    for (const AdminUnit& unit : units) {
      if (!seen_ids.insert(unit.canonical_id).second) {
        throw Error(ErrorKind::input,
                    cfg.admin_path + ": duplicate admin unit id: " + unit.canonical_id);
      }
    }
    {
      std::ifstream in = open_input(cfg.records_path);
      records = load_records_csv(in, cfg.records_path);
    }
    if (!cfg.buildings_path.empty()) {
      std::ifstream in = open_input(cfg.buildings_path);
      buildings = load_buildings_csv(in, cfg.buildings_path);
    }
    if (!cfg.settlements_path.empty()) {
      std::ifstream in = open_input(cfg.settlements_path);
      settlements = load_settlements_csv(in, cfg.settlements_path);
    }
  });

  run_stage("resolve", [&] {
    const AdminIndex index = build_admin_index(units);
    ResolveOutcome outcome = resolve_records(records, index, settlements, cfg.matching);
    out.resolved = std::move(outcome.resolved);
    out.rejected = std::move(outcome.rejected);
  });
  if (!out.rejected.empty()) {
    out.warnings.push_back("rejected " + std::to_string(out.rejected.size()) + " of " +
                           std::to_string(records.size()) + " records during resolution");
  }

  std::vector<AdminUnit> admin2_units;
  for (const AdminUnit& unit : units) {
    if (unit.level == AdminLevel::admin2) admin2_units.push_back(unit);
  }
  run_stage("weights", [&] {
    std::vector<std::string> expected;
    expected.reserve(admin2_units.size());
    for (const AdminUnit& unit : admin2_units) expected.push_back(unit.canonical_id);
    std::sort(expected.begin(), expected.end());
    const std::vector<BuildingAssignment> assignments =
        assign_buildings(buildings, admin2_units, cfg.grid, cfg.min_confidence,
                         &out.building_stats);
    out.matrix = build_proportion_matrix(assignments, expected);
  });
  for (const std::string& admin2_id : out.matrix.excluded_admin2s) {
    out.warnings.push_back("admin2 " + admin2_id +
                           ": no buildings at or above the confidence floor; area-weighted "
                           "fallback applies to its records");
  }

  PartitionResult partition;
  run_stage("partition", [&] {
    partition =
        partition_for_modeling(out.resolved, settlements, out.matrix.matrix, cfg.grid,
                               cfg.matching);
  });
  out.support_violations = partition.support_violations;
  for (const SupportViolation& v : out.support_violations) {
    out.warnings.push_back("record " + v.record_id + ": settlement match at " +
                           to_string(v.cell) + " lies outside the building support of " +
                           v.admin2_id + "; treated as unlabeled");
  }

  run_stage("model", [&] {
    out.placements = partition.deterministic;
    for (const auto& [admin2_id, set] : partition.modeling_sets) {
      for (const LabeledRecord& lr : set.labeled) {
        out.placements.push_back({lr.record.record.record_id, lr.cell,
                                  PlacementMethod::admin3_deterministic, 1.0, false});
      }
    }

    AttributeSchema schema = cfg.schema;
    if (!out.resolved.empty()) {
      int year_min = out.resolved.front().record.year;
      int year_max = year_min;
      for (const ResolvedRecord& r : out.resolved) {
        year_min = std::min(year_min, r.record.year);
        year_max = std::max(year_max, r.record.year);
      }
      schema.year_min = year_min;
      schema.year_max = year_max;
    }

    std::map<std::string, const AdminUnit*> admin2_lookup;
    for (const AdminUnit& unit : admin2_units) admin2_lookup[unit.canonical_id] = &unit;

    const Rng base(cfg.seed);
    for (const auto& [admin2_id, set] : partition.modeling_sets) {
      if (!set.has_row) {
        auto it = admin2_lookup.find(admin2_id);
        if (it == admin2_lookup.end()) {
          throw Error(ErrorKind::integrity, "resolved admin2 " + admin2_id + " has no geometry");
        }
        const std::vector<std::pair<GridCellId, double>> areas =
            cell_intersection_areas(*it->second, cfg.grid);
        double total_area = 0.0;
        for (const auto& [cell, area] : areas) total_area += area;
        if (areas.empty() || total_area <= 0.0) {
          throw Error(ErrorKind::unsolvable,
                      "admin2 " + admin2_id +
                          " covers no grid cell; cannot place its records");
        }
        Rng rng = base.fork("fallback:" + admin2_id);
        for (const ResolvedRecord& r : set.unlabeled) {
          const double u = rng.uniform() * total_area;
          double acc = 0.0;
          std::size_t pick = areas.size() - 1;
          for (std::size_t i = 0; i < areas.size(); ++i) {
            acc += areas[i].second;
            if (u < acc) {
              pick = i;
              break;
            }
          }
          out.placements.push_back({r.record.record_id, areas[pick].first,
                                    PlacementMethod::modeled,
                                    areas[pick].second / total_area, true});
        }
        out.warnings.push_back("admin2 " + admin2_id + ": no building weights; " +
                               std::to_string(set.unlabeled.size()) +
                               " records placed by area-weighted sampling");
        continue;
      }

      Admin2Problem problem;
      problem.admin2_id = admin2_id;
      problem.labeled = set.labeled;
      problem.unlabeled = set.unlabeled;
      problem.row = *out.matrix.matrix.row(admin2_id);
      problem.schema = schema;
      problem.config = cfg.model;
      problem.config.seed = base.fork("admin2:" + admin2_id).state();
      Admin2Solution solution = solve_admin2(problem);
      out.placements.insert(out.placements.end(), solution.placements.begin(),
                            solution.placements.end());
      if (solution.report.zero_signal > 0) {
        out.warnings.push_back("admin2 " + admin2_id + ": " +
                               std::to_string(solution.report.zero_signal) +
                               " records carried no propagation signal; sampled from the "
                               "building prior");
      }
      if (!solution.report.converged) {
        out.warnings.push_back("admin2 " + admin2_id +
                               ": propagation stopped at max_iter before reaching tol");
      }
      out.validations.emplace(admin2_id, std::move(solution.report));
    }

    std::sort(out.placements.begin(), out.placements.end(),
              [](const PlacementResult& a, const PlacementResult& b) {
                return a.record_id < b.record_id;
              });
    if (out.placements.size() != out.resolved.size()) {
      throw Error(ErrorKind::integrity,
                  "placement count " + std::to_string(out.placements.size()) +
                      " does not match resolved record count " +
                      std::to_string(out.resolved.size()));
    }
  });

  for (const PlacementResult& p : out.placements) {
    switch (p.method) {
      case PlacementMethod::admin3_deterministic:
        ++out.method_counts.admin3_deterministic;
        break;
      case PlacementMethod::single_cell_deterministic:
        ++out.method_counts.single_cell_deterministic;
        break;
      case PlacementMethod::modeled:
        ++out.method_counts.modeled;
        break;
    }
    if (p.fallback) ++out.method_counts.fallback;
  }

  run_stage("aggregate", [&] {
    out.counts = aggregate_counts(out.placements, out.resolved, cfg.grid);
    DeterministicTally tally;
    for (const PlacementResult& p : out.placements) {
      if (p.method != PlacementMethod::modeled) tally.add(p.cell);
    }
    std::vector<Admin2Validation> validations;
    validations.reserve(out.validations.size());
    for (const auto& [admin2_id, report] : out.validations) {
      validations.push_back({admin2_id, report.confusion, report.validated});
    }
    out.evaluation = combined_report(validations, tally);
  });

  return out;
}

void export_outputs(const RunResult& result, const PipelineConfig& cfg) {
  run_stage("export", [&] {
    if (cfg.output_dir.empty()) {
      throw Error(ErrorKind::config, "no output directory configured");
    }
    const std::filesystem::path dir(cfg.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
      throw Error(ErrorKind::io, "cannot create " + cfg.output_dir + ": " + ec.message());
    }

    {
      std::ofstream out = open_output((dir / "placements.csv").string());
      write_placements_csv(result.placements, out);
    }
    {
      std::ofstream out = open_output((dir / "gridded_counts.csv").string());
      write_csv_row(out, std::vector<std::string>{"grid_id", "year", "count"});
      for (const auto& [key, count] : result.counts.counts) {
        write_csv_row(out, std::vector<std::string>{to_string(key.first),
                                                    std::to_string(key.second),
                                                    std::to_string(count)});
      }
    }
    {
      std::ofstream out = open_output((dir / "proportions_wide.csv").string());
      write_matrix_wide_csv(result.matrix.matrix, out);
    }
    {
      std::ofstream out = open_output((dir / "proportions_long.csv").string());
      write_matrix_long_csv(result.matrix.matrix, out);
    }
    {
      std::ofstream out = open_output((dir / "metrics.json").string());
      out << evaluation_to_json(result.evaluation).dump(2) << "\n";
    }
    {
      std::ofstream out = open_output((dir / "metrics.txt").string());
      write_metrics_text(result.evaluation, out);
    }
    {
      std::ofstream out = open_output((dir / "cells.geojson").string());
      out << cells_to_geojson(result.counts.cell_totals(), cfg.grid);
    }
    {
      json manifest;
      manifest["config"] = {
          {"grid",
           {{"origin_lon", cfg.grid.origin_lon},
            {"origin_lat", cfg.grid.origin_lat},
            {"cell_size", cfg.grid.cell_size},
            {"n_cols", cfg.grid.n_cols},
            {"n_rows", cfg.grid.n_rows}}},
          {"matching",
           {{"threshold", cfg.matching.threshold}, {"normalize", cfg.matching.normalize}}},
          {"model",
           {{"alpha", cfg.model.alpha},
            {"kernel", to_string(cfg.model.kernel)},
            {"gamma", cfg.model.gamma},
            {"k_neighbors", cfg.model.k_neighbors},
            {"tol", cfg.model.tol},
            {"max_iter", cfg.model.max_iter},
            {"split", cfg.model.train_fraction}}},
          {"schema",
           {{"fields", cfg.schema.fields}, {"include_year", cfg.schema.include_year}}},
          {"seed", cfg.seed},
          {"min_confidence", cfg.min_confidence}};
      manifest["inputs"] = {{"admin", input_entry(cfg.admin_path)},
                            {"records", input_entry(cfg.records_path)},
                            {"buildings", input_entry(cfg.buildings_path)},
                            {"settlements", input_entry(cfg.settlements_path)}};

      json rejected_by_reason = {{"no_admin2", 0}, {"below_threshold", 0}, {"unknown_country", 0}};
      for (const RejectedRecord& r : result.rejected) {
        const char* key = to_string(r.reason);
        rejected_by_reason[key] = rejected_by_reason[key].get<std::int64_t>() + 1;
      }
      manifest["records"] = {
          {"total", result.resolved.size() + result.rejected.size()},
          {"resolved", result.resolved.size()},
          {"rejected", result.rejected.size()},
          {"rejected_by_reason", rejected_by_reason}};
      manifest["buildings"] = {{"included", result.building_stats.included},
                               {"outside_admin", result.building_stats.outside_admin},
                               {"below_confidence", result.building_stats.below_confidence}};
      manifest["placements"] = {
          {"admin3_deterministic", result.method_counts.admin3_deterministic},
          {"single_cell_deterministic", result.method_counts.single_cell_deterministic},
          {"modeled", result.method_counts.modeled},
          {"fallback", result.method_counts.fallback},
          {"total", result.placements.size()}};
      manifest["weights"] = {
          {"admin2s_with_rows", result.matrix.matrix.row_count()},
          {"excluded_admin2s", result.matrix.excluded_admin2s},
          {"support_violations", result.support_violations.size()}};
      manifest["grid"] = {{"cells", cfg.grid.cell_count()},
                          {"occupied_cells", result.counts.occupied_cells},
                          {"occupied_fraction", result.counts.occupied_fraction}};
      manifest["metrics"] = evaluation_to_json(result.evaluation);
      json validation = json::object();
      for (const auto& [admin2_id, report] : result.validations) {
        validation[admin2_id] = {{"validated", report.validated},
                                 {"n_train", report.n_train},
                                 {"n_validation", report.n_validation},
                                 {"accuracy", report.values.accuracy},
                                 {"precision", report.values.precision},
                                 {"recall", report.values.recall},
                                 {"f1", report.values.f1},
                                 {"baseline_accuracy", report.baseline_accuracy},
                                 {"zero_signal", report.zero_signal},
                                 {"iterations", report.iterations},
                                 {"converged", report.converged}};
      }
      manifest["validation"] = validation;
      manifest["warnings"] = result.warnings;

      std::ofstream out = open_output((dir / "manifest.json").string());
      out << manifest.dump(2) << "\n";
    }
  });
}

TruthEvaluation evaluate_against_truth(std::span<const PlacementResult> placements,
                                       const std::map<std::string, GridCellId>& truth) {
  if (placements.empty()) {
    throw Error(ErrorKind::input, "no placements to evaluate");
  }
  std::vector<GridCellId> true_cells;
  std::vector<GridCellId> predicted;
  true_cells.reserve(placements.size());
  predicted.reserve(placements.size());
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> by_method;  // hits, total
  for (const PlacementResult& p : placements) {
    auto it = truth.find(p.record_id);
    if (it == truth.end()) {
      throw Error(ErrorKind::integrity, "no truth entry for record " + p.record_id);
    }
    true_cells.push_back(it->second);
    predicted.push_back(p.cell);
    auto& [hits, total] = by_method[to_string(p.method)];
    if (p.cell == it->second) ++hits;
    ++total;
  }
  TruthEvaluation out;
  out.overall = metrics(confusion(true_cells, predicted));
  out.support = static_cast<std::int64_t>(placements.size());
  for (const auto& [method, tally] : by_method) {
    out.support_by_method[method] = tally.second;
    out.accuracy_by_method[method] =
        tally.second > 0 ? static_cast<double>(tally.first) / static_cast<double>(tally.second)
                         : 0.0;
  }
  return out;
}

}  // namespace gridspread

// Copyright (c) 2026 gridspread contributors
// Licensed under Apache License 2.0

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gridspread/geometry.hpp"
#include "gridspread/grid.hpp"
#include "gridspread/metrics.hpp"
#include "gridspread/records.hpp"
#include "gridspread/spreading.hpp"
#include "gridspread/text_match.hpp"
#include "gridspread/weights.hpp"

namespace gridspread {

struct PipelineConfig {
  GridSpec grid;
  MatchConfig matching;
  SpreadConfig model;    // per-admin2 seeds are forked from `seed`, not model.seed
  AttributeSchema schema = {{"age_group", "gender", "ethnic_group"}, true, 0, 0};
  std::uint64_t seed = 42;
  double min_confidence = 0.0;
  std::string admin_path;
  std::string records_path;
  std::string buildings_path;    // optional; empty means no buildings
  std::string settlements_path;  // optional
  std::string output_dir;
};

/// Reads the JSON config documented in the README. Relative input paths
/// resolve against the config file's directory. Unknown keys are
/// configuration errors.
PipelineConfig load_pipeline_config(const std::string& path);

struct GriddedCounts {
  std::map<std::pair<GridCellId, int>, std::int64_t> counts;  // (cell, year) -> records
  std::int64_t occupied_cells = 0;
  double occupied_fraction = 0.0;  // occupied / grid cell count

  std::int64_t total() const;
  std::map<GridCellId, std::int64_t> cell_totals() const;
};

/// Groups placements by (cell, year), the year joined from the record.
/// Throws Error(integrity) on a placement without a matching record and
/// Error(extent) on a cell outside the grid.
GriddedCounts aggregate_counts(std::span<const PlacementResult> placements,
                               std::span<const ResolvedRecord> records, const GridSpec& grid);

struct MethodCounts {
  std::int64_t admin3_deterministic = 0;
  std::int64_t single_cell_deterministic = 0;
  std::int64_t modeled = 0;
  std::int64_t fallback = 0;  // subset of modeled placed by sampling
};

struct RunResult {
  std::vector<ResolvedRecord> resolved;
  std::vector<RejectedRecord> rejected;
  AssignmentStats building_stats;
  MatrixBuild matrix;
  std::vector<SupportViolation> support_violations;
  std::vector<PlacementResult> placements;  // every resolved record, sorted by record_id
  MethodCounts method_counts;
  GriddedCounts counts;
  std::map<std::string, ValidationReport> validations;  // modeled admin2s
  EvaluationSummary evaluation;
  std::vector<std::string> warnings;
};

/// Ingest, resolve, weight, partition, solve each admin2, reintegrate,
/// aggregate. Errors carry the stage that raised them. Identical
/// (inputs, config, seed) yield identical results.
RunResult run_pipeline(const PipelineConfig& cfg);

/// Writes placements.csv, gridded_counts.csv, proportions_wide.csv,
/// proportions_long.csv, metrics.json, metrics.txt, cells.geojson, and
/// manifest.json into cfg.output_dir. Reruns over identical results
/// produce byte-identical files.
void export_outputs(const RunResult& result, const PipelineConfig& cfg);

struct TruthEvaluation {
  MetricsValues overall;
  std::int64_t support = 0;
  std::map<std::string, double> accuracy_by_method;
  std::map<std::string, std::int64_t> support_by_method;
};

/// Scores placements against known true cells (synthetic worlds keep
/// them). Throws Error(integrity) when a placement has no truth entry.
TruthEvaluation evaluate_against_truth(std::span<const PlacementResult> placements,
                                       const std::map<std::string, GridCellId>& truth);

}  // namespace gridspread

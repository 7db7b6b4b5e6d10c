// Copyright (c) 2026 gridspread contributors
// Licensed under Apache License 2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridspread/grid.hpp"

namespace gridspread {

/// Multi-class confusion counts over grid cells, true class by row,
/// predicted class by column.
struct ConfusionTable {
  std::vector<GridCellId> classes;  // ascending
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;

  std::int64_t total() const { return counts.sum(); }
  std::int64_t diagonal() const { return counts.trace(); }
};

/// Tallies aligned (true, predicted) sequences. Classes are the sorted
/// union of both. Throws Error(input) on length mismatch.
ConfusionTable confusion(std::span<const GridCellId> true_cells,
                         std::span<const GridCellId> predicted_cells);

/// Associative merge over the class union.
ConfusionTable merge(const ConfusionTable& a, const ConfusionTable& b);

enum class Averaging { weighted, macro };

const char* to_string(Averaging averaging);

struct MetricsValues {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Accuracy is trace over total; per-class precision/recall treat 0/0 as
/// 0; f1 is the per-class harmonic mean. Aggregation is support-weighted
/// by default, unweighted with Averaging::macro. Throws Error(input) on
/// an empty table.
MetricsValues metrics(const ConfusionTable& table, Averaging averaging = Averaging::weighted);

enum class ReportMode { modeled_only, combined };

const char* to_string(ReportMode mode);

struct MetricsReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  ReportMode mode = ReportMode::modeled_only;
  std::map<std::string, double> per_admin2;  // admin2 -> modeled validation accuracy
  std::int64_t support = 0;                  // evaluated record count
};

/// One admin2's validation outcome as produced by the modeling stage.
struct Admin2Validation {
  std::string admin2_id;
  ConfusionTable confusion;
  bool validated = false;
};

/// Deterministic placements enter combined metrics as correct
/// predictions of their own cell.
struct DeterministicTally {
  std::map<GridCellId, std::int64_t> counts;

  std::int64_t total() const;
  void add(GridCellId cell, std::int64_t n = 1);
};

struct EvaluationSummary {
  std::optional<MetricsReport> modeled_only;  // absent when no admin2 validated
  MetricsReport combined;
};

/// Merges the per-admin2 validation confusions into a modeled-only
/// report, then adds every deterministic placement to the diagonal for
/// the combined report. The per-admin2 accuracy list carries only
/// validated admin2s and is identical in both modes.
EvaluationSummary combined_report(std::span<const Admin2Validation> validations,
                                  const DeterministicTally& deterministic,
                                  Averaging averaging = Averaging::weighted);

}  // namespace gridspread

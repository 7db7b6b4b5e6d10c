// Copyright (c) 2026 gridspread contributors
// Licensed under Apache License 2.0

#include "gridspread/metrics.hpp"

#include <algorithm>
#include <set>

#include "gridspread/error.hpp"

namespace gridspread {
namespace {

std::map<GridCellId, Eigen::Index> class_positions(const std::vector<GridCellId>& classes) {
  std::map<GridCellId, Eigen::Index> pos;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    pos.emplace(classes[i], static_cast<Eigen::Index>(i));
  }
  return pos;
}

}  // namespace

const char* to_string(Averaging averaging) {
  switch (averaging) {
    case Averaging::weighted:
      return "weighted";
    case Averaging::macro:
      return "macro";
  }
  return "unknown";
}

const char* to_string(ReportMode mode) {
  switch (mode) {
    case ReportMode::modeled_only:
      return "modeled_only";
    case ReportMode::combined:
      return "combined";
  }
  return "unknown";
}

ConfusionTable confusion(std::span<const GridCellId> true_cells,
                         std::span<const GridCellId> predicted_cells) {
  if (true_cells.size() != predicted_cells.size()) {
    throw Error(ErrorKind::input, "confusion needs aligned sequences, got " +
                                      std::to_string(true_cells.size()) + " true and " +
                                      std::to_string(predicted_cells.size()) + " predicted");
  }
  std::set<GridCellId> seen(true_cells.begin(), true_cells.end());
  seen.insert(predicted_cells.begin(), predicted_cells.end());

  ConfusionTable table;
  table.classes.assign(seen.begin(), seen.end());
  const Eigen::Index k = static_cast<Eigen::Index>(table.classes.size());
  table.counts.setZero(k, k);
  const auto pos = class_positions(table.classes);
  for (std::size_t i = 0; i < true_cells.size(); ++i) {
    ++table.counts(pos.at(true_cells[i]), pos.at(predicted_cells[i]));
  }
  return table;
}

ConfusionTable merge(const ConfusionTable& a, const ConfusionTable& b) {
  std::set<GridCellId> seen(a.classes.begin(), a.classes.end());
  seen.insert(b.classes.begin(), b.classes.end());

  ConfusionTable table;
  table.classes.assign(seen.begin(), seen.end());
  const Eigen::Index k = static_cast<Eigen::Index>(table.classes.size());
  table.counts.setZero(k, k);
  const auto pos = class_positions(table.classes);
  auto accumulate = [&](const ConfusionTable& src) {
    for (std::size_t i = 0; i < src.classes.size(); ++i) {
      for (std::size_t j = 0; j < src.classes.size(); ++j) {
        table.counts(pos.at(src.classes[i]), pos.at(src.classes[j])) +=
            src.counts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  };
  accumulate(a);
  accumulate(b);
  return table;
}

MetricsValues metrics(const ConfusionTable& table, Averaging averaging) {
  const std::int64_t total = table.total();
  if (table.classes.empty() || total < 1) {
    throw Error(ErrorKind::input, "metrics need a confusion table with at least one record");
  }

  const Eigen::Index k = table.counts.rows();
  MetricsValues values;
  values.accuracy =
      static_cast<double>(table.diagonal()) / static_cast<double>(total);

  double precision_sum = 0.0;
  double recall_sum = 0.0;
  double f1_sum = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    const std::int64_t tp = table.counts(i, i);
    const std::int64_t predicted = table.counts.col(i).sum();
    const std::int64_t actual = table.counts.row(i).sum();
    const double precision =
        predicted > 0 ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    const double recall =
        actual > 0 ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0;
    const double f1 =
        precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    const double weight = averaging == Averaging::weighted
                              ? static_cast<double>(actual) / static_cast<double>(total)
                              : 1.0 / static_cast<double>(k);
    precision_sum += weight * precision;
    recall_sum += weight * recall;
    f1_sum += weight * f1;
  }
  values.precision = precision_sum;
  values.recall = recall_sum;
  values.f1 = f1_sum;
  return values;
}

std::int64_t DeterministicTally::total() const {
  std::int64_t sum = 0;
  for (const auto& [cell, n] : counts) sum += n;
  return sum;
}

void DeterministicTally::add(GridCellId cell, std::int64_t n) { counts[cell] += n; }

EvaluationSummary combined_report(std::span<const Admin2Validation> validations,
                                  const DeterministicTally& deterministic, Averaging averaging) {
  ConfusionTable modeled;
  std::map<std::string, double> per_admin2;
  bool any_validated = false;
  for (const Admin2Validation& v : validations) {
    if (!v.validated || v.confusion.total() < 1) continue;
    any_validated = true;
    modeled = merge(modeled, v.confusion);
    per_admin2[v.admin2_id] = metrics(v.confusion, averaging).accuracy;
  }

  EvaluationSummary summary;
  if (any_validated) {
    MetricsReport report;
    const MetricsValues values = metrics(modeled, averaging);
    report.accuracy = values.accuracy;
    report.precision = values.precision;
    report.recall = values.recall;
    report.f1 = values.f1;
    report.mode = ReportMode::modeled_only;
    report.per_admin2 = per_admin2;
    report.support = modeled.total();
    summary.modeled_only = report;
  }

  ConfusionTable combined = modeled;
  if (deterministic.total() > 0) {
    ConfusionTable diag;
    for (const auto& [cell, n] : deterministic.counts) {
      if (n > 0) diag.classes.push_back(cell);
    }
    const Eigen::Index k = static_cast<Eigen::Index>(diag.classes.size());
    diag.counts.setZero(k, k);
    const auto pos = class_positions(diag.classes);
    for (const auto& [cell, n] : deterministic.counts) {
      if (n > 0) diag.counts(pos.at(cell), pos.at(cell)) = n;
    }
    combined = merge(combined, diag);
  }

  summary.combined.mode = ReportMode::combined;
  summary.combined.per_admin2 = per_admin2;
  if (combined.total() > 0) {
    const MetricsValues values = metrics(combined, averaging);
    summary.combined.accuracy = values.accuracy;
    summary.combined.precision = values.precision;
    summary.combined.recall = values.recall;
    summary.combined.f1 = values.f1;
    summary.combined.support = combined.total();
  }
  return summary;
}

}  // namespace gridspread

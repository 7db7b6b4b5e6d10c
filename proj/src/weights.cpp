// Copyright (c) 2026 gridspread contributors
// Licensed under Apache License 2.0

#include "gridspread/weights.hpp"

#include <algorithm>
#include <ostream>

#include "gridspread/error.hpp"
#include "gridspread/util.hpp"

namespace gridspread {

double ProportionRow::value_at(GridCellId cell) const {
  auto it = std::lower_bound(cells.begin(), cells.end(), cell);
  if (it == cells.end() || *it != cell) return 0.0;
  return values[static_cast<std::size_t>(it - cells.begin())];
}

bool ProportionRow::supports(GridCellId cell) const {
  return std::binary_search(cells.begin(), cells.end(), cell);
}

ProportionMatrix::ProportionMatrix(std::map<std::string, ProportionRow> rows)
    : rows_(std::move(rows)) {}

const ProportionRow* ProportionMatrix::row(const std::string& admin2_id) const {
  auto it = rows_.find(admin2_id);
  return it == rows_.end() ? nullptr : &it->second;
}

bool ProportionMatrix::has_row(const std::string& admin2_id) const {
  return rows_.contains(admin2_id);
}

std::vector<GridCellId> ProportionMatrix::all_cells() const {
  std::set<GridCellId> cells;
  for (const auto& [id, row] : rows_) cells.insert(row.cells.begin(), row.cells.end());
  return {cells.begin(), cells.end()};
}

std::vector<BuildingAssignment> assign_buildings(std::span<const GeoPoint> buildings,
                                                 std::span<const AdminUnit> admin2_units,
                                                 const GridSpec& grid, double min_confidence,
                                                 AssignmentStats* stats) {
  AssignmentStats local;
  std::map<std::pair<std::string, GridCellId>, std::int64_t> counts;
  for (const GeoPoint& b : buildings) {
    const double confidence = b.confidence.value_or(1.0);
    if (confidence < min_confidence) {
      ++local.below_confidence;
      continue;
    }
    const std::optional<std::string> unit_id = point_in_admin(b, admin2_units);
    if (!unit_id) {
      ++local.outside_admin;
      continue;
    }
    GridCellId cell = point_to_cell(b, grid);
    ++counts[{*unit_id, cell}];
    ++local.included;
  }
  std::vector<BuildingAssignment> out;
  out.reserve(counts.size());
  for (const auto& [key, count] : counts) out.push_back({key.first, key.second, count});
  if (stats != nullptr) *stats = local;
  return out;
}

MatrixBuild build_proportion_matrix(std::span<const BuildingAssignment> assignments,
                                    std::span<const std::string> expected_admin2_ids) {
  std::map<std::string, std::map<GridCellId, std::int64_t>> grouped;
  for (const BuildingAssignment& a : assignments) {
    if (a.count < 1) {
      throw Error(ErrorKind::input, "building count for " + a.admin2_id + " in " +
                                        to_string(a.cell) + " must be at least 1, got " +
                                        std::to_string(a.count));
    }
    grouped[a.admin2_id][a.cell] += a.count;
  }

  std::map<std::string, ProportionRow> rows;
  for (const auto& [admin2_id, cells] : grouped) {
    std::int64_t total = 0;
    for (const auto& [cell, count] : cells) total += count;
    ProportionRow row;
    row.cells.reserve(cells.size());
    row.values.reserve(cells.size());
    for (const auto& [cell, count] : cells) {
      row.cells.push_back(cell);
      row.values.push_back(static_cast<double>(count) / static_cast<double>(total));
    }
    rows.emplace(admin2_id, std::move(row));
  }

  MatrixBuild build;
  build.matrix = ProportionMatrix(std::move(rows));
  for (const std::string& id : expected_admin2_ids) {
    if (!build.matrix.has_row(id)) build.excluded_admin2s.push_back(id);
  }
  std::sort(build.excluded_admin2s.begin(), build.excluded_admin2s.end());
  build.excluded_admin2s.erase(
      std::unique(build.excluded_admin2s.begin(), build.excluded_admin2s.end()),
      build.excluded_admin2s.end());
  return build;
}

std::set<std::string> single_cell_admins(const ProportionMatrix& matrix) {
  std::set<std::string> out;
  for (const auto& [id, row] : matrix.rows()) {
    if (row.single_cell()) out.insert(id);
  }
  return out;
}

void write_matrix_wide_csv(const ProportionMatrix& matrix, std::ostream& out) {
  const std::vector<GridCellId> cells = matrix.all_cells();
  out << "admin2_id";
  for (GridCellId cell : cells) out << ',' << to_string(cell);
  out << '\n';
  for (const auto& [id, row] : matrix.rows()) {
    out << id;
    for (GridCellId cell : cells) out << ',' << format_double(row.value_at(cell));
    out << '\n';
  }
}

void write_matrix_long_csv(const ProportionMatrix& matrix, std::ostream& out) {
  out << "admin2_id,grid_id,proportion\n";
  for (const auto& [id, row] : matrix.rows()) {
    for (std::size_t i = 0; i < row.cells.size(); ++i) {
      out << id << ',' << to_string(row.cells[i]) << ',' << format_double(row.values[i]) << '\n';
    }
  }
}

}  // namespace gridspread

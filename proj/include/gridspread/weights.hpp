// Copyright (c) 2026 gridspread contributors
// Licensed under Apache License 2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gridspread/geometry.hpp"
#include "gridspread/grid.hpp"

namespace gridspread {

/// Count of buildings landing in one (admin2, cell) pair.
struct BuildingAssignment {
  std::string admin2_id;
  GridCellId cell;
  std::int64_t count = 0;
};

/// One admin2's building shares over its nonzero cells; values align
/// with cells and sum to 1.
struct ProportionRow {
  std::vector<GridCellId> cells;  // ascending
  std::vector<double> values;

  bool single_cell() const { return cells.size() == 1; }
  double value_at(GridCellId cell) const;
  bool supports(GridCellId cell) const;
};

/// Sparse row-stochastic matrix of building shares: admin2 rows over
/// grid-cell columns. Rows with zero buildings are never present.
class ProportionMatrix {
public:
  ProportionMatrix() = default;
  explicit ProportionMatrix(std::map<std::string, ProportionRow> rows);

  const ProportionRow* row(const std::string& admin2_id) const;
  bool has_row(const std::string& admin2_id) const;
  const std::map<std::string, ProportionRow>& rows() const { return rows_; }
  std::size_t row_count() const { return rows_.size(); }

  /// Sorted union of all nonzero columns (the wide-export header).
  std::vector<GridCellId> all_cells() const;

private:
  std::map<std::string, ProportionRow> rows_;
};

struct AssignmentStats {
  std::int64_t included = 0;
  std::int64_t outside_admin = 0;
  std::int64_t below_confidence = 0;
};

/// Dual assignment: each building passing the confidence floor and
/// falling inside an admin2 polygon contributes 1 to exactly one
/// (admin2, cell) pair. Buildings outside every polygon are counted in
/// stats and dropped. Throws Error(extent) for an in-polygon building
/// outside the grid.
std::vector<BuildingAssignment> assign_buildings(std::span<const GeoPoint> buildings,
                                                 std::span<const AdminUnit> admin2_units,
                                                 const GridSpec& grid, double min_confidence,
                                                 AssignmentStats* stats = nullptr);

struct MatrixBuild {
  ProportionMatrix matrix;
  std::vector<std::string> excluded_admin2s;  // expected ids with zero buildings
};

/// Normalizes per-admin2 counts into proportions. Admin2 ids listed in
/// `expected_admin2_ids` but absent from the assignments come back in
/// the exclusion list instead of producing zero-filled rows.
MatrixBuild build_proportion_matrix(std::span<const BuildingAssignment> assignments,
                                    std::span<const std::string> expected_admin2_ids = {});

/// Rows whose support is exactly one cell (deterministic placement).
std::set<std::string> single_cell_admins(const ProportionMatrix& matrix);

/// Wide CSV: one row per admin2, one column per grid cell.
void write_matrix_wide_csv(const ProportionMatrix& matrix, std::ostream& out);

/// Long CSV: admin2_id,grid_id,proportion for every nonzero entry.
void write_matrix_long_csv(const ProportionMatrix& matrix, std::ostream& out);

}  // namespace gridspread

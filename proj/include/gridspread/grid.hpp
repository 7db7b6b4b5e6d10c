// Copyright (c) 2026 gridspread contributors
// Licensed under Apache License 2.0

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace gridspread {

/// Longitude/latitude point in WGS84 degrees, optionally carrying a
/// detection confidence in [0, 1].
struct GeoPoint {
  double lon = 0.0;
  double lat = 0.0;
  std::optional<double> confidence = std::nullopt;
};

/// Regular lattice of square cells anchored at a south-west origin.
/// Cells are half-open intervals [west, west+size) x [south, south+size),
/// indexed row-major from the origin.
struct GridSpec {
  double origin_lon = -180.0;
  double origin_lat = -90.0;
  double cell_size = 0.5;
  std::int64_t n_cols = 720;
  std::int64_t n_rows = 360;

  std::int64_t cell_count() const { return n_cols * n_rows; }
  double east_edge() const { return origin_lon + static_cast<double>(n_cols) * cell_size; }
  double north_edge() const { return origin_lat + static_cast<double>(n_rows) * cell_size; }

  /// Throws Error(config) when the lattice parameters are out of range.
  void validate() const;
};

/// Stable identifier of one grid cell; canonical text form "grid_<index>"
/// with index = row * n_cols + col.
struct GridCellId {
  std::int64_t index = 0;
  auto operator<=>(const GridCellId&) const = default;
};

std::string to_string(GridCellId id);

/// Parses the canonical "grid_<index>" form. Returns nullopt on anything
/// else (sign, spaces, leading zeros beyond "grid_0...", garbage).
std::optional<GridCellId> parse_cell_id(std::string_view text);

std::int64_t cell_row(GridCellId id, const GridSpec& grid);
std::int64_t cell_col(GridCellId id, const GridSpec& grid);
GridCellId cell_at(std::int64_t row, std::int64_t col, const GridSpec& grid);

bool in_extent(const GeoPoint& p, const GridSpec& grid);

/// Maps a point to the cell whose half-open rectangle contains it.
/// Throws Error(extent) naming the offending coordinate when the point
/// lies outside the lattice.
GridCellId point_to_cell(const GeoPoint& p, const GridSpec& grid);

/// Axis-aligned rectangle of one cell in degrees.
struct CellRect {
  double west = 0.0;
  double south = 0.0;
  double east = 0.0;
  double north = 0.0;
};

CellRect cell_rect(GridCellId id, const GridSpec& grid);

}  // namespace gridspread

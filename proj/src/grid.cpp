// Copyright (c) 2026 gridspread contributors
// Licensed under Apache License 2.0

#include "gridspread/grid.hpp"

#include <charconv>
#include <cmath>

#include "gridspread/error.hpp"
#include "gridspread/util.hpp"

namespace gridspread {

void GridSpec::validate() const {
  if (!(cell_size > 0.0)) {
    throw Error(ErrorKind::config, "grid cell_size must be positive, got " + format_double(cell_size));
  }
  if (origin_lon < -180.0 || origin_lon >= 180.0) {
    throw Error(ErrorKind::config, "grid origin_lon " + format_double(origin_lon) + " outside [-180, 180)");
  }
  if (origin_lat < -90.0 || origin_lat >= 90.0) {
    throw Error(ErrorKind::config, "grid origin_lat " + format_double(origin_lat) + " outside [-90, 90)");
  }
  if (n_cols <= 0 || n_rows <= 0) {
    throw Error(ErrorKind::config, "grid must have positive column and row counts");
  }
  if (static_cast<double>(n_cols) * cell_size > 360.0 + cell_size) {
    throw Error(ErrorKind::config, "grid spans more than 360 degrees of longitude");
  }
  if (static_cast<double>(n_rows) * cell_size > 180.0 + cell_size) {
    throw Error(ErrorKind::config, "grid spans more than 180 degrees of latitude");
  }
}

std::string to_string(GridCellId id) {
  return "grid_" + std::to_string(id.index);
}

std::optional<GridCellId> parse_cell_id(std::string_view text) {
  constexpr std::string_view prefix = "grid_";
  if (text.size() <= prefix.size() || text.substr(0, prefix.size()) != prefix) {
    return std::nullopt;
  }
  std::string_view digits = text.substr(prefix.size());
  if (digits.size() > 1 && digits.front() == '0') {
    return std::nullopt;
  }
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || value < 0) {
    return std::nullopt;
  }
  return GridCellId{value};
}

std::int64_t cell_row(GridCellId id, const GridSpec& grid) {
  return id.index / grid.n_cols;
}

std::int64_t cell_col(GridCellId id, const GridSpec& grid) {
  return id.index % grid.n_cols;
}

GridCellId cell_at(std::int64_t row, std::int64_t col, const GridSpec& grid) {
  return GridCellId{row * grid.n_cols + col};
}

bool in_extent(const GeoPoint& p, const GridSpec& grid) {
  return p.lon >= grid.origin_lon && p.lon < grid.east_edge() &&
         p.lat >= grid.origin_lat && p.lat < grid.north_edge();
}

GridCellId point_to_cell(const GeoPoint& p, const GridSpec& grid) {
  if (!in_extent(p, grid)) {
    throw Error(ErrorKind::extent,
                "point (lon=" + format_double(p.lon) + ", lat=" + format_double(p.lat) +
                    ") outside grid extent [" + format_double(grid.origin_lon) + ", " +
                    format_double(grid.east_edge()) + ") x [" + format_double(grid.origin_lat) +
                    ", " + format_double(grid.north_edge()) + ")");
  }
  auto col = static_cast<std::int64_t>(std::floor((p.lon - grid.origin_lon) / grid.cell_size));
  auto row = static_cast<std::int64_t>(std::floor((p.lat - grid.origin_lat) / grid.cell_size));
  // floor() can land one cell high when the point sits a hair under an
  // edge; clamp keeps the index inside the validated extent.
  if (col >= grid.n_cols) col = grid.n_cols - 1;
  if (row >= grid.n_rows) row = grid.n_rows - 1;
  if (col < 0) col = 0;
  if (row < 0) row = 0;
  return cell_at(row, col, grid);
}

CellRect cell_rect(GridCellId id, const GridSpec& grid) {
  double west = grid.origin_lon + static_cast<double>(cell_col(id, grid)) * grid.cell_size;
  double south = grid.origin_lat + static_cast<double>(cell_row(id, grid)) * grid.cell_size;
  return CellRect{west, south, west + grid.cell_size, south + grid.cell_size};
}

}  // namespace gridspread

// Copyright (c) 2026 gridspread contributors
// Licensed under Apache License 2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gridspread/geometry.hpp"
#include "gridspread/grid.hpp"

namespace gridspread {

/// Reads a FeatureCollection of Polygon/MultiPolygon features whose
/// properties carry `country`, `level`, `name`, `id`, and `parent_id`.
/// Geometries are validated on load. Throws Error(input) on structural
/// problems, naming the offending feature.
std::vector<AdminUnit> load_admin_geojson(std::istream& in, const std::string& context);

/// FeatureCollection with the same property layout load_admin_geojson
/// expects.
std::string admin_units_to_geojson(std::span<const AdminUnit> units);

/// FeatureCollection of occupied grid-cell rectangles, each carrying its
/// grid_id and total displacement count.
std::string cells_to_geojson(const std::map<GridCellId, std::int64_t>& cell_totals,
                             const GridSpec& grid);

}  // namespace gridspread

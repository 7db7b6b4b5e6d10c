// Copyright (c) 2026 gridspread contributors
// Licensed under Apache License 2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridspread/grid.hpp"

namespace gridspread {

enum class AdminLevel { admin0 = 0, admin1 = 1, admin2 = 2, admin3 = 3 };

const char* to_string(AdminLevel level);
std::optional<AdminLevel> parse_admin_level(std::string_view text);

/// Closed ring of vertices (first == last) in lon/lat degrees.
using Ring = std::vector<GeoPoint>;

struct Polygon {
  Ring outer;
  std::vector<Ring> holes;
};

struct MultiPolygon {
  std::vector<Polygon> polygons;
};

/// Named administrative polygon within the admin0..admin3 hierarchy.
struct AdminUnit {
  std::string country;       // ISO-3166 alpha-3
  AdminLevel level = AdminLevel::admin2;
  std::string name;
  std::string canonical_id;
  std::string parent_id;     // empty only for admin0
  MultiPolygon geometry;
};

struct BoundingBox {
  double min_lon = 0.0;
  double min_lat = 0.0;
  double max_lon = 0.0;
  double max_lat = 0.0;
};

/// Throws Error(geometry) when any ring has fewer than 3 distinct
/// vertices or the multipolygon is empty.
void validate_geometry(const MultiPolygon& geom, const std::string& context);

BoundingBox bounds(const MultiPolygon& geom);

/// Even-odd (ray casting) containment over all rings; points exactly on
/// an edge count as contained.
bool contains(const MultiPolygon& geom, const GeoPoint& p);

bool on_boundary(const MultiPolygon& geom, const GeoPoint& p);

/// Planar area of one closed ring (absolute shoelace value).
double ring_area(const Ring& ring);

/// Area of the intersection between a multipolygon and an axis-aligned
/// rectangle, in squared degrees. Holes subtract from their polygon.
double rect_intersection_area(const MultiPolygon& geom, const CellRect& rect);

/// Unit containing the point, among units of one administrative level.
/// Boundary points shared by several units resolve to the unit with the
/// lexicographically smallest canonical_id.
std::optional<std::string> point_in_admin(const GeoPoint& p, std::span<const AdminUnit> units);

/// Every grid cell whose rectangle intersects the unit's geometry with
/// positive area, in ascending cell order.
std::vector<GridCellId> cells_intersecting(const AdminUnit& unit, const GridSpec& grid);

/// Same cells paired with their intersection areas (used for the
/// area-weighted placement fallback).
std::vector<std::pair<GridCellId, double>> cell_intersection_areas(const AdminUnit& unit,
                                                                   const GridSpec& grid);

}  // namespace gridspread

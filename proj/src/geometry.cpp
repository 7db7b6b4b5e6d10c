// Copyright (c) 2026 gridspread contributors
// Licensed under Apache License 2.0

#include "gridspread/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "gridspread/error.hpp"

namespace gridspread {

const char* to_string(AdminLevel level) {
  switch (level) {
    case AdminLevel::admin0: return "admin0";
    case AdminLevel::admin1: return "admin1";
    case AdminLevel::admin2: return "admin2";
    case AdminLevel::admin3: return "admin3";
  }
  return "admin?";
}

std::optional<AdminLevel> parse_admin_level(std::string_view text) {
  if (text == "admin0" || text == "0") return AdminLevel::admin0;
  if (text == "admin1" || text == "1") return AdminLevel::admin1;
  if (text == "admin2" || text == "2") return AdminLevel::admin2;
  if (text == "admin3" || text == "3") return AdminLevel::admin3;
  return std::nullopt;
}

namespace {

// Number of distinct vertices, ignoring the closing duplicate.
std::size_t distinct_vertices(const Ring& ring) {
  std::set<std::pair<double, double>> seen;
  for (const auto& p : ring) {
    seen.insert({p.lon, p.lat});
  }
  return seen.size();
}

void validate_ring(const Ring& ring, const std::string& context) {
  if (ring.empty()) {
    throw Error(ErrorKind::geometry, "empty ring in " + context);
  }
  if (ring.front().lon != ring.back().lon || ring.front().lat != ring.back().lat) {
    throw Error(ErrorKind::geometry, "unclosed ring in " + context);
  }
  if (distinct_vertices(ring) < 3) {
    throw Error(ErrorKind::geometry,
                "degenerate ring (fewer than 3 distinct vertices) in " + context);
  }
}

bool point_on_segment(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) {
  double cross = (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
  if (cross != 0.0) return false;
  return p.lon >= std::min(a.lon, b.lon) && p.lon <= std::max(a.lon, b.lon) &&
         p.lat >= std::min(a.lat, b.lat) && p.lat <= std::max(a.lat, b.lat);
}

bool ring_crossings_odd_toggle(const Ring& ring, const GeoPoint& p, bool inside) {
  // Standard even-odd crossing count; the half-open vertex rule
  // (a.lat > p.lat) != (b.lat > p.lat) avoids double-counting vertices.
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[i + 1];
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      double x_at = a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
      if (p.lon < x_at) inside = !inside;
    }
  }
  return inside;
}

bool ring_on_boundary(const Ring& ring, const GeoPoint& p) {
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    if (point_on_segment(p, ring[i], ring[i + 1])) return true;
  }
  return false;
}

// Sutherland-Hodgman clip of one ring against an axis-aligned half-plane.
// `keep` decides which side survives, `intersect` projects onto the edge.
template <typename Keep, typename Intersect>
std::vector<GeoPoint> clip_half_plane(const std::vector<GeoPoint>& poly, Keep keep,
                                      Intersect intersect) {
  std::vector<GeoPoint> out;
  if (poly.empty()) return out;
  out.reserve(poly.size() + 4);
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const GeoPoint& cur = poly[i];
    const GeoPoint& prev = poly[(i + poly.size() - 1) % poly.size()];
    bool cur_in = keep(cur);
    bool prev_in = keep(prev);
    if (cur_in) {
      if (!prev_in) out.push_back(intersect(prev, cur));
      out.push_back(cur);
    } else if (prev_in) {
      out.push_back(intersect(prev, cur));
    }
  }
  return out;
}

GeoPoint cut_at_lon(const GeoPoint& a, const GeoPoint& b, double lon) {
  double t = (lon - a.lon) / (b.lon - a.lon);
  return GeoPoint{lon, a.lat + t * (b.lat - a.lat), {}};
}

GeoPoint cut_at_lat(const GeoPoint& a, const GeoPoint& b, double lat) {
  double t = (lat - a.lat) / (b.lat - a.lat);
  return GeoPoint{a.lon + t * (b.lon - a.lon), lat, {}};
}

double signed_area(const std::vector<GeoPoint>& poly) {
  double acc = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const GeoPoint& a = poly[i];
    const GeoPoint& b = poly[(i + 1) % poly.size()];
    acc += a.lon * b.lat - b.lon * a.lat;
  }
  return acc / 2.0;
}

double ring_rect_area(const Ring& ring, const CellRect& rect) {
  // Open form of the ring (drop the closing duplicate).
  std::vector<GeoPoint> poly(ring.begin(), ring.end() - 1);
  poly = clip_half_plane(
      poly, [&](const GeoPoint& p) { return p.lon >= rect.west; },
      [&](const GeoPoint& a, const GeoPoint& b) { return cut_at_lon(a, b, rect.west); });
  poly = clip_half_plane(
      poly, [&](const GeoPoint& p) { return p.lon <= rect.east; },
      [&](const GeoPoint& a, const GeoPoint& b) { return cut_at_lon(a, b, rect.east); });
  poly = clip_half_plane(
      poly, [&](const GeoPoint& p) { return p.lat >= rect.south; },
      [&](const GeoPoint& a, const GeoPoint& b) { return cut_at_lat(a, b, rect.south); });
  poly = clip_half_plane(
      poly, [&](const GeoPoint& p) { return p.lat <= rect.north; },
      [&](const GeoPoint& a, const GeoPoint& b) { return cut_at_lat(a, b, rect.north); });
  if (poly.size() < 3) return 0.0;
  return std::abs(signed_area(poly));
}

constexpr double kAreaEps = 1e-12;

}  // namespace

void validate_geometry(const MultiPolygon& geom, const std::string& context) {
  if (geom.polygons.empty()) {
    throw Error(ErrorKind::geometry, "empty geometry in " + context);
  }
  for (const Polygon& poly : geom.polygons) {
    validate_ring(poly.outer, context);
    for (const Ring& hole : poly.holes) {
      validate_ring(hole, context);
    }
  }
}

BoundingBox bounds(const MultiPolygon& geom) {
  BoundingBox box{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity()};
  for (const Polygon& poly : geom.polygons) {
    for (const GeoPoint& p : poly.outer) {
      box.min_lon = std::min(box.min_lon, p.lon);
      box.min_lat = std::min(box.min_lat, p.lat);
      box.max_lon = std::max(box.max_lon, p.lon);
      box.max_lat = std::max(box.max_lat, p.lat);
    }
  }
  return box;
}

bool contains(const MultiPolygon& geom, const GeoPoint& p) {
  bool inside = false;
  for (const Polygon& poly : geom.polygons) {
    inside = ring_crossings_odd_toggle(poly.outer, p, inside);
    for (const Ring& hole : poly.holes) {
      inside = ring_crossings_odd_toggle(hole, p, inside);
    }
  }
  if (inside) return true;
  return on_boundary(geom, p);
}

bool on_boundary(const MultiPolygon& geom, const GeoPoint& p) {
  for (const Polygon& poly : geom.polygons) {
    if (ring_on_boundary(poly.outer, p)) return true;
    for (const Ring& hole : poly.holes) {
      if (ring_on_boundary(hole, p)) return true;
    }
  }
  return false;
}

double ring_area(const Ring& ring) {
  std::vector<GeoPoint> poly(ring.begin(), ring.end() - 1);
  return std::abs(signed_area(poly));
}

double rect_intersection_area(const MultiPolygon& geom, const CellRect& rect) {
  double total = 0.0;
  for (const Polygon& poly : geom.polygons) {
    double area = ring_rect_area(poly.outer, rect);
    for (const Ring& hole : poly.holes) {
      area -= ring_rect_area(hole, rect);
    }
    total += std::max(area, 0.0);
  }
  return total;
}

std::optional<std::string> point_in_admin(const GeoPoint& p, std::span<const AdminUnit> units) {
  const std::string* best = nullptr;
  for (const AdminUnit& unit : units) {
    validate_geometry(unit.geometry, "admin unit '" + unit.canonical_id + "'");
    if (!contains(unit.geometry, p)) continue;
    if (best == nullptr || unit.canonical_id < *best) {
      best = &unit.canonical_id;
    }
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

std::vector<std::pair<GridCellId, double>> cell_intersection_areas(const AdminUnit& unit,
                                                                   const GridSpec& grid) {
  validate_geometry(unit.geometry, "admin unit '" + unit.canonical_id + "'");
  BoundingBox box = bounds(unit.geometry);
  auto col_lo = static_cast<std::int64_t>(std::floor((box.min_lon - grid.origin_lon) / grid.cell_size));
  auto col_hi = static_cast<std::int64_t>(std::floor((box.max_lon - grid.origin_lon) / grid.cell_size));
  auto row_lo = static_cast<std::int64_t>(std::floor((box.min_lat - grid.origin_lat) / grid.cell_size));
  auto row_hi = static_cast<std::int64_t>(std::floor((box.max_lat - grid.origin_lat) / grid.cell_size));
  col_lo = std::clamp<std::int64_t>(col_lo, 0, grid.n_cols - 1);
  col_hi = std::clamp<std::int64_t>(col_hi, 0, grid.n_cols - 1);
  row_lo = std::clamp<std::int64_t>(row_lo, 0, grid.n_rows - 1);
  row_hi = std::clamp<std::int64_t>(row_hi, 0, grid.n_rows - 1);

  std::vector<std::pair<GridCellId, double>> out;
  for (std::int64_t row = row_lo; row <= row_hi; ++row) {
    for (std::int64_t col = col_lo; col <= col_hi; ++col) {
      GridCellId id = cell_at(row, col, grid);
      double area = rect_intersection_area(unit.geometry, cell_rect(id, grid));
      if (area > kAreaEps) {
        out.emplace_back(id, area);
      }
    }
  }
  return out;
}

std::vector<GridCellId> cells_intersecting(const AdminUnit& unit, const GridSpec& grid) {
  std::vector<GridCellId> cells;
  for (const auto& [id, area] : cell_intersection_areas(unit, grid)) {
    cells.push_back(id);
  }
  return cells;
}

}  // namespace gridspread

// Copyright (c) 2026 gridspread contributors
// Licensed under Apache License 2.0

#include "gridspread/geojson.hpp"

#include <istream>

#include "gridspread/error.hpp"
#include "json.hpp"

namespace gridspread {
namespace {

using nlohmann::json;

Ring parse_ring(const json& coords, const std::string& context) {
  if (!coords.is_array() || coords.size() < 4) {
    throw Error(ErrorKind::input, context + ": ring needs at least 4 positions");
  }
  Ring ring;
  ring.reserve(coords.size());
  for (const json& position : coords) {
    if (!position.is_array() || position.size() < 2 || !position[0].is_number() ||
        !position[1].is_number()) {
      throw Error(ErrorKind::input, context + ": positions must be [lon, lat] numbers");
    }
    ring.push_back({position[0].get<double>(), position[1].get<double>(), std::nullopt});
  }
  return ring;
}

Polygon parse_polygon(const json& rings, const std::string& context) {
  if (!rings.is_array() || rings.empty()) {
    throw Error(ErrorKind::input, context + ": polygon needs at least an outer ring");
  }
  Polygon polygon;
  polygon.outer = parse_ring(rings[0], context);
  for (std::size_t i = 1; i < rings.size(); ++i) {
    polygon.holes.push_back(parse_ring(rings[i], context));
  }
  return polygon;
}

json ring_to_json(const Ring& ring) {
  json coords = json::array();
  for (const GeoPoint& p : ring) coords.push_back(json::array({p.lon, p.lat}));
  return coords;
}

json polygon_to_json(const Polygon& polygon) {
  json rings = json::array();
  rings.push_back(ring_to_json(polygon.outer));
  for (const Ring& hole : polygon.holes) rings.push_back(ring_to_json(hole));
  return rings;
}

std::string property_string(const json& properties, const std::string& key) {
  auto it = properties.find(key);
  if (it == properties.end() || it->is_null()) return {};
  if (!it->is_string()) {
    throw Error(ErrorKind::input, "property \"" + key + "\" must be a string");
  }
  return it->get<std::string>();
}

}  // namespace

std::vector<AdminUnit> load_admin_geojson(std::istream& in, const std::string& context) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::input, context + ": " + e.what());
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array()) {
    throw Error(ErrorKind::input, context + ": expected a FeatureCollection with features");
  }

  std::vector<AdminUnit> units;
  std::size_t feature_index = 0;
  for (const json& feature : doc["features"]) {
    const std::string feature_ctx =
        context + " feature " + std::to_string(feature_index++);
    if (!feature.is_object() || feature.value("type", "") != "Feature") {
      throw Error(ErrorKind::input, feature_ctx + ": expected a Feature object");
    }
    const json properties = feature.value("properties", json::object());

    AdminUnit unit;
    unit.canonical_id = property_string(properties, "id");
    const std::string unit_ctx =
        unit.canonical_id.empty() ? feature_ctx : feature_ctx + " (" + unit.canonical_id + ")";
    if (unit.canonical_id.empty()) {
      throw Error(ErrorKind::input, unit_ctx + ": missing id property");
    }
    unit.country = property_string(properties, "country");
    unit.name = property_string(properties, "name");
    unit.parent_id = property_string(properties, "parent_id");
    const std::string level_text = property_string(properties, "level");
    const auto level = parse_admin_level(level_text);
    if (!level) {
      throw Error(ErrorKind::input,
                  unit_ctx + ": unknown admin level \"" + level_text + "\"");
    }
    unit.level = *level;

    if (!feature.contains("geometry") || !feature["geometry"].is_object()) {
      throw Error(ErrorKind::input, unit_ctx + ": missing geometry");
    }
    const json& geometry = feature["geometry"];
    const std::string geom_type = geometry.value("type", "");
    const json coords = geometry.value("coordinates", json::array());
    if (geom_type == "Polygon") {
      unit.geometry.polygons.push_back(parse_polygon(coords, unit_ctx));
    } else if (geom_type == "MultiPolygon") {
      for (const json& polygon : coords) {
        unit.geometry.polygons.push_back(parse_polygon(polygon, unit_ctx));
      }
    } else {
      throw Error(ErrorKind::input,
                  unit_ctx + ": unsupported geometry type \"" + geom_type + "\"");
    }
    validate_geometry(unit.geometry, unit.canonical_id);
    units.push_back(std::move(unit));
  }
  return units;
}

std::string admin_units_to_geojson(std::span<const AdminUnit> units) {
  json features = json::array();
  for (const AdminUnit& unit : units) {
    json geometry;
    if (unit.geometry.polygons.size() == 1) {
      geometry["type"] = "Polygon";
      geometry["coordinates"] = polygon_to_json(unit.geometry.polygons.front());
    } else {
      geometry["type"] = "MultiPolygon";
      json polygons = json::array();
      for (const Polygon& polygon : unit.geometry.polygons) {
        polygons.push_back(polygon_to_json(polygon));
      }
      geometry["coordinates"] = polygons;
    }
    json properties;
    properties["country"] = unit.country;
    properties["level"] = to_string(unit.level);
    properties["name"] = unit.name;
    properties["id"] = unit.canonical_id;
    if (unit.parent_id.empty()) {
      properties["parent_id"] = nullptr;
    } else {
      properties["parent_id"] = unit.parent_id;
    }
    json feature;
    feature["type"] = "Feature";
    feature["properties"] = properties;
    feature["geometry"] = geometry;
    features.push_back(feature);
  }
  json doc;
  doc["type"] = "FeatureCollection";
  doc["features"] = features;
  return doc.dump(2) + "\n";
}

std::string cells_to_geojson(const std::map<GridCellId, std::int64_t>& cell_totals,
                             const GridSpec& grid) {
  json features = json::array();
  for (const auto& [cell, count] : cell_totals) {
    if (count <= 0) continue;
    const CellRect rect = cell_rect(cell, grid);
    json geometry;
    geometry["type"] = "Polygon";
    geometry["coordinates"] = json::array(
        {json::array({json::array({rect.west, rect.south}), json::array({rect.east, rect.south}),
                      json::array({rect.east, rect.north}), json::array({rect.west, rect.north}),
                      json::array({rect.west, rect.south})})});
    json properties;
    properties["grid_id"] = to_string(cell);
    properties["count"] = count;
    json feature;
    feature["type"] = "Feature";
    feature["properties"] = properties;
    feature["geometry"] = geometry;
    features.push_back(feature);
  }
  json doc;
  doc["type"] = "FeatureCollection";
  doc["features"] = features;
  return doc.dump(2) + "\n";
}

}  // namespace gridspread

// CSV and GeoJSON readers and writers: round trips, quoting, line
// endings, and rejection of malformed inputs.

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "gridspread/csv.hpp"
#include "gridspread/error.hpp"
#include "gridspread/geojson.hpp"
#include "json.hpp"

using namespace gridspread;

namespace {

std::vector<std::vector<std::string>> parse(const std::string& text) {
  std::istringstream in(text);
  return read_csv(in, "test");
}

template <typename Loader>
auto load(const Loader& loader, const std::string& text) {
  std::istringstream in(text);
  return loader(in, "test");
}

Ring closed_square(double west, double south, double size) {
  return {{west, south, {}},
          {west + size, south, {}},
          {west + size, south + size, {}},
          {west, south + size, {}},
          {west, south, {}}};
}

}  // namespace

TEST_CASE("read_csv handles quoting, CRLF, and blank lines") {
  CHECK(parse("a,b\nc,d\n") ==
        std::vector<std::vector<std::string>>{{"a", "b"}, {"c", "d"}});
  CHECK(parse("a,b\r\nc,d\r\n") ==
        std::vector<std::vector<std::string>>{{"a", "b"}, {"c", "d"}});
  CHECK(parse("a,b") == std::vector<std::vector<std::string>>{{"a", "b"}});
  CHECK(parse("a\n\n\nb\n") == std::vector<std::vector<std::string>>{{"a"}, {"b"}});
  CHECK(parse("").empty());

  // Quoted separators, embedded newlines, and doubled quotes.
  CHECK(parse("\"x,y\",z\n") == std::vector<std::vector<std::string>>{{"x,y", "z"}});
  CHECK(parse("\"he said \"\"hi\"\"\",\"a\nb\"\n") ==
        std::vector<std::vector<std::string>>{{"he said \"hi\"", "a\nb"}});

  // Trailing and leading empty fields survive.
  CHECK(parse("a,\n") == std::vector<std::vector<std::string>>{{"a", ""}});
  CHECK(parse(",a\n") == std::vector<std::vector<std::string>>{{"", "a"}});
  CHECK(parse(",\n") == std::vector<std::vector<std::string>>{{"", ""}});

  CHECK_THROWS_AS(parse("\"unterminated\n"), Error);
}

TEST_CASE("write_csv_row quotes exactly when needed and round-trips") {
  std::ostringstream out;
  write_csv_row(out, std::vector<std::string>{"plain", "with,comma", "with\"quote", "multi\nline"});
  CHECK(out.str() == "plain,\"with,comma\",\"with\"\"quote\",\"multi\nline\"\n");

  const auto rows = parse(out.str());
  REQUIRE(rows.size() == 1);
  CHECK(rows[0] == std::vector<std::string>{"plain", "with,comma", "with\"quote", "multi\nline"});
}

TEST_CASE("records survive a write-load round trip") {
  DisplacementRecord a;
  a.record_id = "r1";
  a.origin_country = "TST";
  a.admin1_raw = "North";
  a.admin2_raw = "Alpha, the big one";
  a.admin3_raw = "Sville";
  a.year = 2013;
  a.attributes["gender"] = "f";
  a.attributes["ethnic_group"] = "alfa";
  DisplacementRecord b;
  b.record_id = "r2";
  b.origin_country = "TST";
  b.year = 2014;
  b.attributes["age_group"] = "18-59";

  std::ostringstream out;
  const std::vector<DisplacementRecord> records = {a, b};
  write_records_csv(records, out);

  const auto loaded = load(load_records_csv, out.str());
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].record_id == "r1");
  CHECK(loaded[0].admin2_raw == "Alpha, the big one");
  CHECK(loaded[0].admin3_raw == "Sville");
  CHECK(loaded[0].year == 2013);
  CHECK(loaded[0].attributes == a.attributes);
  CHECK(loaded[1].record_id == "r2");
  CHECK(loaded[1].admin1_raw.empty());
  CHECK(loaded[1].attributes == b.attributes);  // empty cells stay absent
}

TEST_CASE("record loading rejects malformed tables") {
  CHECK_THROWS_AS(load(load_records_csv, ""), Error);
  CHECK_THROWS_AS(load(load_records_csv, "record_id,year\nr1,2000\n"), Error);
  CHECK_THROWS_AS(
      load(load_records_csv, "record_id,origin_country,year\n,TST,2000\n"), Error);
  CHECK_THROWS_AS(
      load(load_records_csv, "record_id,origin_country,year\nr1,TST,2000\nr1,TST,2001\n"),
      Error);
  CHECK_THROWS_AS(
      load(load_records_csv, "record_id,origin_country,year\nr1,TST,soon\n"), Error);
  CHECK_THROWS_AS(load(load_records_csv, "record_id,origin_country,year\nr1,TST\n"), Error);
}

TEST_CASE("buildings round-trip with optional confidence") {
  std::vector<GeoPoint> buildings = {{12.25, -3.5, 0.75}, {0.125, 0.0625, std::nullopt}};
  std::ostringstream out;
  write_buildings_csv(buildings, out);
  const auto loaded = load(load_buildings_csv, out.str());
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].lon == 12.25);
  CHECK(loaded[0].lat == -3.5);
  CHECK(loaded[0].confidence == 0.75);
  CHECK(loaded[1].lon == 0.125);
  CHECK_FALSE(loaded[1].confidence.has_value());

  CHECK_THROWS_AS(load(load_buildings_csv, "latitude,longitude\nnorth,0\n"), Error);
  CHECK_THROWS_AS(load(load_buildings_csv, "latitude,longitude\n0,181\n"), Error);
  CHECK_THROWS_AS(load(load_buildings_csv, "latitude,longitude\n91,0\n"), Error);
  CHECK_THROWS_AS(
      load(load_buildings_csv, "latitude,longitude,confidence\n0,0,1.5\n"), Error);
  CHECK_THROWS_AS(load(load_buildings_csv, "latitude\n0\n"), Error);
}

TEST_CASE("settlements round-trip and reject empty names") {
  std::vector<Settlement> settlements = {{"Sville", {0.5, 0.25, {}}, "TST-A"},
                                         {"Open town", {1.5, 0.75, {}}, ""}};
  std::ostringstream out;
  write_settlements_csv(settlements, out);
  const auto loaded = load(load_settlements_csv, out.str());
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].name == "Sville");
  CHECK(loaded[0].location.lon == 0.5);
  CHECK(loaded[0].location.lat == 0.25);
  CHECK(loaded[0].admin2_id == "TST-A");
  CHECK(loaded[1].name == "Open town");
  CHECK(loaded[1].admin2_id.empty());

  CHECK_THROWS_AS(load(load_settlements_csv, "name,latitude,longitude\n,0,0\n"), Error);
  // admin2_id is optional; the loader accepts its absence.
  const auto bare = load(load_settlements_csv, "name,latitude,longitude\nX,0,0\n");
  REQUIRE(bare.size() == 1);
  CHECK(bare[0].admin2_id.empty());
}

TEST_CASE("truth maps round-trip through grid ids") {
  std::map<std::string, GridCellId> truth = {{"r1", GridCellId{0}},
                                             {"r2", GridCellId{12345}}};
  std::ostringstream out;
  write_truth_csv(truth, out);
  CHECK(out.str() == "record_id,grid_id\nr1,grid_0\nr2,grid_12345\n");
  CHECK(load(load_truth_csv, out.str()) == truth);

  CHECK_THROWS_AS(load(load_truth_csv, "record_id,grid_id\nr1,cell_7\n"), Error);
  CHECK_THROWS_AS(load(load_truth_csv, "record_id,grid_id\nr1,grid_1\nr1,grid_2\n"), Error);
}

TEST_CASE("placements round-trip every method and fallback flag") {
  std::vector<PlacementResult> placements = {
      {"r1", GridCellId{4}, PlacementMethod::admin3_deterministic, 1.0, false},
      {"r2", GridCellId{9}, PlacementMethod::single_cell_deterministic, 1.0, false},
      {"r3", GridCellId{2}, PlacementMethod::modeled, 0.625, false},
      {"r4", GridCellId{7}, PlacementMethod::modeled, 0.25, true},
  };
  std::ostringstream out;
  write_placements_csv(placements, out);
  const auto loaded = load(load_placements_csv, out.str());
  REQUIRE(loaded.size() == 4);
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    CHECK(loaded[i].record_id == placements[i].record_id);
    CHECK(loaded[i].cell == placements[i].cell);
    CHECK(loaded[i].method == placements[i].method);
    CHECK(loaded[i].score == placements[i].score);
    CHECK(loaded[i].fallback == placements[i].fallback);
  }

  const std::string header = "record_id,grid_id,method,score,fallback\n";
  CHECK_THROWS_AS(load(load_placements_csv, header + "r1,grid_1,guessed,1,false\n"), Error);
  CHECK_THROWS_AS(load(load_placements_csv, header + "r1,grid_1,modeled,1,maybe\n"), Error);
  CHECK_THROWS_AS(load(load_placements_csv, header + "r1,grid_x,modeled,1,false\n"), Error);
  CHECK_THROWS_AS(load(load_placements_csv, header + "r1,grid_1,modeled,best,false\n"), Error);
}

TEST_CASE("every writer emits LF-only output") {
  std::ostringstream records_out, buildings_out, settlements_out, truth_out, placements_out;
  DisplacementRecord r;
  r.record_id = "r1";
  r.origin_country = "TST";
  r.year = 2000;
  write_records_csv(std::vector<DisplacementRecord>{r}, records_out);
  write_buildings_csv(std::vector<GeoPoint>{{0.0, 0.0, 0.5}}, buildings_out);
  write_settlements_csv(std::vector<Settlement>{{"S", {0.0, 0.0, {}}, ""}}, settlements_out);
  write_truth_csv({{"r1", GridCellId{0}}}, truth_out);
  write_placements_csv(
      std::vector<PlacementResult>{{"r1", GridCellId{0}, PlacementMethod::modeled, 1.0, false}},
      placements_out);
  for (const auto* out :
       {&records_out, &buildings_out, &settlements_out, &truth_out, &placements_out}) {
    const std::string text = out->str();
    CHECK(text.find('\r') == std::string::npos);
    REQUIRE_FALSE(text.empty());
    CHECK(text.back() == '\n');
  }
}

TEST_CASE("admin geojson loads features with holes and multipolygons") {
  const std::string text = R"({
    "type": "FeatureCollection",
    "features": [
      {
        "type": "Feature",
        "properties": {"id": "TST-A", "country": "TST", "name": "Alpha",
                       "parent_id": "TST-ADM1", "level": "admin2"},
        "geometry": {
          "type": "Polygon",
          "coordinates": [
            [[0, 0], [4, 0], [4, 4], [0, 4], [0, 0]],
            [[1, 1], [2, 1], [2, 2], [1, 2], [1, 1]]
          ]
        }
      },
      {
        "type": "Feature",
        "properties": {"id": "TST-B", "country": "TST", "name": "Bravo",
                       "parent_id": null, "level": "admin2"},
        "geometry": {
          "type": "MultiPolygon",
          "coordinates": [
            [[[10, 0], [11, 0], [11, 1], [10, 1], [10, 0]]],
            [[[12, 0], [13, 0], [13, 1], [12, 1], [12, 0]]]
          ]
        }
      }
    ]
  })";
  const auto units = load(load_admin_geojson, text);
  REQUIRE(units.size() == 2);
  CHECK(units[0].canonical_id == "TST-A");
  CHECK(units[0].country == "TST");
  CHECK(units[0].name == "Alpha");
  CHECK(units[0].parent_id == "TST-ADM1");
  CHECK(units[0].level == AdminLevel::admin2);
  REQUIRE(units[0].geometry.polygons.size() == 1);
  CHECK(units[0].geometry.polygons[0].holes.size() == 1);
  CHECK(units[1].parent_id.empty());
  CHECK(units[1].geometry.polygons.size() == 2);
}

TEST_CASE("admin geojson round-trips through the writer") {
  AdminUnit a;
  a.country = "TST";
  a.level = AdminLevel::admin2;
  a.name = "Alpha";
  a.canonical_id = "TST-A";
  a.parent_id = "TST-ADM1";
  a.geometry.polygons.push_back(Polygon{closed_square(0.0, 0.0, 4.0),
                                        {closed_square(1.0, 1.0, 1.0)}});
  AdminUnit b;
  b.country = "TST";
  b.level = AdminLevel::admin3;
  b.name = "Twin";
  b.canonical_id = "TST-B";
  b.geometry.polygons.push_back(Polygon{closed_square(10.0, 0.0, 1.0), {}});
  b.geometry.polygons.push_back(Polygon{closed_square(12.0, 0.0, 1.0), {}});

  const std::vector<AdminUnit> units = {a, b};
  const std::string text = admin_units_to_geojson(units);
  const auto loaded = load(load_admin_geojson, text);
  REQUIRE(loaded.size() == 2);
  for (std::size_t u = 0; u < 2; ++u) {
    CHECK(loaded[u].country == units[u].country);
    CHECK(loaded[u].level == units[u].level);
    CHECK(loaded[u].name == units[u].name);
    CHECK(loaded[u].canonical_id == units[u].canonical_id);
    CHECK(loaded[u].parent_id == units[u].parent_id);
    REQUIRE(loaded[u].geometry.polygons.size() == units[u].geometry.polygons.size());
    for (std::size_t p = 0; p < units[u].geometry.polygons.size(); ++p) {
      const Ring& expected = units[u].geometry.polygons[p].outer;
      const Ring& actual = loaded[u].geometry.polygons[p].outer;
      REQUIRE(actual.size() == expected.size());
      for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(actual[i].lon == expected[i].lon);
        CHECK(actual[i].lat == expected[i].lat);
      }
    }
  }
  CHECK(loaded[0].geometry.polygons[0].holes.size() == 1);
}

TEST_CASE("admin geojson rejects malformed documents") {
  auto reject = [](const std::string& text) {
    CHECK_THROWS_AS(load(load_admin_geojson, text), Error);
  };
  reject("not json at all");
  reject(R"({"type": "Feature"})");
  const std::string head = R"({"type": "FeatureCollection", "features": [)";
  const std::string tail = "]}";
  // Missing id property.
  reject(head + R"({"type": "Feature", "properties": {"level": "admin2"},
    "geometry": {"type": "Polygon",
      "coordinates": [[[0,0],[1,0],[1,1],[0,1],[0,0]]]}})" + tail);
  // Unknown level.
  reject(head + R"({"type": "Feature", "properties": {"id": "X", "level": "province"},
    "geometry": {"type": "Polygon",
      "coordinates": [[[0,0],[1,0],[1,1],[0,1],[0,0]]]}})" + tail);
  // Missing geometry.
  reject(head + R"({"type": "Feature", "properties": {"id": "X", "level": "admin2"}})" + tail);
  // Unsupported geometry type.
  reject(head + R"({"type": "Feature", "properties": {"id": "X", "level": "admin2"},
    "geometry": {"type": "Point", "coordinates": [0, 0]}})" + tail);
  // Too few ring positions.
  reject(head + R"({"type": "Feature", "properties": {"id": "X", "level": "admin2"},
    "geometry": {"type": "Polygon", "coordinates": [[[0,0],[1,0],[0,0]]]}})" + tail);
  // Non-numeric positions.
  reject(head + R"({"type": "Feature", "properties": {"id": "X", "level": "admin2"},
    "geometry": {"type": "Polygon",
      "coordinates": [[["a",0],[1,0],[1,1],[0,1],[0,0]]]}})" + tail);
  // Unclosed ring fails geometry validation.
  reject(head + R"({"type": "Feature", "properties": {"id": "X", "level": "admin2"},
    "geometry": {"type": "Polygon",
      "coordinates": [[[0,0],[1,0],[1,1],[0,1]]]}})" + tail);
}

TEST_CASE("cell geojson exports occupied cells as squares") {
  const GridSpec grid{0.0, 0.0, 1.0, 8, 4};
  const std::map<GridCellId, std::int64_t> totals = {
      {GridCellId{0}, 5}, {GridCellId{9}, 2}, {GridCellId{3}, 0}};
  const std::string text = cells_to_geojson(totals, grid);
  CHECK(text.back() == '\n');

  const nlohmann::json doc = nlohmann::json::parse(text);
  CHECK(doc.at("type") == "FeatureCollection");
  REQUIRE(doc.at("features").size() == 2);  // the zero-count cell is dropped

  const auto& first = doc.at("features")[0];
  CHECK(first.at("properties").at("grid_id") == "grid_0");
  CHECK(first.at("properties").at("count") == 5);
  const auto& ring = first.at("geometry").at("coordinates")[0];
  REQUIRE(ring.size() == 5);
  CHECK(ring[0][0] == 0.0);
  CHECK(ring[0][1] == 0.0);
  CHECK(ring[2][0] == 1.0);
  CHECK(ring[2][1] == 1.0);

  const auto& second = doc.at("features")[1];
  CHECK(second.at("properties").at("grid_id") == "grid_9");
  const auto& ring2 = second.at("geometry").at("coordinates")[0];
  CHECK(ring2[0][0] == 1.0);  // row 1, col 1 of a unit grid
  CHECK(ring2[0][1] == 1.0);
}

// Building-to-cell assignment and the row-stochastic proportion matrix,
// checked against brute-force recounts.

#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"

#include "gridspread/error.hpp"
#include "gridspread/geometry.hpp"
#include "gridspread/grid.hpp"
#include "gridspread/rng.hpp"
#include "gridspread/synth.hpp"
#include "gridspread/weights.hpp"

using namespace gridspread;

namespace {

Ring ring_of(const std::vector<std::pair<double, double>>& pts) {
  Ring ring;
  for (const auto& [lon, lat] : pts) ring.push_back({lon, lat, {}});
  return ring;
}

AdminUnit square_unit(const std::string& id, double x0, double y0, double x1, double y1) {
  AdminUnit unit;
  unit.country = "TST";
  unit.level = AdminLevel::admin2;
  unit.name = id;
  unit.canonical_id = id;
  unit.parent_id = "TST-ADM1";
  unit.geometry =
      MultiPolygon{{Polygon{ring_of({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}}), {}}}};
  return unit;
}

}  // namespace

TEST_CASE("every proportion row is stochastic with sorted positive support") {
  Rng rng(424242);
  for (int trial = 0; trial < 100; ++trial) {
    CAPTURE(trial);
    std::vector<BuildingAssignment> assignments;
    const int n_admins = 1 + static_cast<int>(rng.below(6));
    for (int a = 0; a < n_admins; ++a) {
      const std::string id = "ADM-" + std::to_string(a);
      const int n_entries = 1 + static_cast<int>(rng.below(8));
      for (int e = 0; e < n_entries; ++e) {
        assignments.push_back(
            {id, GridCellId{static_cast<std::int64_t>(rng.below(64))},
             1 + static_cast<std::int64_t>(rng.below(1000))});
      }
    }
    const MatrixBuild build = build_proportion_matrix(assignments, {});
    CHECK(build.matrix.row_count() == static_cast<std::size_t>(n_admins));
    for (const auto& [id, row] : build.matrix.rows()) {
      REQUIRE(row.cells.size() == row.values.size());
      double sum = 0.0;
      for (std::size_t i = 0; i < row.cells.size(); ++i) {
        CHECK(row.values[i] > 0.0);
        if (i > 0) CHECK(row.cells[i - 1] < row.cells[i]);
        sum += row.values[i];
      }
      CHECK(std::abs(sum - 1.0) < 1e-9);
      CHECK(row.single_cell() == (row.cells.size() == 1));
    }
  }
}

TEST_CASE("proportions are exactly counts over the row total") {
  const std::vector<std::int64_t> counts = {96668, 409349, 20288, 5822, 136971, 166527, 164375};
  std::vector<BuildingAssignment> assignments;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    assignments.push_back({"ADM-X", GridCellId{static_cast<std::int64_t>(i)}, counts[i]});
  }
  const MatrixBuild build = build_proportion_matrix(assignments, {});
  const ProportionRow* row = build.matrix.row("ADM-X");
  REQUIRE(row != nullptr);
  REQUIRE(row->cells.size() == counts.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expect = static_cast<double>(counts[i]) / 1e6;
    CHECK(std::abs(row->values[i] - expect) < 1e-12);
    sum += row->values[i];
  }
  CHECK(std::abs(sum - 1.0) < 1e-9);
  CHECK(row->value_at(GridCellId{1}) == doctest::Approx(0.409349));
  CHECK(row->value_at(GridCellId{99}) == 0.0);
  CHECK(row->supports(GridCellId{3}));
  CHECK_FALSE(row->supports(GridCellId{99}));
}

TEST_CASE("assignment honors confidence floor, unit membership, and cells") {
  const GridSpec grid{0.0, 0.0, 1.0, 8, 8};
  const std::vector<AdminUnit> units = {square_unit("TST-A", 0, 0, 2, 2),
                                        square_unit("TST-B", 2, 0, 4, 2)};
  const std::vector<GeoPoint> buildings = {
      {0.5, 0.5, 0.9},   // A, cell 0
      {1.5, 0.5, {}},    // A, cell 1 (missing confidence counts as 1)
      {1.5, 1.5, 0.4},   // filtered: below the 0.5 floor
      {0.7, 0.7, 0.5},   // A, cell 0 (exactly at the floor stays in)
      {2.5, 0.5, 1.0},   // B, cell 2
      {5.5, 5.5, 1.0},   // outside both units
  };
  AssignmentStats stats;
  const auto assignments = assign_buildings(buildings, units, grid, 0.5, &stats);
  CHECK(stats.included == 4);
  CHECK(stats.below_confidence == 1);
  CHECK(stats.outside_admin == 1);

  std::map<std::pair<std::string, std::int64_t>, std::int64_t> got;
  for (const auto& a : assignments) got[{a.admin2_id, a.cell.index}] = a.count;
  REQUIRE(got.size() == 3);
  CHECK(got.at({"TST-A", 0}) == 2);
  CHECK(got.at({"TST-A", 1}) == 1);
  CHECK(got.at({"TST-B", 2}) == 1);
}

TEST_CASE("a building on a shared border goes to the smaller admin id") {
  const GridSpec grid{0.0, 0.0, 1.0, 8, 8};
  const std::vector<AdminUnit> units = {square_unit("TST-B", 0, 0, 2, 2),
                                        square_unit("TST-A", 2, 0, 4, 2)};
  const std::vector<GeoPoint> buildings = {{2.0, 0.5, 1.0}};
  const auto assignments = assign_buildings(buildings, units, grid, 0.0, nullptr);
  REQUIRE(assignments.size() == 1);
  CHECK(assignments[0].admin2_id == "TST-A");
  CHECK(assignments[0].cell.index == 2);
}

TEST_CASE("assignment over a generated world matches a brute-force recount") {
  WorldConfig cfg;
  cfg.n_units = 4;
  cfg.buildings_per_unit = 300;
  cfg.records_per_unit = 0;
  const SyntheticWorld world = generate_synthetic(cfg, 1234);
  const double floor = 0.6;

  AssignmentStats stats;
  const auto assignments =
      assign_buildings(world.buildings, world.admin2_units, cfg.grid, floor, &stats);

  std::map<std::pair<std::string, std::int64_t>, std::int64_t> recount;
  std::int64_t included = 0;
  std::int64_t below = 0;
  std::int64_t outside = 0;
  for (const GeoPoint& b : world.buildings) {
    if (b.confidence.value_or(1.0) < floor) {
      ++below;
      continue;
    }
    const std::string* best = nullptr;
    for (const AdminUnit& unit : world.admin2_units) {
      if (contains(unit.geometry, b) && (best == nullptr || unit.canonical_id < *best)) {
        best = &unit.canonical_id;
      }
    }
    if (best == nullptr) {
      ++outside;
      continue;
    }
    ++recount[{*best, point_to_cell(b, cfg.grid).index}];
    ++included;
  }

  CHECK(stats.included == included);
  CHECK(stats.below_confidence == below);
  CHECK(stats.outside_admin == outside);
  std::map<std::pair<std::string, std::int64_t>, std::int64_t> got;
  for (const auto& a : assignments) got[{a.admin2_id, a.cell.index}] = a.count;
  CHECK(got == recount);
}

TEST_CASE("expected admin2s without buildings are reported excluded") {
  const std::vector<BuildingAssignment> assignments = {{"B", GridCellId{3}, 10}};
  const std::vector<std::string> expected = {"C", "A", "B"};
  const MatrixBuild build = build_proportion_matrix(assignments, expected);
  REQUIRE(build.excluded_admin2s.size() == 2);
  CHECK(build.excluded_admin2s[0] == "A");
  CHECK(build.excluded_admin2s[1] == "C");
  CHECK(build.matrix.has_row("B"));
  CHECK_FALSE(build.matrix.has_row("A"));
  CHECK(build.matrix.row("A") == nullptr);
}

TEST_CASE("non-positive building counts are rejected") {
  const std::vector<BuildingAssignment> zero = {{"A", GridCellId{0}, 0}};
  CHECK_THROWS_AS(build_proportion_matrix(zero, {}), Error);
  const std::vector<BuildingAssignment> negative = {{"A", GridCellId{0}, -5}};
  CHECK_THROWS_AS(build_proportion_matrix(negative, {}), Error);
}

TEST_CASE("wide and long CSV exports are exact") {
  const std::vector<BuildingAssignment> assignments = {
      {"X", GridCellId{0}, 1}, {"X", GridCellId{2}, 3}, {"Y", GridCellId{1}, 2}};
  const MatrixBuild build = build_proportion_matrix(assignments, {});

  std::ostringstream wide;
  write_matrix_wide_csv(build.matrix, wide);
  CHECK(wide.str() ==
        "admin2_id,grid_0,grid_1,grid_2\n"
        "X,0.25,0,0.75\n"
        "Y,0,1,0\n");

  std::ostringstream long_form;
  write_matrix_long_csv(build.matrix, long_form);
  CHECK(long_form.str() ==
        "admin2_id,grid_id,proportion\n"
        "X,grid_0,0.25\n"
        "X,grid_2,0.75\n"
        "Y,grid_1,1\n");

  const std::set<std::string> single = single_cell_admins(build.matrix);
  CHECK(single == std::set<std::string>{"Y"});
}

TEST_CASE("row support stays inside the unit's intersecting cells") {
  WorldConfig cfg;
  cfg.n_units = 5;
  cfg.buildings_per_unit = 150;
  cfg.records_per_unit = 0;
  const SyntheticWorld world = generate_synthetic(cfg, 777);
  const auto assignments =
      assign_buildings(world.buildings, world.admin2_units, cfg.grid, 0.0, nullptr);
  const MatrixBuild build = build_proportion_matrix(assignments, {});
  for (const AdminUnit& unit : world.admin2_units) {
    const ProportionRow* row = build.matrix.row(unit.canonical_id);
    if (row == nullptr) continue;
    const std::vector<GridCellId> allowed = cells_intersecting(unit, cfg.grid);
    const std::set<GridCellId> allowed_set(allowed.begin(), allowed.end());
    for (GridCellId cell : row->cells) {
      CHECK(allowed_set.contains(cell));
    }
  }
}

TEST_CASE("a building inside a unit but outside the grid is an extent error") {
  const GridSpec grid{0.0, 0.0, 1.0, 4, 4};
  const std::vector<AdminUnit> units = {square_unit("TST-E", -1, 0, 1, 1)};
  const std::vector<GeoPoint> buildings = {{-0.5, 0.5, 1.0}};
  CHECK_THROWS_AS(assign_buildings(buildings, units, grid, 0.0, nullptr), Error);
}

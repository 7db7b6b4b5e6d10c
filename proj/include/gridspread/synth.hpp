// Copyright (c) 2026 gridspread contributors
// Licensed under Apache License 2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gridspread/geometry.hpp"
#include "gridspread/grid.hpp"
#include "gridspread/records.hpp"

namespace gridspread {

/// Layout of a generated test world. Each admin2 unit is a rectangle
/// spanning `cells_per_unit` cells of its own grid row (unit_cells
/// overrides the span per unit when non-empty), inset slightly from the
/// cell edges so containment is unambiguous.
struct WorldConfig {
  int n_units = 10;
  int cells_per_unit = 4;
  std::vector<int> unit_cells;  // optional per-unit spans
  int buildings_per_unit = 200;
  int records_per_unit = 100;
  double hide_fraction = 0.5;     // chance a record's settlement name is withheld
  double signal_strength = 0.0;   // demographic tilt of the truth distribution, in [0, 1)
  double misspell_fraction = 0.0; // chance the admin2 name gets a one-letter typo
  int year_min = 2000;
  int year_max = 2022;
  GridSpec grid;
};

struct SyntheticWorld {
  std::vector<AdminUnit> admin2_units;
  std::vector<GeoPoint> buildings;
  std::vector<Settlement> settlements;
  std::vector<DisplacementRecord> records;
  std::map<std::string, GridCellId> truth;  // record_id -> true cell
  std::uint64_t seed = 0;
};

/// Builds a world with known ground truth: buildings scattered by
/// random per-cell densities, one settlement per occupied cell, and
/// records whose true cells are drawn from the realized building
/// distribution, optionally tilted per ethnic group so the demographic
/// columns carry learnable signal. Every record's true cell lies in its
/// admin2's building support. Throws Error(config) on an infeasible
/// layout.
SyntheticWorld generate_synthetic(const WorldConfig& cfg, std::uint64_t seed);

}  // namespace gridspread

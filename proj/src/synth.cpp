// Copyright (c) 2026 gridspread contributors
// Licensed under Apache License 2.0

#include "gridspread/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "gridspread/error.hpp"
#include "gridspread/rng.hpp"

namespace gridspread {
namespace {

constexpr const char* kCountry = "SYN";

std::string make_name(Rng& rng, std::set<std::string>& used) {
  static constexpr const char* kSyllables[] = {"ba", "de", "gi", "ko", "lu", "ma", "ne", "po",
                                               "ra", "su", "ta", "vo", "wi", "ye", "zo", "chi"};
  constexpr std::size_t kCount = sizeof(kSyllables) / sizeof(kSyllables[0]);
  for (;;) {
    std::string name;
    for (int i = 0; i < 4; ++i) name += kSyllables[rng.below(kCount)];
    name[0] = static_cast<char>(name[0] - 'a' + 'A');
    if (used.insert(name).second) return name;
  }
}

std::string misspell(const std::string& name, Rng& rng) {
  std::string out = name;
  const std::size_t pos = 1 + rng.below(out.size() - 1);
  char replacement = static_cast<char>('a' + rng.below(26));
  if (replacement == out[pos]) replacement = replacement == 'z' ? 'a' : static_cast<char>(replacement + 1);
  out[pos] = replacement;
  return out;
}

int weighted_index(const std::vector<double>& weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

void validate(const WorldConfig& cfg) {
  cfg.grid.validate();
  if (cfg.n_units < 1) {
    throw Error(ErrorKind::config, "world needs at least one admin2 unit");
  }
  if (!cfg.unit_cells.empty() && cfg.unit_cells.size() != static_cast<std::size_t>(cfg.n_units)) {
    throw Error(ErrorKind::config, "unit_cells lists " + std::to_string(cfg.unit_cells.size()) +
                                       " spans for " + std::to_string(cfg.n_units) + " units");
  }
  int max_span = 0;
  for (int u = 0; u < cfg.n_units; ++u) {
    const int span = cfg.unit_cells.empty() ? cfg.cells_per_unit
                                            : cfg.unit_cells[static_cast<std::size_t>(u)];
    if (span < 1) {
      throw Error(ErrorKind::config,
                  "unit " + std::to_string(u) + " spans zero cells");
    }
    max_span = std::max(max_span, span);
  }
  if (cfg.n_units > static_cast<int>(cfg.grid.n_rows) ||
      max_span > static_cast<int>(cfg.grid.n_cols)) {
    throw Error(ErrorKind::config, "grid of " + std::to_string(cfg.grid.n_rows) + "x" +
                                       std::to_string(cfg.grid.n_cols) + " cells cannot hold " +
                                       std::to_string(cfg.n_units) + " units spanning up to " +
                                       std::to_string(max_span) + " cells");
  }
  if (cfg.buildings_per_unit < 1) {
    throw Error(ErrorKind::config, "each unit needs at least one building");
  }
  if (cfg.records_per_unit < 0) {
    throw Error(ErrorKind::config, "records_per_unit must be nonnegative");
  }
  if (cfg.hide_fraction < 0.0 || cfg.hide_fraction > 1.0) {
    throw Error(ErrorKind::config, "hide_fraction must lie in [0, 1]");
  }
  if (cfg.signal_strength < 0.0 || cfg.signal_strength >= 1.0) {
    throw Error(ErrorKind::config, "signal_strength must lie in [0, 1)");
  }
  if (cfg.misspell_fraction < 0.0 || cfg.misspell_fraction > 1.0) {
    throw Error(ErrorKind::config, "misspell_fraction must lie in [0, 1]");
  }
  if (cfg.year_min > cfg.year_max) {
    throw Error(ErrorKind::config, "year_min exceeds year_max");
  }
}

}  // namespace

SyntheticWorld generate_synthetic(const WorldConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  const double cell = cfg.grid.cell_size;
  const double inset = 0.05 * cell;

  SyntheticWorld world;
  world.seed = seed;
  Rng rng(seed);
  std::set<std::string> used_names;
  int record_serial = 0;

  for (int u = 0; u < cfg.n_units; ++u) {
    const int span = cfg.unit_cells.empty() ? cfg.cells_per_unit
                                            : cfg.unit_cells[static_cast<std::size_t>(u)];
    const double south = cfg.grid.origin_lat + u * cell;
    const double west = cfg.grid.origin_lon;
    const double east = west + span * cell;
    const CellRect rect{west + inset, south + inset, east - inset, south + cell - inset};

    AdminUnit unit;
    unit.country = kCountry;
    unit.level = AdminLevel::admin2;
    unit.name = make_name(rng, used_names);
    unit.canonical_id = std::string(kCountry) + "-" + (u < 10 ? "0" : "") + std::to_string(u);
    unit.parent_id = std::string(kCountry) + "-ADM1";
    Ring ring{{rect.west, rect.south, {}},
              {rect.east, rect.south, {}},
              {rect.east, rect.north, {}},
              {rect.west, rect.north, {}},
              {rect.west, rect.south, {}}};
    unit.geometry.polygons.push_back(Polygon{ring, {}});
    world.admin2_units.push_back(unit);

    // Intended densities, then buildings sampled cell-first.
    std::vector<double> density(static_cast<std::size_t>(span));
    for (double& d : density) d = 0.05 + rng.uniform() * 0.95;

    std::vector<std::int64_t> realized(static_cast<std::size_t>(span), 0);
    for (int b = 0; b < cfg.buildings_per_unit; ++b) {
      const int c = weighted_index(density, rng);
      const double cell_west = west + c * cell;
      const double lo_lon = std::max(rect.west, cell_west);
      const double hi_lon = std::min(rect.east, cell_west + cell);
      GeoPoint p;
      p.lon = rng.uniform(lo_lon, hi_lon);
      p.lat = rng.uniform(rect.south, rect.north);
      p.confidence = rng.uniform(0.5, 1.0);
      world.buildings.push_back(p);
      ++realized[static_cast<std::size_t>(c)];
    }

    // One settlement per occupied cell, at the center of cell-and-unit
    // overlap so its cell assignment is unambiguous.
    std::vector<int> support;
    std::map<int, std::string> settlement_names;
    for (int c = 0; c < span; ++c) {
      if (realized[static_cast<std::size_t>(c)] == 0) continue;
      support.push_back(c);
      const double cell_west = west + c * cell;
      const double lo_lon = std::max(rect.west, cell_west);
      const double hi_lon = std::min(rect.east, cell_west + cell);
      Settlement s;
      s.name = make_name(rng, used_names);
      s.location = {0.5 * (lo_lon + hi_lon), 0.5 * (rect.south + rect.north), std::nullopt};
      s.admin2_id = unit.canonical_id;
      world.settlements.push_back(s);
      settlement_names[c] = s.name;
    }

    std::vector<double> base(support.size());
    for (std::size_t i = 0; i < support.size(); ++i) {
      base[i] = static_cast<double>(realized[static_cast<std::size_t>(support[i])]);
    }
    const std::size_t split = support.size() / 2;

    for (int r = 0; r < cfg.records_per_unit; ++r) {
      ++record_serial;
      DisplacementRecord record;
      {
        char id[16];
        std::snprintf(id, sizeof(id), "r%06d", record_serial);
        record.record_id = id;
      }
      record.origin_country = kCountry;
      record.year = cfg.year_min + static_cast<int>(rng.below(
                        static_cast<std::uint64_t>(cfg.year_max - cfg.year_min) + 1));
      const bool alfa = rng.uniform() < 0.5;
      static constexpr const char* kAges[] = {"0-17", "18-59", "60+"};
      record.attributes["ethnic_group"] = alfa ? "alfa" : "beta";
      record.attributes["age_group"] = kAges[rng.below(3)];
      record.attributes["gender"] = rng.uniform() < 0.5 ? "f" : "m";

      std::vector<double> tilted = base;
      for (std::size_t i = 0; i < tilted.size(); ++i) {
        const bool first_half = i < split;
        const bool boost = first_half == alfa;
        tilted[i] *= boost ? 1.0 + cfg.signal_strength : 1.0 - cfg.signal_strength;
      }
      const int pick = weighted_index(tilted, rng);
      const int c = support[static_cast<std::size_t>(pick)];
      const GridCellId truth_cell =
          cell_at(static_cast<std::int64_t>(u), static_cast<std::int64_t>(c), cfg.grid);
      world.truth.emplace(record.record_id, truth_cell);

      record.admin2_raw = unit.name;
      if (cfg.misspell_fraction > 0.0 && rng.uniform() < cfg.misspell_fraction) {
        record.admin2_raw = misspell(unit.name, rng);
      }
      if (!(rng.uniform() < cfg.hide_fraction)) {
        record.admin3_raw = settlement_names.at(c);
      }
      world.records.push_back(std::move(record));
    }
  }
  return world;
}

}  // namespace gridspread

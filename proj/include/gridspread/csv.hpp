// Copyright (c) 2026 gridspread contributors
// Licensed under Apache License 2.0

#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gridspread/grid.hpp"
#include "gridspread/records.hpp"

namespace gridspread {

/// Parses comma-separated rows with double-quote quoting: embedded
/// commas, quotes (doubled), and newlines survive inside quoted fields.
/// CRLF line ends are accepted. Fully empty lines are skipped. Throws
/// Error(input) on an unterminated quote.
std::vector<std::vector<std::string>> read_csv(std::istream& in, const std::string& context);

/// Writes one row, quoting fields that contain a comma, quote, or line
/// break.
void write_csv_row(std::ostream& out, std::span<const std::string> fields);

/// Header `record_id,origin_country,admin1,admin2,admin3,year,...`; the
/// named columns feed the struct fields, every other column becomes an
/// attribute. Throws Error(input) on a missing required column,
/// duplicate record_id, or an unparseable year.
std::vector<DisplacementRecord> load_records_csv(std::istream& in, const std::string& context);

/// Header `latitude,longitude,confidence`; an empty confidence field
/// means none.
std::vector<GeoPoint> load_buildings_csv(std::istream& in, const std::string& context);

/// Header `name,latitude,longitude,admin2_id`; admin2_id may be empty.
std::vector<Settlement> load_settlements_csv(std::istream& in, const std::string& context);

/// Header `record_id,grid_id`.
std::map<std::string, GridCellId> load_truth_csv(std::istream& in, const std::string& context);

/// Header `record_id,grid_id,method,score,fallback`.
std::vector<PlacementResult> load_placements_csv(std::istream& in, const std::string& context);

void write_records_csv(std::span<const DisplacementRecord> records, std::ostream& out);
void write_buildings_csv(std::span<const GeoPoint> buildings, std::ostream& out);
void write_settlements_csv(std::span<const Settlement> settlements, std::ostream& out);
void write_truth_csv(const std::map<std::string, GridCellId>& truth, std::ostream& out);
void write_placements_csv(std::span<const PlacementResult> placements, std::ostream& out);

}  // namespace gridspread

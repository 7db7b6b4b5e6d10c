// Copyright (c) 2026 gridspread contributors
// Licensed under Apache License 2.0

#include "gridspread/csv.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <set>

#include "gridspread/error.hpp"
#include "gridspread/util.hpp"

namespace gridspread {
namespace {

std::string row_context(const std::string& context, std::size_t row) {
  return context + " row " + std::to_string(row + 1);
}

int find_column(const std::vector<std::string>& header, const std::string& name) {
  auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

int require_column(const std::vector<std::string>& header, const std::string& name,
                   const std::string& context) {
  const int idx = find_column(header, name);
  if (idx < 0) {
    throw Error(ErrorKind::input, context + " is missing required column \"" + name + "\"");
  }
  return idx;
}

double parse_double(const std::string& field, const std::string& what,
                    const std::string& context) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = first + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw Error(ErrorKind::input, context + ": cannot parse " + what + " \"" + field + "\"");
  }
  return value;
}

int parse_int(const std::string& field, const std::string& what, const std::string& context) {
  int value = 0;
  const char* first = field.data();
  const char* last = first + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw Error(ErrorKind::input, context + ": cannot parse " + what + " \"" + field + "\"");
  }
  return value;
}

void require_width(const std::vector<std::string>& row, std::size_t width,
                   const std::string& context) {
  if (row.size() != width) {
    throw Error(ErrorKind::input, context + ": expected " + std::to_string(width) +
                                      " fields, got " + std::to_string(row.size()));
  }
}

GeoPoint parse_location(const std::string& lat_field, const std::string& lon_field,
                        const std::string& context) {
  GeoPoint p;
  p.lat = parse_double(lat_field, "latitude", context);
  p.lon = parse_double(lon_field, "longitude", context);
  if (p.lon < -180.0 || p.lon > 180.0 || p.lat < -90.0 || p.lat > 90.0) {
    throw Error(ErrorKind::input, context + ": coordinate (" + format_double(p.lon) + ", " +
                                      format_double(p.lat) + ") outside WGS84 bounds");
  }
  return p;
}

}  // namespace

std::vector<std::vector<std::string>> read_csv(std::istream& in, const std::string& context) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    if (field_started || !field.empty() || !row.empty()) {
      end_field();
      rows.push_back(std::move(row));
      row.clear();
    }
  };

  for (int raw = in.get(); raw != std::char_traits<char>::eof(); raw = in.get()) {
    const char c = static_cast<char>(raw);
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          field += '"';
          in.get();
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        field_started = true;
        break;
      case ',':
        end_field();
        // A line ending right after a comma still has a trailing empty
        // field; mark the row as live.
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        ++line;
        break;
      default:
        field += c;
        field_started = true;
        break;
    }
  }
  if (quoted) {
    throw Error(ErrorKind::input,
                context + " line " + std::to_string(line) + ": unterminated quoted field");
  }
  end_row();
  return rows;
}

void write_csv_row(std::ostream& out, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\n\r") == std::string::npos) {
      out << f;
    } else {
      out << '"';
      for (char c : f) {
        if (c == '"') out << '"';
        out << c;
      }
      out << '"';
    }
  }
  out << '\n';
}

std::vector<DisplacementRecord> load_records_csv(std::istream& in, const std::string& context) {
  const auto rows = read_csv(in, context);
  if (rows.empty()) {
    throw Error(ErrorKind::input, context + " has no header row");
  }
  const auto& header = rows.front();
  const int id_col = require_column(header, "record_id", context);
  const int country_col = require_column(header, "origin_country", context);
  const int year_col = require_column(header, "year", context);
  const int admin1_col = find_column(header, "admin1");
  const int admin2_col = find_column(header, "admin2");
  const int admin3_col = find_column(header, "admin3");

  std::vector<DisplacementRecord> records;
  std::set<std::string> seen_ids;
  records.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string ctx = row_context(context, r);
    require_width(row, header.size(), ctx);
    DisplacementRecord record;
    record.record_id = row[static_cast<std::size_t>(id_col)];
    if (record.record_id.empty()) {
      throw Error(ErrorKind::input, ctx + ": empty record_id");
    }
    if (!seen_ids.insert(record.record_id).second) {
      throw Error(ErrorKind::input, ctx + ": duplicate record_id \"" + record.record_id + "\"");
    }
    record.origin_country = row[static_cast<std::size_t>(country_col)];
    record.year = parse_int(row[static_cast<std::size_t>(year_col)], "year", ctx);
    if (admin1_col >= 0) record.admin1_raw = row[static_cast<std::size_t>(admin1_col)];
    if (admin2_col >= 0) record.admin2_raw = row[static_cast<std::size_t>(admin2_col)];
    if (admin3_col >= 0) record.admin3_raw = row[static_cast<std::size_t>(admin3_col)];
    for (std::size_t c = 0; c < header.size(); ++c) {
      const int ci = static_cast<int>(c);
      if (ci == id_col || ci == country_col || ci == year_col || ci == admin1_col ||
          ci == admin2_col || ci == admin3_col) {
        continue;
      }
      if (!row[c].empty()) record.attributes[header[c]] = row[c];
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<GeoPoint> load_buildings_csv(std::istream& in, const std::string& context) {
  const auto rows = read_csv(in, context);
  if (rows.empty()) {
    throw Error(ErrorKind::input, context + " has no header row");
  }
  const auto& header = rows.front();
  const int lat_col = require_column(header, "latitude", context);
  const int lon_col = require_column(header, "longitude", context);
  const int conf_col = find_column(header, "confidence");

  std::vector<GeoPoint> buildings;
  buildings.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string ctx = row_context(context, r);
    require_width(row, header.size(), ctx);
    GeoPoint p = parse_location(row[static_cast<std::size_t>(lat_col)],
                                row[static_cast<std::size_t>(lon_col)], ctx);
    if (conf_col >= 0 && !row[static_cast<std::size_t>(conf_col)].empty()) {
      const double conf =
          parse_double(row[static_cast<std::size_t>(conf_col)], "confidence", ctx);
      if (conf < 0.0 || conf > 1.0) {
        throw Error(ErrorKind::input,
                    ctx + ": confidence " + format_double(conf) + " outside [0, 1]");
      }
      p.confidence = conf;
    }
    buildings.push_back(p);
  }
  return buildings;
}

std::vector<Settlement> load_settlements_csv(std::istream& in, const std::string& context) {
  const auto rows = read_csv(in, context);
  if (rows.empty()) {
    throw Error(ErrorKind::input, context + " has no header row");
  }
  const auto& header = rows.front();
  const int name_col = require_column(header, "name", context);
  const int lat_col = require_column(header, "latitude", context);
  const int lon_col = require_column(header, "longitude", context);
  const int admin2_col = find_column(header, "admin2_id");

  std::vector<Settlement> settlements;
  settlements.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string ctx = row_context(context, r);
    require_width(row, header.size(), ctx);
    Settlement s;
    s.name = row[static_cast<std::size_t>(name_col)];
    if (s.name.empty()) {
      throw Error(ErrorKind::input, ctx + ": empty settlement name");
    }
    s.location = parse_location(row[static_cast<std::size_t>(lat_col)],
                                row[static_cast<std::size_t>(lon_col)], ctx);
    if (admin2_col >= 0) s.admin2_id = row[static_cast<std::size_t>(admin2_col)];
    settlements.push_back(std::move(s));
  }
  return settlements;
}

std::map<std::string, GridCellId> load_truth_csv(std::istream& in, const std::string& context) {
  const auto rows = read_csv(in, context);
  if (rows.empty()) {
    throw Error(ErrorKind::input, context + " has no header row");
  }
  const auto& header = rows.front();
  const int id_col = require_column(header, "record_id", context);
  const int cell_col = require_column(header, "grid_id", context);

  std::map<std::string, GridCellId> truth;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string ctx = row_context(context, r);
    require_width(row, header.size(), ctx);
    const std::string& id = row[static_cast<std::size_t>(id_col)];
    const auto cell = parse_cell_id(row[static_cast<std::size_t>(cell_col)]);
    if (!cell) {
      throw Error(ErrorKind::input, ctx + ": malformed grid id \"" +
                                        row[static_cast<std::size_t>(cell_col)] + "\"");
    }
    if (!truth.emplace(id, *cell).second) {
      throw Error(ErrorKind::input, ctx + ": duplicate record_id \"" + id + "\"");
    }
  }
  return truth;
}

std::vector<PlacementResult> load_placements_csv(std::istream& in, const std::string& context) {
  const auto rows = read_csv(in, context);
  if (rows.empty()) {
    throw Error(ErrorKind::input, context + " has no header row");
  }
  const auto& header = rows.front();
  const int id_col = require_column(header, "record_id", context);
  const int cell_col = require_column(header, "grid_id", context);
  const int method_col = require_column(header, "method", context);
  const int score_col = require_column(header, "score", context);
  const int fallback_col = require_column(header, "fallback", context);

  std::vector<PlacementResult> placements;
  placements.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string ctx = row_context(context, r);
    require_width(row, header.size(), ctx);
    PlacementResult p;
    p.record_id = row[static_cast<std::size_t>(id_col)];
    const auto cell = parse_cell_id(row[static_cast<std::size_t>(cell_col)]);
    if (!cell) {
      throw Error(ErrorKind::input, ctx + ": malformed grid id \"" +
                                        row[static_cast<std::size_t>(cell_col)] + "\"");
    }
    p.cell = *cell;
    const std::string& method = row[static_cast<std::size_t>(method_col)];
    if (method == "admin3_deterministic") {
      p.method = PlacementMethod::admin3_deterministic;
    } else if (method == "single_cell_deterministic") {
      p.method = PlacementMethod::single_cell_deterministic;
    } else if (method == "modeled") {
      p.method = PlacementMethod::modeled;
    } else {
      throw Error(ErrorKind::input, ctx + ": unknown placement method \"" + method + "\"");
    }
    p.score = parse_double(row[static_cast<std::size_t>(score_col)], "score", ctx);
    const std::string& fallback = row[static_cast<std::size_t>(fallback_col)];
    if (fallback == "true") {
      p.fallback = true;
    } else if (fallback == "false") {
      p.fallback = false;
    } else {
      throw Error(ErrorKind::input, ctx + ": fallback must be true or false, got \"" +
                                        fallback + "\"");
    }
    placements.push_back(std::move(p));
  }
  return placements;
}

void write_records_csv(std::span<const DisplacementRecord> records, std::ostream& out) {
  std::set<std::string> extra;
  for (const DisplacementRecord& r : records) {
    for (const auto& [key, value] : r.attributes) extra.insert(key);
  }
  std::vector<std::string> header = {"record_id", "origin_country", "admin1",
                                     "admin2",    "admin3",         "year"};
  header.insert(header.end(), extra.begin(), extra.end());
  write_csv_row(out, header);
  for (const DisplacementRecord& r : records) {
    std::vector<std::string> row = {r.record_id,  r.origin_country, r.admin1_raw,
                                    r.admin2_raw, r.admin3_raw,     std::to_string(r.year)};
    for (const std::string& key : extra) {
      auto it = r.attributes.find(key);
      row.push_back(it == r.attributes.end() ? std::string() : it->second);
    }
    write_csv_row(out, row);
  }
}

void write_buildings_csv(std::span<const GeoPoint> buildings, std::ostream& out) {
  write_csv_row(out, std::vector<std::string>{"latitude", "longitude", "confidence"});
  for (const GeoPoint& p : buildings) {
    write_csv_row(out, std::vector<std::string>{
                           format_double(p.lat), format_double(p.lon),
                           p.confidence ? format_double(*p.confidence) : std::string()});
  }
}

void write_settlements_csv(std::span<const Settlement> settlements, std::ostream& out) {
  write_csv_row(out, std::vector<std::string>{"name", "latitude", "longitude", "admin2_id"});
  for (const Settlement& s : settlements) {
    write_csv_row(out, std::vector<std::string>{s.name, format_double(s.location.lat),
                                                format_double(s.location.lon), s.admin2_id});
  }
}

void write_truth_csv(const std::map<std::string, GridCellId>& truth, std::ostream& out) {
  write_csv_row(out, std::vector<std::string>{"record_id", "grid_id"});
  for (const auto& [id, cell] : truth) {
    write_csv_row(out, std::vector<std::string>{id, to_string(cell)});
  }
}

void write_placements_csv(std::span<const PlacementResult> placements, std::ostream& out) {
  write_csv_row(out,
                std::vector<std::string>{"record_id", "grid_id", "method", "score", "fallback"});
  for (const PlacementResult& p : placements) {
    write_csv_row(out, std::vector<std::string>{p.record_id, to_string(p.cell),
                                                to_string(p.method), format_double(p.score),
                                                p.fallback ? "true" : "false"});
  }
}

}  // namespace gridspread

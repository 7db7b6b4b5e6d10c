// Copyright (c) 2026 gridspread contributors
// Licensed under Apache License 2.0

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridspread/geometry.hpp"

namespace gridspread {

struct MatchConfig {
  double threshold = 80.0;  // minimum similarity percentage for a fuzzy accept
  bool normalize = true;    // case-fold, trim, collapse whitespace, strip diacritics
};

enum class MatchMethod { exact, fuzzy, none };

const char* to_string(MatchMethod method);

struct MatchResult {
  std::string query;
  std::optional<std::string> matched_id;
  double ratio = 0.0;  // percentage in [0, 100]; best candidate ratio even on reject
  MatchMethod method = MatchMethod::none;
};

/// Case-folds, trims, collapses internal whitespace, and strips Latin
/// diacritics ("  Arsí " -> "arsi"). UTF-8 in, UTF-8 out.
std::string normalize_name(std::string_view text);

/// Minimum number of single-character insertions, deletions, and
/// substitutions turning `a` into `b`, counted over Unicode codepoints.
std::size_t levenshtein_distance(std::string_view a, std::string_view b);

/// 100 * (L - D) / L with L the longer codepoint length. Two empty
/// strings are defined as identical (100).
double similarity_ratio(std::string_view a, std::string_view b);

struct NameCandidate {
  std::string canonical_id;
  std::string name;
};

/// Exact match after normalization wins outright; otherwise the best
/// candidate at or above cfg.threshold. Ties break by higher ratio, then
/// smaller canonical_id. Throws Error(config) on an empty candidate list.
MatchResult match_admin_name(std::string_view query, std::span<const NameCandidate> candidates,
                             const MatchConfig& cfg);

/// One gazetteer entry; admin2_id maps the entry back to its admin2 unit
/// (the entry's own id when the entry is an admin2).
struct GazetteerEntry {
  std::string canonical_id;
  std::string name;
  std::string admin2_id;
};

struct CountryGazetteer {
  std::vector<GazetteerEntry> admin2;
  std::vector<GazetteerEntry> admin3;
  std::vector<GazetteerEntry> admin4;
};

/// Per-country name candidates, so matching never crosses a border.
struct AdminIndex {
  std::map<std::string, CountryGazetteer> countries;
  std::map<std::string, std::string> admin2_country;  // admin2 id -> country

  const CountryGazetteer* find(const std::string& country) const;
};

AdminIndex build_admin_index(std::span<const AdminUnit> units);

enum class ResolvedLevel { admin2 = 2, admin3 = 3, admin4 = 4 };

struct OriginResolution {
  ResolvedLevel level = ResolvedLevel::admin2;
  std::string matched_id;  // id of the unit matched at `level`
  std::string admin2_id;   // that unit's admin2 (itself at level 2)
  MatchMethod method = MatchMethod::none;
  double ratio = 0.0;
};

/// Cascading origin resolution: admin2 name first, then admin3, then
/// admin4, each against the country's candidates at that level. A hit at
/// a lower level is mapped back to its parent admin2.
std::optional<OriginResolution> resolve_origin(std::optional<std::string_view> admin2_raw,
                                               std::optional<std::string_view> admin3_raw,
                                               std::optional<std::string_view> admin4_raw,
                                               const CountryGazetteer& gazetteer,
                                               const MatchConfig& cfg);

}  // namespace gridspread

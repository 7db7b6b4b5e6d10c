// Copyright (c) 2026 gridspread contributors
// Licensed under Apache License 2.0

#include "gridspread/text_match.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>

#include "gridspread/error.hpp"

namespace gridspread {

const char* to_string(MatchMethod method) {
  switch (method) {
    case MatchMethod::exact: return "exact";
    case MatchMethod::fuzzy: return "fuzzy";
    case MatchMethod::none: return "none";
  }
  return "?";
}

namespace {

std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    auto byte = static_cast<unsigned char>(text[i]);
    char32_t cp = 0;
    std::size_t len = 1;
    if (byte < 0x80) {
      cp = byte;
    } else if ((byte >> 5) == 0x6) {
      cp = byte & 0x1f;
      len = 2;
    } else if ((byte >> 4) == 0xe) {
      cp = byte & 0x0f;
      len = 3;
    } else if ((byte >> 3) == 0x1e) {
      cp = byte & 0x07;
      len = 4;
    } else {
      // Stray continuation or invalid lead byte.
      out.push_back(0xfffd);
      ++i;
      continue;
    }
    if (i + len > text.size()) {
      out.push_back(0xfffd);
      break;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      auto cont = static_cast<unsigned char>(text[i + k]);
      if ((cont >> 6) != 0x2) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cont & 0x3f);
    }
    if (!ok) {
      out.push_back(0xfffd);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else {
    out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  }
}

// Latin-1 Supplement and Latin Extended-A letters folded to lowercase
// ASCII. Returns an empty view for combining marks (stripped).
std::string_view fold_latin(char32_t cp) {
  switch (cp) {
    case U'ß': return "ss";
    case U'Æ': case U'æ': return "ae";
    case U'Œ': case U'œ': return "oe";
    case U'Ø': case U'ø': return "o";
    case U'Ð': case U'ð': case U'Đ': case U'đ': return "d";
    case U'Þ': case U'þ': return "th";
    case U'Ł': case U'ł': return "l";
    case U'ı': return "i";
    default: break;
  }
  static constexpr struct { char32_t lo, hi; const char* base; } ranges[] = {
      {U'À', U'Å', "a"}, {U'à', U'å', "a"}, {U'Ā', U'ą', "a"},
      {U'Ç', U'Ç', "c"}, {U'ç', U'ç', "c"}, {U'Ć', U'č', "c"},
      {U'È', U'Ë', "e"}, {U'è', U'ë', "e"}, {U'Ē', U'ě', "e"},
      {U'Ì', U'Ï', "i"}, {U'ì', U'ï', "i"}, {U'Ĩ', U'İ', "i"},
      {U'Ñ', U'Ñ', "n"}, {U'ñ', U'ñ', "n"}, {U'Ń', U'ŋ', "n"},
      {U'Ò', U'Ö', "o"}, {U'ò', U'ö', "o"}, {U'Ō', U'ő', "o"},
      {U'Ù', U'Ü', "u"}, {U'ù', U'ü', "u"}, {U'Ũ', U'ų', "u"},
      {U'Ý', U'Ý', "y"}, {U'ý', U'ÿ', "y"}, {U'Ŷ', U'Ÿ', "y"},
      {U'Ĝ', U'ģ', "g"}, {U'Ĥ', U'ħ', "h"}, {U'Ĵ', U'ĵ', "j"},
      {U'Ķ', U'ķ', "k"}, {U'Ĺ', U'ľ', "l"}, {U'Ŕ', U'ř', "r"},
      {U'Ś', U'š', "s"}, {U'Ţ', U'ŧ', "t"}, {U'Ŵ', U'ŵ', "w"},
      {U'Ź', U'ž', "z"},
  };
  for (const auto& r : ranges) {
    if (cp >= r.lo && cp <= r.hi) return r.base;
  }
  if (cp >= 0x0300 && cp <= 0x036f) return "";  // combining marks
  return {};
}

bool is_space(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\f' ||
         cp == U'\v' || cp == 0x00a0;
}

}  // namespace

std::string normalize_name(std::string_view text) {
  std::u32string cps = decode_utf8(text);
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  bool any = false;
  for (char32_t cp : cps) {
    if (is_space(cp)) {
      pending_space = any;
      continue;
    }
    std::string_view folded = fold_latin(cp);
    std::string piece;
    if (!folded.data()) {
      char32_t lowered = (cp >= U'A' && cp <= U'Z') ? cp + 32 : cp;
      encode_utf8(lowered, piece);
    } else if (folded.empty()) {
      continue;  // stripped combining mark
    } else {
      piece = folded;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out += piece;
    any = true;
  }
  return out;
}

std::size_t levenshtein_distance(std::string_view a, std::string_view b) {
  std::u32string ua = decode_utf8(a);
  std::u32string ub = decode_utf8(b);
  if (ua.size() < ub.size()) std::swap(ua, ub);
  const std::size_t n = ua.size();
  const std::size_t m = ub.size();
  if (m == 0) return n;

  std::vector<std::size_t> prev(m + 1);
  std::vector<std::size_t> cur(m + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t sub = prev[j - 1] + (ua[i - 1] == ub[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

double similarity_ratio(std::string_view a, std::string_view b) {
  std::size_t la = decode_utf8(a).size();
  std::size_t lb = decode_utf8(b).size();
  std::size_t longest = std::max(la, lb);
  if (longest == 0) return 100.0;  // both empty: identical by definition
  std::size_t dist = levenshtein_distance(a, b);
  // (longest - dist) and longest are integers, so the division is exact
  // whenever the true ratio is representable; a mathematically exact 80
  // compares as exactly 80 against the threshold.
  return 100.0 * static_cast<double>(longest - dist) / static_cast<double>(longest);
}

MatchResult match_admin_name(std::string_view query, std::span<const NameCandidate> candidates,
                             const MatchConfig& cfg) {
  if (candidates.empty()) {
    throw Error(ErrorKind::config, "match_admin_name called with no candidates");
  }
  std::string q = cfg.normalize ? normalize_name(query) : std::string(query);

  MatchResult result;
  result.query = std::string(query);

  const NameCandidate* best = nullptr;
  double best_ratio = -1.0;
  bool best_exact = false;
  for (const NameCandidate& cand : candidates) {
    std::string name = cfg.normalize ? normalize_name(cand.name) : cand.name;
    bool exact = (name == q);
    double ratio = exact ? 100.0 : similarity_ratio(q, name);
    bool better;
    if (exact != best_exact) {
      better = exact;
    } else if (ratio != best_ratio) {
      better = ratio > best_ratio;
    } else {
      better = best != nullptr && cand.canonical_id < best->canonical_id;
    }
    if (best == nullptr || better) {
      best = &cand;
      best_ratio = ratio;
      best_exact = exact;
    }
  }

  result.ratio = best_ratio;
  if (best_exact) {
    result.method = MatchMethod::exact;
    result.matched_id = best->canonical_id;
  } else if (best_ratio >= cfg.threshold) {
    result.method = MatchMethod::fuzzy;
    result.matched_id = best->canonical_id;
  } else {
    result.method = MatchMethod::none;
  }
  return result;
}

const CountryGazetteer* AdminIndex::find(const std::string& country) const {
  auto it = countries.find(country);
  return it == countries.end() ? nullptr : &it->second;
}

AdminIndex build_admin_index(std::span<const AdminUnit> units) {
  AdminIndex index;
  for (const AdminUnit& unit : units) {
    CountryGazetteer& gaz = index.countries[unit.country];
    switch (unit.level) {
      case AdminLevel::admin2:
        gaz.admin2.push_back({unit.canonical_id, unit.name, unit.canonical_id});
        index.admin2_country[unit.canonical_id] = unit.country;
        break;
      case AdminLevel::admin3:
        gaz.admin3.push_back({unit.canonical_id, unit.name, unit.parent_id});
        break;
      default:
        break;  // admin0/admin1 carry no matchable candidates
    }
  }
  return index;
}

namespace {

std::optional<OriginResolution> match_level(std::optional<std::string_view> raw,
                                            std::span<const GazetteerEntry> entries,
                                            ResolvedLevel level, const MatchConfig& cfg) {
  if (!raw.has_value() || entries.empty()) return std::nullopt;
  if (cfg.normalize ? normalize_name(*raw).empty() : raw->empty()) return std::nullopt;

  std::vector<NameCandidate> candidates;
  candidates.reserve(entries.size());
  for (const GazetteerEntry& e : entries) {
    candidates.push_back({e.canonical_id, e.name});
  }
  MatchResult match = match_admin_name(*raw, candidates, cfg);
  if (match.method == MatchMethod::none) return std::nullopt;

  auto hit = std::find_if(entries.begin(), entries.end(), [&](const GazetteerEntry& e) {
    return e.canonical_id == *match.matched_id;
  });
  OriginResolution res;
  res.level = level;
  res.matched_id = hit->canonical_id;
  res.admin2_id = hit->admin2_id;
  res.method = match.method;
  res.ratio = match.ratio;
  return res;
}

}  // namespace

std::optional<OriginResolution> resolve_origin(std::optional<std::string_view> admin2_raw,
                                               std::optional<std::string_view> admin3_raw,
                                               std::optional<std::string_view> admin4_raw,
                                               const CountryGazetteer& gazetteer,
                                               const MatchConfig& cfg) {
  if (auto hit = match_level(admin2_raw, gazetteer.admin2, ResolvedLevel::admin2, cfg)) {
    return hit;
  }
  if (auto hit = match_level(admin3_raw, gazetteer.admin3, ResolvedLevel::admin3, cfg)) {
    return hit;
  }
  if (auto hit = match_level(admin4_raw, gazetteer.admin4, ResolvedLevel::admin4, cfg)) {
    return hit;
  }
  return std::nullopt;
}

}  // namespace gridspread

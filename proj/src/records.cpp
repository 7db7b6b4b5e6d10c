// Copyright (c) 2026 gridspread contributors
// Licensed under Apache License 2.0

#include "gridspread/records.hpp"

#include <algorithm>
#include <tuple>

namespace gridspread {
namespace {

std::string settlement_candidate_id(const Settlement& s) {
  return "stl:" + s.admin2_id + ":" + s.name;
}

std::optional<std::string_view> raw_or_none(const std::string& raw) {
  if (raw.empty()) return std::nullopt;
  return std::string_view(raw);
}

ResolutionMethod to_resolution_method(const OriginResolution& res) {
  switch (res.level) {
    case ResolvedLevel::admin2:
      return res.method == MatchMethod::exact ? ResolutionMethod::exact : ResolutionMethod::fuzzy;
    case ResolvedLevel::admin3:
      return ResolutionMethod::cascade_admin3;
    case ResolvedLevel::admin4:
      return ResolutionMethod::cascade_admin4;
  }
  return ResolutionMethod::exact;
}

}  // namespace

const char* to_string(ResolutionMethod method) {
  switch (method) {
    case ResolutionMethod::exact:
      return "exact";
    case ResolutionMethod::fuzzy:
      return "fuzzy";
    case ResolutionMethod::cascade_admin3:
      return "cascade_admin3";
    case ResolutionMethod::cascade_admin4:
      return "cascade_admin4";
  }
  return "unknown";
}

const char* to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::no_admin2:
      return "no_admin2";
    case RejectReason::below_threshold:
      return "below_threshold";
    case RejectReason::unknown_country:
      return "unknown_country";
  }
  return "unknown";
}

const char* to_string(PlacementMethod method) {
  switch (method) {
    case PlacementMethod::admin3_deterministic:
      return "admin3_deterministic";
    case PlacementMethod::single_cell_deterministic:
      return "single_cell_deterministic";
    case PlacementMethod::modeled:
      return "modeled";
  }
  return "unknown";
}

ResolveOutcome resolve_records(std::span<const DisplacementRecord> records,
                               const AdminIndex& index, std::span<const Settlement> settlements,
                               const MatchConfig& cfg) {
  // Settlements with a known admin2 widen the admin3 candidate pool of
  // that admin2's country.
  std::map<std::string, CountryGazetteer> gazetteers = index.countries;
  std::map<std::string, const Settlement*> settlement_by_id;
  for (const Settlement& s : settlements) {
    if (s.admin2_id.empty() || s.name.empty()) continue;
    auto country_it = index.admin2_country.find(s.admin2_id);
    if (country_it == index.admin2_country.end()) continue;
    gazetteers[country_it->second].admin3.push_back(
        {settlement_candidate_id(s), s.name, s.admin2_id});
    auto [it, inserted] = settlement_by_id.emplace(settlement_candidate_id(s), &s);
    if (!inserted) {
      auto key = [](const Settlement& x) {
        return std::tie(x.name, x.location.lon, x.location.lat);
      };
      if (key(s) < key(*it->second)) it->second = &s;
    }
  }

  ResolveOutcome out;
  for (const DisplacementRecord& record : records) {
    auto gaz_it = gazetteers.find(record.origin_country);
    if (record.origin_country.empty() || gaz_it == gazetteers.end()) {
      out.rejected.push_back({record.record_id, RejectReason::unknown_country});
      continue;
    }
    std::string admin4_raw;
    if (auto it = record.attributes.find("admin4"); it != record.attributes.end()) {
      admin4_raw = it->second;
    }
    const bool any_text = !normalize_name(record.admin2_raw).empty() ||
                          !normalize_name(record.admin3_raw).empty() ||
                          !normalize_name(admin4_raw).empty();
    if (!any_text) {
      out.rejected.push_back({record.record_id, RejectReason::no_admin2});
      continue;
    }
    std::optional<OriginResolution> res =
        resolve_origin(raw_or_none(record.admin2_raw), raw_or_none(record.admin3_raw),
                       raw_or_none(admin4_raw), gaz_it->second, cfg);
    if (!res) {
      out.rejected.push_back({record.record_id, RejectReason::below_threshold});
      continue;
    }
    ResolvedRecord resolved;
    resolved.record = record;
    resolved.admin2_id = res->admin2_id;
    resolved.resolution_method = to_resolution_method(*res);
    if (auto stl_it = settlement_by_id.find(res->matched_id); stl_it != settlement_by_id.end()) {
      resolved.admin3_settlement = *stl_it->second;
    }
    out.resolved.push_back(std::move(resolved));
  }
  return out;
}

std::optional<PlacementResult> place_admin3(const ResolvedRecord& r,
                                            std::span<const Settlement> settlements,
                                            const GridSpec& grid, const MatchConfig& cfg) {
  std::string query =
      cfg.normalize ? normalize_name(r.record.admin3_raw) : r.record.admin3_raw;
  if (query.empty()) return std::nullopt;

  auto order_key = [](const Settlement& s) {
    return std::tie(s.name, s.location.lon, s.location.lat);
  };
  const Settlement* best = nullptr;
  double best_ratio = -1.0;
  for (const Settlement& s : settlements) {
    if (!s.admin2_id.empty() && s.admin2_id != r.admin2_id) continue;
    std::string name = cfg.normalize ? normalize_name(s.name) : s.name;
    if (name.empty()) continue;
    const double ratio = similarity_ratio(query, name);
    if (ratio < cfg.threshold) continue;
    const bool better = best == nullptr || ratio > best_ratio ||
                        (ratio == best_ratio && order_key(s) < order_key(*best));
    if (better) {
      best = &s;
      best_ratio = ratio;
    }
  }
  if (best == nullptr || !in_extent(best->location, grid)) return std::nullopt;
  return PlacementResult{r.record.record_id, point_to_cell(best->location, grid),
                         PlacementMethod::admin3_deterministic, 1.0, false};
}

std::optional<PlacementResult> place_single_cell(const ResolvedRecord& r,
                                                 const ProportionMatrix& m,
                                                 bool* zero_building_fallback) {
  if (zero_building_fallback != nullptr) *zero_building_fallback = false;
  const ProportionRow* row = m.row(r.admin2_id);
  if (row == nullptr) {
    if (zero_building_fallback != nullptr) *zero_building_fallback = true;
    return std::nullopt;
  }
  if (!row->single_cell()) return std::nullopt;
  return PlacementResult{r.record.record_id, row->cells.front(),
                         PlacementMethod::single_cell_deterministic, 1.0, false};
}

PartitionResult partition_for_modeling(std::span<const ResolvedRecord> resolved,
                                       std::span<const Settlement> settlements,
                                       const ProportionMatrix& m, const GridSpec& grid,
                                       const MatchConfig& cfg) {
  PartitionResult out;
  for (const ResolvedRecord& r : resolved) {
    const ProportionRow* row = m.row(r.admin2_id);
    std::optional<PlacementResult> admin3 = place_admin3(r, settlements, grid, cfg);

    if (row == nullptr) {
      ModelingSet& set = out.modeling_sets[r.admin2_id];
      set.has_row = false;
      if (admin3) {
        out.support_violations.push_back({r.record.record_id, r.admin2_id, admin3->cell});
      }
      set.unlabeled.push_back(r);
      continue;
    }

    if (row->single_cell()) {
      const GridCellId sole = row->cells.front();
      if (admin3 && admin3->cell == sole) {
        out.deterministic.push_back(*admin3);
      } else {
        if (admin3) {
          out.support_violations.push_back({r.record.record_id, r.admin2_id, admin3->cell});
        }
        out.deterministic.push_back({r.record.record_id, sole,
                                     PlacementMethod::single_cell_deterministic, 1.0, false});
      }
      continue;
    }

    ModelingSet& set = out.modeling_sets[r.admin2_id];
    if (admin3 && row->supports(admin3->cell)) {
      set.labeled.push_back({r, admin3->cell});
    } else {
      if (admin3) {
        out.support_violations.push_back({r.record.record_id, r.admin2_id, admin3->cell});
      }
      set.unlabeled.push_back(r);
    }
  }

  auto by_record_id = [](const PlacementResult& a, const PlacementResult& b) {
    return a.record_id < b.record_id;
  };
  std::sort(out.deterministic.begin(), out.deterministic.end(), by_record_id);
  for (auto& [admin2_id, set] : out.modeling_sets) {
    std::sort(set.labeled.begin(), set.labeled.end(),
              [](const LabeledRecord& a, const LabeledRecord& b) {
                return a.record.record.record_id < b.record.record.record_id;
              });
    std::sort(set.unlabeled.begin(), set.unlabeled.end(),
              [](const ResolvedRecord& a, const ResolvedRecord& b) {
                return a.record.record_id < b.record.record_id;
              });
  }
  std::sort(out.support_violations.begin(), out.support_violations.end(),
            [](const SupportViolation& a, const SupportViolation& b) {
              return a.record_id < b.record_id;
            });
  return out;
}

}  // namespace gridspread

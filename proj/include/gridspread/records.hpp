// Copyright (c) 2026 gridspread contributors
// Licensed under Apache License 2.0

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridspread/grid.hpp"
#include "gridspread/text_match.hpp"
#include "gridspread/weights.hpp"

namespace gridspread {

/// Raw displacement record as ingested. Empty strings mean the column
/// was absent. Demographic columns and any extra CSV columns live in
/// `attributes`; an "admin4" attribute, when present, joins the
/// resolution cascade.
struct DisplacementRecord {
  std::string record_id;
  std::string origin_country;
  std::string admin1_raw;
  std::string admin2_raw;
  std::string admin3_raw;
  int year = 0;
  std::map<std::string, std::string> attributes;
};

struct Settlement {
  std::string name;
  GeoPoint location;
  std::string admin2_id;  // empty when the source does not know it
};

enum class ResolutionMethod { exact, fuzzy, cascade_admin3, cascade_admin4 };

const char* to_string(ResolutionMethod method);

struct ResolvedRecord {
  DisplacementRecord record;
  std::string admin2_id;
  std::optional<Settlement> admin3_settlement;  // set when the cascade hit a settlement
  ResolutionMethod resolution_method = ResolutionMethod::exact;
};

enum class RejectReason { no_admin2, below_threshold, unknown_country };

const char* to_string(RejectReason reason);

struct RejectedRecord {
  std::string record_id;
  RejectReason reason;
};

struct ResolveOutcome {
  std::vector<ResolvedRecord> resolved;
  std::vector<RejectedRecord> rejected;
};

/// Resolves each record's origin to a canonical admin2 id, cascading
/// admin2 -> admin3 -> admin4 within the record's country. Settlements
/// that know their admin2 join the admin3 candidate pool. Every input
/// record lands in exactly one of resolved or rejected.
ResolveOutcome resolve_records(std::span<const DisplacementRecord> records,
                               const AdminIndex& index, std::span<const Settlement> settlements,
                               const MatchConfig& cfg);

enum class PlacementMethod { admin3_deterministic, single_cell_deterministic, modeled };

const char* to_string(PlacementMethod method);

struct PlacementResult {
  std::string record_id;
  GridCellId cell;
  PlacementMethod method = PlacementMethod::modeled;
  double score = 1.0;     // 1 for deterministic, propagation confidence for modeled
  bool fallback = false;  // placed by area-weighted sampling (zero-building admin2)
};

/// Places a record at the grid cell of the settlement its admin3 text
/// matches. Settlements with a known admin2 only compete for records in
/// that admin2. Ties break by higher ratio, then smaller (name, lon,
/// lat). Settlements outside the grid yield no placement.
std::optional<PlacementResult> place_admin3(const ResolvedRecord& r,
                                            std::span<const Settlement> settlements,
                                            const GridSpec& grid, const MatchConfig& cfg);

/// Places a record whose admin2 has its whole building stock in one
/// cell. Rows absent from the matrix (zero buildings) set
/// *zero_building_fallback instead of producing a placement.
std::optional<PlacementResult> place_single_cell(const ResolvedRecord& r,
                                                 const ProportionMatrix& m,
                                                 bool* zero_building_fallback = nullptr);

struct LabeledRecord {
  ResolvedRecord record;
  GridCellId cell;  // training label from the settlement placement
};

/// Records awaiting the model for one admin2. has_row is false for
/// zero-building admin2s, which skip the model for area-weighted
/// fallback sampling.
struct ModelingSet {
  std::vector<LabeledRecord> labeled;
  std::vector<ResolvedRecord> unlabeled;
  bool has_row = true;
};

/// A settlement placement landing outside the nonzero building support
/// of the record's admin2.
struct SupportViolation {
  std::string record_id;
  std::string admin2_id;
  GridCellId cell;
};

struct PartitionResult {
  std::vector<PlacementResult> deterministic;        // sorted by record_id
  std::map<std::string, ModelingSet> modeling_sets;  // keyed by admin2_id
  std::vector<SupportViolation> support_violations;
};

/// Routes each resolved record to exactly one of deterministic, labeled,
/// or unlabeled:
///   - single-cell admin2: deterministic at the sole support cell
///     (admin3_deterministic when a settlement match agrees with it);
///   - multi-cell admin2 with a settlement match inside the building
///     support: labeled (the model trains on it);
///   - settlement match outside the support: demoted to unlabeled and
///     reported as a support violation;
///   - everything else: unlabeled.
PartitionResult partition_for_modeling(std::span<const ResolvedRecord> resolved,
                                       std::span<const Settlement> settlements,
                                       const ProportionMatrix& m, const GridSpec& grid,
                                       const MatchConfig& cfg);

}  // namespace gridspread

#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "floodscout/mission_store.hpp"
#include "floodscout/terrain_analytics.hpp"

namespace floodscout {

struct ReportOptions {
  double threshold_m = 0.2;     // drop that counts toward area and hazard zones
  double standoff_m = 100.0;    // advisory pullback around hazard zones
  double safety_budget_m = 0.05;
  std::size_t min_zone_cells = 4;

  bool operator==(const ReportOptions&) const = default;
};

/// Everything derived from two epochs of a mission. The report renders it;
/// the service's diff endpoint returns it.
struct EpochComparison {
  DemDifference difference;
  std::vector<HazardZone> zones;
  StandoffAdvisory advisory;
  double elapsed_h = 0.0;
  RecessionRate rate;
  double revisit_h = 0.0;
};

/// Loads both stored DEMs and runs diff -> zones -> buffers -> rate ->
/// revisit. epoch_a must be captured before epoch_b.
EpochComparison compare_epochs(const MissionStore& store, std::string_view mission_id,
                               std::string_view epoch_a, std::string_view epoch_b,
                               const ReportOptions& options = {});

/// FeatureCollection with one feature per zone (kind "hazard_zone") and one
/// per buffer (kind "standoff_buffer"), WGS84.
nlohmann::json zones_geojson(const EpochComparison& cmp, const MissionOrigin& origin);

struct MissionReport {
  std::string markdown;
  nlohmann::json sidecar;

  std::string sidecar_text() const;  // sidecar.dump(2) plus newline
};

/// Deterministic: the same store state and options give identical bytes.
MissionReport generate_report(const MissionStore& store, std::string_view mission_id,
                              std::string_view epoch_a, std::string_view epoch_b,
                              const ReportOptions& options = {});

}  // namespace floodscout

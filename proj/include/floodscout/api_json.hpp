#pragma once

// JSON shapes shared by the HTTP API and the CLI. See schemas/.

#include <json.hpp>

#include "floodscout/coverage_planner.hpp"
#include "floodscout/report.hpp"
#include "floodscout/sensor_model.hpp"
#include "floodscout/terrain_analytics.hpp"

namespace floodscout::api {

using nlohmann::json;

/// {"lat", "lon", "alt"?} or a GeoJSON position [lon, lat, alt?].
GeoPoint geo_point_from_json(const json& j);
json to_json(const GeoPoint& p);

/// Missing keys keep their defaults. Throws ErrorCode::validation on
/// unknown keys or wrong types.
CoverageParams params_from_json(const json& j);
json to_json(const CoverageParams& p);

json to_json(const CameraSpec& camera);
json to_json(const PlanStats& stats);

/// Plan summary with lines in WGS84 and the split into sorties. Throws
/// ErrorCode::infeasible when a line alone exceeds params.endurance.
json to_json(const CoveragePlan& plan);

json to_json(const ElevationProfile& profile, const MissionOrigin& origin);
json to_json(const ProfileComparison& cmp, const std::string& epoch_a, const std::string& epoch_b);

/// change report, zones and buffers GeoJSON, recession rate and revisit.
json diff_to_json(const EpochComparison& cmp, const ReportOptions& options, const MissionOrigin& origin);

/// Reads threshold_m, standoff_m, safety_budget_m and min_zone_cells.
ReportOptions report_options_from_json(const json& j);

json error_body(std::string_view code, std::string_view message);

}  // namespace floodscout::api

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "floodscout/geodesy.hpp"
#include "floodscout/planar.hpp"
#include "floodscout/sensor_model.hpp"

namespace floodscout {

/// Survey area as an implicitly closed ring of at least 3 vertices.
struct SurveyPolygon {
  std::vector<GeoPoint> vertices;

  bool operator==(const SurveyPolygon&) const = default;
};

struct CoverageParams {
  double altitude_agl = 50.0;
  double side_overlap = 0.65;
  double front_overlap = 0.75;
  std::optional<double> heading_deg;  // nullopt selects auto_heading
  double cruise_speed = 5.0;          // m/s
  double turn_penalty = 3.0;          // seconds per line change
  double endurance = 1500.0;          // seconds per sortie

  bool operator==(const CoverageParams&) const = default;
};

enum class WaypointAction { fly_to, line_start, line_end };

std::string_view to_string(WaypointAction action);
WaypointAction waypoint_action_from_string(std::string_view s);

struct Waypoint {
  GeoPoint position;
  WaypointAction action = WaypointAction::fly_to;
};

/// One straight pass, flown from start to end. up = altitude above origin.
struct SurveyLine {
  EnuPoint start;
  EnuPoint end;
  int sweep_index = 0;  // index of the sweep offset this segment belongs to

  double length() const;
};

struct PlanStats {
  double total_path_m = 0.0;
  double est_flight_s = 0.0;
  std::size_t photo_count = 0;
  std::size_t line_count = 0;
  double est_gsd = 0.0;

  bool operator==(const PlanStats&) const = default;
};

struct CoveragePlan {
  MissionOrigin origin;
  CameraSpec camera;
  CoverageParams params;
  double heading_deg = 0.0;  // bearing of the line direction, [0, 180)
  FootprintDims footprint;
  double line_spacing = 0.0;
  double trigger_distance = 0.0;
  std::vector<SurveyLine> lines;
  std::vector<EnuPoint> photo_positions;
  std::vector<Waypoint> waypoints;
  PlanStats stats;
};

/// Throws ErrorCode::validation for fewer than 3 vertices, zero area or a
/// self-intersecting ring.
void validate(const SurveyPolygon& poly);
void validate(const CoverageParams& params);

/// Polygon vertices in the mission's ENU frame.
std::vector<Vec2> to_local(const SurveyPolygon& poly, const MissionOrigin& origin);

/// Bearing of the longest edge folded into [0, 180); the first longest edge
/// wins ties.
double auto_heading(const SurveyPolygon& poly);

/// Boustrophedon plan. Lines run along the heading and are offset by
/// line_spacing across it. Each line spans the part of the polygon inside
/// its swath band and is extended by half a footprint height at both ends.
CoveragePlan plan_coverage(const SurveyPolygon& poly, const CameraSpec& camera,
                           const CoverageParams& params, const MissionOrigin& origin);

/// Photo triggers along a line: start, start + d, ... and the end point.
std::vector<EnuPoint> photos_along(const SurveyLine& line, double trigger_distance);

PlanStats estimate_stats(const std::vector<SurveyLine>& lines, std::size_t photo_count,
                         const CoverageParams& params, const CameraSpec& camera);

/// Fraction of 1 m lattice points inside the polygon that fall inside at
/// least one photo footprint. Independent of the line construction.
double verify_coverage(const CoveragePlan& plan, const SurveyPolygon& poly,
                       const CameraSpec& camera, const CoverageParams& params);

/// Greedy split at line boundaries so that every sortie fits the endurance.
/// Throws ErrorCode::infeasible if one line alone exceeds it.
std::vector<CoveragePlan> partition_sorties(const CoveragePlan& plan, double endurance);

/// Rebuilds photos, waypoints and stats of a plan from its lines.
void rebuild_derived(CoveragePlan& plan);

// Waypoint export -----------------------------------------------------------

struct WaypointDocument {
  double altitude_agl = 0.0;
  double trigger_distance = 0.0;
  std::vector<Waypoint> waypoints;
};

WaypointDocument to_waypoint_document(const CoveragePlan& plan);

/// GeoJSON FeatureCollection: one Point per waypoint in flight order and a
/// LineString of the whole path. 6 decimals for lat/lon, 2 for meters.
std::string export_waypoints(const WaypointDocument& doc);
std::string export_waypoints(const CoveragePlan& plan);

/// Reads a document written by export_waypoints. Throws ErrorCode::parse.
WaypointDocument parse_waypoints(std::string_view geojson);

}  // namespace floodscout

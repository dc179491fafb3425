#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "floodscout/coverage_planner.hpp"
#include "floodscout/geodesy.hpp"
#include "floodscout/planar.hpp"

namespace floodscout::geojson {

using nlohmann::json;

/// Accepts a Polygon geometry, a Feature holding one, or a FeatureCollection
/// whose first Polygon feature is used. Only the outer ring is read; rings
/// with holes are rejected. A closing vertex equal to the first is dropped.
SurveyPolygon parse_polygon(const json& doc);
SurveyPolygon parse_polygon(std::string_view text);
inline SurveyPolygon parse_polygon(const std::string& text) { return parse_polygon(std::string_view(text)); }

/// LineString geometry, Feature or FeatureCollection (first LineString).
std::vector<GeoPoint> parse_line_string(const json& doc);
std::vector<GeoPoint> parse_line_string(std::string_view text);
inline std::vector<GeoPoint> parse_line_string(const std::string& text) {
  return parse_line_string(std::string_view(text));
}

json polygon_geometry(const std::vector<GeoPoint>& ring);
json polygon_geometry(const SurveyPolygon& poly);

/// Closed GeoJSON polygon for a ring given in the mission ENU frame.
/// Rings with fewer than 3 vertices become Point / LineString geometries.
json local_ring_geometry(const std::vector<Vec2>& ring, const MissionOrigin& origin);

}  // namespace floodscout::geojson

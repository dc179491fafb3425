#include "floodscout/geojson.hpp"

#include <fmt/format.h>

#include "floodscout/error.hpp"

namespace floodscout::geojson {

namespace {

json parse_text(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse, fmt::format("invalid GeoJSON: {}", e.what()));
  }
}

// Finds the first geometry of the requested type in a geometry, Feature or
// FeatureCollection.
const json* find_geometry(const json& doc, std::string_view type) {
  if (!doc.is_object() || !doc.contains("type")) return nullptr;
  const std::string t = doc.at("type").get<std::string>();
  if (t == type) return &doc;
  if (t == "Feature" && doc.contains("geometry")) return find_geometry(doc.at("geometry"), type);
  if (t == "FeatureCollection" && doc.contains("features")) {
    for (const auto& f : doc.at("features")) {
      if (const json* g = find_geometry(f, type)) return g;
    }
  }
  return nullptr;
}

GeoPoint position(const json& c) {
  if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number()) {
    throw Error(ErrorCode::parse, "GeoJSON position must be [lon, lat(, alt)]");
  }
  GeoPoint p{c[1].get<double>(), c[0].get<double>(), 0.0};
  if (c.size() > 2 && c[2].is_number()) p.alt = c[2].get<double>();
  validate(p);
  return p;
}

json coords(const GeoPoint& p) { return json::array({p.lon, p.lat}); }

}  // namespace

SurveyPolygon parse_polygon(const json& doc) {
  const json* geom = find_geometry(doc, "Polygon");
  if (geom == nullptr) throw Error(ErrorCode::parse, "no Polygon geometry found");
  const json& rings = geom->at("coordinates");
  if (!rings.is_array() || rings.empty()) throw Error(ErrorCode::parse, "Polygon has no rings");
  if (rings.size() > 1) {
    throw Error(ErrorCode::validation, "polygons with holes are not supported");
  }
  SurveyPolygon poly;
  for (const auto& c : rings[0]) poly.vertices.push_back(position(c));
  if (poly.vertices.size() > 1 && poly.vertices.front().lat == poly.vertices.back().lat &&
      poly.vertices.front().lon == poly.vertices.back().lon) {
    poly.vertices.pop_back();
  }
  return poly;
}

SurveyPolygon parse_polygon(std::string_view text) { return parse_polygon(parse_text(text)); }

std::vector<GeoPoint> parse_line_string(const json& doc) {
  const json* geom = find_geometry(doc, "LineString");
  if (geom == nullptr) throw Error(ErrorCode::parse, "no LineString geometry found");
  std::vector<GeoPoint> pts;
  for (const auto& c : geom->at("coordinates")) pts.push_back(position(c));
  return pts;
}

std::vector<GeoPoint> parse_line_string(std::string_view text) {
  return parse_line_string(parse_text(text));
}

json polygon_geometry(const std::vector<GeoPoint>& ring) {
  json coordinates = json::array();
  for (const auto& p : ring) coordinates.push_back(coords(p));
  if (!ring.empty()) coordinates.push_back(coords(ring.front()));
  return {{"type", "Polygon"}, {"coordinates", json::array({coordinates})}};
}

json polygon_geometry(const SurveyPolygon& poly) { return polygon_geometry(poly.vertices); }

json local_ring_geometry(const std::vector<Vec2>& ring, const MissionOrigin& origin) {
  std::vector<GeoPoint> geo;
  for (const Vec2 v : ring) geo.push_back(enu_to_wgs84({v.x, v.y, 0.0}, origin));
  if (geo.size() == 1) return {{"type", "Point"}, {"coordinates", coords(geo[0])}};
  if (geo.size() == 2) {
    return {{"type", "LineString"}, {"coordinates", json::array({coords(geo[0]), coords(geo[1])})}};
  }
  return polygon_geometry(geo);
}

}  // namespace floodscout::geojson

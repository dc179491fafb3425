#include <doctest.h>

#include "floodscout/error.hpp"
#include "floodscout/geojson.hpp"

using namespace floodscout;
using nlohmann::json;

namespace {
const char* kSquare = R"({"type":"Polygon","coordinates":[[[6.765,50.806],[6.766,50.806],[6.766,50.807],[6.765,50.807],[6.765,50.806]]]})";

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::io;
}
}  // namespace

TEST_CASE("polygon from geometry, feature and collection") {
  const SurveyPolygon a = geojson::parse_polygon(std::string(kSquare));
  REQUIRE(a.vertices.size() == 4);  // closing vertex dropped
  CHECK(a.vertices[1].lon == 6.766);
  CHECK(a.vertices[1].lat == 50.806);
  const json feature{{"type", "Feature"}, {"properties", json::object()}, {"geometry", json::parse(kSquare)}};
  CHECK(geojson::parse_polygon(feature) == a);
  const json fc{{"type", "FeatureCollection"},
                {"features", json::array({json{{"type", "Feature"}, {"geometry", {{"type", "Point"}, {"coordinates", {6.0, 50.0}}}}}, feature})}};
  CHECK(geojson::parse_polygon(fc) == a);
}

TEST_CASE("polygon geometry roundtrip closes the ring") {
  const SurveyPolygon a = geojson::parse_polygon(std::string(kSquare));
  const json g = geojson::polygon_geometry(a);
  CHECK(g["coordinates"][0].size() == 5);
  CHECK(g["coordinates"][0].front() == g["coordinates"][0].back());
  CHECK(geojson::parse_polygon(g) == a);
}

TEST_CASE("polygon errors") {
  CHECK(code_of([] { geojson::parse_polygon(std::string("{nope")); }) == ErrorCode::parse);
  CHECK(code_of([] { geojson::parse_polygon(std::string(R"({"type":"Point","coordinates":[1,2]})")); }) ==
        ErrorCode::parse);
  CHECK(code_of([] {
          geojson::parse_polygon(std::string(R"({"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1]],[[0.1,0.1],[0.2,0.1],[0.2,0.2]]]})"));
        }) == ErrorCode::validation);
  CHECK(code_of([] { geojson::parse_polygon(std::string(R"({"type":"Polygon","coordinates":[[[0,95],[1,0],[1,1]]]})")); }) ==
        ErrorCode::domain);
  CHECK(code_of([] { geojson::parse_polygon(std::string(R"({"type":"Polygon","coordinates":[[["a",0],[1,0],[1,1]]]})")); }) ==
        ErrorCode::parse);
}

TEST_CASE("line string") {
  const auto pts = geojson::parse_line_string(std::string(R"({"type":"LineString","coordinates":[[6.765,50.806,3],[6.766,50.807]]})"));
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].alt == 3.0);
  CHECK(pts[1].lat == 50.807);
  CHECK(code_of([] { geojson::parse_line_string(std::string(kSquare)); }) == ErrorCode::parse);
}

TEST_CASE("local ring geometry by vertex count") {
  const MissionOrigin o{{50.806, 6.765, 0.0}};
  CHECK(geojson::local_ring_geometry({{0, 0}}, o)["type"] == "Point");
  CHECK(geojson::local_ring_geometry({{0, 0}, {1, 1}}, o)["type"] == "LineString");
  const json poly = geojson::local_ring_geometry({{0, 0}, {10, 0}, {0, 10}}, o);
  CHECK(poly["type"] == "Polygon");
  CHECK(poly["coordinates"][0].size() == 4);
  CHECK(poly["coordinates"][0][0][0] == 6.765);
}

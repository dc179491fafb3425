#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "floodscout/coverage_planner.hpp"
#include "floodscout/error.hpp"
#include "test_support.hpp"

using namespace floodscout;
using nlohmann::json;

namespace {
const MissionOrigin kOrigin{{50.8060, 6.7650, 0.0}};
const CameraSpec kMz2{"mz2", "DJI Mavic 2 Zoom", 4000, 3000, 83.0, false};

SurveyPolygon local_poly(const std::vector<Vec2>& ring) { return {testing::to_geo(ring, kOrigin)}; }

SurveyPolygon square200() { return local_poly({{0, 0}, {200, 0}, {200, 200}, {0, 200}}); }

CoverageParams square_params() {
  CoverageParams p;
  p.altitude_agl = 50.0;
  p.side_overlap = 0.6;
  p.front_overlap = 0.8;
  p.heading_deg = 0.0;
  return p;
}

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

TEST_CASE("200 m square, reference numbers") {
  const CoveragePlan plan = plan_coverage(square200(), kMz2, square_params(), kOrigin);
  CHECK(plan.line_spacing == doctest::Approx(35.38901058223775).epsilon(1e-12));
  CHECK(plan.trigger_distance == doctest::Approx(13.27087896833916).epsilon(1e-12));
  CHECK(plan.lines.size() == 6);
  CHECK(plan.stats.line_count == 6);
  CHECK(plan.stats.photo_count == 132);
  CHECK(plan.stats.total_path_m == doctest::Approx(1775.0714219613635).epsilon(1e-6));
  CHECK(plan.stats.est_flight_s == doctest::Approx(370.0142843922727).epsilon(1e-6));
  CHECK(plan.stats.est_gsd == doctest::Approx(gsd(kMz2, 50.0)));
  CHECK(verify_coverage(plan, square200(), kMz2, square_params()) == 1.0);
  // first line centered half a spacing in from the west edge, flown north
  CHECK(plan.lines[0].start.east == doctest::Approx(35.38901058223775 / 2).epsilon(1e-6));
  CHECK(plan.lines[0].end.north > plan.lines[0].start.north);
  CHECK(plan.lines[1].end.north < plan.lines[1].start.north);
  CHECK(plan.waypoints.size() == 12);
  CHECK(plan.waypoints.front().action == WaypointAction::line_start);
}

TEST_CASE("auto heading follows the longest edge") {
  CHECK(auto_heading(local_poly({{0, 0}, {300, 0}, {300, 100}, {0, 100}})) == doctest::Approx(90.0).epsilon(1e-6));
  CHECK(auto_heading(local_poly({{0, 0}, {100, 0}, {100, 300}, {0, 300}})) == doctest::Approx(0.0).epsilon(1e-6));
  // two equal diagonals; the first one wins
  CHECK(auto_heading(local_poly({{0, 0}, {100, 0}, {200, 100}, {100, 100}})) == doctest::Approx(45.0).epsilon(1e-4));
  CoverageParams p = square_params();
  p.heading_deg = 270.0;
  CHECK(plan_coverage(square200(), kMz2, p, kOrigin).heading_deg == doctest::Approx(90.0));
  p.heading_deg = -30.0;
  CHECK(plan_coverage(square200(), kMz2, p, kOrigin).heading_deg == doctest::Approx(150.0));
}

TEST_CASE("degenerate and invalid inputs") {
  CHECK(code_of([] { validate(local_poly({{0, 0}, {10, 0}})); }) == ErrorCode::validation);
  CHECK(code_of([] { validate(local_poly({{0, 0}, {10, 0}, {20, 0}})); }) == ErrorCode::validation);
  CHECK(code_of([] { validate(local_poly({{0, 0}, {10, 10}, {10, 0}, {0, 10}})); }) == ErrorCode::validation);
  CHECK(code_of([] { plan_coverage(local_poly({{0, 0}, {10, 0}, {20, 0}}), kMz2, square_params(), kOrigin); }) ==
        ErrorCode::validation);
  CoverageParams p = square_params();
  p.altitude_agl = 0.0;
  CHECK(code_of([&] { plan_coverage(square200(), kMz2, p, kOrigin); }) == ErrorCode::validation);
  p = square_params();
  p.side_overlap = 0.99;
  CHECK(code_of([&] { plan_coverage(square200(), kMz2, p, kOrigin); }) == ErrorCode::validation);
  p = square_params();
  p.cruise_speed = 0.0;
  CHECK(code_of([&] { plan_coverage(square200(), kMz2, p, kOrigin); }) == ErrorCode::validation);
}

TEST_CASE("narrow polygon gets a single centered line") {
  const auto poly = local_poly({{0, 0}, {10, 0}, {10, 300}, {0, 300}});
  const CoveragePlan plan = plan_coverage(poly, kMz2, square_params(), kOrigin);
  REQUIRE(plan.lines.size() == 1);
  CHECK(plan.lines[0].start.east == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(verify_coverage(plan, poly, kMz2, square_params()) == 1.0);
}

TEST_CASE("verify_coverage detects gaps") {
  CoveragePlan plan = plan_coverage(square200(), kMz2, square_params(), kOrigin);
  CoveragePlan half = plan;
  half.lines.resize(3);
  rebuild_derived(half);
  CHECK(verify_coverage(half, square200(), kMz2, square_params()) < 1.0);
  CoveragePlan none = plan;
  none.photo_positions.clear();
  CHECK(verify_coverage(none, square200(), kMz2, square_params()) == 0.0);
}

TEST_CASE("photos_along") {
  const SurveyLine line{{0, 0, 50}, {0, 10, 50}, 0};
  const auto ph = photos_along(line, 4.0);
  REQUIRE(ph.size() == 4);
  CHECK(ph[1].north == 4.0);
  CHECK(ph[2].north == 8.0);
  CHECK(ph[3].north == 10.0);
  // exact multiple: no duplicate end photo
  CHECK(photos_along({{0, 0, 50}, {0, 8, 50}, 0}, 4.0).size() == 3);
  CHECK(photos_along({{0, 0, 50}, {0, 0, 50}, 0}, 4.0).size() == 1);
}

TEST_CASE("estimate_stats of an empty plan") {
  const PlanStats s = estimate_stats({}, 0, square_params(), kMz2);
  CHECK(s == PlanStats{});
}

TEST_CASE("partition into sorties") {
  const CoveragePlan plan = plan_coverage(square200(), kMz2, square_params(), kOrigin);
  const double line_s = plan.lines[0].length() / 5.0;
  // two lines plus one transit and turn fit, three do not
  const double endurance = 2 * line_s + plan.line_spacing / 5.0 + 3.0 + 1.0;
  const auto sorties = partition_sorties(plan, endurance);
  REQUIRE(sorties.size() == 3);
  std::size_t photos = 0;
  for (const auto& s : sorties) {
    CHECK(s.lines.size() == 2);
    CHECK(s.stats.est_flight_s <= endurance);
    photos += s.stats.photo_count;
  }
  CHECK(photos == plan.stats.photo_count);
  CHECK(partition_sorties(plan, 1e6).size() == 1);
  try {
    partition_sorties(plan, line_s / 2);
    FAIL("expected infeasible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::infeasible);
    CHECK(std::string(e.what()).find("line 0") != std::string::npos);
  }
}

TEST_CASE("waypoint export structure and roundtrip") {
  const CoveragePlan plan = plan_coverage(square200(), kMz2, square_params(), kOrigin);
  const std::string text = export_waypoints(plan);
  const json doc = json::parse(text);
  CHECK(doc["type"] == "FeatureCollection");
  const auto& f = doc["features"];
  REQUIRE(f.size() == plan.waypoints.size() + 1);
  CHECK(f[0]["properties"]["order"] == 0);
  CHECK(f[0]["properties"]["action"] == "line_start");
  CHECK(f[0]["properties"]["altitude_agl_m"] == 50.0);
  for (std::size_t i = 0; i < plan.waypoints.size(); ++i) {
    CHECK(f[i]["geometry"]["type"] == "Point");
    CHECK(f[i]["properties"]["order"] == i);
  }
  CHECK(f.back()["geometry"]["type"] == "LineString");
  CHECK(f.back()["properties"]["kind"] == "flight_path");
  CHECK(f.back()["geometry"]["coordinates"].size() == plan.waypoints.size());
  CHECK(testing::validate_schema(doc, "waypoints.schema.json").empty());

  const WaypointDocument back = parse_waypoints(text);
  CHECK(back.waypoints.size() == plan.waypoints.size());
  CHECK(back.altitude_agl == 50.0);
  CHECK(export_waypoints(back) == text);
  for (std::size_t i = 0; i < back.waypoints.size(); ++i) {
    CHECK(std::abs(back.waypoints[i].position.lat - plan.waypoints[i].position.lat) <= 5e-7);
    CHECK(back.waypoints[i].action == plan.waypoints[i].action);
  }
  CHECK(code_of([] { parse_waypoints("{\"type\":\"Point\"}"); }) == ErrorCode::parse);
  CHECK(code_of([] { parse_waypoints("not json"); }) == ErrorCode::parse);
}

TEST_CASE("property: random convex and L-shaped polygons are fully covered") {
  testing::Rng rng(41);
  for (int i = 0; i < 12; ++i) {
    const double ex = rng.uniform(150, 400), en = rng.uniform(150, 400);
    const auto ring = i % 2 == 0 ? testing::random_convex(rng, ex, en, rng.integer(4, 10))
                                 : testing::random_l_shape(rng, ex, en);
    const SurveyPolygon poly = local_poly(ring);
    CoverageParams p;
    p.altitude_agl = rng.uniform(40, 120);
    p.side_overlap = rng.uniform(0.0, 0.8);
    p.front_overlap = rng.uniform(0.0, 0.8);
    if (i % 3 == 0) p.heading_deg = rng.uniform(0, 360);
    const CoveragePlan plan = plan_coverage(poly, kMz2, p, kOrigin);
    CHECK(verify_coverage(plan, poly, kMz2, p) == 1.0);
    CHECK(plan.stats.photo_count == plan.photo_positions.size());
    CHECK(plan.stats.est_flight_s ==
          doctest::Approx(plan.stats.total_path_m / p.cruise_speed + (plan.lines.size() - 1) * p.turn_penalty));
    // consecutive passes alternate direction
    const double h = plan.heading_deg * M_PI / 180.0;
    for (std::size_t k = 0; k + 1 < plan.lines.size(); ++k) {
      auto dir = [&](const SurveyLine& l) {
        return (l.end.east - l.start.east) * std::sin(h) + (l.end.north - l.start.north) * std::cos(h);
      };
      CHECK((dir(plan.lines[k]) > 0) != (dir(plan.lines[k + 1]) > 0));
    }
  }
}

TEST_CASE("property: more overlap never means fewer photos") {
  testing::Rng rng(42);
  for (int i = 0; i < 8; ++i) {
    const SurveyPolygon poly = local_poly(testing::random_convex(rng, rng.uniform(200, 500), rng.uniform(200, 500), 8));
    CoverageParams lo;
    lo.heading_deg = rng.uniform(0, 180);
    lo.side_overlap = rng.uniform(0.1, 0.5);
    lo.front_overlap = rng.uniform(0.1, 0.5);
    CoverageParams hi = lo;
    hi.side_overlap += 0.3;
    hi.front_overlap += 0.3;
    const auto a = plan_coverage(poly, kMz2, lo, kOrigin);
    const auto b = plan_coverage(poly, kMz2, hi, kOrigin);
    CHECK(b.stats.photo_count >= a.stats.photo_count);
    CHECK(b.stats.line_count >= a.stats.line_count);
  }
}

TEST_CASE("property: plan is invariant under translation and vertex rotation") {
  testing::Rng rng(43);
  for (int i = 0; i < 10; ++i) {
    auto ring = testing::random_convex(rng, rng.uniform(150, 400), rng.uniform(150, 400), 7);
    CoverageParams p;
    p.heading_deg = rng.uniform(0, 180);
    const auto base = plan_coverage(local_poly(ring), kMz2, p, kOrigin);

    std::rotate(ring.begin(), ring.begin() + 2, ring.end());
    const auto rotated = plan_coverage(local_poly(ring), kMz2, p, kOrigin);
    CHECK(rotated.stats.photo_count == base.stats.photo_count);
    CHECK(rotated.stats.total_path_m == doctest::Approx(base.stats.total_path_m).epsilon(1e-6));

    const Vec2 off{rng.uniform(-300, 300), rng.uniform(-300, 300)};
    std::vector<Vec2> moved;
    for (const auto& v : ring) moved.push_back(v + off);
    const auto shifted = plan_coverage(local_poly(moved), kMz2, p, kOrigin);
    CHECK(shifted.stats.line_count == base.stats.line_count);
    CHECK(shifted.stats.photo_count == base.stats.photo_count);
    CHECK(shifted.stats.total_path_m == doctest::Approx(base.stats.total_path_m).epsilon(1e-5));
  }
}

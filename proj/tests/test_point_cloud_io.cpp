#include <doctest.h>

#include <cmath>

#include "floodscout/dem_raster.hpp"
#include "floodscout/error.hpp"
#include "test_support.hpp"

using namespace floodscout;

namespace {
const MissionOrigin kOrigin{{50.8060, 6.7650, 0.0}};

std::string parse_error(const std::string& text) {
  try {
    parse_xyz(text, kOrigin);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::parse);
    return e.what();
  }
  FAIL("no error");
  return {};
}
}  // namespace

TEST_CASE("plain ENU points, comments and blank lines") {
  const PointCloud c = parse_xyz("# header\n1 2 3\n\n  4 5 6  # trailing\n", kOrigin);
  REQUIRE(c.points.size() == 2);
  CHECK(c.points[1].east == 4.0);
  CHECK(c.source_crs == CloudCrs::enu);
  CHECK(c.frame_origin == kOrigin);
}

TEST_CASE("non-finite points are counted and dropped") {
  const PointCloud c = parse_xyz("1 2 3\nnan 1 1\n1 inf 1\n4 5 6\n", kOrigin);
  CHECK(c.points.size() == 2);
  CHECK(c.rejected == 2);
}

TEST_CASE("#crs wgs84 converts to the mission frame") {
  const PointCloud c = parse_xyz("#crs wgs84\n50.8070 6.7650 12\n", kOrigin);
  REQUIRE(c.points.size() == 1);
  CHECK(c.source_crs == CloudCrs::wgs84);
  CHECK(c.points[0].north == doctest::Approx(111.19492664508967).epsilon(1e-9));
  CHECK(c.points[0].up == 12.0);
  // without a mission the first point anchors the frame
  const PointCloud free = parse_xyz("#crs wgs84\n50.8070 6.7650 12\n50.8060 6.7650 0\n", std::nullopt);
  CHECK(free.points[0].north == 0.0);
  CHECK(free.points[1].north == doctest::Approx(-111.19492664508967).epsilon(1e-9));
}

TEST_CASE("#crs enu with another anchor is re-projected") {
  const PointCloud c = parse_xyz("#crs enu 50.8070 6.7650 0\n0 0 5\n", kOrigin);
  REQUIRE(c.points.size() == 1);
  CHECK(c.points[0].north == doctest::Approx(111.19492664508967).epsilon(1e-6));
  CHECK(std::abs(c.points[0].east) < 1e-6);
  const PointCloud same = parse_xyz("#crs enu 50.8060 6.7650 0\n1 2 3\n", kOrigin);
  CHECK(same.points[0].east == 1.0);
}

TEST_CASE("parse errors carry line numbers") {
  CHECK(parse_error("1 2 3\n1 2\n").find("line 2") != std::string::npos);
  CHECK(parse_error("1 2 3\n\n1 2 x\n").find("line 3") != std::string::npos);
  CHECK(parse_error("1 2 3\n#crs wgs84\n").find("line 2") != std::string::npos);
  CHECK(parse_error("#crs mercator\n").find("line 1") != std::string::npos);
  CHECK(parse_error("#crs wgs84\n95 0 0\n").find("line 2") != std::string::npos);
  try {
    read_xyz("/nonexistent/cloud.xyz", kOrigin);
    FAIL("expected io");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io);
  }
}

TEST_CASE("property: write/read roundtrip at 1 mm") {
  testing::Rng rng(61);
  testing::TempDir dir;
  PointCloud c;
  for (int i = 0; i < 500; ++i) c.points.push_back({rng.uniform(-500, 500), rng.uniform(-500, 500), rng.uniform(-10, 40)});
  const std::string path = (dir / "c.xyz").string();
  write_xyz(c, kOrigin, path);
  const PointCloud back = read_xyz(path, kOrigin);
  REQUIRE(back.points.size() == c.points.size());
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    CHECK(std::abs(back.points[i].east - c.points[i].east) <= 1e-3);
    CHECK(std::abs(back.points[i].north - c.points[i].north) <= 1e-3);
    CHECK(std::abs(back.points[i].up - c.points[i].up) <= 1e-3);
  }
}

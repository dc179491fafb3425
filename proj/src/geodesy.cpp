#include "floodscout/geodesy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "floodscout/error.hpp"

namespace floodscout {

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

namespace {

// Wraps a longitude difference into (-180, 180].
double wrap_delta_lon(double dlon) {
  while (dlon > 180.0) dlon -= 360.0;
  while (dlon <= -180.0) dlon += 360.0;
  return dlon;
}

double wrap_lon(double lon) {
  while (lon > 180.0) lon -= 360.0;
  while (lon < -180.0) lon += 360.0;
  return lon;
}

}  // namespace

void validate(const GeoPoint& p) {
  if (!std::isfinite(p.lat) || !std::isfinite(p.lon) || !std::isfinite(p.alt)) {
    throw Error(ErrorCode::domain, "geo point has non-finite component");
  }
  if (p.lat < -90.0 || p.lat > 90.0) {
    throw Error(ErrorCode::domain, fmt::format("latitude {} outside [-90, 90]", p.lat));
  }
  if (p.lon < -180.0 || p.lon > 180.0) {
    throw Error(ErrorCode::domain, fmt::format("longitude {} outside [-180, 180]", p.lon));
  }
}

EnuResult wgs84_to_enu_checked(const GeoPoint& p, const MissionOrigin& origin,
                               RangePolicy policy) {
  validate(p);
  const GeoPoint& o = origin.anchor;
  const double dlat = deg_to_rad(p.lat - o.lat);
  const double dlon = deg_to_rad(wrap_delta_lon(p.lon - o.lon));

  EnuResult r;
  r.point.east = kEarthRadiusM * std::cos(deg_to_rad(o.lat)) * dlon;
  r.point.north = kEarthRadiusM * dlat;
  r.point.up = p.alt - o.alt;
  r.beyond_validity_radius = std::hypot(r.point.east, r.point.north) > kValidityRadiusM;
  if (r.beyond_validity_radius && policy == RangePolicy::strict) {
    throw Error(ErrorCode::domain,
                fmt::format("point ({:.6f}, {:.6f}) is more than {} m from the mission origin",
                            p.lat, p.lon, kValidityRadiusM));
  }
  return r;
}

EnuPoint wgs84_to_enu(const GeoPoint& p, const MissionOrigin& origin) {
  return wgs84_to_enu_checked(p, origin, RangePolicy::warn).point;
}

GeoPoint enu_to_wgs84(const EnuPoint& v, const MissionOrigin& origin) {
  if (!std::isfinite(v.east) || !std::isfinite(v.north) || !std::isfinite(v.up)) {
    throw Error(ErrorCode::domain, "ENU point has non-finite component");
  }
  const GeoPoint& o = origin.anchor;
  GeoPoint g;
  g.lat = o.lat + rad_to_deg(v.north / kEarthRadiusM);
  g.lon = wrap_lon(o.lon + rad_to_deg(v.east / (kEarthRadiusM * std::cos(deg_to_rad(o.lat)))));
  g.alt = o.alt + v.up;
  return g;
}

double geodesic_distance(const GeoPoint& a, const GeoPoint& b) {
  const double lat1 = deg_to_rad(a.lat);
  const double lat2 = deg_to_rad(b.lat);
  const double dlat = lat2 - lat1;
  const double dlon = deg_to_rad(wrap_delta_lon(b.lon - a.lon));
  const double s_lat = std::sin(dlat / 2.0);
  const double s_lon = std::sin(dlon / 2.0);
  const double h = s_lat * s_lat + std::cos(lat1) * std::cos(lat2) * s_lon * s_lon;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

}  // namespace floodscout

#pragma once

// Spherical-earth conversions between WGS84 lat/lon and a local
// East-North-Up tangent plane. See docs/coordinates.md for conventions.

namespace floodscout {

inline constexpr double kEarthRadiusM = 6'371'000.0;
inline constexpr double kValidityRadiusM = 50'000.0;

struct GeoPoint {
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, [-180, 180]
  double alt = 0.0;  // meters

  bool operator==(const GeoPoint&) const = default;
};

struct EnuPoint {
  double east = 0.0;
  double north = 0.0;
  double up = 0.0;

  bool operator==(const EnuPoint&) const = default;
};

/// Anchor of a mission's local frame; shared by every epoch of the mission.
struct MissionOrigin {
  GeoPoint anchor;

  bool operator==(const MissionOrigin&) const = default;
};

enum class RangePolicy {
  warn,    // flag points beyond kValidityRadiusM
  strict,  // throw ErrorCode::domain for them
};

struct EnuResult {
  EnuPoint point;
  bool beyond_validity_radius = false;
};

/// Throws ErrorCode::domain for out-of-range or non-finite coordinates.
void validate(const GeoPoint& p);

EnuResult wgs84_to_enu_checked(const GeoPoint& p, const MissionOrigin& origin,
                               RangePolicy policy = RangePolicy::warn);

/// east = R cos(lat0) dlon, north = R dlat, up = alt - alt0.
EnuPoint wgs84_to_enu(const GeoPoint& p, const MissionOrigin& origin);

/// Exact inverse of wgs84_to_enu under the same spherical model.
GeoPoint enu_to_wgs84(const EnuPoint& v, const MissionOrigin& origin);

/// Haversine distance in meters, altitude ignored.
double geodesic_distance(const GeoPoint& a, const GeoPoint& b);

double deg_to_rad(double deg);
double rad_to_deg(double rad);

}  // namespace floodscout

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "floodscout/dem_raster.hpp"
#include "floodscout/geodesy.hpp"
#include "floodscout/planar.hpp"

namespace floodscout {

// Sign convention everywhere: delta = later (b) - earlier (a). A drop is
// reported as a positive magnitude.

struct ProfileLine {
  std::vector<GeoPoint> vertices;
  std::string label;
};

struct ProfileStation {
  double distance_m = 0.0;
  double east = 0.0;
  double north = 0.0;
  std::optional<double> elevation;
};

struct ElevationProfile {
  std::string label;
  std::string epoch_id;
  double step_m = 0.0;
  std::vector<ProfileStation> stations;
  bool no_data = false;  // every station fell outside the grid or on nodata
};

/// Stations at 0, step, 2*step, ... plus every vertex, elevations sampled
/// bilinearly. step_m defaults to half the grid cell size.
ElevationProfile extract_profile(const DemGrid& grid, const ProfileLine& line,
                                 const MissionOrigin& origin,
                                 std::optional<double> step_m = std::nullopt);

struct ProfileComparison {
  std::vector<std::optional<double>> deltas;  // b - a per station
  std::size_t valid_count = 0;
  std::optional<double> mean_delta;
  std::optional<double> min_delta;
  std::optional<double> max_delta;
};

/// Throws ErrorCode::validation unless both profiles have the same stations.
ProfileComparison compare_profiles(const ElevationProfile& a, const ElevationProfile& b);

/// CSV with header `station_m,lat,lon,elev_m`; nodata is an empty field.
std::string profile_to_csv(const ElevationProfile& profile, const MissionOrigin& origin);

struct ChangeReport {
  std::string epoch_a;
  std::string epoch_b;
  double mean_delta_m = 0.0;
  double median_delta_m = 0.0;
  double p05_delta_m = 0.0;
  double max_drop_m = 0.0;
  double threshold_m = 0.0;
  double area_exceeding_m2 = 0.0;
  std::size_t valid_cells = 0;
  double valid_cell_fraction = 0.0;
};

struct DemDifference {
  DemGrid delta;  // geometry of a
  ChangeReport report;
};

/// b is resampled onto a's geometry when they differ. Throws
/// ErrorCode::validation when the grids do not overlap.
DemDifference diff_dem(const DemGrid& a, const DemGrid& b, double threshold_m);

/// Linear interpolation between order statistics; `sorted` must be sorted.
double percentile(const std::vector<double>& sorted, double q);

struct HazardZone {
  std::vector<Vec2> polygon;  // convex hull of member cell centers, CCW
  std::size_t cell_count = 0;
  double peak_drop_m = 0.0;
};

/// 4-connected components of cells whose drop reaches the threshold;
/// components smaller than min_cells are discarded.
std::vector<HazardZone> detect_hazard_zones(const DemGrid& delta, double drop_threshold_m,
                                            std::size_t min_cells = 4);

struct StandoffAdvisory {
  std::vector<std::vector<Vec2>> buffer_polygons;
  double standoff_m = 0.0;
};

inline constexpr int kBufferCircleVertices = 16;

/// Each buffer is the hull of 16-gon circles around every zone vertex.
StandoffAdvisory standoff_buffer(const std::vector<HazardZone>& zones, double standoff_m);

enum class Trend { falling, rising, steady };

struct RecessionRate {
  double rate_m_per_h = 0.0;
  Trend trend = Trend::steady;
};

std::string to_string(Trend trend);

RecessionRate estimate_recession_rate(const ChangeReport& report, double elapsed_h);

inline constexpr double kMinRevisitHours = 0.25;
inline constexpr double kMaxRevisitHours = 24.0;

/// safety_budget / rate clamped to [0.25 h, 24 h]; rate 0 gives 24 h.
double recommend_revisit(double rate_m_per_h, double safety_budget_m = 0.05);

nlohmann::json to_json(const ChangeReport& report);

}  // namespace floodscout

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "floodscout/geodesy.hpp"

namespace floodscout {

inline constexpr double kDefaultNodata = -9999.0;

enum class CloudCrs { enu, wgs84 };

/// Point cloud in the mission ENU frame. Clouds read as WGS84 are converted
/// on ingest; `source_crs` records what the file declared.
struct PointCloud {
  std::vector<EnuPoint> points;
  CloudCrs source_crs = CloudCrs::enu;
  std::size_t rejected = 0;  // non-finite points dropped at ingest
  std::optional<MissionOrigin> frame_origin;  // origin of `points`, if known
};

/// Regular elevation raster. Cell (col, row) covers
/// [origin_east + col*c, origin_east + (col+1)*c) x
/// [origin_north + row*c, origin_north + (row+1)*c); row 0 is the southern
/// edge. Values are interpreted as cell-center elevations.
struct DemGrid {
  double origin_east = 0.0;
  double origin_north = 0.0;
  double cell_size = 1.0;
  int n_cols = 0;
  int n_rows = 0;
  std::vector<double> values;  // row-major, south to north
  double nodata = kDefaultNodata;
  std::string epoch_id;
  std::string captured_at;  // ISO-8601, may be empty

  static DemGrid filled(double origin_east, double origin_north, double cell_size, int n_cols,
                        int n_rows, double value, double nodata = kDefaultNodata);

  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(n_cols) +
           static_cast<std::size_t>(col);
  }
  double at(int col, int row) const { return values[index(col, row)]; }
  double& at(int col, int row) { return values[index(col, row)]; }
  bool is_nodata(double v) const { return v == nodata; }
  bool valid(int col, int row) const { return !is_nodata(at(col, row)); }
  double center_east(int col) const { return origin_east + (col + 0.5) * cell_size; }
  double center_north(int row) const { return origin_north + (row + 0.5) * cell_size; }
  double max_east() const { return origin_east + n_cols * cell_size; }
  double max_north() const { return origin_north + n_rows * cell_size; }
  std::size_t size() const { return values.size(); }

  bool same_geometry(const DemGrid& other) const;
};

/// Throws ErrorCode::validation if the grid invariants are broken.
void validate(const DemGrid& grid);

struct DemStats {
  std::size_t valid_cells = 0;
  double valid_fraction = 0.0;
  double min_elev = 0.0;
  double max_elev = 0.0;
  double mean_elev = 0.0;
};

DemStats summarize(const DemGrid& grid);

enum class Aggregation { mean, max, min };

/// Bounds are the cloud's bounding box snapped outward to multiples of
/// cell_size, so clouds of one mission share a lattice.
DemGrid rasterize(const PointCloud& cloud, double cell_size, Aggregation agg = Aggregation::mean);

/// Single-pass inverse-distance-squared fill of nodata cells from valid
/// cells within `radius` (center to center).
DemGrid fill_voids(const DemGrid& grid, double radius, int min_neighbors = 3);

/// Bilinear interpolation between cell centers. Corners that carry zero
/// weight are ignored; with 1-3 nodata corners the nearest valid corner is
/// returned. nullopt outside the grid or when no corner is valid.
std::optional<double> sample_bilinear(const DemGrid& grid, double east, double north);

/// Throws ErrorCode::validation when the grids do not overlap.
DemGrid resample_onto(const DemGrid& source, const DemGrid& target_geometry);

// ESRI ASCII grid -------------------------------------------------------------

std::string format_asc(const DemGrid& grid);
void write_asc(const DemGrid& grid, const std::string& path);
DemGrid parse_asc(std::string_view text);
DemGrid read_asc(const std::string& path);

// Hillshade -------------------------------------------------------------------

struct HillshadeImage {
  double origin_east = 0.0;
  double origin_north = 0.0;
  double cell_size = 1.0;
  int n_cols = 0;
  int n_rows = 0;
  std::vector<std::uint8_t> values;  // same layout as DemGrid

  std::uint8_t at(int col, int row) const {
    return values[static_cast<std::size_t>(row) * static_cast<std::size_t>(n_cols) +
                  static_cast<std::size_t>(col)];
  }
};

/// Horn's method. Border cells and cells next to nodata are 0.
HillshadeImage render_hillshade(const DemGrid& grid, double azimuth_deg = 315.0,
                                double sun_altitude_deg = 45.0);

/// 8-bit grayscale PNG, north up.
std::vector<std::uint8_t> encode_png(const HillshadeImage& image);
void write_png(const HillshadeImage& image, const std::string& path);

// Point cloud text files ------------------------------------------------------

/// `.xyz`: one point per line `x y z`; `#` starts a comment. An optional
/// leading directive `#crs wgs84` (lines are lat lon alt) or
/// `#crs enu lat0 lon0 alt0` declares the frame; without one the points are
/// ENU in the mission frame.
///
/// With no mission origin the cloud stays in the frame the file declares
/// (the first point anchors a WGS84 cloud). Throws ErrorCode::parse with the
/// offending line number.
PointCloud parse_xyz(std::string_view text, std::optional<MissionOrigin> mission_origin);
PointCloud read_xyz(const std::string& path, std::optional<MissionOrigin> mission_origin);
void write_xyz(const PointCloud& cloud, const MissionOrigin& origin, const std::string& path);

}  // namespace floodscout

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "floodscout/dem_raster.hpp"
#include "floodscout/planar.hpp"

namespace floodscout::synth {

struct Flat {
  double z0 = 0.0;
};

struct Plane {
  double gx = 0.0;  // dz/deast
  double gy = 0.0;  // dz/dnorth
  double z0 = 0.0;
};

/// Trough of the given depth and full width along a line through the extent
/// center; axis is the compass bearing of that line. Cosine cross-section.
struct Valley {
  double depth = 0.0;
  double width = 1.0;
  double axis_deg = 0.0;
};

struct Composite;
using Surface = std::variant<Flat, Plane, Valley, Composite>;

/// Sum of its parts.
struct Composite {
  std::vector<Surface> parts;
};

struct TerrainSpec {
  Surface surface = Flat{};
  double extent_east = 100.0;  // points span [0, extent_east] x [0, extent_north]
  double extent_north = 100.0;
  std::uint64_t seed = 1;
};

double elevation(const TerrainSpec& spec, double east, double north);

/// Deterministic for a given seed. density in points per square meter.
PointCloud sample_terrain(const TerrainSpec& spec, double density, double noise_sigma,
                          std::uint64_t seed);

struct EpochPairSpec {
  TerrainSpec terrain;
  double water_level_a = 0.0;
  double water_level_b = 0.0;
  std::vector<Vec2> water_region;  // ENU polygon
  double point_density = 10.0;
  double noise_sigma = 0.02;
  /// Seed of epoch b; defaults to the terrain seed so that equal water
  /// levels produce identical clouds.
  std::optional<std::uint64_t> seed_b;
};

/// Inside the water region z = max(terrain, level), terrain elsewhere.
std::pair<PointCloud, PointCloud> make_epoch_pair(const EpochPairSpec& spec);

struct Preset {
  std::string name;
  GeoPoint origin;
  EpochPairSpec pair;
  double elapsed_h = 24.0;
};

/// "blessem-breach": 150 x 150 m flooded pit, independent noise per epoch,
/// 24 h between flights. Throws ErrorCode::not_found for unknown names.
Preset make_preset(const std::string& name, double drop_m);

nlohmann::json ground_truth(const Preset& preset);

}  // namespace floodscout::synth

#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "floodscout/dem_raster.hpp"
#include "floodscout/geodesy.hpp"
#include "floodscout/planar.hpp"

namespace testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

/// Seeded generator for property tests.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  double normal(double sigma) { return std::normal_distribution<double>(0.0, sigma)(engine_); }
  std::mt19937_64& engine() { return engine_; }

private:
  std::mt19937_64 engine_;
};

/// Random grid, `nodata_fraction` of cells set to nodata.
floodscout::DemGrid random_grid(Rng& rng, int n_cols, int n_rows, double cell,
                                double nodata_fraction = 0.0);

/// Convex polygon: random angles on an ellipse, CCW, in meters.
std::vector<floodscout::Vec2> random_convex(Rng& rng, double extent_e, double extent_n, int vertices);

/// L-shape of the given outer extent with a random notch, CCW.
std::vector<floodscout::Vec2> random_l_shape(Rng& rng, double extent_e, double extent_n);

std::vector<floodscout::GeoPoint> to_geo(const std::vector<floodscout::Vec2>& ring,
                                         const floodscout::MissionOrigin& origin);

std::string slurp(const std::filesystem::path& path);

std::filesystem::path schema_dir();
std::filesystem::path test_data_dir();
std::filesystem::path cameras_toml();

/// Subset of JSON Schema draft 2020-12 used by schemas/: type (string or
/// array), properties, required, additionalProperties (bool), items, enum,
/// const, minimum, maximum, minItems, maxItems, $ref (local "#/$defs/..."
/// or a sibling file name), oneOf, anyOf. Returns a list of violations.
std::vector<std::string> validate_schema(const nlohmann::json& instance, const std::string& schema_file);

}  // namespace testing

#include "floodscout/synthetic_scenarios.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "floodscout/error.hpp"

namespace floodscout::synth {

namespace {

struct SurfaceEval {
  const TerrainSpec& spec;
  double east;
  double north;

  double operator()(const Flat& f) const { return f.z0; }
  double operator()(const Plane& p) const { return p.z0 + p.gx * east + p.gy * north; }
  double operator()(const Valley& v) const {
    const double h = deg_to_rad(v.axis_deg);
    const double ce = spec.extent_east / 2.0;
    const double cn = spec.extent_north / 2.0;
    // Perpendicular distance to the axis line through the center.
    const double d = std::abs((east - ce) * std::cos(h) - (north - cn) * std::sin(h));
    const double half = v.width / 2.0;
    if (d >= half) return 0.0;
    return -v.depth * 0.5 * (1.0 + std::cos(std::numbers::pi * d / half));
  }
  double operator()(const Composite& c) const {
    double z = 0.0;
    for (const auto& part : c.parts) z += std::visit(*this, part);
    return z;
  }
};

void validate(const TerrainSpec& spec) {
  if (!(spec.extent_east > 0.0) || !(spec.extent_north > 0.0)) {
    throw Error(ErrorCode::validation, "terrain extent must be > 0");
  }
}

}  // namespace

double elevation(const TerrainSpec& spec, double east, double north) {
  return std::visit(SurfaceEval{spec, east, north}, spec.surface);
}

PointCloud sample_terrain(const TerrainSpec& spec, double density, double noise_sigma,
                          std::uint64_t seed) {
  validate(spec);
  if (!(density > 0.0)) throw Error(ErrorCode::validation, "point density must be > 0");
  if (!(noise_sigma >= 0.0)) throw Error(ErrorCode::validation, "noise sigma must be >= 0");

  const auto count = static_cast<std::size_t>(
      std::max(1.0, std::round(density * spec.extent_east * spec.extent_north)));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ue(0.0, spec.extent_east);
  std::uniform_real_distribution<double> un(0.0, spec.extent_north);
  std::normal_distribution<double> noise(0.0, noise_sigma > 0.0 ? noise_sigma : 1.0);

  PointCloud cloud;
  cloud.points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double e = ue(rng);
    const double n = un(rng);
    const double eps = noise_sigma > 0.0 ? noise(rng) : 0.0;
    cloud.points.push_back({e, n, elevation(spec, e, n) + eps});
  }
  return cloud;
}

std::pair<PointCloud, PointCloud> make_epoch_pair(const EpochPairSpec& spec) {
  auto epoch = [&](double level, std::uint64_t seed) {
    PointCloud cloud = sample_terrain(spec.terrain, spec.point_density, 0.0, seed);
    // Noise comes from its own stream so that the xy layout only depends on
    // the seed and the water level only changes z.
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> noise(0.0, spec.noise_sigma > 0.0 ? spec.noise_sigma : 1.0);
    for (auto& p : cloud.points) {
      if (spec.water_region.size() >= 3 && point_in_polygon(spec.water_region, {p.east, p.north})) {
        p.up = std::max(p.up, level);
      }
      if (spec.noise_sigma > 0.0) p.up += noise(rng);
    }
    return cloud;
  };
  return {epoch(spec.water_level_a, spec.terrain.seed),
          epoch(spec.water_level_b, spec.seed_b.value_or(spec.terrain.seed))};
}

Preset make_preset(const std::string& name, double drop_m) {
  if (name != "blessem-breach") {
    throw Error(ErrorCode::not_found, fmt::format("unknown synthetic preset '{}'", name));
  }
  if (!(drop_m >= 0.0)) throw Error(ErrorCode::validation, "drop must be >= 0");
  Preset p;
  p.name = name;
  p.origin = {50.8060, 6.7650, 60.0};
  p.elapsed_h = 24.0;
  auto& pair = p.pair;
  pair.terrain.extent_east = 150.0;
  pair.terrain.extent_north = 150.0;
  pair.terrain.seed = 20210716;
  // Gravel-pit floor tilted towards the breach, cut by the new river channel.
  pair.terrain.surface = Composite{{Plane{0.01, 0.004, 4.0}, Valley{2.0, 40.0, 60.0}}};
  pair.water_region = {{0.0, 0.0}, {150.0, 0.0}, {150.0, 150.0}, {0.0, 150.0}};
  pair.water_level_a = 10.0;
  pair.water_level_b = 10.0 - drop_m;
  pair.point_density = 10.0;
  pair.noise_sigma = 0.02;
  pair.seed_b = pair.terrain.seed + 1;
  return p;
}

nlohmann::json ground_truth(const Preset& preset) {
  using nlohmann::json;
  json region = json::array();
  for (const Vec2 v : preset.pair.water_region) region.push_back({v.x, v.y});
  return {{"preset", preset.name},
          {"origin", {{"lat", preset.origin.lat}, {"lon", preset.origin.lon}, {"alt", preset.origin.alt}}},
          {"water_level_a_m", preset.pair.water_level_a},
          {"water_level_b_m", preset.pair.water_level_b},
          {"true_delta_m", preset.pair.water_level_b - preset.pair.water_level_a},
          {"water_region_enu", region},
          {"elapsed_h", preset.elapsed_h},
          {"noise_sigma_m", preset.pair.noise_sigma},
          {"point_density_per_m2", preset.pair.point_density}};
}

}  // namespace floodscout::synth

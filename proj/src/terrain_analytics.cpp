#include "floodscout/terrain_analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

#include <fmt/format.h>

#include "floodscout/error.hpp"

namespace floodscout {

ElevationProfile extract_profile(const DemGrid& grid, const ProfileLine& line,
                                 const MissionOrigin& origin, std::optional<double> step_m) {
  if (line.vertices.size() < 2) {
    throw Error(ErrorCode::validation, "profile line needs at least 2 vertices");
  }
  const double step = step_m.value_or(grid.cell_size / 2.0);
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw Error(ErrorCode::validation, "profile step must be > 0");
  }

  std::vector<Vec2> pts;
  std::vector<double> cumulative{0.0};
  for (const auto& v : line.vertices) {
    const EnuPoint p = wgs84_to_enu(v, origin);
    pts.push_back({p.east, p.north});
  }
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double seg = distance(pts[i - 1], pts[i]);
    if (!(seg > 0.0)) {
      throw Error(ErrorCode::validation,
                  fmt::format("profile line vertices {} and {} coincide", i - 1, i));
    }
    cumulative.push_back(cumulative.back() + seg);
  }
  const double length = cumulative.back();

  std::vector<double> distances(cumulative.begin(), cumulative.end());
  for (std::size_t k = 1;; ++k) {
    const double d = static_cast<double>(k) * step;
    if (d >= length) break;
    distances.push_back(d);
  }
  std::sort(distances.begin(), distances.end());
  // Keep vertex distances when a step station lands on a vertex.
  std::vector<double> merged;
  for (const double d : distances) {
    if (!merged.empty() && d - merged.back() <= 1e-9) {
      if (std::find(cumulative.begin(), cumulative.end(), d) != cumulative.end()) merged.back() = d;
      continue;
    }
    merged.push_back(d);
  }

  ElevationProfile profile;
  profile.label = line.label;
  profile.epoch_id = grid.epoch_id;
  profile.step_m = step;
  std::size_t seg = 0;
  bool any = false;
  for (const double d : merged) {
    while (seg + 2 < cumulative.size() && d > cumulative[seg + 1]) ++seg;
    Vec2 p;
    const auto vertex = std::find(cumulative.begin(), cumulative.end(), d);
    if (vertex != cumulative.end()) {
      p = pts[static_cast<std::size_t>(vertex - cumulative.begin())];
    } else {
      const double t = (d - cumulative[seg]) / (cumulative[seg + 1] - cumulative[seg]);
      p = pts[seg] + t * (pts[seg + 1] - pts[seg]);
    }
    ProfileStation st{d, p.x, p.y, sample_bilinear(grid, p.x, p.y)};
    any = any || st.elevation.has_value();
    profile.stations.push_back(st);
  }
  profile.no_data = !any;
  return profile;
}

ProfileComparison compare_profiles(const ElevationProfile& a, const ElevationProfile& b) {
  if (a.stations.size() != b.stations.size()) {
    throw Error(ErrorCode::validation,
                "profiles have different station counts; re-extract both epochs on a common line");
  }
  ProfileComparison cmp;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.stations.size(); ++i) {
    const auto& sa = a.stations[i];
    const auto& sb = b.stations[i];
    if (std::abs(sa.distance_m - sb.distance_m) > 1e-6) {
      throw Error(ErrorCode::validation,
                  fmt::format("station {} differs ({} vs {} m); re-extract both epochs on a common line",
                              i, sa.distance_m, sb.distance_m));
    }
    if (!sa.elevation || !sb.elevation) {
      cmp.deltas.push_back(std::nullopt);
      continue;
    }
    const double d = *sb.elevation - *sa.elevation;
    cmp.deltas.push_back(d);
    ++cmp.valid_count;
    sum += d;
    cmp.min_delta = cmp.min_delta ? std::min(*cmp.min_delta, d) : d;
    cmp.max_delta = cmp.max_delta ? std::max(*cmp.max_delta, d) : d;
  }
  if (cmp.valid_count > 0) cmp.mean_delta = sum / static_cast<double>(cmp.valid_count);
  return cmp;
}

std::string profile_to_csv(const ElevationProfile& profile, const MissionOrigin& origin) {
  std::string out = "station_m,lat,lon,elev_m\n";
  for (const auto& st : profile.stations) {
    const GeoPoint g = enu_to_wgs84({st.east, st.north, 0.0}, origin);
    out += fmt::format("{:.3f},{:.6f},{:.6f},", st.distance_m, g.lat, g.lon);
    if (st.elevation) out += fmt::format("{:.3f}", *st.elevation);
    out += '\n';
  }
  return out;
}

double percentile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

DemDifference diff_dem(const DemGrid& a, const DemGrid& b, double threshold_m) {
  validate(a);
  validate(b);
  if (!(threshold_m >= 0.0)) throw Error(ErrorCode::validation, "threshold must be >= 0");
  const DemGrid b_on_a = a.same_geometry(b) ? b : resample_onto(b, a);

  DemDifference out;
  out.delta = a;
  out.delta.epoch_id = fmt::format("{}-{}", a.epoch_id, b.epoch_id);
  std::vector<double> valid;
  valid.reserve(a.size());
  double sum = 0.0;
  std::size_t exceeding = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double va = a.values[i];
    const double vb = b_on_a.values[i];
    if (a.is_nodata(va) || b_on_a.is_nodata(vb)) {
      out.delta.values[i] = out.delta.nodata;
      continue;
    }
    const double d = vb - va;
    out.delta.values[i] = d;
    valid.push_back(d);
    sum += d;
    if (-d >= threshold_m) ++exceeding;
  }

  ChangeReport& r = out.report;
  r.epoch_a = a.epoch_id;
  r.epoch_b = b.epoch_id;
  r.threshold_m = threshold_m;
  r.valid_cells = valid.size();
  r.valid_cell_fraction = static_cast<double>(valid.size()) / static_cast<double>(a.size());
  r.area_exceeding_m2 = static_cast<double>(exceeding) * a.cell_size * a.cell_size;
  if (!valid.empty()) {
    r.mean_delta_m = sum / static_cast<double>(valid.size());
    std::sort(valid.begin(), valid.end());
    r.median_delta_m = percentile(valid, 0.5);
    r.p05_delta_m = percentile(valid, 0.05);
    r.max_drop_m = std::max(0.0, -valid.front());
  }
  return out;
}

std::vector<HazardZone> detect_hazard_zones(const DemGrid& delta, double drop_threshold_m,
                                            std::size_t min_cells) {
  if (!(drop_threshold_m > 0.0)) {
    throw Error(ErrorCode::validation, "drop threshold must be > 0");
  }
  const std::size_t n = delta.size();
  std::vector<char> mask(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = delta.values[i];
    mask[i] = !delta.is_nodata(v) && -v >= drop_threshold_m;
  }
  std::vector<char> seen(n, 0);
  std::vector<HazardZone> zones;
  for (int row = 0; row < delta.n_rows; ++row) {
    for (int col = 0; col < delta.n_cols; ++col) {
      const std::size_t start = delta.index(col, row);
      if (!mask[start] || seen[start]) continue;
      std::vector<Vec2> centers;
      double peak = 0.0;
      std::queue<std::pair<int, int>> frontier;
      frontier.push({col, row});
      seen[start] = 1;
      while (!frontier.empty()) {
        const auto [c, r] = frontier.front();
        frontier.pop();
        centers.push_back({delta.center_east(c), delta.center_north(r)});
        peak = std::max(peak, -delta.at(c, r));
        constexpr int kDc[] = {1, -1, 0, 0};
        constexpr int kDr[] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int nc = c + kDc[k];
          const int nr = r + kDr[k];
          if (nc < 0 || nr < 0 || nc >= delta.n_cols || nr >= delta.n_rows) continue;
          const std::size_t ni = delta.index(nc, nr);
          if (!mask[ni] || seen[ni]) continue;
          seen[ni] = 1;
          frontier.push({nc, nr});
        }
      }
      if (centers.size() < min_cells) continue;
      HazardZone zone;
      zone.cell_count = centers.size();
      zone.peak_drop_m = peak;
      zone.polygon = convex_hull(std::move(centers));
      zones.push_back(std::move(zone));
    }
  }
  return zones;
}

StandoffAdvisory standoff_buffer(const std::vector<HazardZone>& zones, double standoff_m) {
  if (!(standoff_m > 0.0)) throw Error(ErrorCode::validation, "standoff must be > 0");
  StandoffAdvisory adv;
  adv.standoff_m = standoff_m;
  for (const auto& zone : zones) {
    std::vector<Vec2> ring;
    for (const Vec2 v : zone.polygon) {
      for (int k = 0; k < kBufferCircleVertices; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / kBufferCircleVertices;
        ring.push_back({v.x + standoff_m * std::cos(theta), v.y + standoff_m * std::sin(theta)});
      }
    }
    adv.buffer_polygons.push_back(convex_hull(std::move(ring)));
  }
  return adv;
}

std::string to_string(Trend trend) {
  switch (trend) {
    case Trend::falling: return "falling";
    case Trend::rising: return "rising";
    case Trend::steady: return "steady";
  }
  return "steady";
}

RecessionRate estimate_recession_rate(const ChangeReport& report, double elapsed_h) {
  if (!(elapsed_h > 0.0)) throw Error(ErrorCode::validation, "elapsed time must be > 0");
  RecessionRate r;
  r.rate_m_per_h = std::abs(report.mean_delta_m) / elapsed_h;
  r.trend = report.mean_delta_m < 0.0   ? Trend::falling
            : report.mean_delta_m > 0.0 ? Trend::rising
                                        : Trend::steady;
  return r;
}

double recommend_revisit(double rate_m_per_h, double safety_budget_m) {
  if (rate_m_per_h < 0.0 || !std::isfinite(rate_m_per_h)) {
    throw Error(ErrorCode::validation, "rate must be a finite value >= 0");
  }
  if (!(safety_budget_m > 0.0) || !std::isfinite(safety_budget_m)) {
    throw Error(ErrorCode::validation, "safety budget must be > 0");
  }
  if (rate_m_per_h == 0.0) return kMaxRevisitHours;
  return std::clamp(safety_budget_m / rate_m_per_h, kMinRevisitHours, kMaxRevisitHours);
}

nlohmann::json to_json(const ChangeReport& r) {
  return {{"epoch_a", r.epoch_a},
          {"epoch_b", r.epoch_b},
          {"mean_delta_m", r.mean_delta_m},
          {"median_delta_m", r.median_delta_m},
          {"p05_delta_m", r.p05_delta_m},
          {"max_drop_m", r.max_drop_m},
          {"threshold_m", r.threshold_m},
          {"area_exceeding_m2", r.area_exceeding_m2},
          {"valid_cells", r.valid_cells},
          {"valid_cell_fraction", r.valid_cell_fraction}};
}

}  // namespace floodscout

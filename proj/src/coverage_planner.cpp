#include "floodscout/coverage_planner.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <fmt/format.h>
#include <json.hpp>

#include "floodscout/error.hpp"

namespace floodscout {

namespace {

// Rotated frame: u runs along the survey lines, v across them.
struct SweepFrame {
  Vec2 along;
  Vec2 across;

  explicit SweepFrame(double heading_deg) {
    const double h = deg_to_rad(heading_deg);
    along = {std::sin(h), std::cos(h)};
    across = {std::cos(h), -std::sin(h)};
  }

  Vec2 to_sweep(Vec2 p) const { return {dot(p, along), dot(p, across)}; }
  Vec2 to_local(Vec2 s) const { return s.x * along + s.y * across; }
};

struct Interval {
  double lo;
  double hi;
};

double bearing_deg(Vec2 from, Vec2 to) {
  const Vec2 d = to - from;
  double b = rad_to_deg(std::atan2(d.x, d.y));
  if (b < 0.0) b += 360.0;
  return b;
}

double fold_heading(double deg) {
  double h = std::fmod(deg, 180.0);
  if (h < 0.0) h += 180.0;
  if (h >= 180.0) h -= 180.0;
  return h;
}

// u-extent of every piece of the polygon lying inside lo <= v <= hi, merged
// into disjoint intervals. The boundary of each piece consists of polygon
// edge parts inside the band and chords on the band limits, so the union of
// their u-ranges is exactly the projection of the piece.
std::vector<Interval> band_intervals(const std::vector<Vec2>& ring, double lo, double hi) {
  std::vector<Interval> parts;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = ring[i];
    const Vec2 b = ring[(i + 1) % n];
    double t0 = 0.0;
    double t1 = 1.0;
    const double dv = b.y - a.y;
    if (dv == 0.0) {
      if (a.y < lo || a.y > hi) continue;
    } else {
      double ta = (lo - a.y) / dv;
      double tb = (hi - a.y) / dv;
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      if (t0 > t1) continue;
    }
    const double u0 = a.x + t0 * (b.x - a.x);
    const double u1 = a.x + t1 * (b.x - a.x);
    parts.push_back({std::min(u0, u1), std::max(u0, u1)});
  }
  for (const double level : {lo, hi}) {
    std::vector<double> crossings;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 a = ring[i];
      const Vec2 b = ring[(i + 1) % n];
      if ((a.y > level) != (b.y > level)) {
        crossings.push_back(a.x + (level - a.y) * (b.x - a.x) / (b.y - a.y));
      }
    }
    std::sort(crossings.begin(), crossings.end());
    for (std::size_t i = 0; i + 1 < crossings.size(); i += 2) {
      parts.push_back({crossings[i], crossings[i + 1]});
    }
  }
  std::sort(parts.begin(), parts.end(),
            [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  std::vector<Interval> merged;
  for (const auto& p : parts) {
    if (!merged.empty() && p.lo <= merged.back().hi + 1e-9) {
      merged.back().hi = std::max(merged.back().hi, p.hi);
    } else {
      merged.push_back(p);
    }
  }
  return merged;
}

double transit_length(const SurveyLine& from, const SurveyLine& to) {
  return std::hypot(to.start.east - from.end.east, to.start.north - from.end.north);
}

}  // namespace

std::string_view to_string(WaypointAction action) {
  switch (action) {
    case WaypointAction::fly_to: return "fly_to";
    case WaypointAction::line_start: return "line_start";
    case WaypointAction::line_end: return "line_end";
  }
  return "fly_to";
}

WaypointAction waypoint_action_from_string(std::string_view s) {
  if (s == "fly_to") return WaypointAction::fly_to;
  if (s == "line_start") return WaypointAction::line_start;
  if (s == "line_end") return WaypointAction::line_end;
  throw Error(ErrorCode::parse, fmt::format("unknown waypoint action '{}'", s));
}

double SurveyLine::length() const {
  return std::hypot(end.east - start.east, end.north - start.north);
}

std::vector<Vec2> to_local(const SurveyPolygon& poly, const MissionOrigin& origin) {
  std::vector<Vec2> ring;
  ring.reserve(poly.vertices.size());
  for (const auto& v : poly.vertices) {
    const EnuPoint p = wgs84_to_enu(v, origin);
    ring.push_back({p.east, p.north});
  }
  return ring;
}

void validate(const SurveyPolygon& poly) {
  if (poly.vertices.size() < 3) {
    throw Error(ErrorCode::validation,
                fmt::format("survey polygon needs at least 3 vertices, got {}", poly.vertices.size()));
  }
  for (const auto& v : poly.vertices) validate(v);
  const auto ring = to_local(poly, MissionOrigin{poly.vertices.front()});
  const double area = std::abs(signed_area(ring));
  double extent = 0.0;
  for (const auto& p : ring) extent = std::max({extent, std::abs(p.x), std::abs(p.y)});
  if (!(area > 1e-9 * std::max(1.0, extent * extent))) {
    throw Error(ErrorCode::validation, "survey polygon is degenerate (zero area)");
  }
  if (!is_simple(ring)) {
    throw Error(ErrorCode::validation, "survey polygon is self-intersecting");
  }
}

void validate(const CoverageParams& params) {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::validation, what);
  };
  check(params.altitude_agl > 0.0 && std::isfinite(params.altitude_agl), "altitude_agl must be > 0");
  check(params.side_overlap >= 0.0 && params.side_overlap <= 0.95, "side_overlap must be in [0, 0.95]");
  check(params.front_overlap >= 0.0 && params.front_overlap <= 0.95, "front_overlap must be in [0, 0.95]");
  check(params.cruise_speed > 0.0 && std::isfinite(params.cruise_speed), "cruise_speed must be > 0");
  check(params.turn_penalty >= 0.0 && std::isfinite(params.turn_penalty), "turn_penalty must be >= 0");
  check(params.endurance > 0.0, "endurance must be > 0");
  if (params.heading_deg) check(std::isfinite(*params.heading_deg), "heading must be finite");
}

double auto_heading(const SurveyPolygon& poly) {
  validate(poly);
  const auto ring = to_local(poly, MissionOrigin{poly.vertices.front()});
  std::size_t best = 0;
  double best_len = -1.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const double len = distance(ring[i], ring[(i + 1) % ring.size()]);
    // Relative tolerance so that numerically equal edges tie.
    if (len > best_len * (1.0 + 1e-9)) {
      best_len = len;
      best = i;
    }
  }
  return fold_heading(bearing_deg(ring[best], ring[(best + 1) % ring.size()]));
}

std::vector<EnuPoint> photos_along(const SurveyLine& line, double trigger_distance) {
  std::vector<EnuPoint> photos;
  const double len = line.length();
  photos.push_back(line.start);
  if (len == 0.0) return photos;
  const double de = (line.end.east - line.start.east) / len;
  const double dn = (line.end.north - line.start.north) / len;
  const double tol = 1e-9 * std::max(1.0, len);
  for (int k = 1;; ++k) {
    const double s = k * trigger_distance;
    if (s >= len - tol) break;
    photos.push_back({line.start.east + s * de, line.start.north + s * dn, line.start.up});
  }
  photos.push_back(line.end);
  return photos;
}

PlanStats estimate_stats(const std::vector<SurveyLine>& lines, std::size_t photo_count,
                         const CoverageParams& params, const CameraSpec& camera) {
  PlanStats stats;
  if (lines.empty()) return stats;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    stats.total_path_m += lines[i].length();
    if (i + 1 < lines.size()) stats.total_path_m += transit_length(lines[i], lines[i + 1]);
  }
  stats.line_count = lines.size();
  stats.photo_count = photo_count;
  stats.est_flight_s = stats.total_path_m / params.cruise_speed +
                       static_cast<double>(lines.size() - 1) * params.turn_penalty;
  stats.est_gsd = gsd(camera, params.altitude_agl);
  return stats;
}

void rebuild_derived(CoveragePlan& plan) {
  plan.photo_positions.clear();
  plan.waypoints.clear();
  for (const auto& line : plan.lines) {
    const auto photos = photos_along(line, plan.trigger_distance);
    plan.photo_positions.insert(plan.photo_positions.end(), photos.begin(), photos.end());
    plan.waypoints.push_back({enu_to_wgs84(line.start, plan.origin), WaypointAction::line_start});
    plan.waypoints.push_back({enu_to_wgs84(line.end, plan.origin), WaypointAction::line_end});
  }
  plan.stats = estimate_stats(plan.lines, plan.photo_positions.size(), plan.params, plan.camera);
}

CoveragePlan plan_coverage(const SurveyPolygon& poly, const CameraSpec& camera,
                           const CoverageParams& params, const MissionOrigin& origin) {
  validate(poly);
  validate(params);
  validate(camera);

  CoveragePlan plan;
  plan.origin = origin;
  plan.camera = camera;
  plan.params = params;
  plan.footprint = footprint(camera, params.altitude_agl);
  plan.line_spacing = plan.footprint.width * (1.0 - params.side_overlap);
  plan.trigger_distance = plan.footprint.height * (1.0 - params.front_overlap);
  plan.heading_deg = fold_heading(params.heading_deg ? *params.heading_deg : auto_heading(poly));

  const SweepFrame frame(plan.heading_deg);
  std::vector<Vec2> ring;
  for (const Vec2 p : to_local(poly, origin)) ring.push_back(frame.to_sweep(p));

  double v_min = ring.front().y;
  double v_max = ring.front().y;
  for (const auto& p : ring) {
    v_min = std::min(v_min, p.y);
    v_max = std::max(v_max, p.y);
  }
  const double spacing = plan.line_spacing;
  const double width = v_max - v_min;
  const auto sweep_count =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(width / spacing - 1e-9)));
  const double extension = plan.footprint.height / 2.0;

  std::size_t segment_index = 0;
  for (std::size_t k = 0; k < sweep_count; ++k) {
    const double v = sweep_count == 1 ? (v_min + v_max) / 2.0
                                      : v_min + spacing / 2.0 + static_cast<double>(k) * spacing;
    const double band_lo = std::max(v_min, v - spacing / 2.0);
    const double band_hi = std::min(v_max, v + spacing / 2.0);
    auto intervals = band_intervals(ring, band_lo, band_hi);
    if (k % 2 == 1) std::reverse(intervals.begin(), intervals.end());
    for (const auto& iv : intervals) {
      const bool forward = segment_index % 2 == 0;
      const double u_from = forward ? iv.lo - extension : iv.hi + extension;
      const double u_to = forward ? iv.hi + extension : iv.lo - extension;
      const Vec2 a = frame.to_local({u_from, v});
      const Vec2 b = frame.to_local({u_to, v});
      plan.lines.push_back({{a.x, a.y, params.altitude_agl},
                            {b.x, b.y, params.altitude_agl},
                            static_cast<int>(k)});
      ++segment_index;
    }
  }
  rebuild_derived(plan);
  return plan;
}

double verify_coverage(const CoveragePlan& plan, const SurveyPolygon& poly,
                       const CameraSpec& camera, const CoverageParams& params) {
  const auto ring = to_local(poly, plan.origin);
  const FootprintDims fp = footprint(camera, params.altitude_agl);
  const double half_along = fp.height / 2.0 + 1e-6;
  const double half_across = fp.width / 2.0 + 1e-6;

  const double h = deg_to_rad(plan.heading_deg);
  const Vec2 along{std::sin(h), std::cos(h)};
  const Vec2 across{std::cos(h), -std::sin(h)};

  // Bucket photo centers (in sweep coordinates) on a grid no finer than a
  // footprint so each query only inspects the 3x3 neighbourhood.
  const double bucket = std::max(fp.width, fp.height);
  auto key = [](long long i, long long j) { return (i << 32) ^ (j & 0xffffffffLL); };
  std::unordered_map<long long, std::vector<Vec2>> buckets;
  for (const auto& p : plan.photo_positions) {
    const Vec2 s{dot({p.east, p.north}, along), dot({p.east, p.north}, across)};
    buckets[key(static_cast<long long>(std::floor(s.x / bucket)),
                static_cast<long long>(std::floor(s.y / bucket)))]
        .push_back(s);
  }

  double min_e = ring.front().x, max_e = ring.front().x;
  double min_n = ring.front().y, max_n = ring.front().y;
  for (const auto& p : ring) {
    min_e = std::min(min_e, p.x);
    max_e = std::max(max_e, p.x);
    min_n = std::min(min_n, p.y);
    max_n = std::max(max_n, p.y);
  }

  std::size_t total = 0;
  std::size_t covered = 0;
  for (double n = std::floor(min_n); n <= max_n; n += 1.0) {
    for (double e = std::floor(min_e); e <= max_e; e += 1.0) {
      const Vec2 q{e, n};
      if (!point_in_polygon(ring, q)) continue;
      ++total;
      const Vec2 s{dot(q, along), dot(q, across)};
      const auto bi = static_cast<long long>(std::floor(s.x / bucket));
      const auto bj = static_cast<long long>(std::floor(s.y / bucket));
      bool hit = false;
      for (long long di = -1; di <= 1 && !hit; ++di) {
        for (long long dj = -1; dj <= 1 && !hit; ++dj) {
          const auto it = buckets.find(key(bi + di, bj + dj));
          if (it == buckets.end()) continue;
          for (const Vec2 c : it->second) {
            if (std::abs(s.x - c.x) <= half_along && std::abs(s.y - c.y) <= half_across) {
              hit = true;
              break;
            }
          }
        }
      }
      if (hit) ++covered;
    }
  }
  if (total == 0) return 1.0;
  return static_cast<double>(covered) / static_cast<double>(total);
}

std::vector<CoveragePlan> partition_sorties(const CoveragePlan& plan, double endurance) {
  if (!(endurance > 0.0)) throw Error(ErrorCode::validation, "endurance must be > 0");
  const CoverageParams& params = plan.params;
  auto line_time = [&](const SurveyLine& l) { return l.length() / params.cruise_speed; };

  std::vector<std::vector<SurveyLine>> groups;
  std::vector<SurveyLine> current;
  double current_time = 0.0;
  for (std::size_t i = 0; i < plan.lines.size(); ++i) {
    const SurveyLine& line = plan.lines[i];
    const double alone = line_time(line);
    if (alone > endurance) {
      throw Error(ErrorCode::infeasible,
                  fmt::format("line {} needs {:.1f} s which exceeds the endurance of {:.1f} s", i,
                              alone, endurance));
    }
    if (!current.empty()) {
      const double extended = current_time +
                              transit_length(current.back(), line) / params.cruise_speed +
                              params.turn_penalty + alone;
      if (extended <= endurance) {
        current.push_back(line);
        current_time = extended;
        continue;
      }
      groups.push_back(std::move(current));
      current.clear();
    }
    current.push_back(line);
    current_time = alone;
  }
  if (!current.empty()) groups.push_back(std::move(current));

  std::vector<CoveragePlan> sorties;
  for (auto& g : groups) {
    CoveragePlan sortie = plan;
    sortie.lines = std::move(g);
    rebuild_derived(sortie);
    sorties.push_back(std::move(sortie));
  }
  return sorties;
}

WaypointDocument to_waypoint_document(const CoveragePlan& plan) {
  return {plan.params.altitude_agl, plan.trigger_distance, plan.waypoints};
}

std::string export_waypoints(const WaypointDocument& doc) {
  std::string out = "{\"type\":\"FeatureCollection\",\"features\":[\n";
  for (std::size_t i = 0; i < doc.waypoints.size(); ++i) {
    const auto& w = doc.waypoints[i];
    out += fmt::format(
        "{{\"type\":\"Feature\",\"geometry\":{{\"type\":\"Point\",\"coordinates\":[{:.6f},{:.6f}]}},"
        "\"properties\":{{\"order\":{},\"action\":\"{}\",\"altitude_agl_m\":{:.2f},"
        "\"trigger_distance_m\":{:.2f}}}}},\n",
        w.position.lon, w.position.lat, i, to_string(w.action), doc.altitude_agl,
        doc.trigger_distance);
  }
  out += "{\"type\":\"Feature\",\"geometry\":{\"type\":\"LineString\",\"coordinates\":[";
  for (std::size_t i = 0; i < doc.waypoints.size(); ++i) {
    if (i > 0) out += ",";
    out += fmt::format("[{:.6f},{:.6f}]", doc.waypoints[i].position.lon,
                       doc.waypoints[i].position.lat);
  }
  out += "]},\"properties\":{\"kind\":\"flight_path\"}}\n]}\n";
  return out;
}

std::string export_waypoints(const CoveragePlan& plan) {
  return export_waypoints(to_waypoint_document(plan));
}

WaypointDocument parse_waypoints(std::string_view geojson) {
  using nlohmann::json;
  WaypointDocument doc;
  try {
    const json root = json::parse(geojson);
    if (root.at("type") != "FeatureCollection") {
      throw Error(ErrorCode::parse, "waypoint document must be a FeatureCollection");
    }
    std::vector<std::pair<long long, Waypoint>> points;
    for (const auto& f : root.at("features")) {
      const auto& geom = f.at("geometry");
      if (geom.at("type") != "Point") continue;
      const auto& props = f.at("properties");
      const auto& c = geom.at("coordinates");
      Waypoint w;
      w.position.lon = c.at(0).get<double>();
      w.position.lat = c.at(1).get<double>();
      w.action = waypoint_action_from_string(props.at("action").get<std::string>());
      doc.altitude_agl = props.at("altitude_agl_m").get<double>();
      doc.trigger_distance = props.at("trigger_distance_m").get<double>();
      points.emplace_back(props.at("order").get<long long>(), w);
    }
    std::stable_sort(points.begin(), points.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [order, w] : points) doc.waypoints.push_back(w);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, fmt::format("malformed waypoint document: {}", e.what()));
  }
  return doc;
}

}  // namespace floodscout

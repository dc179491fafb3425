#include "floodscout/api_json.hpp"

#include <set>

#include <fmt/format.h>

#include "floodscout/error.hpp"

namespace floodscout::api {

namespace {

double number(const json& j, std::string_view key) {
  const auto& v = j.at(std::string(key));
  if (!v.is_number()) throw Error(ErrorCode::validation, fmt::format("'{}' must be a number", key));
  return v.get<double>();
}

void reject_unknown(const json& j, const std::set<std::string>& known, std::string_view what) {
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw Error(ErrorCode::validation, fmt::format("unknown {} key '{}'", what, k));
  }
}

}  // namespace

GeoPoint geo_point_from_json(const json& j) {
  if (j.is_array()) {
    if (j.size() < 2 || j.size() > 3 || !j[0].is_number() || !j[1].is_number() ||
        (j.size() == 3 && !j[2].is_number())) {
      throw Error(ErrorCode::validation, "position must be [lon, lat] or [lon, lat, alt]");
    }
    const GeoPoint p{j[1].get<double>(), j[0].get<double>(), j.size() == 3 ? j[2].get<double>() : 0.0};
    validate(p);
    return p;
  }
  if (!j.is_object() || !j.contains("lat") || !j.contains("lon")) {
    throw Error(ErrorCode::validation, "point must be an object with lat and lon");
  }
  reject_unknown(j, {"lat", "lon", "alt"}, "point");
  GeoPoint p{number(j, "lat"), number(j, "lon"), j.contains("alt") ? number(j, "alt") : 0.0};
  validate(p);
  return p;
}

json to_json(const GeoPoint& p) { return {{"lat", p.lat}, {"lon", p.lon}, {"alt", p.alt}}; }

CoverageParams params_from_json(const json& j) {
  CoverageParams p;
  if (j.is_null()) return p;
  if (!j.is_object()) throw Error(ErrorCode::validation, "params must be an object");
  reject_unknown(j,
                 {"altitude_agl", "side_overlap", "front_overlap", "heading_deg", "cruise_speed",
                  "turn_penalty", "endurance"},
                 "params");
  if (j.contains("altitude_agl")) p.altitude_agl = number(j, "altitude_agl");
  if (j.contains("side_overlap")) p.side_overlap = number(j, "side_overlap");
  if (j.contains("front_overlap")) p.front_overlap = number(j, "front_overlap");
  if (j.contains("heading_deg") && !j.at("heading_deg").is_null()) p.heading_deg = number(j, "heading_deg");
  if (j.contains("cruise_speed")) p.cruise_speed = number(j, "cruise_speed");
  if (j.contains("turn_penalty")) p.turn_penalty = number(j, "turn_penalty");
  if (j.contains("endurance")) p.endurance = number(j, "endurance");
  return p;
}

json to_json(const CoverageParams& p) {
  return {{"altitude_agl", p.altitude_agl},
          {"side_overlap", p.side_overlap},
          {"front_overlap", p.front_overlap},
          {"heading_deg", p.heading_deg ? json(*p.heading_deg) : json(nullptr)},
          {"cruise_speed", p.cruise_speed},
          {"turn_penalty", p.turn_penalty},
          {"endurance", p.endurance}};
}

json to_json(const CameraSpec& c) {
  return {{"key", c.key},
          {"name", c.name},
          {"res_x", c.res_x},
          {"res_y", c.res_y},
          {"hfov_deg", c.hfov_deg},
          {"vfov_deg", vfov(c)},
          {"assumed", c.assumed}};
}

json to_json(const PlanStats& s) {
  return {{"total_path_m", s.total_path_m},
          {"est_flight_s", s.est_flight_s},
          {"photo_count", s.photo_count},
          {"line_count", s.line_count},
          {"est_gsd", s.est_gsd}};
}

json to_json(const CoveragePlan& plan) {
  json lines = json::array();
  for (const auto& l : plan.lines) {
    lines.push_back({{"sweep_index", l.sweep_index},
                     {"start", to_json(enu_to_wgs84(l.start, plan.origin))},
                     {"end", to_json(enu_to_wgs84(l.end, plan.origin))},
                     {"length_m", l.length()}});
  }
  // throws infeasible when one line alone exceeds the endurance
  json sorties = json::array();
  std::size_t first = 0;
  for (const auto& s : partition_sorties(plan, plan.params.endurance)) {
    sorties.push_back({{"first_line", first},
                       {"line_count", s.lines.size()},
                       {"photo_count", s.stats.photo_count},
                       {"total_path_m", s.stats.total_path_m},
                       {"est_flight_s", s.stats.est_flight_s}});
    first += s.lines.size();
  }
  return {{"origin", to_json(plan.origin.anchor)},
          {"camera", to_json(plan.camera)},
          {"params", to_json(plan.params)},
          {"heading_deg", plan.heading_deg},
          {"footprint", {{"width_m", plan.footprint.width}, {"height_m", plan.footprint.height}}},
          {"line_spacing", plan.line_spacing},
          {"trigger_distance", plan.trigger_distance},
          {"lines", lines},
          {"waypoint_count", plan.waypoints.size()},
          {"stats", to_json(plan.stats)},
          {"sorties", sorties}};
}

json to_json(const ElevationProfile& profile, const MissionOrigin& origin) {
  json stations = json::array();
  for (const auto& st : profile.stations) {
    const GeoPoint g = enu_to_wgs84({st.east, st.north, 0.0}, origin);
    stations.push_back({{"distance_m", st.distance_m},
                        {"lat", g.lat},
                        {"lon", g.lon},
                        {"elevation", st.elevation ? json(*st.elevation) : json(nullptr)}});
  }
  return {{"label", profile.label},
          {"epoch_id", profile.epoch_id},
          {"step_m", profile.step_m},
          {"no_data", profile.no_data},
          {"stations", stations}};
}

json to_json(const ProfileComparison& cmp, const std::string& epoch_a, const std::string& epoch_b) {
  json deltas = json::array();
  for (const auto& d : cmp.deltas) deltas.push_back(d ? json(*d) : json(nullptr));
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return {{"epoch_a", epoch_a},
          {"epoch_b", epoch_b},
          {"deltas", deltas},
          {"valid_count", cmp.valid_count},
          {"mean_delta", opt(cmp.mean_delta)},
          {"min_delta", opt(cmp.min_delta)},
          {"max_delta", opt(cmp.max_delta)}};
}

json diff_to_json(const EpochComparison& cmp, const ReportOptions& options,
                  const MissionOrigin& origin) {
  return {{"change_report", floodscout::to_json(cmp.difference.report)},
          {"zones", zones_geojson(cmp, origin)},
          {"zone_count", cmp.zones.size()},
          {"standoff_m", cmp.advisory.standoff_m},
          {"min_zone_cells", options.min_zone_cells},
          {"elapsed_h", cmp.elapsed_h},
          {"rate_m_per_h", cmp.rate.rate_m_per_h},
          {"trend", to_string(cmp.rate.trend)},
          {"safety_budget_m", options.safety_budget_m},
          {"revisit_h", cmp.revisit_h}};
}

ReportOptions report_options_from_json(const json& j) {
  ReportOptions o;
  if (j.contains("threshold_m")) o.threshold_m = number(j, "threshold_m");
  if (j.contains("standoff_m")) o.standoff_m = number(j, "standoff_m");
  if (j.contains("safety_budget_m")) o.safety_budget_m = number(j, "safety_budget_m");
  if (j.contains("min_zone_cells")) {
    const auto& v = j.at("min_zone_cells");
    if (!v.is_number_integer() || v.get<long long>() < 1) {
      throw Error(ErrorCode::validation, "'min_zone_cells' must be a positive integer");
    }
    o.min_zone_cells = v.get<std::size_t>();
  }
  if (!(o.threshold_m >= 0.0)) throw Error(ErrorCode::validation, "threshold_m must be >= 0");
  return o;
}

json error_body(std::string_view code, std::string_view message) {
  return {{"code", code}, {"message", message}};
}

}  // namespace floodscout::api

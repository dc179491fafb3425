#include "floodscout/report.hpp"

#include <array>
#include <cmath>

#include <fmt/format.h>

#include "floodscout/error.hpp"
#include "floodscout/geojson.hpp"

namespace floodscout {

using nlohmann::json;

EpochComparison compare_epochs(const MissionStore& store, std::string_view mission_id,
                               std::string_view epoch_a, std::string_view epoch_b,
                               const ReportOptions& options) {
  const Mission m = store.get_mission(mission_id);
  const EpochRecord& ra = m.epoch(epoch_a);
  const EpochRecord& rb = m.epoch(epoch_b);
  const double elapsed =
      hours_between(parse_timestamp(ra.captured_at), parse_timestamp(rb.captured_at));
  if (!(elapsed > 0.0)) {
    throw Error(ErrorCode::validation,
                fmt::format("epoch a ({}) must be captured before epoch b ({})", epoch_a, epoch_b));
  }

  EpochComparison cmp;
  cmp.difference = diff_dem(store.load_dem(mission_id, epoch_a),
                            store.load_dem(mission_id, epoch_b), options.threshold_m);
  if (options.threshold_m > 0.0) {
    cmp.zones = detect_hazard_zones(cmp.difference.delta, options.threshold_m, options.min_zone_cells);
  }
  cmp.advisory = standoff_buffer(cmp.zones, options.standoff_m);
  cmp.elapsed_h = elapsed;
  cmp.rate = estimate_recession_rate(cmp.difference.report, elapsed);
  cmp.revisit_h = recommend_revisit(cmp.rate.rate_m_per_h, options.safety_budget_m);
  return cmp;
}

json zones_geojson(const EpochComparison& cmp, const MissionOrigin& origin) {
  json features = json::array();
  for (std::size_t i = 0; i < cmp.zones.size(); ++i) {
    const auto& z = cmp.zones[i];
    features.push_back({{"type", "Feature"},
                        {"geometry", geojson::local_ring_geometry(z.polygon, origin)},
                        {"properties",
                         {{"kind", "hazard_zone"},
                          {"zone", i},
                          {"cell_count", z.cell_count},
                          {"peak_drop_m", z.peak_drop_m}}}});
  }
  for (std::size_t i = 0; i < cmp.advisory.buffer_polygons.size(); ++i) {
    const auto& b = cmp.advisory.buffer_polygons[i];
    features.push_back({{"type", "Feature"},
                        {"geometry", geojson::local_ring_geometry(b, origin)},
                        {"properties",
                         {{"kind", "standoff_buffer"},
                          {"zone", i},
                          {"standoff_m", cmp.advisory.standoff_m},
                          {"area_m2", std::abs(signed_area(b))}}}});
  }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

std::string MissionReport::sidecar_text() const { return sidecar.dump(2) + "\n"; }

namespace {

constexpr std::array<RiskLevel, 3> kRiskOrder{RiskLevel::high, RiskLevel::medium, RiskLevel::low};

std::string risk_heading(RiskLevel r) {
  switch (r) {
    case RiskLevel::high: return "High risk";
    case RiskLevel::medium: return "Medium risk";
    case RiskLevel::low: return "Low risk";
  }
  return "";
}

// avoid "-0.000" in fixed output
double tidy(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(v * scale) == 0.0 ? 0.0 : v;
}

std::string fixed(double v, int decimals) {
  return fmt::format("{:.{}f}", tidy(v, decimals), decimals);
}

}  // namespace

MissionReport generate_report(const MissionStore& store, std::string_view mission_id,
                              std::string_view epoch_a, std::string_view epoch_b,
                              const ReportOptions& options) {
  const Mission m = store.get_mission(mission_id);
  const EpochRecord& ra = m.epoch(epoch_a);
  const EpochRecord& rb = m.epoch(epoch_b);
  const EpochComparison cmp = compare_epochs(store, mission_id, epoch_a, epoch_b, options);
  const ChangeReport& cr = cmp.difference.report;

  std::string md;
  auto line = [&md](const std::string& s) {
    md += s;
    md += '\n';
  };

  line(fmt::format("# Mission report: {}", m.name));
  line("");
  line("## Mission");
  line("");
  line(fmt::format("- Mission id: {}", m.id));
  line(fmt::format("- Created: {}", m.created_at));
  line(fmt::format("- Origin: {:.6f}, {:.6f}, {} m", m.origin.anchor.lat, m.origin.anchor.lon,
                   fixed(m.origin.anchor.alt, 2)));
  if (m.survey_polygon) {
    const auto local = to_local(*m.survey_polygon, m.origin);
    line(fmt::format("- Survey polygon: {} vertices, {} m²", m.survey_polygon->vertices.size(),
                     fixed(std::abs(signed_area(local)), 1)));
  } else {
    line("- Survey polygon: none recorded");
  }
  line("");

  line("## Flight plan");
  line("");
  json plan_json = nullptr;
  if (m.plans.empty()) {
    line("No plan recorded.");
  } else {
    const PlanRecord& p = m.plans.back();
    plan_json = to_json(p);
    line(fmt::format("- Plan: {} ({} plans recorded)", p.plan_id, m.plans.size()));
    line(fmt::format("- Camera: {}", p.camera));
    line(fmt::format("- Altitude AGL: {} m", fixed(p.params.altitude_agl, 1)));
    line(fmt::format("- Heading: {} deg", fixed(p.heading_deg, 1)));
    line(fmt::format("- Lines: {}, spacing {} m", p.stats.line_count, fixed(p.line_spacing, 2)));
    line(fmt::format("- Photo count: {}", p.stats.photo_count));
    line(fmt::format("- Path length: {} m", fixed(p.stats.total_path_m, 1)));
    line(fmt::format("- Estimated flight time: {} s ({} min)", fixed(p.stats.est_flight_s, 1),
                     fixed(p.stats.est_flight_s / 60.0, 1)));
    line(fmt::format("- Estimated GSD: {} cm/px", fixed(p.stats.est_gsd * 100.0, 2)));
  }
  line("");

  line("## Epochs");
  line("");
  line("| Epoch | Captured | Points | Grid | Valid cells | Min elev (m) | Max elev (m) | Mean elev (m) |");
  line("|---|---|---|---|---|---|---|---|");
  json epochs_json = json::array();
  for (const EpochRecord* e : {&ra, &rb}) {
    const auto& s = e->stats;
    line(fmt::format("| {} | {} | {} | {} x {} @ {} m | {} | {} | {} | {} |", e->epoch_id,
                     e->captured_at, s.point_count, s.n_cols, s.n_rows, fixed(s.cell_size, 2),
                     fixed(s.valid_cell_fraction, 3), fixed(s.min_elev, 3), fixed(s.max_elev, 3),
                     fixed(s.mean_elev, 3)));
    epochs_json.push_back(to_json(*e));
  }
  line("");

  line(fmt::format("## Terrain change ({} to {})", cr.epoch_a, cr.epoch_b));
  line("");
  line("Deltas are later minus earlier; drops are positive magnitudes.");
  line("");
  line(fmt::format("- Mean drop: {} m", fixed(-cr.mean_delta_m, 3)));
  line(fmt::format("- Mean delta: {} m", fixed(cr.mean_delta_m, 3)));
  line(fmt::format("- Median delta: {} m", fixed(cr.median_delta_m, 3)));
  line(fmt::format("- 5th percentile delta: {} m", fixed(cr.p05_delta_m, 3)));
  line(fmt::format("- Max drop: {} m", fixed(cr.max_drop_m, 3)));
  line(fmt::format("- Area with drop >= {} m: {} m²", fixed(cr.threshold_m, 2),
                   fixed(cr.area_exceeding_m2, 1)));
  line(fmt::format("- Valid cells: {} ({})", cr.valid_cells, fixed(cr.valid_cell_fraction, 3)));
  line("");

  line("## Standoff advisory");
  line("");
  json buffer_areas = json::array();
  if (cmp.zones.empty()) {
    line(fmt::format("No hazard zones (drop >= {} m, at least {} cells).", fixed(options.threshold_m, 2),
                     options.min_zone_cells));
  } else {
    line(fmt::format("{} hazard zone(s); keep {} m standoff from each.", cmp.zones.size(),
                     fixed(cmp.advisory.standoff_m, 0)));
    line("");
    line("| Zone | Cells | Peak drop (m) | Buffer area (m²) |");
    line("|---|---|---|---|");
    for (std::size_t i = 0; i < cmp.zones.size(); ++i) {
      const double area = std::abs(signed_area(cmp.advisory.buffer_polygons[i]));
      buffer_areas.push_back(area);
      line(fmt::format("| {} | {} | {} | {} |", i + 1, cmp.zones[i].cell_count,
                       fixed(cmp.zones[i].peak_drop_m, 3), fixed(area, 1)));
    }
  }
  line("");

  line("## Revisit");
  line("");
  line(fmt::format("- Elapsed between epochs: {} h", fixed(cmp.elapsed_h, 1)));
  line(fmt::format("- Surface change rate: {} m/h ({})", fixed(cmp.rate.rate_m_per_h, 4),
                   to_string(cmp.rate.trend)));
  line(fmt::format("- Safety budget: {} m", fixed(options.safety_budget_m, 3)));
  line(fmt::format("- Recommended revisit: {} h", fixed(cmp.revisit_h, 1)));
  line("");

  line("## Inspection checklist");
  line("");
  std::size_t open = 0;
  for (const auto& p : m.inspection_points) open += p.status == InspectionStatus::open;
  json checklist = json::object();
  if (m.inspection_points.empty()) {
    line("none recorded");
    for (const RiskLevel r : kRiskOrder) checklist[std::string(to_string(r))] = json::array();
  } else {
    line(fmt::format("{} open of {}.", open, m.inspection_points.size()));
    for (const RiskLevel r : kRiskOrder) {
      json group = json::array();
      std::string body;
      for (const auto& p : m.inspection_points) {
        if (p.risk != r) continue;
        group.push_back(to_json(p));
        body += fmt::format("- [{}] {} at {:.6f}, {:.6f}: {}", p.status == InspectionStatus::open ? ' ' : 'x',
                            p.id, p.location.lat, p.location.lon, to_string(p.status));
        if (!p.note.empty()) body += fmt::format(" ({})", p.note);
        body += '\n';
      }
      checklist[std::string(to_string(r))] = group;
      if (group.empty()) continue;
      line("");
      line(fmt::format("### {}", risk_heading(r)));
      line("");
      md += body;
    }
  }

  MissionReport out;
  out.markdown = std::move(md);
  out.sidecar = {
      {"mission",
       {{"id", m.id},
        {"name", m.name},
        {"created_at", m.created_at},
        {"origin", {{"lat", m.origin.anchor.lat}, {"lon", m.origin.anchor.lon}, {"alt", m.origin.anchor.alt}}},
        {"survey_polygon",
         m.survey_polygon ? geojson::polygon_geometry(*m.survey_polygon) : json(nullptr)}}},
      {"plan", plan_json},
      {"epochs", epochs_json},
      {"change_report", to_json(cr)},
      {"hazard",
       {{"threshold_m", options.threshold_m},
        {"min_zone_cells", options.min_zone_cells},
        {"zone_count", cmp.zones.size()},
        {"standoff_m", cmp.advisory.standoff_m},
        {"buffer_areas_m2", buffer_areas},
        {"zones", zones_geojson(cmp, m.origin)}}},
      {"revisit",
       {{"elapsed_h", cmp.elapsed_h},
        {"rate_m_per_h", cmp.rate.rate_m_per_h},
        {"trend", to_string(cmp.rate.trend)},
        {"safety_budget_m", options.safety_budget_m},
        {"interval_h", cmp.revisit_h}}},
      {"inspection",
       {{"total", m.inspection_points.size()}, {"open", open}, {"by_risk", checklist}}}};
  return out;
}

}  // namespace floodscout

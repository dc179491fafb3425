// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <httplib.h>

#include "floodscout/api_json.hpp"
#include "floodscout/coverage_planner.hpp"
#include "floodscout/dem_raster.hpp"
#include "floodscout/error.hpp"
#include "floodscout/report.hpp"
#include "floodscout/survey_service.hpp"
#include "floodscout/synthetic_scenarios.hpp"
#include "floodscout/terrain_analytics.hpp"
#include "test_support.hpp"

using namespace floodscout;
using nlohmann::json;

namespace {

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s  %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += ok ? 0 : 1;
}

// Runs a criterion body; an exception counts as a failure.
template <class F>
void criterion(const std::string& name, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(false, name, fmt::format("exception: {}", e.what()));
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const char* kCapturedA = "2021-07-16T10:00:00Z";
const char* kCapturedB = "2021-07-17T10:00:00Z";

MissionStore::Clock fixed_clock() {
  return [] { return parse_timestamp("2021-07-18T08:00:00Z"); };
}

ProfileLine enu_line(const std::vector<Vec2>& pts, const MissionOrigin& origin) {
  ProfileLine line;
  for (const auto& p : pts) line.vertices.push_back(enu_to_wgs84({p.x, p.y, 0.0}, origin));
  return line;
}

// Shared by the recession, revisit and standoff criteria.
struct Recession {
  synth::Preset preset;
  EpochComparison cmp;
  ProfileComparison profile;
  MissionReport report;
  double seconds = 0.0;
};

Recession run_recession(const testing::TempDir& dir) {
  const auto t0 = std::chrono::steady_clock::now();
  Recession r{synth::make_preset("blessem-breach", 0.40), {}, {}, {}, 0.0};
  const MissionOrigin origin{r.preset.origin};
  const auto [a, b] = synth::make_epoch_pair(r.preset.pair);
  write_xyz(a, origin, (dir / "a.xyz").string());
  write_xyz(b, origin, (dir / "b.xyz").string());

  MissionStore store(dir / "data", fixed_clock());
  const std::string id = store.create_mission("Blessem breach", origin).id;
  store.register_epoch(id, dir / "a.xyz", parse_timestamp(kCapturedA));
  store.register_epoch(id, dir / "b.xyz", parse_timestamp(kCapturedB));
  r.cmp = compare_epochs(store, id, "e1", "e2");

  // west to east across the middle of the flooded region
  const ProfileLine line = enu_line({{5.0, 75.0}, {145.0, 75.0}}, origin);
  const auto pa = extract_profile(store.load_dem(id, "e1"), line, origin);
  const auto pb = extract_profile(store.load_dem(id, "e2"), line, origin);
  r.profile = compare_profiles(pa, pb);
  r.report = generate_report(store, id, "e1", "e2");
  r.seconds = seconds_since(t0);
  return r;
}

void check_recession(const Recession& r) {
  const double mean_drop = -r.cmp.difference.report.mean_delta_m;
  std::vector<double> deltas;
  for (const auto& d : r.profile.deltas) {
    if (d) deltas.push_back(*d);
  }
  std::sort(deltas.begin(), deltas.end());
  const double band_mean = r.profile.mean_delta.value_or(NAN);
  const double p05 = deltas.empty() ? NAN : percentile(deltas, 0.05);
  const double p95 = deltas.empty() ? NAN : percentile(deltas, 0.95);
  const bool ok = std::abs(mean_drop - 0.40) <= 0.02 && std::abs(band_mean + 0.40) <= 0.03 &&
                  std::abs(p05 + 0.40) <= 0.03 && std::abs(p95 + 0.40) <= 0.03 && r.seconds < 30.0;
  report(ok, "recession",
         fmt::format("mean drop {:.4f} m (0.400 +/- 0.02), profile delta mean {:.4f} m over {} stations, "
                     "p05 {:.4f} p95 {:.4f} (all -0.40 +/- 0.03), {:.1f} s (< 30 s)",
                     mean_drop, band_mean, deltas.size(), p05, p95, r.seconds));
}

void check_revisit(const Recession& r) {
  const double h = r.cmp.revisit_h;
  const double fast = recommend_revisit(10.0, 0.05);
  const double slow = recommend_revisit(1e-6, 0.05);
  const bool ok = r.cmp.elapsed_h == 24.0 && std::abs(h - 3.0) <= 0.1 && fast == kMinRevisitHours &&
                  slow == kMaxRevisitHours && recommend_revisit(0.0, 0.05) == kMaxRevisitHours;
  report(ok, "revisit",
         fmt::format("rate {:.6f} m/h over {} h -> {:.3f} h (3.0 +/- 0.1); 10 m/h -> {} h, 1e-6 m/h -> {} h",
                     r.cmp.rate.rate_m_per_h, r.cmp.elapsed_h, h, fast, slow));
}

void check_coverage() {
  const auto t0 = std::chrono::steady_clock::now();
  const CameraSpec& camera = CameraCatalog::builtin().get("mz2");
  const MissionOrigin origin{{50.806, 6.765, 60.0}};
  testing::Rng rng(2021);
  int complete = 0;
  double worst = 1.0;
  for (int i = 0; i < 25; ++i) {
    const double ee = rng.uniform(200, 600), en = rng.uniform(200, 600);
    const auto ring = i % 2 == 0 ? testing::random_convex(rng, ee, en, rng.integer(3, 12))
                                 : testing::random_l_shape(rng, ee, en);
    const SurveyPolygon poly{testing::to_geo(ring, origin)};
    CoverageParams params;
    params.altitude_agl = rng.uniform(40, 120);
    params.side_overlap = rng.uniform(0.2, 0.9);
    params.front_overlap = rng.uniform(0.2, 0.9);
    if (rng.uniform(0, 1) < 0.5) params.heading_deg = rng.uniform(0, 180);
    const CoveragePlan plan = plan_coverage(poly, camera, params, origin);
    const double c = verify_coverage(plan, poly, camera, params);
    worst = std::min(worst, c);
    complete += c == 1.0;
  }

  // 10 x 10 sweep over both overlaps on one polygon
  const SurveyPolygon sweep_poly{testing::to_geo(testing::random_l_shape(rng, 420, 310), origin)};
  std::vector<double> levels;
  for (int k = 0; k < 10; ++k) levels.push_back(0.2 + 0.7 * k / 9.0);
  std::vector<std::vector<PlanStats>> stats(10, std::vector<PlanStats>(10));
  for (int s = 0; s < 10; ++s) {
    for (int f = 0; f < 10; ++f) {
      CoverageParams p;
      p.side_overlap = levels[s];
      p.front_overlap = levels[f];
      p.heading_deg = 30.0;
      stats[s][f] = plan_coverage(sweep_poly, camera, p, origin).stats;
    }
  }
  int violations = 0;
  for (int s = 0; s < 10; ++s) {
    for (int f = 0; f < 10; ++f) {
      if (s > 0 && stats[s][f].line_count < stats[s - 1][f].line_count) ++violations;
      if (f > 0 && stats[s][f].photo_count < stats[s][f - 1].photo_count) ++violations;
    }
  }
  const double secs = seconds_since(t0);
  report(complete == 25 && violations == 0 && secs < 60.0, "coverage",
         fmt::format("{}/25 polygons fully covered (worst {:.6f}), {} monotonicity violations in 10x10 sweep, "
                     "{:.1f} s (< 60 s)",
                     complete, worst, violations, secs));
}

void check_geodesy() {
  testing::Rng rng(5);
  const MissionOrigin origin{{50.806, 6.765, 60.0}};
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double r = rng.uniform(0, 5000), t = rng.uniform(0, 2 * std::numbers::pi);
    const EnuPoint v{r * std::cos(t), r * std::sin(t), rng.uniform(-100, 100)};
    const EnuPoint back = wgs84_to_enu(enu_to_wgs84(v, origin), origin);
    worst = std::max(worst, std::hypot(back.east - v.east, back.north - v.north, back.up - v.up));
  }
  const double deg = geodesic_distance({50.0, 6.0, 0.0}, {51.0, 6.0, 0.0});
  report(worst < 1e-3 && std::abs(deg - 111195.0) <= 1.0, "geodesy",
         fmt::format("worst roundtrip error {:.3e} m over 1000 points (< 1 mm), 1 deg latitude {:.3f} m "
                     "(111195 +/- 1)",
                     worst, deg));
}

void check_raster() {
  testing::Rng rng(6);
  // ASC: golden file and random grids reformat byte-identically
  const std::string golden = testing::slurp(testing::test_data_dir() / "golden_2x2.asc");
  bool asc_ok = format_asc(parse_asc(golden)) == golden;
  for (int i = 0; i < 20; ++i) {
    const DemGrid g = testing::random_grid(rng, rng.integer(2, 30), rng.integer(2, 30), rng.uniform(0.1, 5), 0.1);
    const std::string text = format_asc(g);
    const DemGrid back = parse_asc(text);
    asc_ok = asc_ok && format_asc(back) == text && back.same_geometry(g);
  }

  bool centers_ok = true;
  for (int i = 0; i < 20; ++i) {
    const DemGrid g = testing::random_grid(rng, 9, 7, rng.uniform(0.1, 3), 0.2);
    for (int r = 0; r < g.n_rows; ++r) {
      for (int c = 0; c < g.n_cols; ++c) {
        const auto v = sample_bilinear(g, g.center_east(c), g.center_north(r));
        centers_ok = centers_ok && (g.valid(c, r) ? v && *v == g.at(c, r) : true);
      }
    }
  }

  DemGrid hand = DemGrid::filled(0, 0, 1.0, 3, 1, 0.0);
  hand.at(0, 0) = hand.nodata;
  hand.at(1, 0) = 4.0;
  hand.at(2, 0) = 6.0;
  const double idw = fill_voids(hand, 2.0, 2).at(0, 0);

  const int shade = render_hillshade(DemGrid::filled(0, 0, 1.0, 5, 5, 10.0)).at(2, 2);

  // noise-free planes tilted along one grid axis: z = 0.01 east with 10000
  // points on a 1 m grid, then random slopes, cells and densities
  double worst_ratio = 0.0;
  for (int i = 0; i < 9; ++i) {
    synth::TerrainSpec spec;
    double g = 0.01, cell = 1.0, density = 1.0;
    spec.extent_east = spec.extent_north = 100.0;
    if (i > 0) {
      g = rng.uniform(-0.5, 0.5);
      cell = rng.uniform(0.25, 2.0);
      density = rng.uniform(1.0, 20.0);
      spec.extent_east = 40;
      spec.extent_north = 30;
    }
    spec.surface = i % 2 == 0 ? synth::Plane{g, 0.0, rng.uniform(-10, 10)} : synth::Plane{0.0, g, rng.uniform(-10, 10)};
    const DemGrid grid = rasterize(synth::sample_terrain(spec, density, 0.0, 100 + i), cell);
    const double bound = 0.5 * cell * std::abs(g);
    for (int r = 0; r < grid.n_rows; ++r) {
      for (int c = 0; c < grid.n_cols; ++c) {
        if (!grid.valid(c, r)) continue;
        const double err =
            std::abs(grid.at(c, r) - synth::elevation(spec, grid.center_east(c), grid.center_north(r)));
        worst_ratio = std::max(worst_ratio, err / bound);
      }
    }
  }

  const bool ok = asc_ok && centers_ok && std::abs(idw - 4.4) <= 1e-9 && shade == 180 && worst_ratio <= 1.0 + 1e-9;
  report(ok, "raster",
         fmt::format("ASC roundtrip {}, bilinear at centers {}, IDW {:.12f} (4.4), flat hillshade {} (180), "
                     "plane fit error {:.3f} of 0.5*cell*gradient",
                     asc_ok ? "exact" : "differs", centers_ok ? "exact" : "differs", idw, shade, worst_ratio));
}

DemGrid add(const DemGrid& g, double shift) {
  DemGrid out = g;
  for (auto& v : out.values) {
    if (!out.is_nodata(v)) v += shift;
  }
  return out;
}

void check_algebra() {
  testing::Rng rng(7);
  const MissionOrigin origin{{50.806, 6.765, 0.0}};
  int violations = 0;
  double worst_consistency = 0.0;
  for (int i = 0; i < 50; ++i) {
    const DemGrid a = testing::random_grid(rng, rng.integer(4, 30), rng.integer(4, 30), rng.uniform(0.25, 2), 0.1);
    DemGrid b = a;
    for (auto& v : b.values) {
      if (!b.is_nodata(v)) v += rng.uniform(-1.5, 1.5);
    }
    const auto ab = diff_dem(a, b, 0.2), ba = diff_dem(b, a, 0.2);
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (!ab.delta.is_nodata(ab.delta.values[k]) && ab.delta.values[k] != -ba.delta.values[k]) ++violations;
    }
    if (std::abs(ab.report.mean_delta_m + ba.report.mean_delta_m) > 1e-12) ++violations;

    const auto self = diff_dem(a, a, 0.2);
    for (const double v : self.delta.values) {
      if (!self.delta.is_nodata(v) && v != 0.0) ++violations;
    }
    if (self.report.mean_delta_m != 0.0) ++violations;

    // moving both grids leaves the numbers unchanged
    const double tx = rng.uniform(-500, 500), ty = rng.uniform(-500, 500);
    DemGrid ta = a, tb = b;
    ta.origin_east += tx;
    tb.origin_east += tx;
    ta.origin_north += ty;
    tb.origin_north += ty;
    const auto t = diff_dem(ta, tb, 0.2);
    if (t.delta.values != ab.delta.values ||
        std::abs(t.report.mean_delta_m - ab.report.mean_delta_m) > 1e-12 ||
        t.report.area_exceeding_m2 != ab.report.area_exceeding_m2) {
      ++violations;
    }

    // profile and raster agree on a uniform shift
    const DemGrid full = testing::random_grid(rng, 12, 10, 1.0, 0.0);
    const double s = rng.uniform(-2, 2);
    const DemGrid shifted = add(full, s);
    const double raster_mean = diff_dem(full, shifted, 0.2).report.mean_delta_m;
    const ProfileLine line = enu_line({{full.center_east(0), full.center_north(1)},
                                       {full.center_east(11), full.center_north(8)},
                                       {full.center_east(6), full.center_north(0)}},
                                      origin);
    const auto pc = compare_profiles(extract_profile(full, line, origin), extract_profile(shifted, line, origin));
    worst_consistency = std::max(worst_consistency, std::abs(pc.mean_delta.value_or(NAN) - raster_mean));
  }
  report(violations == 0 && worst_consistency <= 1e-6, "analytics algebra",
         fmt::format("{} violations of antisymmetry, self-diff or translation over 50 random grid pairs; "
                     "profile vs raster mean delta {:.2e} (<= 1e-6)",
                     violations, worst_consistency));
}

void check_standoff(const Recession& r) {
  testing::Rng rng(8);
  int violations = 0;
  double worst_margin = INFINITY;
  int zone_total = 0;
  for (int i = 0; i < 40; ++i) {
    DemGrid delta = testing::random_grid(rng, 30, 30, rng.uniform(0.25, 2), 0.05);
    for (auto& v : delta.values) {
      if (!delta.is_nodata(v)) v = rng.uniform(0, 1) < 0.4 ? -rng.uniform(0.3, 1.0) : rng.uniform(-0.1, 0.1);
    }
    const auto zones = detect_hazard_zones(delta, 0.2, 1);
    const double standoff = rng.uniform(5, 150);
    const auto adv = standoff_buffer(zones, standoff);
    zone_total += static_cast<int>(zones.size());
    for (std::size_t k = 0; k < zones.size(); ++k) {
      for (const auto& v : zones[k].polygon) {
        if (!point_in_convex(adv.buffer_polygons[k], v)) ++violations;
        const double margin = distance_to_boundary(adv.buffer_polygons[k], v) / (standoff * std::cos(std::numbers::pi / 16));
        worst_margin = std::min(worst_margin, margin);
        if (margin < 1.0 - 1e-9) ++violations;
      }
    }
  }
  const std::string& md = r.report.markdown;
  const bool advisory = md.find("keep 100 m standoff") != std::string::npos &&
                        r.report.sidecar["hazard"]["standoff_m"] == 100.0 && !r.cmp.zones.empty();
  report(violations == 0 && advisory && zone_total > 0, "standoff",
         fmt::format("{} zones, {} containment or clearance violations, worst clearance {:.6f} of "
                     "standoff*cos(pi/16); 100 m advisory in report: {}",
                     zone_total, violations, worst_margin, advisory ? "yes" : "no"));
}

// Service scenario --------------------------------------------------------------

struct ScenarioOutput {
  std::string plan;
  std::string diff;
  std::string report;
  std::string sidecar;
  std::string library_sidecar;
  json library_numbers;
};

std::string polygon_geojson(const std::vector<Vec2>& ring, const MissionOrigin& origin) {
  json coords = json::array();
  for (const auto& g : testing::to_geo(ring, origin)) coords.push_back({g.lon, g.lat});
  coords.push_back(coords[0]);
  return json{{"type", "Polygon"}, {"coordinates", {coords}}}.dump();
}

std::string expect(const httplib::Result& r, int status, const std::string& what) {
  if (!r) throw std::runtime_error(fmt::format("{}: no response", what));
  if (r->status != status) throw std::runtime_error(fmt::format("{}: HTTP {} {}", what, r->status, r->body));
  return r->body;
}

ScenarioOutput run_scenario(const std::string& cloud_a, const std::string& cloud_b, const synth::Preset& preset) {
  testing::TempDir dir;
  ServiceConfig config;
  config.port = 0;
  config.data_dir = dir.path();
  config.clock = fixed_clock();
  SurveyService service(std::move(config));
  service.start();
  ScenarioOutput out;
  try {
    httplib::Client client("127.0.0.1", service.port());
    client.set_read_timeout(120, 0);
    const MissionOrigin origin{preset.origin};
    const json mission{{"name", "Blessem breach"},
                       {"origin", api::to_json(origin.anchor)},
                       {"survey_polygon", json::parse(polygon_geojson(preset.pair.water_region, origin))}};
    const json created = json::parse(expect(client.Post("/missions", mission.dump(), "application/json"), 201, "create"));
    const std::string base = "/missions/" + created["id"].get<std::string>();

    const json plan_req{{"camera", "mz2"}, {"params", {{"altitude_agl", 60}, {"side_overlap", 0.7}, {"front_overlap", 0.8}}}};
    out.plan = expect(client.Post(base + "/plan", plan_req.dump(), "application/json"), 200, "plan");

    for (const auto& [cloud, at] : {std::pair{&cloud_a, kCapturedA}, std::pair{&cloud_b, kCapturedB}}) {
      httplib::MultipartFormDataItems items{{"cloud", *cloud, "cloud.xyz", "text/plain"}, {"captured_at", at, "", ""}};
      expect(client.Post(base + "/epochs", items), 201, "epoch");
    }
    const json diff_req{{"epoch_a", "e1"}, {"epoch_b", "e2"}};
    out.diff = expect(client.Post(base + "/diff", diff_req.dump(), "application/json"), 200, "diff");
    out.report = expect(client.Get(base + "/report?a=e1&b=e2"), 200, "report");
    out.sidecar = expect(client.Get(base + "/report.json?a=e1&b=e2"), 200, "report.json");

    const std::string id = created["id"];
    out.library_sidecar = generate_report(service.store(), id, "e1", "e2").sidecar_text();

    // the same numbers computed from the uploaded clouds without the store;
    // stored DEMs carry millimetres, hence the ASC roundtrip
    const DemSettings dem;
    auto grid = [&](const std::string& text) {
      const DemGrid g = fill_voids(rasterize(parse_xyz(text, origin), dem.cell_size), dem.fill_radius, dem.min_neighbors);
      return parse_asc(format_asc(g));
    };
    const ReportOptions options;
    const auto d = diff_dem(grid(cloud_a), grid(cloud_b), options.threshold_m);
    const auto rate = estimate_recession_rate(d.report, preset.elapsed_h);
    json cr = to_json(d.report);
    cr["epoch_a"] = "e1";
    cr["epoch_b"] = "e2";
    out.library_numbers = {{"change_report", cr},
                           {"rate_m_per_h", rate.rate_m_per_h},
                           {"interval_h", recommend_revisit(rate.rate_m_per_h, options.safety_budget_m)},
                           {"zone_count", detect_hazard_zones(d.delta, options.threshold_m, options.min_zone_cells).size()}};
  } catch (...) {
    service.stop();
    throw;
  }
  service.stop();
  return out;
}

void check_service(const synth::Preset& preset) {
  const MissionOrigin origin{preset.origin};
  const auto [a, b] = synth::make_epoch_pair(preset.pair);
  testing::TempDir tmp;
  write_xyz(a, origin, (tmp / "a.xyz").string());
  write_xyz(b, origin, (tmp / "b.xyz").string());
  const std::string cloud_a = testing::slurp(tmp / "a.xyz"), cloud_b = testing::slurp(tmp / "b.xyz");

  const ScenarioOutput first = run_scenario(cloud_a, cloud_b, preset);
  const ScenarioOutput second = run_scenario(cloud_a, cloud_b, preset);

  const json side = json::parse(first.sidecar);
  json cr = side["change_report"];
  const bool sidecar_equal = first.sidecar == first.library_sidecar;
  const bool numbers_equal = cr == first.library_numbers["change_report"] &&
                             side["revisit"]["rate_m_per_h"] == first.library_numbers["rate_m_per_h"] &&
                             side["revisit"]["interval_h"] == first.library_numbers["interval_h"] &&
                             side["hazard"]["zone_count"] == first.library_numbers["zone_count"];
  const bool identical = first.plan == second.plan && first.diff == second.diff && first.report == second.report &&
                         first.sidecar == second.sidecar;
  report(sidecar_equal && numbers_equal && identical, "service end-to-end",
         fmt::format("sidecar vs library report {}, sidecar numbers vs in-memory pipeline {}, rerun {} "
                     "(mean delta {:.4f} m, revisit {:.3f} h)",
                     sidecar_equal ? "identical" : "differ", numbers_equal ? "equal" : "differ",
                     identical ? "byte-identical" : "differs", cr["mean_delta_m"].get<double>(),
                     side["revisit"]["interval_h"].get<double>()));
}

}  // namespace

int main() {
  testing::TempDir dir;
  Recession recession;
  bool have_recession = false;
  criterion("recession", [&] {
    recession = run_recession(dir);
    have_recession = true;
    check_recession(recession);
  });
  criterion("revisit", [&] {
    if (!have_recession) throw std::runtime_error("recession run failed");
    check_revisit(recession);
  });
  criterion("coverage", check_coverage);
  criterion("geodesy", check_geodesy);
  criterion("raster", check_raster);
  criterion("analytics algebra", check_algebra);
  criterion("standoff", [&] {
    if (!have_recession) throw std::runtime_error("recession run failed");
    check_standoff(recession);
  });
  criterion("service end-to-end", [&] { check_service(synth::make_preset("blessem-breach", 0.40)); });
  std::printf("%d failed\n", failures);
  return failures == 0 ? 0 : 1;
}

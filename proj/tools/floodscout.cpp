// floodscout: command line front end. Every HTTP endpoint has a subcommand.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "floodscout/api_json.hpp"
#include "floodscout/coverage_planner.hpp"
#include "floodscout/dem_raster.hpp"
#include "floodscout/error.hpp"
#include "floodscout/geojson.hpp"
#include "floodscout/mission_store.hpp"
#include "floodscout/report.hpp"
#include "floodscout/survey_service.hpp"
#include "floodscout/synthetic_scenarios.hpp"
#include "floodscout/terrain_analytics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace floodscout;

namespace {

GeoPoint parse_origin(const std::string& text) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string piece = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(piece, &used));
      if (used != piece.size()) throw std::invalid_argument(piece);
    } catch (const std::exception&) {
      throw Error(ErrorCode::validation, fmt::format("origin '{}' must be lat,lon[,alt]", text));
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (parts.size() < 2 || parts.size() > 3) {
    throw Error(ErrorCode::validation, fmt::format("origin '{}' must be lat,lon[,alt]", text));
  }
  GeoPoint p{parts[0], parts[1], parts.size() == 3 ? parts[2] : 0.0};
  validate(p);
  return p;
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  write_file_atomic(path, text);
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

std::vector<std::string> split_ids(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    out.push_back(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

struct Globals {
  std::string data_dir;
  std::string cameras;

  fs::path resolved_data_dir() const {
    return data_dir.empty() ? resolve_data_dir("floodscout-data") : fs::path(data_dir);
  }
  CameraCatalog catalog() const {
    return cameras.empty() ? CameraCatalog::builtin() : CameraCatalog::load(cameras);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"floodscout: survey planning and terrain change analysis for flood response"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--data-dir", g.data_dir,
                 "mission store directory (default: $FLOODSCOUT_DATA_DIR or ./floodscout-data)");
  app.add_option("--cameras", g.cameras, "camera catalog TOML (default: built-in catalog)");

  std::function<void()> action;

  // plan ---------------------------------------------------------------------
  auto* plan = app.add_subcommand("plan", "plan a boustrophedon survey over a polygon");
  struct {
    std::string polygon, origin, camera = "mz2", out, mission;
    CoverageParams params;
    std::string heading = "auto";
    bool verify = false;
  } po;
  plan->add_option("--polygon", po.polygon, "survey polygon GeoJSON (default: the mission's polygon)");
  plan->add_option("--origin", po.origin, "frame origin lat,lon[,alt] (default: first vertex)");
  plan->add_option("--mission", po.mission, "plan for this mission and store the plan");
  plan->add_option("--camera", po.camera, "camera key")->capture_default_str();
  plan->add_option("--alt,--altitude", po.params.altitude_agl, "altitude above ground, m")->capture_default_str();
  plan->add_option("--side-overlap", po.params.side_overlap)->capture_default_str();
  plan->add_option("--front-overlap", po.params.front_overlap)->capture_default_str();
  plan->add_option("--heading", po.heading, "line bearing in degrees, or auto (longest edge)")->capture_default_str();
  plan->add_option("--speed", po.params.cruise_speed, "cruise speed, m/s")->capture_default_str();
  plan->add_option("--turn-penalty", po.params.turn_penalty, "seconds per line change")->capture_default_str();
  plan->add_option("--endurance", po.params.endurance, "seconds per sortie")->capture_default_str();
  plan->add_option("-o,--out", po.out, "write waypoint GeoJSON here ('-' for stdout)");
  plan->add_flag("--verify", po.verify, "also report the coverage fraction");
  plan->callback([&] {
    action = [&] {
      if (po.heading != "auto") {
        try {
          po.params.heading_deg = std::stod(po.heading);
        } catch (const std::exception&) {
          throw Error(ErrorCode::validation, "--heading must be a number of degrees or auto");
        }
      }
      const CameraCatalog catalog = g.catalog();
      const CameraSpec& camera = catalog.get(po.camera);
      std::optional<MissionStore> store;
      std::optional<Mission> mission;
      if (!po.mission.empty()) {
        store.emplace(g.resolved_data_dir());
        mission = store->get_mission(po.mission);
      }
      SurveyPolygon poly;
      if (!po.polygon.empty()) {
        poly = geojson::parse_polygon(read_file(po.polygon));
      } else if (mission && mission->survey_polygon) {
        poly = *mission->survey_polygon;
      } else {
        throw Error(ErrorCode::validation, "--polygon is required");
      }
      validate(poly);
      MissionOrigin origin{poly.vertices.front()};
      if (mission) origin = mission->origin;
      if (!po.origin.empty()) origin.anchor = parse_origin(po.origin);
      const CoveragePlan p = plan_coverage(poly, camera, po.params, origin);
      json out = api::to_json(p);
      if (store) {
        const PlanRecord rec = store->save_plan(po.mission, p);
        out["plan_id"] = rec.plan_id;
        out["waypoints_path"] = rec.waypoints_path;
      }
      if (po.verify) out["coverage_fraction"] = verify_coverage(p, poly, camera, po.params);
      if (!po.out.empty()) write_text(po.out, export_waypoints(p));
      if (po.out != "-") print_json(out);
    };
  });

  // dem ----------------------------------------------------------------------
  auto* dem = app.add_subcommand("dem", "build and shade elevation models");
  dem->require_subcommand(1);
  auto* build = dem->add_subcommand("build", "rasterize a point cloud into an ASC grid");
  struct {
    std::string cloud, origin, out, hillshade, agg = "mean";
    double cell = 0.25;
    std::optional<double> fill_radius;
    int min_neighbors = 3;
  } bo;
  build->add_option("--cloud", bo.cloud, "point cloud (.xyz)")->required();
  build->add_option("--origin", bo.origin, "mission frame lat,lon[,alt]");
  build->add_option("--cell", bo.cell, "cell size, m")->capture_default_str();
  build->add_option("--fill-radius", bo.fill_radius, "void fill radius, m (default 3 cells; 0 disables)");
  build->add_option("--min-neighbors", bo.min_neighbors)->capture_default_str();
  build->add_option("--agg", bo.agg, "mean|max|min")->check(CLI::IsMember({"mean", "max", "min"}))->capture_default_str();
  build->add_option("-o,--out", bo.out, "output .asc")->required();
  build->add_option("--hillshade", bo.hillshade, "also write a hillshade PNG");
  build->callback([&] {
    action = [&] {
      std::optional<MissionOrigin> origin;
      if (!bo.origin.empty()) origin = MissionOrigin{parse_origin(bo.origin)};
      const PointCloud cloud = read_xyz(bo.cloud, origin);
      const Aggregation agg = bo.agg == "max" ? Aggregation::max : bo.agg == "min" ? Aggregation::min : Aggregation::mean;
      DemGrid grid = rasterize(cloud, bo.cell, agg);
      const double radius = bo.fill_radius.value_or(3.0 * bo.cell);
      const DemStats raw = summarize(grid);
      if (radius > 0.0) grid = fill_voids(grid, radius, bo.min_neighbors);
      write_text(bo.out, format_asc(grid));
      if (!bo.hillshade.empty()) write_png(render_hillshade(parse_asc(format_asc(grid))), bo.hillshade);
      const DemStats s = summarize(grid);
      print_json({{"points", cloud.points.size()},
                  {"rejected", cloud.rejected},
                  {"n_cols", grid.n_cols},
                  {"n_rows", grid.n_rows},
                  {"cell_size", grid.cell_size},
                  {"raw_valid_fraction", raw.valid_fraction},
                  {"valid_cell_fraction", s.valid_fraction},
                  {"min_elev", s.min_elev},
                  {"max_elev", s.max_elev},
                  {"mean_elev", s.mean_elev}});
    };
  });
  auto* shade = dem->add_subcommand("shade", "render a hillshade PNG from an ASC grid");
  struct {
    std::string in, out;
    double azimuth = 315.0, sun_altitude = 45.0;
  } so;
  shade->add_option("dem,--dem", so.in, "input .asc")->required();
  shade->add_option("-o,--out", so.out, "output .png")->required();
  shade->add_option("--azimuth", so.azimuth)->capture_default_str();
  shade->add_option("--sun-altitude", so.sun_altitude)->capture_default_str();
  shade->callback([&] {
    action = [&] { write_png(render_hillshade(read_asc(so.in), so.azimuth, so.sun_altitude), so.out); };
  });

  // profile ------------------------------------------------------------------
  auto* profile = app.add_subcommand("profile", "elevation profiles along a line");
  struct {
    std::vector<std::string> dems;
    std::string line, origin, mission, epochs, csv, label = "profile";
    std::optional<double> step;
  } pr;
  profile->add_option("--line", pr.line, "LineString GeoJSON")->required();
  profile->add_option("--dem", pr.dems, "ASC grids in time order (repeatable)");
  profile->add_option("--origin", pr.origin, "frame origin of the grids, lat,lon[,alt]");
  profile->add_option("--mission", pr.mission, "read grids from this mission");
  profile->add_option("--epochs", pr.epochs, "comma separated epoch ids (with --mission)");
  profile->add_option("--step", pr.step, "station spacing, m (default half a cell)");
  profile->add_option("--label", pr.label)->capture_default_str();
  profile->add_option("-o,--csv", pr.csv, "write the first profile as CSV");
  profile->callback([&] {
    action = [&] {
      ProfileLine line{geojson::parse_line_string(read_file(pr.line)), pr.label};
      std::vector<DemGrid> grids;
      MissionOrigin origin;
      if (!pr.mission.empty()) {
        MissionStore store(g.resolved_data_dir());
        origin = store.get_mission(pr.mission).origin;
        if (pr.epochs.empty()) throw Error(ErrorCode::validation, "--epochs is required with --mission");
        for (const auto& e : split_ids(pr.epochs)) grids.push_back(store.load_dem(pr.mission, e));
      } else {
        if (pr.origin.empty() || pr.dems.empty()) {
          throw Error(ErrorCode::validation, "give --dem and --origin, or --mission and --epochs");
        }
        origin.anchor = parse_origin(pr.origin);
        for (const auto& d : pr.dems) {
          grids.push_back(read_asc(d));
          if (grids.back().epoch_id.empty()) grids.back().epoch_id = fs::path(d).stem().string();
        }
      }
      std::vector<ElevationProfile> profiles;
      json out_profiles = json::array();
      for (const auto& grid : grids) {
        profiles.push_back(extract_profile(grid, line, origin, pr.step));
        out_profiles.push_back(api::to_json(profiles.back(), origin));
      }
      json comparisons = json::array();
      for (std::size_t i = 1; i < profiles.size(); ++i) {
        comparisons.push_back(api::to_json(compare_profiles(profiles[i - 1], profiles[i]),
                                           profiles[i - 1].epoch_id, profiles[i].epoch_id));
      }
      if (!pr.csv.empty()) write_text(pr.csv, profile_to_csv(profiles.front(), origin));
      print_json({{"profiles", out_profiles}, {"comparisons", comparisons}});
    };
  });

  // diff ---------------------------------------------------------------------
  auto* diff = app.add_subcommand("diff", "terrain change between two epochs");
  struct {
    std::string a, b, origin, mission, delta_out, out;
    std::optional<double> elapsed_h;
    ReportOptions opts;
  } dq;
  diff->add_option("a,--a", dq.a, "earlier epoch: .asc path, or epoch id with --mission")->required();
  diff->add_option("b,--b", dq.b, "later epoch: .asc path, or epoch id with --mission")->required();
  diff->add_option("--mission", dq.mission);
  diff->add_option("--origin", dq.origin, "frame origin, enables zone GeoJSON (file mode)");
  diff->add_option("--elapsed-h", dq.elapsed_h, "hours between the epochs, enables rate and revisit (file mode)");
  diff->add_option("--threshold", dq.opts.threshold_m, "drop threshold, m")->capture_default_str();
  diff->add_option("--standoff", dq.opts.standoff_m, "standoff distance, m")->capture_default_str();
  diff->add_option("--budget", dq.opts.safety_budget_m, "safety budget for revisit, m")->capture_default_str();
  diff->add_option("--min-cells", dq.opts.min_zone_cells, "smallest hazard zone, cells")->capture_default_str();
  diff->add_option("--delta-out", dq.delta_out, "write the delta grid as .asc");
  diff->add_option("-o,--out", dq.out, "write the JSON result here instead of stdout");
  diff->callback([&] {
    action = [&] {
      json result;
      if (!dq.mission.empty()) {
        MissionStore store(g.resolved_data_dir());
        const MissionOrigin origin = store.get_mission(dq.mission).origin;
        const EpochComparison cmp = compare_epochs(store, dq.mission, dq.a, dq.b, dq.opts);
        if (!dq.delta_out.empty()) write_text(dq.delta_out, format_asc(cmp.difference.delta));
        result = api::diff_to_json(cmp, dq.opts, origin);
      } else {
        DemGrid ga = read_asc(dq.a);
        DemGrid gb = read_asc(dq.b);
        if (ga.epoch_id.empty()) ga.epoch_id = fs::path(dq.a).stem().string();
        if (gb.epoch_id.empty()) gb.epoch_id = fs::path(dq.b).stem().string();
        EpochComparison cmp;
        cmp.difference = diff_dem(ga, gb, dq.opts.threshold_m);
        if (dq.opts.threshold_m > 0.0) {
          cmp.zones = detect_hazard_zones(cmp.difference.delta, dq.opts.threshold_m, dq.opts.min_zone_cells);
        }
        cmp.advisory = standoff_buffer(cmp.zones, dq.opts.standoff_m);
        if (!dq.delta_out.empty()) write_text(dq.delta_out, format_asc(cmp.difference.delta));
        if (dq.elapsed_h) {
          cmp.elapsed_h = *dq.elapsed_h;
          cmp.rate = estimate_recession_rate(cmp.difference.report, cmp.elapsed_h);
          cmp.revisit_h = recommend_revisit(cmp.rate.rate_m_per_h, dq.opts.safety_budget_m);
        }
        if (!dq.origin.empty()) {
          result = api::diff_to_json(cmp, dq.opts, MissionOrigin{parse_origin(dq.origin)});
        } else {
          // no georeference: zones stay in the grid frame
          result = api::diff_to_json(cmp, dq.opts, MissionOrigin{});
          json rings = json::array();
          for (const auto& z : cmp.zones) {
            json ring = json::array();
            for (const Vec2 v : z.polygon) ring.push_back({v.x, v.y});
            rings.push_back(ring);
          }
          result.erase("zones");
          result["zones_local"] = rings;
        }
        if (!dq.elapsed_h) {
          for (const char* k : {"elapsed_h", "rate_m_per_h", "trend", "revisit_h"}) result[k] = nullptr;
        }
      }
      if (dq.out.empty()) {
        print_json(result);
      } else {
        write_text(dq.out, result.dump(2) + "\n");
      }
    };
  });

  // report -------------------------------------------------------------------
  auto* report = app.add_subcommand("report", "mission report as markdown plus JSON sidecar");
  struct {
    std::string mission, a, b, out = "-", json_out;
    ReportOptions opts;
  } ro;
  report->add_option("--mission", ro.mission)->required();
  report->add_option("--a", ro.a, "earlier epoch id")->required();
  report->add_option("--b", ro.b, "later epoch id")->required();
  report->add_option("-o,--out", ro.out, "markdown output ('-' for stdout)")->capture_default_str();
  report->add_option("--json-out", ro.json_out, "JSON sidecar output");
  report->add_option("--threshold", ro.opts.threshold_m)->capture_default_str();
  report->add_option("--standoff", ro.opts.standoff_m)->capture_default_str();
  report->add_option("--budget", ro.opts.safety_budget_m)->capture_default_str();
  report->callback([&] {
    action = [&] {
      MissionStore store(g.resolved_data_dir());
      const MissionReport r = generate_report(store, ro.mission, ro.a, ro.b, ro.opts);
      write_text(ro.out, r.markdown);
      if (!ro.json_out.empty()) write_text(ro.json_out, r.sidecar_text());
    };
  });

  // synth --------------------------------------------------------------------
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic epoch pair with ground truth");
  struct {
    std::string preset = "blessem-breach", out_dir, truth;
    std::vector<std::string> outputs;
    double drop = 0.40;
    std::optional<std::uint64_t> seed;
  } sy;
  synth_cmd->add_option("--preset", sy.preset)->capture_default_str();
  synth_cmd->add_option("--drop", sy.drop, "true water level drop, m")->capture_default_str();
  synth_cmd->add_option("--seed", sy.seed, "override the preset seed");
  synth_cmd->add_option("-o,--out", sy.outputs, "the two cloud paths, earlier first")->expected(2);
  synth_cmd->add_option("--out-dir", sy.out_dir, "write epoch_a.xyz, epoch_b.xyz and truth.json here");
  synth_cmd->add_option("--truth", sy.truth, "ground truth JSON path (default: truth.json next to the clouds)");
  synth_cmd->callback([&] {
    action = [&] {
      if (sy.outputs.empty() == sy.out_dir.empty()) {
        throw Error(ErrorCode::validation, "give either -o A.xyz B.xyz or --out-dir DIR");
      }
      synth::Preset p = synth::make_preset(sy.preset, sy.drop);
      if (sy.seed) {
        p.pair.terrain.seed = *sy.seed;
        p.pair.seed_b = *sy.seed + 1;
      }
      fs::path path_a, path_b;
      if (!sy.out_dir.empty()) {
        fs::create_directories(sy.out_dir);
        path_a = fs::path(sy.out_dir) / "epoch_a.xyz";
        path_b = fs::path(sy.out_dir) / "epoch_b.xyz";
      } else {
        path_a = sy.outputs[0];
        path_b = sy.outputs[1];
      }
      const fs::path truth_path =
          !sy.truth.empty() ? fs::path(sy.truth) : path_a.parent_path() / "truth.json";
      const auto [a, b] = synth::make_epoch_pair(p.pair);
      const MissionOrigin origin{p.origin};
      write_xyz(a, origin, path_a.string());
      write_xyz(b, origin, path_b.string());
      json truth = synth::ground_truth(p);
      truth["files"] = {path_a.filename().string(), path_b.filename().string()};
      write_text(truth_path.string(), truth.dump(2) + "\n");
      print_json(truth);
    };
  });

  // serve --------------------------------------------------------------------
  auto* serve = app.add_subcommand("serve", "run the HTTP API");
  struct {
    std::string host = "127.0.0.1", static_dir;
    int port = 8080;
  } sv;
  serve->add_option("--host", sv.host)->capture_default_str();
  serve->add_option("--port", sv.port)->capture_default_str();
  serve->add_option("--static", sv.static_dir, "serve a built console from this directory");
  serve->callback([&] {
    action = [&] {
      ServiceConfig cfg;
      cfg.host = sv.host;
      cfg.port = sv.port;
      cfg.data_dir = g.resolved_data_dir();
      cfg.catalog = g.catalog();
      if (!sv.static_dir.empty()) cfg.static_dir = sv.static_dir;
      SurveyService service(cfg);
      const int port = service.bind();
      std::cerr << fmt::format("floodscout serving {} on http://{}:{}\n", cfg.data_dir.string(), cfg.host, port);
      service.run();
    };
  });

  // mission ------------------------------------------------------------------
  auto* mission = app.add_subcommand("mission", "create and inspect missions");
  mission->require_subcommand(1);
  auto* mcreate = mission->add_subcommand("create", "create a mission");
  struct {
    std::string name, origin, polygon;
    DemSettings dem;
    std::optional<double> fill_radius;
  } mc;
  mcreate->add_option("--name", mc.name)->required();
  mcreate->add_option("--origin", mc.origin, "lat,lon[,alt]")->required();
  mcreate->add_option("--polygon", mc.polygon, "survey polygon GeoJSON");
  mcreate->add_option("--cell", mc.dem.cell_size, "DEM cell size, m")->capture_default_str();
  mcreate->add_option("--fill-radius", mc.fill_radius, "void fill radius, m (default 3 cells)");
  mcreate->add_option("--min-neighbors", mc.dem.min_neighbors)->capture_default_str();
  mcreate->callback([&] {
    action = [&] {
      MissionStore store(g.resolved_data_dir());
      std::optional<SurveyPolygon> poly;
      if (!mc.polygon.empty()) poly = geojson::parse_polygon(read_file(mc.polygon));
      mc.dem.fill_radius = mc.fill_radius.value_or(3.0 * mc.dem.cell_size);
      print_json(to_json(store.create_mission(mc.name, MissionOrigin{parse_origin(mc.origin)}, poly, mc.dem)));
    };
  });
  auto* mlist = mission->add_subcommand("list", "list missions");
  mlist->callback([&] {
    action = [&] {
      MissionStore store(g.resolved_data_dir());
      for (const auto& m : store.list_missions()) {
        std::cout << fmt::format("{}\t{}\t{} epochs\t{} inspection points\n", m.id, m.name,
                                 m.epochs.size(), m.inspection_points.size());
      }
    };
  });
  auto* mshow = mission->add_subcommand("show", "print a mission manifest");
  std::string show_id;
  mshow->add_option("id", show_id)->required();
  mshow->callback([&] {
    action = [&] { print_json(to_json(MissionStore(g.resolved_data_dir()).get_mission(show_id))); };
  });

  // epoch --------------------------------------------------------------------
  auto* epoch = app.add_subcommand("epoch", "register survey epochs");
  epoch->require_subcommand(1);
  auto* eadd = epoch->add_subcommand("add", "register a point cloud and build its DEM");
  struct {
    std::string mission, cloud, captured_at, id;
  } ea;
  eadd->add_option("--mission", ea.mission)->required();
  eadd->add_option("--cloud", ea.cloud)->required();
  eadd->add_option("--captured-at", ea.captured_at, "ISO-8601 timestamp")->required();
  eadd->add_option("--id", ea.id, "epoch id (default e<n>)");
  eadd->callback([&] {
    action = [&] {
      MissionStore store(g.resolved_data_dir());
      std::optional<std::string> id;
      if (!ea.id.empty()) id = ea.id;
      print_json(to_json(store.register_epoch(ea.mission, ea.cloud, parse_timestamp(ea.captured_at), id)));
    };
  });

  // inspect ------------------------------------------------------------------
  auto* inspect = app.add_subcommand("inspect", "manage inspection points");
  inspect->require_subcommand(1);
  auto* iadd = inspect->add_subcommand("add", "add an inspection point");
  struct {
    std::string mission, id, risk = "medium", note, location;
  } ia;
  iadd->add_option("--mission", ia.mission)->required();
  iadd->add_option("--at", ia.location, "lat,lon[,alt]")->required();
  iadd->add_option("--risk", ia.risk)->check(CLI::IsMember({"low", "medium", "high"}))->capture_default_str();
  iadd->add_option("--note", ia.note);
  iadd->add_option("--id", ia.id);
  iadd->callback([&] {
    action = [&] {
      MissionStore store(g.resolved_data_dir());
      InspectionPointInput in;
      if (!ia.id.empty()) in.id = ia.id;
      in.location = parse_origin(ia.location);
      in.risk = risk_from_string(ia.risk);
      in.note = ia.note;
      print_json(to_json(store.upsert_inspection_point(ia.mission, in)));
    };
  });
  auto* iset = inspect->add_subcommand("set", "update an inspection point");
  struct {
    std::string mission, id, status, risk, note, reassess;
  } is;
  iset->add_option("--mission", is.mission)->required();
  iset->add_option("--id", is.id)->required();
  iset->add_option("--status", is.status)->check(CLI::IsMember({"open", "inspected", "inaccessible"}));
  iset->add_option("--risk", is.risk)->check(CLI::IsMember({"low", "medium", "high"}));
  iset->add_option("--reassessment-note", is.reassess, "required when changing the risk");
  iset->add_option("--note", is.note);
  iset->callback([&] {
    action = [&] {
      MissionStore store(g.resolved_data_dir());
      if (!is.risk.empty() || !is.reassess.empty()) {
        InspectionPointInput in;
        in.id = is.id;
        if (!is.risk.empty()) in.risk = risk_from_string(is.risk);
        if (!is.reassess.empty()) in.reassessment_note = is.reassess;
        if (!is.status.empty()) in.status = status_from_string(is.status);
        if (!is.note.empty()) in.note = is.note;
        print_json(to_json(store.upsert_inspection_point(is.mission, in)));
      } else if (!is.status.empty()) {
        print_json(to_json(store.set_status(is.mission, is.id, status_from_string(is.status), is.note)));
      } else {
        InspectionPointInput in;
        in.id = is.id;
        in.note = is.note;
        print_json(to_json(store.upsert_inspection_point(is.mission, in)));
      }
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    if (action) action();
    return 0;
  } catch (const Error& e) {
    std::cerr << fmt::format("error: {}: {}\n", to_string(e.code()), e.what());
    return e.code() == ErrorCode::not_found ? 3 : 1;
  } catch (const std::exception& e) {
    std::cerr << fmt::format("error: {}\n", e.what());
    return 1;
  }
}

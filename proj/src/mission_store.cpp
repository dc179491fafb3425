#include "floodscout/mission_store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "floodscout/error.hpp"

namespace floodscout {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kManifestVersion = 1;

// ids end up as directory and file names
void check_slug(std::string_view id, std::string_view what) {
  const bool ok = !id.empty() && id.size() <= 64 &&
                  std::all_of(id.begin(), id.end(), [](char c) {
                    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                           (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
                  }) &&
                  id.front() != '.';
  if (!ok) {
    throw Error(ErrorCode::validation,
                fmt::format("{} '{}' must be 1-64 characters of [A-Za-z0-9._-]", what, id));
  }
}

json geo_json(const GeoPoint& p) { return {{"lat", p.lat}, {"lon", p.lon}, {"alt", p.alt}}; }

GeoPoint geo_from(const json& j) {
  return {j.at("lat").get<double>(), j.at("lon").get<double>(), j.value("alt", 0.0)};
}

json params_json(const CoverageParams& p) {
  return {{"altitude_agl", p.altitude_agl},
          {"side_overlap", p.side_overlap},
          {"front_overlap", p.front_overlap},
          {"heading_deg", p.heading_deg ? json(*p.heading_deg) : json(nullptr)},
          {"cruise_speed", p.cruise_speed},
          {"turn_penalty", p.turn_penalty},
          {"endurance", p.endurance}};
}

CoverageParams params_from(const json& j) {
  CoverageParams p;
  p.altitude_agl = j.at("altitude_agl").get<double>();
  p.side_overlap = j.at("side_overlap").get<double>();
  p.front_overlap = j.at("front_overlap").get<double>();
  if (!j.at("heading_deg").is_null()) p.heading_deg = j.at("heading_deg").get<double>();
  p.cruise_speed = j.at("cruise_speed").get<double>();
  p.turn_penalty = j.at("turn_penalty").get<double>();
  p.endurance = j.at("endurance").get<double>();
  return p;
}

json stats_json(const PlanStats& s) {
  return {{"total_path_m", s.total_path_m},
          {"est_flight_s", s.est_flight_s},
          {"photo_count", s.photo_count},
          {"line_count", s.line_count},
          {"est_gsd", s.est_gsd}};
}

PlanStats stats_from(const json& j) {
  PlanStats s;
  s.total_path_m = j.at("total_path_m").get<double>();
  s.est_flight_s = j.at("est_flight_s").get<double>();
  s.photo_count = j.at("photo_count").get<std::size_t>();
  s.line_count = j.at("line_count").get<std::size_t>();
  s.est_gsd = j.at("est_gsd").get<double>();
  return s;
}

json epoch_stats_json(const EpochStats& s) {
  return {{"point_count", s.point_count},
          {"rejected_points", s.rejected_points},
          {"n_cols", s.n_cols},
          {"n_rows", s.n_rows},
          {"cell_size", s.cell_size},
          {"raw_valid_fraction", s.raw_valid_fraction},
          {"valid_cell_fraction", s.valid_cell_fraction},
          {"min_elev", s.min_elev},
          {"max_elev", s.max_elev},
          {"mean_elev", s.mean_elev}};
}

EpochStats epoch_stats_from(const json& j) {
  EpochStats s;
  s.point_count = j.at("point_count").get<std::size_t>();
  s.rejected_points = j.at("rejected_points").get<std::size_t>();
  s.n_cols = j.at("n_cols").get<int>();
  s.n_rows = j.at("n_rows").get<int>();
  s.cell_size = j.at("cell_size").get<double>();
  s.raw_valid_fraction = j.at("raw_valid_fraction").get<double>();
  s.valid_cell_fraction = j.at("valid_cell_fraction").get<double>();
  s.min_elev = j.at("min_elev").get<double>();
  s.max_elev = j.at("max_elev").get<double>();
  s.mean_elev = j.at("mean_elev").get<double>();
  return s;
}

EpochRecord epoch_from(const json& j) {
  EpochRecord e;
  e.epoch_id = j.at("epoch_id").get<std::string>();
  e.captured_at = j.at("captured_at").get<std::string>();
  e.cloud_path = j.at("cloud_path").get<std::string>();
  e.dem_path = j.at("dem_path").get<std::string>();
  e.hillshade_path = j.at("hillshade_path").get<std::string>();
  e.stats = epoch_stats_from(j.at("stats"));
  return e;
}

InspectionPoint point_from(const json& j) {
  InspectionPoint p;
  p.id = j.at("id").get<std::string>();
  p.location = geo_from(j.at("location"));
  p.risk = risk_from_string(j.at("risk").get<std::string>());
  p.status = status_from_string(j.at("status").get<std::string>());
  p.note = j.at("note").get<std::string>();
  p.created_at = j.at("created_at").get<std::string>();
  p.updated_at = j.at("updated_at").get<std::string>();
  for (const auto& a : j.at("audit")) {
    p.audit.push_back({a.at("at").get<std::string>(), a.at("action").get<std::string>(),
                       a.at("detail").get<std::string>()});
  }
  return p;
}

PlanRecord plan_from(const json& j) {
  PlanRecord p;
  p.plan_id = j.at("plan_id").get<std::string>();
  p.created_at = j.at("created_at").get<std::string>();
  p.camera = j.at("camera").get<std::string>();
  p.params = params_from(j.at("params"));
  p.heading_deg = j.at("heading_deg").get<double>();
  p.line_spacing = j.at("line_spacing").get<double>();
  p.trigger_distance = j.at("trigger_distance").get<double>();
  p.stats = stats_from(j.at("stats"));
  p.waypoints_path = j.at("waypoints_path").get<std::string>();
  return p;
}

std::string next_id(std::string_view prefix, std::size_t n) { return fmt::format("{}{}", prefix, n + 1); }

}  // namespace

// enums ----------------------------------------------------------------------

std::string_view to_string(RiskLevel risk) {
  switch (risk) {
    case RiskLevel::low: return "low";
    case RiskLevel::medium: return "medium";
    case RiskLevel::high: return "high";
  }
  return "medium";
}

std::string_view to_string(InspectionStatus status) {
  switch (status) {
    case InspectionStatus::open: return "open";
    case InspectionStatus::inspected: return "inspected";
    case InspectionStatus::inaccessible: return "inaccessible";
  }
  return "open";
}

RiskLevel risk_from_string(std::string_view s) {
  if (s == "low") return RiskLevel::low;
  if (s == "medium") return RiskLevel::medium;
  if (s == "high") return RiskLevel::high;
  throw Error(ErrorCode::validation, fmt::format("unknown risk level '{}' (low|medium|high)", s));
}

InspectionStatus status_from_string(std::string_view s) {
  if (s == "open") return InspectionStatus::open;
  if (s == "inspected") return InspectionStatus::inspected;
  if (s == "inaccessible") return InspectionStatus::inaccessible;
  throw Error(ErrorCode::validation,
              fmt::format("unknown status '{}' (open|inspected|inaccessible)", s));
}

bool is_allowed_transition(InspectionStatus from, InspectionStatus to) {
  return from == InspectionStatus::open &&
         (to == InspectionStatus::inspected || to == InspectionStatus::inaccessible);
}

// json -----------------------------------------------------------------------

json to_json(const EpochRecord& e) {
  return {{"epoch_id", e.epoch_id},
          {"captured_at", e.captured_at},
          {"cloud_path", e.cloud_path},
          {"dem_path", e.dem_path},
          {"hillshade_path", e.hillshade_path},
          {"stats", epoch_stats_json(e.stats)}};
}

json to_json(const InspectionPoint& p) {
  json audit = json::array();
  for (const auto& a : p.audit) audit.push_back({{"at", a.at}, {"action", a.action}, {"detail", a.detail}});
  return {{"id", p.id},
          {"location", geo_json(p.location)},
          {"risk", to_string(p.risk)},
          {"status", to_string(p.status)},
          {"note", p.note},
          {"created_at", p.created_at},
          {"updated_at", p.updated_at},
          {"audit", audit}};
}

json to_json(const PlanRecord& p) {
  return {{"plan_id", p.plan_id},
          {"created_at", p.created_at},
          {"camera", p.camera},
          {"params", params_json(p.params)},
          {"heading_deg", p.heading_deg},
          {"line_spacing", p.line_spacing},
          {"trigger_distance", p.trigger_distance},
          {"stats", stats_json(p.stats)},
          {"waypoints_path", p.waypoints_path}};
}

json to_json(const Mission& m) {
  json polygon = nullptr;
  if (m.survey_polygon) {
    polygon = json::array();
    for (const auto& v : m.survey_polygon->vertices) polygon.push_back(geo_json(v));
  }
  json epochs = json::array();
  for (const auto& e : m.epochs) epochs.push_back(to_json(e));
  json points = json::array();
  for (const auto& p : m.inspection_points) points.push_back(to_json(p));
  json plans = json::array();
  for (const auto& p : m.plans) plans.push_back(to_json(p));
  return {{"manifest_version", kManifestVersion},
          {"id", m.id},
          {"name", m.name},
          {"origin", geo_json(m.origin.anchor)},
          {"survey_polygon", polygon},
          {"created_at", m.created_at},
          {"dem_settings",
           {{"cell_size", m.dem.cell_size},
            {"fill_radius", m.dem.fill_radius},
            {"min_neighbors", m.dem.min_neighbors}}},
          {"epochs", epochs},
          {"inspection_points", points},
          {"plans", plans}};
}

Mission mission_from_json(const json& j) {
  try {
    if (j.value("manifest_version", 0) != kManifestVersion) {
      throw Error(ErrorCode::parse,
                  fmt::format("unsupported manifest_version {}", j.value("manifest_version", 0)));
    }
    Mission m;
    m.id = j.at("id").get<std::string>();
    m.name = j.at("name").get<std::string>();
    m.origin.anchor = geo_from(j.at("origin"));
    if (!j.at("survey_polygon").is_null()) {
      SurveyPolygon poly;
      for (const auto& v : j.at("survey_polygon")) poly.vertices.push_back(geo_from(v));
      m.survey_polygon = std::move(poly);
    }
    m.created_at = j.at("created_at").get<std::string>();
    const auto& d = j.at("dem_settings");
    m.dem.cell_size = d.at("cell_size").get<double>();
    m.dem.fill_radius = d.at("fill_radius").get<double>();
    m.dem.min_neighbors = d.at("min_neighbors").get<int>();
    for (const auto& e : j.at("epochs")) m.epochs.push_back(epoch_from(e));
    for (const auto& p : j.at("inspection_points")) m.inspection_points.push_back(point_from(p));
    for (const auto& p : j.at("plans")) m.plans.push_back(plan_from(p));
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, fmt::format("malformed manifest: {}", e.what()));
  }
}

const EpochRecord& Mission::epoch(std::string_view epoch_id) const {
  for (const auto& e : epochs) {
    if (e.epoch_id == epoch_id) return e;
  }
  throw Error(ErrorCode::not_found, fmt::format("mission {} has no epoch '{}'", id, epoch_id));
}

// files ----------------------------------------------------------------------

FileLock::FileLock(const fs::path& path) {
  fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) {
    throw Error(ErrorCode::io, fmt::format("cannot open lock file '{}': {}", path.string(),
                                           std::strerror(errno)));
  }
  while (::flock(fd_, LOCK_EX) != 0) {
    if (errno == EINTR) continue;
    const int err = errno;
    ::close(fd_);
    throw Error(ErrorCode::io,
                fmt::format("cannot lock '{}': {}", path.string(), std::strerror(err)));
  }
}

FileLock::~FileLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
  const fs::path tmp = path.string() + ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) {
    throw Error(ErrorCode::io,
                fmt::format("cannot write '{}': {}", tmp.string(), std::strerror(errno)));
  }
  std::size_t done = 0;
  while (done < contents.size()) {
    const ssize_t n = ::write(fd, contents.data() + done, contents.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      const int err = errno;
      ::close(fd);
      throw Error(ErrorCode::io,
                  fmt::format("cannot write '{}': {}", tmp.string(), std::strerror(err)));
    }
    done += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorCode::io, fmt::format("cannot rename '{}': {}", tmp.string(), ec.message()));
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// store ----------------------------------------------------------------------

MissionStore::MissionStore(fs::path data_dir, Clock clock)
    : data_dir_(std::move(data_dir)), clock_(std::move(clock)) {
  std::error_code ec;
  fs::create_directories(data_dir_ / "missions", ec);
  if (ec) {
    throw Error(ErrorCode::io, fmt::format("cannot create data directory '{}': {}",
                                           data_dir_.string(), ec.message()));
  }
}

fs::path MissionStore::mission_dir(std::string_view mission_id) const {
  return data_dir_ / "missions" / std::string(mission_id);
}

fs::path MissionStore::manifest_path(std::string_view mission_id) const {
  return mission_dir(mission_id) / "manifest.json";
}

std::string MissionStore::now() const {
  if (clock_) return format_timestamp(clock_());
  return format_timestamp(std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

Mission MissionStore::load(std::string_view mission_id) const {
  check_slug(mission_id, "mission id");
  const fs::path path = manifest_path(mission_id);
  if (!fs::exists(path)) {
    throw Error(ErrorCode::not_found, fmt::format("unknown mission '{}'", mission_id));
  }
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse, fmt::format("{}: {}", path.string(), e.what()));
  }
  return mission_from_json(j);
}

void MissionStore::save(const Mission& mission) const {
  write_file_atomic(manifest_path(mission.id), to_json(mission).dump(2) + "\n");
}

Mission MissionStore::create_mission(const std::string& name, const MissionOrigin& origin,
                                     std::optional<SurveyPolygon> survey_polygon,
                                     std::optional<DemSettings> dem) {
  if (name.empty() || name.size() > 200) {
    throw Error(ErrorCode::validation, "mission name must be 1-200 characters");
  }
  validate(origin.anchor);
  if (survey_polygon) validate(*survey_polygon);
  const DemSettings settings = dem.value_or(DemSettings{});
  if (!(settings.cell_size > 0.0) || !(settings.fill_radius >= 0.0) || settings.min_neighbors < 1) {
    throw Error(ErrorCode::validation,
                "dem settings need cell_size > 0, fill_radius >= 0, min_neighbors >= 1");
  }

  FileLock lock(data_dir_ / ".store.lock");
  int max_id = 0;
  for (const auto& m : list_missions()) {
    if (m.name == name) {
      throw Error(ErrorCode::conflict, fmt::format("a mission named '{}' already exists ({})", name, m.id));
    }
    if (m.id.size() > 1 && m.id[0] == 'm') {
      max_id = std::max(max_id, std::atoi(m.id.c_str() + 1));
    }
  }

  Mission m;
  m.id = fmt::format("m{:04d}", max_id + 1);
  m.name = name;
  m.origin = origin;
  m.survey_polygon = std::move(survey_polygon);
  m.created_at = now();
  m.dem = settings;
  std::error_code ec;
  fs::create_directories(mission_dir(m.id), ec);
  if (ec) throw Error(ErrorCode::io, fmt::format("cannot create mission directory: {}", ec.message()));
  save(m);
  return m;
}

Mission MissionStore::get_mission(std::string_view mission_id) const { return load(mission_id); }

std::vector<Mission> MissionStore::list_missions() const {
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(data_dir_ / "missions")) {
    if (entry.is_directory() && fs::exists(entry.path() / "manifest.json")) {
      ids.push_back(entry.path().filename().string());
    }
  }
  // zero-padded sequential ids: lexical order is creation order
  std::sort(ids.begin(), ids.end(), [](const std::string& a, const std::string& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  std::vector<Mission> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(load(id));
  return out;
}

EpochRecord MissionStore::register_epoch(std::string_view mission_id, const fs::path& cloud_path,
                                         Timestamp captured_at, std::optional<std::string> epoch_id) {
  if (!fs::exists(cloud_path)) {
    throw Error(ErrorCode::io, fmt::format("point cloud '{}' does not exist", cloud_path.string()));
  }
  return ingest(mission_id, read_file(cloud_path), captured_at, std::move(epoch_id));
}

EpochRecord MissionStore::register_epoch_text(std::string_view mission_id,
                                              std::string_view cloud_text, Timestamp captured_at,
                                              std::optional<std::string> epoch_id) {
  return ingest(mission_id, cloud_text, captured_at, std::move(epoch_id));
}

EpochRecord MissionStore::ingest(std::string_view mission_id, std::string_view cloud_text,
                                 Timestamp captured_at, std::optional<std::string> epoch_id) {
  check_slug(mission_id, "mission id");
  if (!fs::exists(manifest_path(mission_id))) {
    throw Error(ErrorCode::not_found, fmt::format("unknown mission '{}'", mission_id));
  }
  FileLock lock(mission_dir(mission_id) / ".lock");
  Mission m = load(mission_id);

  const std::string eid = epoch_id.value_or(next_id("e", m.epochs.size()));
  check_slug(eid, "epoch id");
  for (const auto& e : m.epochs) {
    if (e.epoch_id == eid) {
      throw Error(ErrorCode::conflict, fmt::format("epoch '{}' is already registered", eid));
    }
  }
  const std::string captured = format_timestamp(captured_at);
  if (!m.epochs.empty()) {
    const Timestamp last = parse_timestamp(m.epochs.back().captured_at);
    if (captured_at <= last) {
      throw Error(ErrorCode::conflict,
                  fmt::format("captured_at {} is not later than the last epoch ({} at {})",
                              captured, m.epochs.back().epoch_id, m.epochs.back().captured_at));
    }
  }

  const PointCloud cloud = parse_xyz(cloud_text, m.origin);
  if (cloud.points.empty()) throw Error(ErrorCode::validation, "point cloud has no points");

  const DemGrid raw = rasterize(cloud, m.dem.cell_size);
  DemGrid filled = fill_voids(raw, m.dem.fill_radius, m.dem.min_neighbors);
  filled.epoch_id = eid;
  filled.captured_at = captured;
  const std::string asc = format_asc(filled);
  // stats describe the grid as stored
  const DemGrid stored = parse_asc(asc);
  const HillshadeImage shade = render_hillshade(stored);
  const auto png = encode_png(shade);

  EpochRecord rec;
  rec.epoch_id = eid;
  rec.captured_at = captured;
  const std::string dir = fmt::format("epochs/{}", eid);
  rec.cloud_path = dir + "/cloud.xyz";
  rec.dem_path = dir + "/dem.asc";
  rec.hillshade_path = dir + "/hillshade.png";

  const fs::path root = mission_dir(mission_id);
  std::error_code ec;
  fs::create_directories(root / dir, ec);
  if (ec) throw Error(ErrorCode::io, fmt::format("cannot create '{}': {}", dir, ec.message()));
  write_file_atomic(root / rec.cloud_path, cloud_text);
  write_file_atomic(root / rec.dem_path, asc);
  write_file_atomic(root / rec.hillshade_path,
                    std::string_view(reinterpret_cast<const char*>(png.data()), png.size()));

  const DemStats raw_stats = summarize(raw);
  const DemStats stats = summarize(stored);
  rec.stats.point_count = cloud.points.size();
  rec.stats.rejected_points = cloud.rejected;
  rec.stats.n_cols = stored.n_cols;
  rec.stats.n_rows = stored.n_rows;
  rec.stats.cell_size = stored.cell_size;
  rec.stats.raw_valid_fraction = raw_stats.valid_fraction;
  rec.stats.valid_cell_fraction = stats.valid_fraction;
  rec.stats.min_elev = stats.min_elev;
  rec.stats.max_elev = stats.max_elev;
  rec.stats.mean_elev = stats.mean_elev;

  m.epochs.push_back(rec);
  save(m);
  return rec;
}

DemGrid MissionStore::load_dem(std::string_view mission_id, std::string_view epoch_id) const {
  const Mission m = load(mission_id);
  const EpochRecord& e = m.epoch(epoch_id);
  DemGrid grid = parse_asc(read_file(mission_dir(mission_id) / e.dem_path));
  grid.epoch_id = e.epoch_id;
  grid.captured_at = e.captured_at;
  return grid;
}

PlanRecord MissionStore::save_plan(std::string_view mission_id, const CoveragePlan& plan) {
  check_slug(mission_id, "mission id");
  if (!fs::exists(manifest_path(mission_id))) {
    throw Error(ErrorCode::not_found, fmt::format("unknown mission '{}'", mission_id));
  }
  FileLock lock(mission_dir(mission_id) / ".lock");
  Mission m = load(mission_id);
  if (!(plan.origin == m.origin)) {
    throw Error(ErrorCode::validation, "plan origin differs from the mission origin");
  }

  const std::string waypoints = export_waypoints(plan);
  // re-posting the same plan returns the stored record
  if (!m.plans.empty()) {
    const PlanRecord& last = m.plans.back();
    const fs::path last_file = mission_dir(mission_id) / last.waypoints_path;
    if (last.camera == plan.camera.key && last.params == plan.params && fs::exists(last_file) &&
        read_file(last_file) == waypoints) {
      return last;
    }
  }

  PlanRecord rec;
  rec.plan_id = next_id("p", m.plans.size());
  rec.created_at = now();
  rec.camera = plan.camera.key;
  rec.params = plan.params;
  rec.heading_deg = plan.heading_deg;
  rec.line_spacing = plan.line_spacing;
  rec.trigger_distance = plan.trigger_distance;
  rec.stats = plan.stats;
  rec.waypoints_path = fmt::format("plans/{}.geojson", rec.plan_id);

  std::error_code ec;
  fs::create_directories(mission_dir(mission_id) / "plans", ec);
  if (ec) throw Error(ErrorCode::io, fmt::format("cannot create plans directory: {}", ec.message()));
  write_file_atomic(mission_dir(mission_id) / rec.waypoints_path, waypoints);
  m.plans.push_back(rec);
  save(m);
  return rec;
}

InspectionPoint MissionStore::upsert_inspection_point(std::string_view mission_id,
                                                      const InspectionPointInput& input) {
  check_slug(mission_id, "mission id");
  if (!fs::exists(manifest_path(mission_id))) {
    throw Error(ErrorCode::not_found, fmt::format("unknown mission '{}'", mission_id));
  }
  FileLock lock(mission_dir(mission_id) / ".lock");
  Mission m = load(mission_id);
  const std::string at = now();

  auto it = m.inspection_points.end();
  if (input.id) {
    check_slug(*input.id, "inspection point id");
    it = std::find_if(m.inspection_points.begin(), m.inspection_points.end(),
                      [&](const InspectionPoint& p) { return p.id == *input.id; });
  }

  if (it == m.inspection_points.end()) {
    if (!input.location) {
      throw Error(ErrorCode::validation, "a new inspection point needs a location");
    }
    validate(*input.location);
    if (input.status && *input.status != InspectionStatus::open) {
      throw Error(ErrorCode::validation, "a new inspection point starts with status open");
    }
    InspectionPoint p;
    if (input.id) {
      p.id = *input.id;
    } else {
      // skip ids taken by explicitly named points
      std::size_t n = m.inspection_points.size();
      auto taken = [&](const std::string& id) {
        return std::any_of(m.inspection_points.begin(), m.inspection_points.end(),
                           [&](const InspectionPoint& q) { return q.id == id; });
      };
      do {
        p.id = next_id("ip", n++);
      } while (taken(p.id));
    }
    p.location = *input.location;
    p.risk = input.risk.value_or(RiskLevel::medium);
    p.status = InspectionStatus::open;
    p.note = input.note.value_or("");
    p.created_at = at;
    p.updated_at = at;
    p.audit.push_back({at, "created", fmt::format("risk {}", to_string(p.risk))});
    m.inspection_points.push_back(p);
    save(m);
    return p;
  }

  InspectionPoint p = *it;
  bool changed = false;
  if (input.risk && *input.risk != p.risk) {
    if (!input.reassessment_note || input.reassessment_note->empty()) {
      throw Error(ErrorCode::validation,
                  fmt::format("changing the risk of {} needs a reassessment_note", p.id));
    }
    p.audit.push_back({at, "risk_reassessed",
                       fmt::format("{} -> {}: {}", to_string(p.risk), to_string(*input.risk),
                                   *input.reassessment_note)});
    p.risk = *input.risk;
    changed = true;
  }
  if (input.status && *input.status != p.status) {
    if (!is_allowed_transition(p.status, *input.status)) {
      throw Error(ErrorCode::conflict,
                  fmt::format("status of {} cannot change from {} to {}", p.id,
                              to_string(p.status), to_string(*input.status)));
    }
    p.audit.push_back({at, "status",
                       fmt::format("{} -> {}", to_string(p.status), to_string(*input.status))});
    p.status = *input.status;
    changed = true;
  }
  if (input.location && !(*input.location == p.location)) {
    validate(*input.location);
    p.audit.push_back({at, "moved",
                       fmt::format("{:.6f},{:.6f} -> {:.6f},{:.6f}", p.location.lat, p.location.lon,
                                   input.location->lat, input.location->lon)});
    p.location = *input.location;
    changed = true;
  }
  if (input.note && *input.note != p.note) {
    p.audit.push_back({at, "note", *input.note});
    p.note = *input.note;
    changed = true;
  }
  if (!changed) return p;
  p.updated_at = at;
  *it = p;
  save(m);
  return p;
}

InspectionPoint MissionStore::set_status(std::string_view mission_id, std::string_view point_id,
                                         InspectionStatus status, const std::string& note) {
  {
    const Mission m = load(mission_id);
    const bool known = std::any_of(m.inspection_points.begin(), m.inspection_points.end(),
                                   [&](const InspectionPoint& p) { return p.id == point_id; });
    if (!known) {
      throw Error(ErrorCode::not_found,
                  fmt::format("mission {} has no inspection point '{}'", mission_id, point_id));
    }
  }
  InspectionPointInput in;
  in.id = std::string(point_id);
  in.status = status;
  if (!note.empty()) in.note = note;
  return upsert_inspection_point(mission_id, in);
}

}  // namespace floodscout

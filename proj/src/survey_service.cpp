#include "floodscout/survey_service.hpp"

#include <cstdlib>
#include <map>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "floodscout/api_json.hpp"
#include "floodscout/coverage_planner.hpp"
#include "floodscout/error.hpp"
#include "floodscout/geojson.hpp"
#include "floodscout/report.hpp"
#include "floodscout/terrain_analytics.hpp"

namespace floodscout {

namespace fs = std::filesystem;
using nlohmann::json;
using httplib::Request;
using httplib::Response;

fs::path resolve_data_dir(const fs::path& fallback) {
  if (const char* env = std::getenv("FLOODSCOUT_DATA_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return fallback;
}

namespace {

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::validation:
    case ErrorCode::domain:
    case ErrorCode::infeasible: return 422;
    case ErrorCode::parse: return 400;
    case ErrorCode::not_found: return 404;
    case ErrorCode::conflict: return 409;
    case ErrorCode::io: return 500;
  }
  return 500;
}

void send_json(Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(Response& res, int status, std::string_view code, std::string_view message) {
  send_json(res, api::error_body(code, message), status);
}

json body_json(const Request& req) {
  if (req.body.empty()) return json::object();
  json j = json::parse(req.body);
  if (!j.is_object()) throw Error(ErrorCode::validation, "request body must be a JSON object");
  return j;
}

std::string required_string(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw Error(ErrorCode::validation, fmt::format("'{}' must be a string", key));
  }
  return j.at(key).get<std::string>();
}

std::optional<double> query_number(const Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  const std::string v = req.get_param_value(key);
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw Error(ErrorCode::validation, fmt::format("query parameter '{}' must be a number", key));
  }
}

std::string query_required(const Request& req, const char* key) {
  if (!req.has_param(key)) {
    throw Error(ErrorCode::validation, fmt::format("query parameter '{}' is required", key));
  }
  return req.get_param_value(key);
}

}  // namespace

struct SurveyService::Impl {
  ServiceConfig config;
  MissionStore store;
  httplib::Server server;
  std::thread thread;
  int port = -1;

  std::mutex locks_mutex;
  std::map<std::string, std::unique_ptr<std::mutex>, std::less<>> mission_locks;

  explicit Impl(ServiceConfig c)
      : config(std::move(c)), store(config.data_dir, config.clock) {
    // httplib's default also sets SO_REUSEPORT, which would let a second
    // instance share the port instead of failing
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    routes();
  }

  std::mutex& mission_lock(const std::string& id) {
    std::lock_guard g(locks_mutex);
    auto& slot = mission_locks[id];
    if (!slot) slot = std::make_unique<std::mutex>();
    return *slot;
  }

  template <typename F>
  httplib::Server::Handler guarded(F f) {
    return [f](const Request& req, Response& res) {
      try {
        f(req, res);
      } catch (const Error& e) {
        send_error(res, http_status(e.code()), to_string(e.code()), e.what());
      } catch (const json::parse_error& e) {
        send_error(res, 400, to_string(ErrorCode::parse), e.what());
      } catch (const json::exception& e) {
        send_error(res, 422, to_string(ErrorCode::validation), e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, "internal_error", e.what());
      }
    };
  }

  void routes();
  void create_mission(const Request& req, Response& res);
  void post_plan(const Request& req, Response& res);
  void post_epoch(const Request& req, Response& res);
  void post_profiles(const Request& req, Response& res);
  void post_diff(const Request& req, Response& res);
  void post_point(const Request& req, Response& res);
  void put_point(const Request& req, Response& res);
  void get_report(const Request& req, Response& res, bool as_json);
  void send_product(const Request& req, Response& res, bool png);
};

void SurveyService::Impl::routes() {
  server.set_default_headers({{"Access-Control-Allow-Origin", config.cors_origin}});
  server.Options(".*", [](const Request&, Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  server.set_error_handler([](const Request& req, Response& res) {
    if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
    const std::string code = res.status == 404 ? "not_found" : "http_error";
    send_error(res, res.status, code, fmt::format("{} {}", req.method, req.path));
    return httplib::Server::HandlerResponse::Handled;
  });
  server.set_exception_handler([](const Request&, Response& res, std::exception_ptr) {
    send_error(res, 500, "internal_error", "unexpected failure");
  });

  server.Get("/healthz", [](const Request&, Response& res) { send_json(res, {{"status", "ok"}}); });
  server.Get("/cameras", guarded([this](const Request&, Response& res) {
    json list = json::array();
    for (const auto& c : config.catalog.cameras()) list.push_back(api::to_json(c));
    send_json(res, {{"cameras", list}});
  }));

  server.Post("/missions", guarded([this](const Request& q, Response& s) { create_mission(q, s); }));
  server.Get("/missions", guarded([this](const Request&, Response& res) {
    json list = json::array();
    for (const auto& m : store.list_missions()) list.push_back(to_json(m));
    send_json(res, {{"missions", list}});
  }));
  server.Get(R"(/missions/([^/]+))", guarded([this](const Request& req, Response& res) {
    send_json(res, to_json(store.get_mission(req.matches[1].str())));
  }));
  server.Post(R"(/missions/([^/]+)/plan)",
              guarded([this](const Request& q, Response& s) { post_plan(q, s); }));
  server.Get(R"(/missions/([^/]+)/plan\.geojson)", guarded([this](const Request& req, Response& res) {
    const std::string id = req.matches[1].str();
    const Mission m = store.get_mission(id);
    if (m.plans.empty()) throw Error(ErrorCode::not_found, fmt::format("mission {} has no plan", id));
    res.set_content(read_file(store.mission_dir(id) / m.plans.back().waypoints_path),
                    "application/geo+json");
  }));
  server.Post(R"(/missions/([^/]+)/epochs)",
              guarded([this](const Request& q, Response& s) { post_epoch(q, s); }));
  server.Get(R"(/missions/([^/]+)/epochs/([^/]+)/dem\.asc)",
             guarded([this](const Request& q, Response& s) { send_product(q, s, false); }));
  server.Get(R"(/missions/([^/]+)/epochs/([^/]+)/hillshade\.png)",
             guarded([this](const Request& q, Response& s) { send_product(q, s, true); }));
  server.Post(R"(/missions/([^/]+)/profiles)",
              guarded([this](const Request& q, Response& s) { post_profiles(q, s); }));
  server.Post(R"(/missions/([^/]+)/diff)",
              guarded([this](const Request& q, Response& s) { post_diff(q, s); }));
  server.Post(R"(/missions/([^/]+)/inspection-points)",
              guarded([this](const Request& q, Response& s) { post_point(q, s); }));
  server.Put(R"(/missions/([^/]+)/inspection-points/([^/]+))",
             guarded([this](const Request& q, Response& s) { put_point(q, s); }));
  server.Get(R"(/missions/([^/]+)/report)",
             guarded([this](const Request& q, Response& s) { get_report(q, s, false); }));
  server.Get(R"(/missions/([^/]+)/report\.json)",
             guarded([this](const Request& q, Response& s) { get_report(q, s, true); }));

  if (config.static_dir) {
    if (!server.set_mount_point("/", config.static_dir->string())) {
      throw Error(ErrorCode::io,
                  fmt::format("static directory '{}' does not exist", config.static_dir->string()));
    }
  }
}

void SurveyService::Impl::create_mission(const Request& req, Response& res) {
  const json body = body_json(req);
  const std::string name = required_string(body, "name");
  if (!body.contains("origin")) throw Error(ErrorCode::validation, "'origin' is required");
  const MissionOrigin origin{api::geo_point_from_json(body.at("origin"))};
  std::optional<SurveyPolygon> poly;
  if (body.contains("survey_polygon") && !body.at("survey_polygon").is_null()) {
    poly = geojson::parse_polygon(body.at("survey_polygon"));
  }
  std::optional<DemSettings> dem;
  if (body.contains("dem_settings")) {
    const json& d = body.at("dem_settings");
    DemSettings s;
    s.cell_size = d.value("cell_size", s.cell_size);
    s.fill_radius = d.value("fill_radius", 3.0 * s.cell_size);
    s.min_neighbors = d.value("min_neighbors", s.min_neighbors);
    dem = s;
  }
  std::lock_guard g(mission_lock(""));
  send_json(res, to_json(store.create_mission(name, origin, std::move(poly), dem)), 201);
}

void SurveyService::Impl::post_plan(const Request& req, Response& res) {
  const std::string id = req.matches[1].str();
  const json body = body_json(req);
  const Mission m = store.get_mission(id);
  SurveyPolygon poly;
  if (body.contains("polygon") && !body.at("polygon").is_null()) {
    poly = geojson::parse_polygon(body.at("polygon"));
  } else if (m.survey_polygon) {
    poly = *m.survey_polygon;
  } else {
    throw Error(ErrorCode::validation, "'polygon' is required (mission has no survey polygon)");
  }
  const std::string camera_key = body.contains("camera") ? required_string(body, "camera") : "mz2";
  const CameraSpec& camera = config.catalog.get(camera_key);
  const CoverageParams params = api::params_from_json(body.value("params", json::object()));
  const CoveragePlan plan = plan_coverage(poly, camera, params, m.origin);
  const json plan_json = api::to_json(plan);

  std::lock_guard g(mission_lock(id));
  const PlanRecord rec = store.save_plan(id, plan);
  send_json(res, {{"plan_id", rec.plan_id},
                  {"created_at", rec.created_at},
                  {"waypoints_path", rec.waypoints_path},
                  {"plan", plan_json}});
}

void SurveyService::Impl::post_epoch(const Request& req, Response& res) {
  const std::string id = req.matches[1].str();
  if (!req.is_multipart_form_data()) {
    throw Error(ErrorCode::parse, "expected multipart/form-data with 'cloud' and 'captured_at'");
  }
  if (!req.has_file("cloud")) throw Error(ErrorCode::validation, "multipart field 'cloud' is required");
  if (!req.has_file("captured_at")) {
    throw Error(ErrorCode::validation, "multipart field 'captured_at' is required");
  }
  const Timestamp captured = parse_timestamp(req.get_file_value("captured_at").content);
  std::optional<std::string> epoch_id;
  if (req.has_file("epoch_id") && !req.get_file_value("epoch_id").content.empty()) {
    epoch_id = req.get_file_value("epoch_id").content;
  }
  std::lock_guard g(mission_lock(id));
  const EpochRecord rec =
      store.register_epoch_text(id, req.get_file_value("cloud").content, captured, epoch_id);
  send_json(res, to_json(rec), 201);
}

void SurveyService::Impl::send_product(const Request& req, Response& res, bool png) {
  const std::string id = req.matches[1].str();
  const Mission m = store.get_mission(id);
  const EpochRecord& e = m.epoch(req.matches[2].str());
  const fs::path path = store.mission_dir(id) / (png ? e.hillshade_path : e.dem_path);
  res.set_content(read_file(path), png ? "image/png" : "text/plain");
}

void SurveyService::Impl::post_profiles(const Request& req, Response& res) {
  const std::string id = req.matches[1].str();
  const json body = body_json(req);
  const Mission m = store.get_mission(id);
  if (!body.contains("line")) throw Error(ErrorCode::validation, "'line' is required");
  ProfileLine line;
  line.vertices = geojson::parse_line_string(body.at("line"));
  line.label = body.value("label", std::string("profile"));
  std::optional<double> step;
  if (body.contains("step_m") && !body.at("step_m").is_null()) step = body.at("step_m").get<double>();
  if (!body.contains("epochs") || !body.at("epochs").is_array() || body.at("epochs").empty()) {
    throw Error(ErrorCode::validation, "'epochs' must be a non-empty array of epoch ids");
  }

  std::vector<ElevationProfile> profiles;
  json out_profiles = json::array();
  for (const auto& e : body.at("epochs")) {
    const std::string eid = e.get<std::string>();
    profiles.push_back(extract_profile(store.load_dem(id, eid), line, m.origin, step));
    out_profiles.push_back(api::to_json(profiles.back(), m.origin));
  }
  json comparisons = json::array();
  for (std::size_t i = 1; i < profiles.size(); ++i) {
    comparisons.push_back(api::to_json(compare_profiles(profiles[i - 1], profiles[i]),
                                       profiles[i - 1].epoch_id, profiles[i].epoch_id));
  }
  send_json(res, {{"profiles", out_profiles}, {"comparisons", comparisons}});
}

void SurveyService::Impl::post_diff(const Request& req, Response& res) {
  const std::string id = req.matches[1].str();
  const json body = body_json(req);
  const std::string a = required_string(body, "epoch_a");
  const std::string b = required_string(body, "epoch_b");
  const ReportOptions options = api::report_options_from_json(body);
  const Mission m = store.get_mission(id);
  const EpochComparison cmp = compare_epochs(store, id, a, b, options);
  send_json(res, api::diff_to_json(cmp, options, m.origin));
}

namespace {

InspectionPointInput point_input(const json& body) {
  InspectionPointInput in;
  if (body.contains("id")) in.id = required_string(body, "id");
  if (body.contains("location")) in.location = api::geo_point_from_json(body.at("location"));
  if (body.contains("risk")) in.risk = risk_from_string(required_string(body, "risk"));
  if (body.contains("status")) in.status = status_from_string(required_string(body, "status"));
  if (body.contains("note")) in.note = required_string(body, "note");
  if (body.contains("reassessment_note")) in.reassessment_note = required_string(body, "reassessment_note");
  return in;
}

}  // namespace

void SurveyService::Impl::post_point(const Request& req, Response& res) {
  const std::string id = req.matches[1].str();
  const InspectionPointInput in = point_input(body_json(req));
  std::lock_guard g(mission_lock(id));
  if (in.id) {
    const Mission m = store.get_mission(id);
    for (const auto& p : m.inspection_points) {
      if (p.id == *in.id) {
        throw Error(ErrorCode::conflict, fmt::format("inspection point '{}' already exists", p.id));
      }
    }
  }
  if (!in.risk) throw Error(ErrorCode::validation, "'risk' is required");
  send_json(res, to_json(store.upsert_inspection_point(id, in)), 201);
}

void SurveyService::Impl::put_point(const Request& req, Response& res) {
  const std::string id = req.matches[1].str();
  InspectionPointInput in = point_input(body_json(req));
  const std::string pid = req.matches[2].str();
  if (in.id && *in.id != pid) throw Error(ErrorCode::validation, "body id differs from the path id");
  in.id = pid;
  std::lock_guard g(mission_lock(id));
  const Mission m = store.get_mission(id);
  bool exists = false;
  for (const auto& p : m.inspection_points) exists = exists || p.id == pid;
  send_json(res, to_json(store.upsert_inspection_point(id, in)), exists ? 200 : 201);
}

void SurveyService::Impl::get_report(const Request& req, Response& res, bool as_json) {
  const std::string id = req.matches[1].str();
  ReportOptions options;
  if (auto v = query_number(req, "threshold_m")) options.threshold_m = *v;
  if (auto v = query_number(req, "standoff_m")) options.standoff_m = *v;
  if (auto v = query_number(req, "safety_budget_m")) options.safety_budget_m = *v;
  const MissionReport report =
      generate_report(store, id, query_required(req, "a"), query_required(req, "b"), options);
  if (as_json) {
    res.set_content(report.sidecar_text(), "application/json");
  } else {
    res.set_content(report.markdown, "text/markdown; charset=utf-8");
  }
}

SurveyService::SurveyService(ServiceConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

SurveyService::~SurveyService() { stop(); }

int SurveyService::bind() {
  if (impl_->port >= 0) return impl_->port;
  if (impl_->config.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(impl_->config.host);
  } else if (impl_->server.bind_to_port(impl_->config.host, impl_->config.port)) {
    impl_->port = impl_->config.port;
  }
  if (impl_->port < 0) {
    throw Error(ErrorCode::io, fmt::format("cannot listen on {}:{} (port busy?)", impl_->config.host,
                                           impl_->config.port));
  }
  return impl_->port;
}

void SurveyService::run() {
  bind();
  impl_->server.listen_after_bind();
}

void SurveyService::start() {
  bind();
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void SurveyService::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int SurveyService::port() const { return impl_->port; }

MissionStore& SurveyService::store() { return impl_->store; }

}  // namespace floodscout

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "floodscout/coverage_planner.hpp"
#include "floodscout/dem_raster.hpp"
#include "floodscout/geodesy.hpp"
#include "floodscout/timestamp.hpp"

namespace floodscout {

enum class RiskLevel { low, medium, high };
enum class InspectionStatus { open, inspected, inaccessible };

std::string_view to_string(RiskLevel risk);
std::string_view to_string(InspectionStatus status);
RiskLevel risk_from_string(std::string_view s);
InspectionStatus status_from_string(std::string_view s);

/// open -> inspected | inaccessible; nothing else.
bool is_allowed_transition(InspectionStatus from, InspectionStatus to);

struct AuditEntry {
  std::string at;
  std::string action;
  std::string detail;

  bool operator==(const AuditEntry&) const = default;
};

struct InspectionPoint {
  std::string id;
  GeoPoint location;
  RiskLevel risk = RiskLevel::medium;
  InspectionStatus status = InspectionStatus::open;
  std::string note;
  std::string created_at;
  std::string updated_at;
  std::vector<AuditEntry> audit;

  bool operator==(const InspectionPoint&) const = default;
};

/// Partial update. A point that does not exist yet is created from it and
/// needs a location; risk defaults to medium. Changing the risk of an
/// existing point needs a reassessment note.
struct InspectionPointInput {
  std::optional<std::string> id;
  std::optional<GeoPoint> location;
  std::optional<RiskLevel> risk;
  std::optional<InspectionStatus> status;
  std::optional<std::string> note;
  std::optional<std::string> reassessment_note;
};

struct EpochStats {
  std::size_t point_count = 0;
  std::size_t rejected_points = 0;
  int n_cols = 0;
  int n_rows = 0;
  double cell_size = 0.0;
  double raw_valid_fraction = 0.0;  // before void filling
  double valid_cell_fraction = 0.0;
  double min_elev = 0.0;
  double max_elev = 0.0;
  double mean_elev = 0.0;

  bool operator==(const EpochStats&) const = default;
};

/// Paths are relative to the mission directory.
struct EpochRecord {
  std::string epoch_id;
  std::string captured_at;
  std::string cloud_path;
  std::string dem_path;
  std::string hillshade_path;
  EpochStats stats;

  bool operator==(const EpochRecord&) const = default;
};

struct PlanRecord {
  std::string plan_id;
  std::string created_at;
  std::string camera;
  CoverageParams params;
  double heading_deg = 0.0;
  double line_spacing = 0.0;
  double trigger_distance = 0.0;
  PlanStats stats;
  std::string waypoints_path;

  bool operator==(const PlanRecord&) const = default;
};

struct DemSettings {
  double cell_size = 0.25;
  double fill_radius = 0.75;
  int min_neighbors = 3;

  bool operator==(const DemSettings&) const = default;
};

struct Mission {
  std::string id;
  std::string name;
  MissionOrigin origin;
  std::optional<SurveyPolygon> survey_polygon;
  std::string created_at;
  DemSettings dem;
  std::vector<EpochRecord> epochs;
  std::vector<InspectionPoint> inspection_points;
  std::vector<PlanRecord> plans;

  const EpochRecord& epoch(std::string_view epoch_id) const;  // throws not_found
  bool operator==(const Mission&) const = default;
};

nlohmann::json to_json(const Mission& mission);
Mission mission_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EpochRecord& epoch);
nlohmann::json to_json(const InspectionPoint& point);
nlohmann::json to_json(const PlanRecord& plan);

/// One directory per mission under `<data_dir>/missions/<id>/` holding
/// `manifest.json` and the product files. Manifests are replaced atomically
/// (write to a temporary file, then rename); mutations of a mission hold an
/// exclusive lock on its `.lock` file.
class MissionStore {
public:
  using Clock = std::function<Timestamp()>;

  explicit MissionStore(std::filesystem::path data_dir, Clock clock = {});

  const std::filesystem::path& data_dir() const { return data_dir_; }
  std::filesystem::path mission_dir(std::string_view mission_id) const;

  Mission create_mission(const std::string& name, const MissionOrigin& origin,
                         std::optional<SurveyPolygon> survey_polygon = std::nullopt,
                         std::optional<DemSettings> dem = std::nullopt);
  Mission get_mission(std::string_view mission_id) const;
  std::vector<Mission> list_missions() const;

  /// Parses the cloud, then rasterize -> fill_voids -> hillshade; the
  /// products are stored under `epochs/<epoch_id>/`.
  EpochRecord register_epoch(std::string_view mission_id, const std::filesystem::path& cloud_path,
                             Timestamp captured_at,
                             std::optional<std::string> epoch_id = std::nullopt);
  EpochRecord register_epoch_text(std::string_view mission_id, std::string_view cloud_text,
                                  Timestamp captured_at,
                                  std::optional<std::string> epoch_id = std::nullopt);

  DemGrid load_dem(std::string_view mission_id, std::string_view epoch_id) const;

  /// Returns the latest record unchanged when the plan is identical to it.
  PlanRecord save_plan(std::string_view mission_id, const CoveragePlan& plan);

  InspectionPoint upsert_inspection_point(std::string_view mission_id,
                                          const InspectionPointInput& input);
  InspectionPoint set_status(std::string_view mission_id, std::string_view point_id,
                             InspectionStatus status, const std::string& note = {});

private:
  std::filesystem::path manifest_path(std::string_view mission_id) const;
  Mission load(std::string_view mission_id) const;
  void save(const Mission& mission) const;
  std::string now() const;
  EpochRecord ingest(std::string_view mission_id, std::string_view cloud_text,
                     Timestamp captured_at, std::optional<std::string> epoch_id);

  std::filesystem::path data_dir_;
  Clock clock_;
};

/// Exclusive advisory lock (flock) held for the lifetime of the object.
class FileLock {
public:
  explicit FileLock(const std::filesystem::path& path);
  ~FileLock();
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

private:
  int fd_ = -1;
};

/// Writes `contents` to `path` via a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace floodscout

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "floodscout/mission_store.hpp"
#include "floodscout/sensor_model.hpp"

namespace floodscout {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::filesystem::path data_dir = "floodscout-data";
  std::optional<std::filesystem::path> static_dir;  // served at /
  std::string cors_origin = "*";
  CameraCatalog catalog = CameraCatalog::builtin();
  MissionStore::Clock clock;
};

/// $FLOODSCOUT_DATA_DIR if set, otherwise `fallback`.
std::filesystem::path resolve_data_dir(const std::filesystem::path& fallback);

/// JSON-over-HTTP facade over the mission store and the analytics.
class SurveyService {
public:
  explicit SurveyService(ServiceConfig config);
  ~SurveyService();
  SurveyService(const SurveyService&) = delete;
  SurveyService& operator=(const SurveyService&) = delete;

  /// Binds the socket; throws ErrorCode::io when the port is taken.
  /// Returns the bound port.
  int bind();
  /// Blocks until stop(). Binds first if needed.
  void run();
  /// bind() and serve on a background thread.
  void start();
  void stop();

  int port() const;
  MissionStore& store();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace floodscout

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace floodscout {

struct CameraSpec {
  std::string key;    // catalog id, e.g. "mz2"
  std::string name;
  int res_x = 0;
  int res_y = 0;
  double hfov_deg = 0.0;  // horizontal field of view, open interval (0, 180)
  bool assumed = false;   // true when a value is not taken from a datasheet

  bool operator==(const CameraSpec&) const = default;
};

/// Ground rectangle seen by a nadir camera. width is across-track (sensor x).
struct FootprintDims {
  double width = 0.0;
  double height = 0.0;
};

/// Throws ErrorCode::validation if the invariants do not hold.
void validate(const CameraSpec& camera);

double vfov(const CameraSpec& camera);
FootprintDims footprint(const CameraSpec& camera, double altitude_agl);
double gsd(const CameraSpec& camera, double altitude_agl);

// Camera catalog: a small TOML subset, one [section] per camera.
//
//   [mz2]
//   name = "DJI Mavic 2 Zoom"
//   res_x = 4000
//   res_y = 3000
//   hfov_deg = 83.0
//   assumed = false
class CameraCatalog {
public:
  CameraCatalog() = default;
  explicit CameraCatalog(std::vector<CameraSpec> cameras);

  static CameraCatalog parse(std::string_view text);
  static CameraCatalog load(const std::string& path);
  static const CameraCatalog& builtin();
  static std::string_view builtin_text();

  /// Throws ErrorCode::not_found.
  const CameraSpec& get(std::string_view key) const;
  const std::vector<CameraSpec>& cameras() const { return cameras_; }

private:
  std::vector<CameraSpec> cameras_;
};

}  // namespace floodscout

#include "floodscout/sensor_model.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "floodscout/error.hpp"
#include "floodscout/geodesy.hpp"

namespace floodscout {

namespace {

// Kept byte-identical to data/cameras.toml (checked by the unit tests).
constexpr std::string_view kBuiltinCatalog = R"toml(# floodscout camera catalog
# hfov_deg is the horizontal field of view of a nadir pinhole camera.
# assumed = true marks values not published for the airframe's camera.

[mp2]
name = "DJI Mavic 2 Pro"
res_x = 5472
res_y = 3648
hfov_deg = 77.0
assumed = true

[mz2]
name = "DJI Mavic 2 Zoom"
res_x = 4000
res_y = 3000
hfov_deg = 83.0
assumed = false

[fpv]
name = "DJI FPV"
res_x = 3840
res_y = 2880
hfov_deg = 150.0
assumed = true

[p4p]
name = "DJI Phantom 4 Pro"
res_x = 5472
res_y = 3648
hfov_deg = 73.7
assumed = true
)toml";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw Error(ErrorCode::parse, fmt::format("camera catalog line {}: {}", line, what));
}

int parse_int(std::string_view v, int line) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) fail(line, fmt::format("bad integer '{}'", v));
  return out;
}

double parse_double(std::string_view v, int line) {
  std::string s(v);
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    fail(line, fmt::format("bad number '{}'", v));
  }
  if (used != s.size()) fail(line, fmt::format("bad number '{}'", v));
  return out;
}

}  // namespace

void validate(const CameraSpec& camera) {
  if (camera.res_x < 1 || camera.res_y < 1) {
    throw Error(ErrorCode::validation,
                fmt::format("camera '{}': resolution must be at least 1x1", camera.key));
  }
  if (!(camera.hfov_deg > 0.0 && camera.hfov_deg < 180.0)) {
    throw Error(ErrorCode::validation,
                fmt::format("camera '{}': hfov {} outside (0, 180)", camera.key, camera.hfov_deg));
  }
}

double vfov(const CameraSpec& camera) {
  const double half_h = deg_to_rad(camera.hfov_deg) / 2.0;
  const double ratio = static_cast<double>(camera.res_y) / static_cast<double>(camera.res_x);
  return rad_to_deg(2.0 * std::atan(std::tan(half_h) * ratio));
}

FootprintDims footprint(const CameraSpec& camera, double altitude_agl) {
  if (!(altitude_agl > 0.0) || !std::isfinite(altitude_agl)) {
    throw Error(ErrorCode::validation, fmt::format("altitude {} must be > 0", altitude_agl));
  }
  return {2.0 * altitude_agl * std::tan(deg_to_rad(camera.hfov_deg) / 2.0),
          2.0 * altitude_agl * std::tan(deg_to_rad(vfov(camera)) / 2.0)};
}

double gsd(const CameraSpec& camera, double altitude_agl) {
  return footprint(camera, altitude_agl).width / camera.res_x;
}

CameraCatalog::CameraCatalog(std::vector<CameraSpec> cameras) : cameras_(std::move(cameras)) {
  for (const auto& c : cameras_) validate(c);
}

CameraCatalog CameraCatalog::parse(std::string_view text) {
  std::vector<CameraSpec> cameras;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      CameraSpec cam;
      cam.key = std::string(trim(line.substr(1, line.size() - 2)));
      if (cam.key.empty()) fail(line_no, "empty section name");
      for (const auto& c : cameras) {
        if (c.key == cam.key) fail(line_no, fmt::format("duplicate camera '{}'", cam.key));
      }
      cameras.push_back(std::move(cam));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected key = value");
    if (cameras.empty()) fail(line_no, "key outside of a [camera] section");
    const std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    CameraSpec& cam = cameras.back();
    if (key == "name") {
      if (value.size() < 2 || value.front() != '"' || value.back() != '"') {
        fail(line_no, "name must be a quoted string");
      }
      cam.name = std::string(value.substr(1, value.size() - 2));
    } else if (key == "res_x") {
      cam.res_x = parse_int(value, line_no);
    } else if (key == "res_y") {
      cam.res_y = parse_int(value, line_no);
    } else if (key == "hfov_deg") {
      cam.hfov_deg = parse_double(value, line_no);
    } else if (key == "assumed") {
      if (value == "true") {
        cam.assumed = true;
      } else if (value == "false") {
        cam.assumed = false;
      } else {
        fail(line_no, "assumed must be true or false");
      }
    } else {
      fail(line_no, fmt::format("unknown key '{}'", key));
    }
  }
  return CameraCatalog(std::move(cameras));
}

CameraCatalog CameraCatalog::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, fmt::format("cannot open camera catalog '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const CameraCatalog& CameraCatalog::builtin() {
  static const CameraCatalog catalog = parse(kBuiltinCatalog);
  return catalog;
}

std::string_view CameraCatalog::builtin_text() { return kBuiltinCatalog; }

const CameraSpec& CameraCatalog::get(std::string_view key) const {
  for (const auto& c : cameras_) {
    if (c.key == key) return c;
  }
  throw Error(ErrorCode::not_found, fmt::format("unknown camera '{}'", key));
}

}  // namespace floodscout

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "floodscout/dem_raster.hpp"
#include "floodscout/error.hpp"

namespace floodscout {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double number(const std::string& tok, std::size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') {
    throw Error(ErrorCode::parse, fmt::format("xyz line {}: '{}' is not a number", line_no, tok));
  }
  return v;
}

}  // namespace

PointCloud parse_xyz(std::string_view text, std::optional<MissionOrigin> mission_origin) {
  PointCloud cloud;
  std::optional<MissionOrigin> file_origin;
  bool seen_data = false;

  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      const auto toks = split_ws(line.substr(first + 1));
      if (!toks.empty() && toks[0] == "crs") {
        if (seen_data) {
          throw Error(ErrorCode::parse,
                      fmt::format("xyz line {}: #crs directive must precede the points", line_no));
        }
        if (toks.size() == 2 && toks[1] == "wgs84") {
          cloud.source_crs = CloudCrs::wgs84;
        } else if (toks.size() == 5 && toks[1] == "enu") {
          cloud.source_crs = CloudCrs::enu;
          GeoPoint anchor{number(toks[2], line_no), number(toks[3], line_no),
                          number(toks[4], line_no)};
          try {
            validate(anchor);
          } catch (const Error& e) {
            throw Error(ErrorCode::parse, fmt::format("xyz line {}: {}", line_no, e.what()));
          }
          file_origin = MissionOrigin{anchor};
        } else {
          throw Error(ErrorCode::parse,
                      fmt::format("xyz line {}: expected '#crs wgs84' or '#crs enu lat lon alt'",
                                  line_no));
        }
      }
      continue;
    }
    seen_data = true;
    const auto toks = split_ws(line);
    if (toks.size() < 3) {
      throw Error(ErrorCode::parse,
                  fmt::format("xyz line {}: expected 3 values, found {}", line_no, toks.size()));
    }
    const double a = number(toks[0], line_no);
    const double b = number(toks[1], line_no);
    const double c = number(toks[2], line_no);
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
      ++cloud.rejected;
      continue;
    }
    if (cloud.source_crs == CloudCrs::wgs84) {
      const GeoPoint g{a, b, c};
      try {
        validate(g);
      } catch (const Error& e) {
        throw Error(ErrorCode::parse, fmt::format("xyz line {}: {}", line_no, e.what()));
      }
      if (!mission_origin) mission_origin = MissionOrigin{g};
      cloud.points.push_back(wgs84_to_enu(g, *mission_origin));
      continue;
    }
    EnuPoint p{a, b, c};
    if (file_origin && mission_origin && !(*file_origin == *mission_origin)) {
      p = wgs84_to_enu(enu_to_wgs84(p, *file_origin), *mission_origin);
    }
    cloud.points.push_back(p);
  }
  cloud.frame_origin = mission_origin ? mission_origin : file_origin;
  return cloud;
}

PointCloud read_xyz(const std::string& path, std::optional<MissionOrigin> mission_origin) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_xyz(ss.str(), std::move(mission_origin));
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("{}: {}", path, e.what()));
  }
}

void write_xyz(const PointCloud& cloud, const MissionOrigin& origin, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, fmt::format("cannot write '{}'", path));
  const GeoPoint& a = origin.anchor;
  out << fmt::format("#crs enu {:.8f} {:.8f} {:.3f}\n", a.lat, a.lon, a.alt);
  std::string buf;
  for (const auto& p : cloud.points) {
    buf += fmt::format("{:.4f} {:.4f} {:.4f}\n", p.east, p.north, p.up);
    if (buf.size() > (1 << 16)) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
  if (!out) throw Error(ErrorCode::io, fmt::format("failed writing '{}'", path));
}

}  // namespace floodscout

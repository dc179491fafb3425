#include "floodscout/dem_raster.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "floodscout/error.hpp"

namespace floodscout {

DemGrid DemGrid::filled(double origin_east, double origin_north, double cell_size, int n_cols,
                        int n_rows, double value, double nodata) {
  DemGrid g;
  g.origin_east = origin_east;
  g.origin_north = origin_north;
  g.cell_size = cell_size;
  g.n_cols = n_cols;
  g.n_rows = n_rows;
  g.nodata = nodata;
  g.values.assign(static_cast<std::size_t>(n_cols) * static_cast<std::size_t>(n_rows), value);
  validate(g);
  return g;
}

bool DemGrid::same_geometry(const DemGrid& other) const {
  return n_cols == other.n_cols && n_rows == other.n_rows &&
         std::abs(cell_size - other.cell_size) <= 1e-9 * cell_size &&
         std::abs(origin_east - other.origin_east) <= 1e-6 * cell_size &&
         std::abs(origin_north - other.origin_north) <= 1e-6 * cell_size;
}

void validate(const DemGrid& grid) {
  if (!(grid.cell_size > 0.0) || !std::isfinite(grid.cell_size)) {
    throw Error(ErrorCode::validation, "cell_size must be > 0");
  }
  if (grid.n_cols < 1 || grid.n_rows < 1) {
    throw Error(ErrorCode::validation, "grid needs at least one column and one row");
  }
  if (grid.values.size() != static_cast<std::size_t>(grid.n_cols) * static_cast<std::size_t>(grid.n_rows)) {
    throw Error(ErrorCode::validation, "grid value count does not match ncols * nrows");
  }
  if (!std::isfinite(grid.origin_east) || !std::isfinite(grid.origin_north)) {
    throw Error(ErrorCode::validation, "grid origin must be finite");
  }
  for (const double v : grid.values) {
    if (!std::isfinite(v) && v != grid.nodata) {
      throw Error(ErrorCode::validation, "grid holds a non-finite value that is not nodata");
    }
  }
}

DemStats summarize(const DemGrid& grid) {
  DemStats s;
  double sum = 0.0;
  s.min_elev = std::numeric_limits<double>::infinity();
  s.max_elev = -std::numeric_limits<double>::infinity();
  for (const double v : grid.values) {
    if (grid.is_nodata(v)) continue;
    ++s.valid_cells;
    sum += v;
    s.min_elev = std::min(s.min_elev, v);
    s.max_elev = std::max(s.max_elev, v);
  }
  if (s.valid_cells == 0) {
    s.min_elev = s.max_elev = 0.0;
    return s;
  }
  s.mean_elev = sum / static_cast<double>(s.valid_cells);
  s.valid_fraction = static_cast<double>(s.valid_cells) / static_cast<double>(grid.size());
  return s;
}

DemGrid rasterize(const PointCloud& cloud, double cell_size, Aggregation agg) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw Error(ErrorCode::validation, "cell_size must be > 0");
  }
  if (cloud.points.empty()) throw Error(ErrorCode::validation, "point cloud is empty");

  double min_e = std::numeric_limits<double>::infinity();
  double min_n = min_e;
  double max_e = -min_e;
  double max_n = -min_e;
  for (const auto& p : cloud.points) {
    if (!std::isfinite(p.east) || !std::isfinite(p.north) || !std::isfinite(p.up)) {
      throw Error(ErrorCode::validation, "point cloud holds a non-finite point");
    }
    min_e = std::min(min_e, p.east);
    max_e = std::max(max_e, p.east);
    min_n = std::min(min_n, p.north);
    max_n = std::max(max_n, p.north);
  }
  const double col0 = std::floor(min_e / cell_size);
  const double row0 = std::floor(min_n / cell_size);
  const double cols = std::floor(max_e / cell_size) - col0 + 1.0;
  const double rows = std::floor(max_n / cell_size) - row0 + 1.0;
  if (cols * rows > 4.0e8) {
    throw Error(ErrorCode::validation,
                fmt::format("raster of {}x{} cells is too large; increase cell_size", cols, rows));
  }

  DemGrid grid;
  grid.origin_east = col0 * cell_size;
  grid.origin_north = row0 * cell_size;
  grid.cell_size = cell_size;
  grid.n_cols = static_cast<int>(cols);
  grid.n_rows = static_cast<int>(rows);
  grid.values.assign(grid.n_cols * static_cast<std::size_t>(grid.n_rows), grid.nodata);

  std::vector<double> acc(grid.values.size(), 0.0);
  std::vector<std::uint32_t> count(grid.values.size(), 0);
  for (const auto& p : cloud.points) {
    // Index from the global lattice so that points on a shared edge land in
    // the higher cell regardless of the grid origin.
    const int col = static_cast<int>(std::floor(p.east / cell_size) - col0);
    const int row = static_cast<int>(std::floor(p.north / cell_size) - row0);
    const std::size_t i = grid.index(col, row);
    if (count[i] == 0) {
      acc[i] = p.up;
    } else {
      switch (agg) {
        case Aggregation::mean: acc[i] += p.up; break;
        case Aggregation::max: acc[i] = std::max(acc[i], p.up); break;
        case Aggregation::min: acc[i] = std::min(acc[i], p.up); break;
      }
    }
    ++count[i];
  }
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    if (count[i] == 0) continue;
    grid.values[i] = agg == Aggregation::mean ? acc[i] / count[i] : acc[i];
  }
  return grid;
}

DemGrid fill_voids(const DemGrid& grid, double radius, int min_neighbors) {
  if (!(radius > 0.0)) throw Error(ErrorCode::validation, "fill radius must be > 0");
  if (min_neighbors < 1) throw Error(ErrorCode::validation, "min_neighbors must be >= 1");

  DemGrid out = grid;
  const int reach = static_cast<int>(std::floor(radius / grid.cell_size + 1e-9));
  const double r2 = radius * radius * (1.0 + 1e-12);
  for (int row = 0; row < grid.n_rows; ++row) {
    for (int col = 0; col < grid.n_cols; ++col) {
      if (grid.valid(col, row)) continue;
      double weighted = 0.0;
      double weights = 0.0;
      int neighbors = 0;
      for (int dr = -reach; dr <= reach; ++dr) {
        const int r = row + dr;
        if (r < 0 || r >= grid.n_rows) continue;
        for (int dc = -reach; dc <= reach; ++dc) {
          const int c = col + dc;
          if (c < 0 || c >= grid.n_cols || (dr == 0 && dc == 0)) continue;
          if (!grid.valid(c, r)) continue;
          const double d2 = (dc * grid.cell_size) * (dc * grid.cell_size) +
                            (dr * grid.cell_size) * (dr * grid.cell_size);
          if (d2 > r2) continue;
          const double w = 1.0 / d2;
          weighted += w * grid.at(c, r);
          weights += w;
          ++neighbors;
        }
      }
      if (neighbors >= min_neighbors) out.at(col, row) = weighted / weights;
    }
  }
  return out;
}

std::optional<double> sample_bilinear(const DemGrid& grid, double east, double north) {
  if (!std::isfinite(east) || !std::isfinite(north)) return std::nullopt;
  if (east < grid.origin_east || east > grid.max_east() || north < grid.origin_north ||
      north > grid.max_north()) {
    return std::nullopt;
  }
  auto split = [](double f, int& base, double& frac) {
    base = static_cast<int>(std::floor(f));
    frac = f - base;
    // Snap queries that sit on a cell center up to rounding noise.
    if (frac < 1e-9) {
      frac = 0.0;
    } else if (frac > 1.0 - 1e-9) {
      ++base;
      frac = 0.0;
    }
  };
  int x0 = 0, y0 = 0;
  double tx = 0.0, ty = 0.0;
  split((east - grid.origin_east) / grid.cell_size - 0.5, x0, tx);
  split((north - grid.origin_north) / grid.cell_size - 0.5, y0, ty);

  struct Corner {
    int col, row;
    double weight, dx, dy;
  };
  const std::array<Corner, 4> corners{{{x0, y0, (1 - tx) * (1 - ty), tx, ty},
                                       {x0 + 1, y0, tx * (1 - ty), 1 - tx, ty},
                                       {x0, y0 + 1, (1 - tx) * ty, tx, 1 - ty},
                                       {x0 + 1, y0 + 1, tx * ty, 1 - tx, 1 - ty}}};
  double value = 0.0;
  bool missing = false;
  bool any_valid = false;
  for (const auto& c : corners) {
    if (c.weight == 0.0) continue;
    const bool inside = c.col >= 0 && c.col < grid.n_cols && c.row >= 0 && c.row < grid.n_rows;
    if (!inside || !grid.valid(c.col, c.row)) {
      missing = true;
      continue;
    }
    any_valid = true;
    value += c.weight * grid.at(c.col, c.row);
  }
  if (!any_valid) return std::nullopt;
  if (!missing) return value;

  const Corner* nearest = nullptr;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : corners) {
    if (c.weight == 0.0) continue;
    if (c.col < 0 || c.col >= grid.n_cols || c.row < 0 || c.row >= grid.n_rows) continue;
    if (!grid.valid(c.col, c.row)) continue;
    const double d = c.dx * c.dx + c.dy * c.dy;
    if (d < best) {
      best = d;
      nearest = &c;
    }
  }
  return grid.at(nearest->col, nearest->row);
}

DemGrid resample_onto(const DemGrid& source, const DemGrid& target_geometry) {
  const double overlap_e = std::min(source.max_east(), target_geometry.max_east()) -
                           std::max(source.origin_east, target_geometry.origin_east);
  const double overlap_n = std::min(source.max_north(), target_geometry.max_north()) -
                           std::max(source.origin_north, target_geometry.origin_north);
  if (!(overlap_e > 0.0 && overlap_n > 0.0)) {
    throw Error(ErrorCode::validation, "grids do not overlap");
  }
  DemGrid out = target_geometry;
  out.epoch_id = source.epoch_id;
  out.captured_at = source.captured_at;
  for (int row = 0; row < out.n_rows; ++row) {
    for (int col = 0; col < out.n_cols; ++col) {
      const auto v = sample_bilinear(source, out.center_east(col), out.center_north(row));
      out.at(col, row) = v ? *v : out.nodata;
    }
  }
  return out;
}

// ESRI ASCII grid -------------------------------------------------------------

std::string format_asc(const DemGrid& grid) {
  validate(grid);
  std::string out;
  out += fmt::format("{:<14}{}\n", "ncols", grid.n_cols);
  out += fmt::format("{:<14}{}\n", "nrows", grid.n_rows);
  out += fmt::format("{:<14}{}\n", "xllcorner", grid.origin_east);
  out += fmt::format("{:<14}{}\n", "yllcorner", grid.origin_north);
  out += fmt::format("{:<14}{}\n", "cellsize", grid.cell_size);
  out += fmt::format("{:<14}{}\n", "NODATA_value", grid.nodata);
  const std::string nodata_token = fmt::format("{}", grid.nodata);
  for (int row = grid.n_rows - 1; row >= 0; --row) {
    for (int col = 0; col < grid.n_cols; ++col) {
      if (col > 0) out += ' ';
      const double v = grid.at(col, row);
      out += grid.is_nodata(v) ? nodata_token : fmt::format("{:.3f}", v);
    }
    out += '\n';
  }
  return out;
}

void write_asc(const DemGrid& grid, const std::string& path) {
  const std::string text = format_asc(grid);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, fmt::format("cannot write '{}'", path));
  out << text;
  if (!out) throw Error(ErrorCode::io, fmt::format("failed writing '{}'", path));
}

namespace {

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::optional<double> to_double(std::string_view tok) {
  std::string s(tok);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') return std::nullopt;
  return v;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

}  // namespace

DemGrid parse_asc(std::string_view text) {
  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos <= text.size();) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    lines.push_back(text.substr(pos, end - pos));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  auto fail = [](std::size_t line, const std::string& what) -> Error {
    return Error(ErrorCode::parse, fmt::format("asc line {}: {}", line, what));
  };

  std::optional<double> ncols, nrows, xll, yll, cellsize;
  bool x_center = false;
  bool y_center = false;
  double nodata = kDefaultNodata;
  std::size_t i = 0;
  for (; i < lines.size(); ++i) {
    const auto toks = tokens(lines[i]);
    if (toks.empty()) continue;
    if (to_double(toks[0])) break;  // first data row
    if (toks.size() != 2) throw fail(i + 1, "header lines must be 'key value'");
    const auto value = to_double(toks[1]);
    if (!value) throw fail(i + 1, fmt::format("bad header value '{}'", toks[1]));
    const std::string key = lower(toks[0]);
    if (key == "ncols") {
      ncols = value;
    } else if (key == "nrows") {
      nrows = value;
    } else if (key == "xllcorner" || key == "xllcenter") {
      xll = value;
      x_center = key == "xllcenter";
    } else if (key == "yllcorner" || key == "yllcenter") {
      yll = value;
      y_center = key == "yllcenter";
    } else if (key == "cellsize") {
      cellsize = value;
    } else if (key == "nodata_value") {
      nodata = *value;
    } else {
      throw fail(i + 1, fmt::format("unknown header key '{}'", toks[0]));
    }
  }
  if (!ncols || !nrows || !xll || !yll || !cellsize) {
    throw fail(std::min(i + 1, lines.size()),
               "header must define ncols, nrows, xllcorner, yllcorner and cellsize");
  }
  if (*ncols < 1 || *nrows < 1 || *ncols != std::floor(*ncols) || *nrows != std::floor(*nrows)) {
    throw fail(1, "ncols and nrows must be positive integers");
  }
  if (!(*cellsize > 0.0)) throw fail(1, "cellsize must be > 0");

  DemGrid grid;
  grid.n_cols = static_cast<int>(*ncols);
  grid.n_rows = static_cast<int>(*nrows);
  grid.cell_size = *cellsize;
  grid.origin_east = x_center ? *xll - *cellsize / 2.0 : *xll;
  grid.origin_north = y_center ? *yll - *cellsize / 2.0 : *yll;
  grid.nodata = nodata;
  grid.values.assign(static_cast<std::size_t>(grid.n_cols) * grid.n_rows, nodata);

  int file_row = 0;
  for (; i < lines.size(); ++i) {
    const auto toks = tokens(lines[i]);
    if (toks.empty()) continue;
    if (file_row >= grid.n_rows) throw fail(i + 1, "more data rows than nrows");
    if (toks.size() != static_cast<std::size_t>(grid.n_cols)) {
      throw fail(i + 1, fmt::format("expected {} values, found {}", grid.n_cols, toks.size()));
    }
    const int row = grid.n_rows - 1 - file_row;
    for (int col = 0; col < grid.n_cols; ++col) {
      const auto v = to_double(toks[col]);
      if (!v) throw fail(i + 1, fmt::format("bad value '{}'", toks[col]));
      if (!std::isfinite(*v) && *v != nodata) throw fail(i + 1, "non-finite value");
      grid.at(col, row) = *v;
    }
    ++file_row;
  }
  if (file_row != grid.n_rows) {
    throw fail(lines.size(), fmt::format("expected {} data rows, found {}", grid.n_rows, file_row));
  }
  return grid;
}

DemGrid read_asc(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_asc(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("{}: {}", path, e.what()));
  }
}

// Hillshade -------------------------------------------------------------------

HillshadeImage render_hillshade(const DemGrid& grid, double azimuth_deg, double sun_altitude_deg) {
  if (grid.n_cols < 3 || grid.n_rows < 3) {
    throw Error(ErrorCode::validation, "hillshade needs a grid of at least 3x3 cells");
  }
  HillshadeImage img;
  img.origin_east = grid.origin_east;
  img.origin_north = grid.origin_north;
  img.cell_size = grid.cell_size;
  img.n_cols = grid.n_cols;
  img.n_rows = grid.n_rows;
  img.values.assign(grid.size(), 0);

  const double zenith = deg_to_rad(90.0 - sun_altitude_deg);
  const double azimuth = deg_to_rad(azimuth_deg);
  const double cz = std::cos(zenith);
  const double sz = std::sin(zenith);

  for (int row = 1; row + 1 < grid.n_rows; ++row) {
    for (int col = 1; col + 1 < grid.n_cols; ++col) {
      bool complete = true;
      for (int dr = -1; dr <= 1 && complete; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (!grid.valid(col + dc, row + dr)) {
            complete = false;
            break;
          }
        }
      }
      if (!complete) continue;
      auto z = [&](int dc, int dr) { return grid.at(col + dc, row + dr); };
      // dr = +1 is the northern neighbour row.
      const double dzdx =
          ((z(1, 1) + 2 * z(1, 0) + z(1, -1)) - (z(-1, 1) + 2 * z(-1, 0) + z(-1, -1))) /
          (8.0 * grid.cell_size);
      const double dzdy =
          ((z(-1, 1) + 2 * z(0, 1) + z(1, 1)) - (z(-1, -1) + 2 * z(0, -1) + z(1, -1))) /
          (8.0 * grid.cell_size);
      const double slope = std::atan(std::hypot(dzdx, dzdy));
      // Compass bearing of the downhill direction.
      const double aspect = std::atan2(-dzdx, -dzdy);
      const double shade =
          std::max(0.0, cz * std::cos(slope) + sz * std::sin(slope) * std::cos(azimuth - aspect));
      img.values[grid.index(col, row)] =
          static_cast<std::uint8_t>(std::clamp(std::lround(255.0 * shade), 0L, 255L));
    }
  }
  return img;
}

namespace {

void append_png_bytes(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

}  // namespace

std::vector<std::uint8_t> encode_png(const HillshadeImage& image) {
  std::vector<std::uint8_t> bytes;
  std::vector<std::uint8_t> line(static_cast<std::size_t>(image.n_cols));
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) throw Error(ErrorCode::io, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorCode::io, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::io, "PNG encoding failed");
  }
  png_set_write_fn(png, &bytes, append_png_bytes, nullptr);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.n_cols),
               static_cast<png_uint_32>(image.n_rows), 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int row = image.n_rows - 1; row >= 0; --row) {
    for (int col = 0; col < image.n_cols; ++col) line[col] = image.at(col, row);
    png_write_row(png, line.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return bytes;
}

void write_png(const HillshadeImage& image, const std::string& path) {
  const auto bytes = encode_png(image);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, fmt::format("cannot write '{}'", path));
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace floodscout

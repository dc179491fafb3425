#pragma once

#include <span>
#include <vector>

namespace floodscout {

/// 2-D point/vector in a local metric frame (x = east, y = north unless a
/// rotated sweep frame is stated).
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  bool operator==(const Vec2&) const = default;
};

double dot(Vec2 a, Vec2 b);
double cross(Vec2 a, Vec2 b);
double norm(Vec2 a);
double distance(Vec2 a, Vec2 b);

/// Shoelace area; positive for counter-clockwise rings.
double signed_area(std::span<const Vec2> ring);

/// True when no two non-adjacent edges touch and no adjacent edges overlap.
bool is_simple(std::span<const Vec2> ring);

/// Even-odd rule; points exactly on the boundary count as inside.
bool point_in_polygon(std::span<const Vec2> ring, Vec2 p);

/// Andrew's monotone chain. Counter-clockwise, no repeated or collinear
/// vertices. Returns 1 or 2 points for degenerate input.
std::vector<Vec2> convex_hull(std::vector<Vec2> points);

/// Point in (or on) a counter-clockwise convex polygon, with tolerance.
bool point_in_convex(std::span<const Vec2> hull, Vec2 p, double tol = 1e-9);

/// Distance from p to the closed polyline boundary of ring.
double distance_to_boundary(std::span<const Vec2> ring, Vec2 p);

}  // namespace floodscout

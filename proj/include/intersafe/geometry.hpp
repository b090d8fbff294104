#pragma once
/**
 * @file geometry.hpp
 * @brief Planar primitives in the rectilinear intersection frame.
 *
 * Frame convention: x grows east, y grows north, units are meters.
 * Compass bearings are degrees clockwise from north.
 */

#include <cmath>
#include <optional>
#include <vector>

namespace intersafe {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double k) const { return {x * k, y * k}; }
  constexpr Vec2 operator/(double k) const { return {x / k, y / k}; }
  constexpr bool operator==(const Vec2&) const = default;

  double norm() const { return std::hypot(x, y); }
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Compass bearing of a direction vector, in [0, 360).
double bearing_deg(Vec2 dir);

/// Smallest absolute difference between two bearings, in [0, 180].
double bearing_diff_deg(double a, double b);

/// Rotates a point clockwise (compass sense) about `center` by `deg` degrees.
Vec2 rotate_cw(Vec2 p, Vec2 center, double deg);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
double segment_segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1);

struct Box {
  Vec2 min;
  Vec2 max;
  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
};

/// Simple polygon, vertices in either winding order, implicitly closed.
class Polygon {
 public:
  Polygon() = default;
  explicit Polygon(std::vector<Vec2> vertices);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  bool empty() const { return vertices_.empty(); }

  /// Boundary points count as inside.
  bool contains(Vec2 p) const;
  double distance_to_boundary(Vec2 p) const;
  /// Inside, or within `buffer` meters of the boundary.
  bool contains_dilated(Vec2 p, double buffer) const;

  double signed_area() const;
  bool is_simple() const;
  Box bounds() const;
  Polygon rotated_cw(Vec2 center, double deg) const;

 private:
  std::vector<Vec2> vertices_;
};

}  // namespace intersafe

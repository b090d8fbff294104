#include "intersafe/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace intersafe {

double bearing_deg(Vec2 dir) {
  double deg = std::atan2(dir.x, dir.y) * 180.0 / std::numbers::pi;
  if (deg < 0.0) deg += 360.0;
  if (deg >= 360.0) deg -= 360.0;
  return deg;
}

double bearing_diff_deg(double a, double b) {
  double d = std::fmod(std::abs(a - b), 360.0);
  return d > 180.0 ? 360.0 - d : d;
}

Vec2 rotate_cw(Vec2 p, Vec2 center, double deg) {
  const double rad = deg * std::numbers::pi / 180.0;
  const double c = std::cos(rad);
  const double s = std::sin(rad);
  const Vec2 d = p - center;
  // Clockwise in an x-east / y-north frame.
  return center + Vec2{c * d.x + s * d.y, -s * d.x + c * d.y};
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double u = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * u);
}

namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  const int o1 = orientation(a0, a1, b0);
  const int o2 = orientation(a0, a1, b1);
  const int o3 = orientation(b0, b1, a0);
  const int o4 = orientation(b0, b1, a1);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a0, a1, b0)) return true;
  if (o2 == 0 && on_segment(a0, a1, b1)) return true;
  if (o3 == 0 && on_segment(b0, b1, a0)) return true;
  if (o4 == 0 && on_segment(b0, b1, a1)) return true;
  return false;
}

}  // namespace

double segment_segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  if (segments_intersect(a0, a1, b0, b1)) return 0.0;
  return std::min({point_segment_distance(a0, b0, b1), point_segment_distance(a1, b0, b1),
                   point_segment_distance(b0, a0, a1), point_segment_distance(b1, a0, a1)});
}

Polygon::Polygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {}

bool Polygon::contains(Vec2 p) const {
  const std::size_t n = vertices_.size();
  if (n < 3) return false;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = vertices_[i];
    const Vec2 b = vertices_[j];
    if (orientation(a, b, p) == 0 && on_segment(a, b, p)) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

double Polygon::distance_to_boundary(Vec2 p) const {
  const std::size_t n = vertices_.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    best = std::min(best, point_segment_distance(p, vertices_[j], vertices_[i]));
  }
  return best;
}

bool Polygon::contains_dilated(Vec2 p, double buffer) const {
  if (contains(p)) return true;
  return buffer > 0.0 && distance_to_boundary(p) <= buffer;
}

double Polygon::signed_area() const {
  double a = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    a += cross(vertices_[j], vertices_[i]);
  }
  return 0.5 * a;
}

bool Polygon::is_simple() const {
  const std::size_t n = vertices_.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a0 = vertices_[i];
    const Vec2 a1 = vertices_[(i + 1) % n];
    if (a0 == a1) return false;
    for (std::size_t k = i + 1; k < n; ++k) {
      // Adjacent edges share a vertex; skip them.
      if (k == i + 1 || (i == 0 && k == n - 1)) continue;
      const Vec2 b0 = vertices_[k];
      const Vec2 b1 = vertices_[(k + 1) % n];
      if (segments_intersect(a0, a1, b0, b1)) return false;
    }
  }
  return true;
}

Box Polygon::bounds() const {
  Box b{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
        {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
  for (const Vec2& v : vertices_) {
    b.min.x = std::min(b.min.x, v.x);
    b.min.y = std::min(b.min.y, v.y);
    b.max.x = std::max(b.max.x, v.x);
    b.max.y = std::max(b.max.y, v.y);
  }
  return b;
}

Polygon Polygon::rotated_cw(Vec2 center, double deg) const {
  std::vector<Vec2> out;
  out.reserve(vertices_.size());
  for (const Vec2& v : vertices_) out.push_back(rotate_cw(v, center, deg));
  return Polygon(std::move(out));
}

}  // namespace intersafe

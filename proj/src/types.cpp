#include "intersafe/types.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace intersafe {

std::string_view to_string(ObjectClass c) {
  switch (c) {
    case ObjectClass::Pedestrian: return "pedestrian";
    case ObjectClass::Car: return "car";
    case ObjectClass::Bus: return "bus";
    case ObjectClass::Truck: return "truck";
    case ObjectClass::Motorcyclist: return "motorcyclist";
  }
  return "car";
}

std::optional<ObjectClass> parse_object_class(std::string_view s) {
  for (ObjectClass c : kAllClasses) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

bool Trajectory::has_velocities() const {
  return std::all_of(points.begin(), points.end(), [](const TrackPoint& p) { return p.vel.has_value(); });
}

double Trajectory::mid_time() const {
  const std::size_t n = points.size();
  return 0.5 * (points[(n - 1) / 2].t + points[n / 2].t);
}

Vec2 Trajectory::position_at(double t) const {
  if (t <= points.front().t) return points.front().pos;
  if (t >= points.back().t) return points.back().pos;
  auto it = std::upper_bound(points.begin(), points.end(), t,
                             [](double v, const TrackPoint& p) { return v < p.t; });
  const TrackPoint& b = *it;
  const TrackPoint& a = *(it - 1);
  const double u = (t - a.t) / (b.t - a.t);
  return a.pos + (b.pos - a.pos) * u;
}

std::string_view to_string(Leg l) {
  switch (l) {
    case Leg::N: return "N";
    case Leg::E: return "E";
    case Leg::S: return "S";
    case Leg::W: return "W";
  }
  return "N";
}

std::optional<Leg> parse_leg(std::string_view s) {
  for (Leg l : kAllLegs) {
    if (to_string(l) == s) return l;
  }
  return std::nullopt;
}

std::string_view to_string(Bound b) {
  switch (b) {
    case Bound::NB: return "NB";
    case Bound::EB: return "EB";
    case Bound::SB: return "SB";
    case Bound::WB: return "WB";
  }
  return "NB";
}

std::optional<Bound> parse_bound(std::string_view s) {
  for (Bound b : kAllBounds) {
    if (to_string(b) == s) return b;
  }
  return std::nullopt;
}

std::string MovementCode::str() const {
  std::string s(to_string(bound));
  s += turn == Turn::L ? 'L' : turn == Turn::T ? 'T' : 'R';
  return s;
}

std::optional<MovementCode> MovementCode::parse(std::string_view s) {
  if (s.size() != 3) return std::nullopt;
  auto b = parse_bound(s.substr(0, 2));
  if (!b) return std::nullopt;
  switch (s[2]) {
    case 'L': return MovementCode{*b, Turn::L};
    case 'T': return MovementCode{*b, Turn::T};
    case 'R': return MovementCode{*b, Turn::R};
    default: return std::nullopt;
  }
}

std::array<MovementCode, 12> all_movements() {
  std::array<MovementCode, 12> out{};
  std::size_t i = 0;
  for (Bound b : kAllBounds) {
    for (Turn t : {Turn::L, Turn::T, Turn::R}) out[i++] = MovementCode{b, t};
  }
  return out;
}

std::string_view to_string(CrosswalkRole r) {
  switch (r) {
    case CrosswalkRole::Near: return "near";
    case CrosswalkRole::Far: return "far";
    case CrosswalkRole::AdjacentParallel: return "adjacent_parallel";
    case CrosswalkRole::ParallelOpposite: return "parallel_opposite";
  }
  return "near";
}

std::optional<CrosswalkRole> parse_crosswalk_role(std::string_view s) {
  for (CrosswalkRole r : kAllRoles) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

std::string format_clock(double seconds) {
  long total_min = std::lround(seconds / 60.0);
  total_min = ((total_min % 1440) + 1440) % 1440;
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02ld:%02ld", total_min / 60, total_min % 60);
  return buf;
}

std::optional<double> parse_clock(std::string_view s) {
  const auto colon = s.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  int h = 0;
  int m = 0;
  const auto hs = s.substr(0, colon);
  const auto ms = s.substr(colon + 1);
  if (hs.empty() || ms.size() != 2) return std::nullopt;
  if (std::from_chars(hs.data(), hs.data() + hs.size(), h).ec != std::errc{}) return std::nullopt;
  if (std::from_chars(ms.data(), ms.data() + ms.size(), m).ec != std::errc{}) return std::nullopt;
  if (h < 0 || h > 23 || m < 0 || m > 59) return std::nullopt;
  return h * kHour + m * 60.0;
}

}  // namespace intersafe

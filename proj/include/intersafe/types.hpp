#pragma once
/**
 * @file types.hpp
 * @brief Domain types shared by every engine: tracked objects, legs, movements, phases.
 */

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "intersafe/geometry.hpp"

namespace intersafe {

/// Tracker frame cadence (10 fps).
inline constexpr double kFramePeriod = 0.1;

enum class ObjectClass : std::uint8_t { Pedestrian, Car, Bus, Truck, Motorcyclist };

inline constexpr std::array<ObjectClass, 5> kAllClasses = {
    ObjectClass::Pedestrian, ObjectClass::Car, ObjectClass::Bus, ObjectClass::Truck,
    ObjectClass::Motorcyclist};

constexpr bool is_vehicle(ObjectClass c) { return c != ObjectClass::Pedestrian; }
std::string_view to_string(ObjectClass c);
std::optional<ObjectClass> parse_object_class(std::string_view s);

struct TrackPoint {
  double t = 0.0;  // seconds since local midnight
  Vec2 pos;
  std::optional<Vec2> vel;  // filled by velocity estimation when absent

  double speed() const { return vel ? vel->norm() : 0.0; }
};

struct Trajectory {
  std::string object_id;
  ObjectClass cls = ObjectClass::Car;
  std::vector<TrackPoint> points;  // strictly increasing t

  bool has_velocities() const;
  double start_time() const { return points.front().t; }
  double end_time() const { return points.back().t; }
  /// Median sample time; the anchor used to bin a crossing in time.
  double mid_time() const;
  /// Linear interpolation of position; clamps outside the sampled span.
  Vec2 position_at(double t) const;
};

// Legs are ordered clockwise from north; index arithmetic relies on that.
enum class Leg : std::uint8_t { N = 0, E = 1, S = 2, W = 3 };
inline constexpr std::array<Leg, 4> kAllLegs = {Leg::N, Leg::E, Leg::S, Leg::W};

constexpr Leg leg_offset(Leg l, int quarter_turns) {
  return static_cast<Leg>((static_cast<int>(l) + quarter_turns % 4 + 4) % 4);
}
constexpr Leg opposite(Leg l) { return leg_offset(l, 2); }
std::string_view to_string(Leg l);
std::optional<Leg> parse_leg(std::string_view s);

enum class Bound : std::uint8_t { NB, EB, SB, WB };
inline constexpr std::array<Bound, 4> kAllBounds = {Bound::NB, Bound::EB, Bound::SB, Bound::WB};
std::string_view to_string(Bound b);
std::optional<Bound> parse_bound(std::string_view s);

/// Leg a vehicle enters from when travelling in direction `b` (NB enters from S).
constexpr Leg entry_leg(Bound b) {
  switch (b) {
    case Bound::NB: return Leg::S;
    case Bound::EB: return Leg::W;
    case Bound::SB: return Leg::N;
    case Bound::WB: return Leg::E;
  }
  return Leg::S;
}
constexpr Bound bound_from_entry(Leg entry) {
  switch (entry) {
    case Leg::S: return Bound::NB;
    case Leg::W: return Bound::EB;
    case Leg::N: return Bound::SB;
    case Leg::E: return Bound::WB;
  }
  return Bound::NB;
}

enum class Turn : std::uint8_t { L, T, R };

struct MovementCode {
  Bound bound = Bound::NB;
  Turn turn = Turn::T;

  bool operator==(const MovementCode&) const = default;
  std::string str() const;  // e.g. "WBT"
  static std::optional<MovementCode> parse(std::string_view s);
};

/// All 12 codes in a fixed order (NB, EB, SB, WB) x (L, T, R).
std::array<MovementCode, 12> all_movements();

/// Signal phase 0..8; 0 marks an unclassifiable pedestrian.
struct Phase {
  int value = 0;
  bool operator==(const Phase&) const = default;
  auto operator<=>(const Phase&) const = default;
};

enum class CrosswalkRole : std::uint8_t { Near, Far, AdjacentParallel, ParallelOpposite };
inline constexpr std::array<CrosswalkRole, 4> kAllRoles = {
    CrosswalkRole::Near, CrosswalkRole::Far, CrosswalkRole::AdjacentParallel,
    CrosswalkRole::ParallelOpposite};
std::string_view to_string(CrosswalkRole r);
std::optional<CrosswalkRole> parse_crosswalk_role(std::string_view s);

// Clock helpers. Times of day are seconds since local midnight.
inline constexpr double kHour = 3600.0;
std::string format_clock(double seconds);  // "HH:MM", wraps past midnight
std::optional<double> parse_clock(std::string_view hhmm);

}  // namespace intersafe

#pragma once
/**
 * @file conflict.hpp
 * @brief P2V conflict typing, jaywalk flags and movement histograms.
 *
 * P2V types by (vehicle turn, crosswalk role of the pedestrian):
 *   1 right turn, adjacent parallel     2 right turn, near
 *   3 left turn, parallel opposite      4 left turn, adjacent parallel
 *   5 through, far                      6 through, near
 * Every other pair has no type.
 */

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "intersafe/config.hpp"
#include "intersafe/event.hpp"
#include "intersafe/ingest.hpp"
#include "intersafe/types.hpp"

namespace intersafe {

std::optional<int> p2v_type(Turn turn, CrosswalkRole role);

/// Type for a vehicle making `mv` against a pedestrian on the crosswalk of `ped_leg`.
std::optional<int> classify_p2v_type(MovementCode mv, Leg ped_leg, const IntersectionConfig& cfg);

/// Time span during which the pedestrian is on the (dilated) crosswalk of `leg`.
std::optional<std::pair<double, double>> crossing_interval(const Trajectory& ped, Leg leg,
                                                          const IntersectionConfig& cfg);

/// Phase 0 is always jaywalking. With a signal log, so is a crossing that spends more than
/// t_grace seconds of its crossing interval in dont_walk.
bool flag_jaywalk(const Trajectory& ped, Phase phase, const IntersectionConfig& cfg, const SignalLog* log,
                  const ClassifyParams& params);

/// Cached per-trajectory classification.
struct TrajectoryInfo {
  ObjectClass cls = ObjectClass::Car;
  bool in_region = false;
  std::optional<MovementCode> movement;  // vehicles
  Phase phase;                           // vehicle phase, or pedestrian phase (0 = none)
  bool jaywalk = false;                  // pedestrians
};

using TrajectoryIndex = std::map<std::string, TrajectoryInfo, std::less<>>;

TrajectoryIndex classify_trajectories(const std::vector<Trajectory>& trajs, const IntersectionConfig& cfg,
                                      const SignalLog* log, const ClassifyParams& params);

/// Fills movement, p2v_type, ped_role, jaywalk and severe on every event. For P2V events
/// the vehicle's movement is used; the pedestrian's crosswalk is the one owning its phase,
/// or for Phase 0 walkers the crosswalk under them at the event time. V2V events carry no
/// movement.
void classify_events(std::vector<ConflictEvent>& events, const std::vector<Trajectory>& trajs,
                     const TrajectoryIndex& index, const IntersectionConfig& cfg, const EngineParams& params);

struct MovementCount {
  MovementCode movement;
  std::size_t count = 0;
};

/// Counts per movement, descending, ties broken by code string. Events without a movement
/// are skipped.
std::vector<MovementCount> movement_histogram(const std::vector<ConflictEvent>& events);

/// Jaywalking P2V events only.
std::vector<ConflictEvent> jaywalk_p2v(const std::vector<ConflictEvent>& events);

/// Counts of P2V events by type 1..6, index 0 holding untyped P2V events.
std::array<std::size_t, 7> p2v_type_counts(const std::vector<ConflictEvent>& events);

}  // namespace intersafe

#pragma once
/**
 * @file classify.hpp
 * @brief Per-trajectory movement, phase and crosswalk-role classification.
 *
 * All functions are pure over immutable inputs.
 */

#include <optional>
#include <string>

#include "intersafe/config.hpp"
#include "intersafe/types.hpp"

namespace intersafe {

/// Leg whose bearing from the intersection center is closest to `p`.
Leg leg_of(Vec2 p, const IntersectionConfig& cfg);

/// Entry/exit legs are taken from the first and last in-region samples, which must lie
/// within `cfg.entry_band` of the region boundary. Returns nullopt for U-turns, clipped
/// tracks, and tracks that never enter the region.
std::optional<MovementCode> classify_vehicle_movement(const Trajectory& traj, const IntersectionConfig& cfg);

/// NEMA dual-ring assignment: through and right turns take the through phase of their
/// direction, left turns take the protected phase paired with it (2-5, 6-1, 4-7, 8-3).
Phase vehicle_phase(MovementCode mv, const IntersectionConfig& cfg);

/// Crosswalk leg holding at least `cfg.crosswalk_fraction` of the in-region samples.
std::optional<Leg> pedestrian_crosswalk(const Trajectory& traj, const IntersectionConfig& cfg);

/// Even phase of the owned crosswalk, or Phase 0 when no crosswalk qualifies.
Phase pedestrian_phase(const Trajectory& traj, const IntersectionConfig& cfg);

Phase crosswalk_phase(Leg leg, const IntersectionConfig& cfg);
std::optional<Leg> leg_of_pedestrian_phase(Phase p, const IntersectionConfig& cfg);

/// Role of the crosswalk on `leg` relative to a vehicle making movement `mv`.
/// near = entry leg, far = leg across the intersection, adjacent_parallel = the leg a
/// kerb-side turn exits through, parallel_opposite = the remaining leg.
CrosswalkRole crosswalk_role(MovementCode mv, Leg leg, const IntersectionConfig& cfg);

/// True when the trajectory has at least one sample inside the analysis region.
bool enters_region(const Trajectory& traj, const IntersectionConfig& cfg);

/// CSV listing the resolved movement->phase table and the leg->pedestrian-phase map.
std::string config_report_csv(const IntersectionConfig& cfg);

}  // namespace intersafe

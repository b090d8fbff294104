#include "intersafe/classify.hpp"

#include <sstream>

namespace intersafe {

Leg leg_of(Vec2 p, const IntersectionConfig& cfg) {
  const double b = bearing_deg(p - cfg.center);
  Leg best = Leg::N;
  double best_diff = 1e9;
  for (Leg l : kAllLegs) {
    const double d = bearing_diff_deg(b, cfg.bearing(l));
    if (d < best_diff) {
      best_diff = d;
      best = l;
    }
  }
  return best;
}

bool enters_region(const Trajectory& traj, const IntersectionConfig& cfg) {
  for (const TrackPoint& p : traj.points) {
    if (cfg.analysis_region.contains(p.pos)) return true;
  }
  return false;
}

std::optional<MovementCode> classify_vehicle_movement(const Trajectory& traj, const IntersectionConfig& cfg) {
  const TrackPoint* first = nullptr;
  const TrackPoint* last = nullptr;
  for (const TrackPoint& p : traj.points) {
    if (!cfg.analysis_region.contains(p.pos)) continue;
    if (!first) first = &p;
    last = &p;
  }
  if (!first || first == last) return std::nullopt;
  if (cfg.analysis_region.distance_to_boundary(first->pos) > cfg.entry_band) return std::nullopt;
  if (cfg.analysis_region.distance_to_boundary(last->pos) > cfg.entry_band) return std::nullopt;

  const Leg entry = leg_of(first->pos, cfg);
  const Leg exit = leg_of(last->pos, cfg);
  if (entry == exit) return std::nullopt;

  MovementCode mv;
  mv.bound = bound_from_entry(entry);
  if (exit == opposite(entry)) {
    mv.turn = Turn::T;
  } else if (exit == leg_offset(entry, -1)) {
    // Heading south from N, a right turn leaves through W.
    mv.turn = Turn::R;
  } else {
    mv.turn = Turn::L;
  }
  return mv;
}

Phase vehicle_phase(MovementCode mv, const IntersectionConfig& cfg) {
  const int through = cfg.through_phases[static_cast<std::size_t>(mv.bound)];
  if (mv.turn != Turn::L) return Phase{through};
  switch (through) {
    case 2: return Phase{5};
    case 6: return Phase{1};
    case 4: return Phase{7};
    case 8: return Phase{3};
    default: return Phase{0};
  }
}

std::optional<Leg> pedestrian_crosswalk(const Trajectory& traj, const IntersectionConfig& cfg) {
  std::array<std::size_t, 4> hits{};
  std::size_t in_region = 0;
  for (const TrackPoint& p : traj.points) {
    if (!cfg.analysis_region.contains(p.pos)) continue;
    ++in_region;
    for (Leg l : kAllLegs) {
      if (cfg.crosswalk(l).contains_dilated(p.pos, cfg.crosswalk_buffer)) {
        ++hits[static_cast<std::size_t>(l)];
      }
    }
  }
  if (in_region == 0) return std::nullopt;
  std::optional<Leg> best;
  std::size_t best_hits = 0;
  for (Leg l : kAllLegs) {
    const std::size_t h = hits[static_cast<std::size_t>(l)];
    if (static_cast<double>(h) >= cfg.crosswalk_fraction * static_cast<double>(in_region) && h > best_hits) {
      best = l;
      best_hits = h;
    }
  }
  return best;
}

Phase pedestrian_phase(const Trajectory& traj, const IntersectionConfig& cfg) {
  const auto leg = pedestrian_crosswalk(traj, cfg);
  return leg ? crosswalk_phase(*leg, cfg) : Phase{0};
}

Phase crosswalk_phase(Leg leg, const IntersectionConfig& cfg) {
  return Phase{cfg.pedestrian_phases[static_cast<std::size_t>(leg)]};
}

std::optional<Leg> leg_of_pedestrian_phase(Phase p, const IntersectionConfig& cfg) {
  for (Leg l : kAllLegs) {
    if (cfg.pedestrian_phases[static_cast<std::size_t>(l)] == p.value) return l;
  }
  return std::nullopt;
}

CrosswalkRole crosswalk_role(MovementCode mv, Leg leg, const IntersectionConfig& cfg) {
  const Leg entry = entry_leg(mv.bound);
  if (leg == entry) return CrosswalkRole::Near;
  if (leg == opposite(entry)) return CrosswalkRole::Far;
  const Leg kerb_side = cfg.right_hand_traffic ? leg_offset(entry, -1) : leg_offset(entry, 1);
  return leg == kerb_side ? CrosswalkRole::AdjacentParallel : CrosswalkRole::ParallelOpposite;
}

std::string config_report_csv(const IntersectionConfig& cfg) {
  std::ostringstream out;
  out << "item,key,phase\n";
  for (const MovementCode& mv : all_movements()) {
    out << "movement," << mv.str() << ',' << vehicle_phase(mv, cfg).value << '\n';
  }
  for (Leg l : kAllLegs) {
    out << "crosswalk," << to_string(l) << ',' << crosswalk_phase(l, cfg).value << '\n';
  }
  return out.str();
}

}  // namespace intersafe

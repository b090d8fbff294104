#include "intersafe/conflict.hpp"

#include <algorithm>

#include "intersafe/classify.hpp"

namespace intersafe {

std::optional<int> p2v_type(Turn turn, CrosswalkRole role) {
  switch (turn) {
    case Turn::R:
      if (role == CrosswalkRole::AdjacentParallel) return 1;
      if (role == CrosswalkRole::Near) return 2;
      break;
    case Turn::L:
      if (role == CrosswalkRole::ParallelOpposite) return 3;
      if (role == CrosswalkRole::AdjacentParallel) return 4;
      break;
    case Turn::T:
      if (role == CrosswalkRole::Far) return 5;
      if (role == CrosswalkRole::Near) return 6;
      break;
  }
  return std::nullopt;
}

std::optional<int> classify_p2v_type(MovementCode mv, Leg ped_leg, const IntersectionConfig& cfg) {
  return p2v_type(mv.turn, crosswalk_role(mv, ped_leg, cfg));
}

std::optional<std::pair<double, double>> crossing_interval(const Trajectory& ped, Leg leg,
                                                          const IntersectionConfig& cfg) {
  std::optional<std::pair<double, double>> span;
  for (const TrackPoint& p : ped.points) {
    if (!cfg.crosswalk(leg).contains_dilated(p.pos, cfg.crosswalk_buffer)) continue;
    if (!span) span.emplace(p.t, p.t);
    span->second = p.t;
  }
  return span;
}

bool flag_jaywalk(const Trajectory& ped, Phase phase, const IntersectionConfig& cfg, const SignalLog* log,
                  const ClassifyParams& params) {
  if (phase.value == 0) return true;
  if (!log) return false;
  const auto leg = leg_of_pedestrian_phase(phase, cfg);
  if (!leg) return true;
  const auto span = crossing_interval(ped, *leg, cfg);
  if (!span) return false;
  return log->overlap(phase.value, SignalState::DontWalk, span->first, span->second) > params.t_grace;
}

TrajectoryIndex classify_trajectories(const std::vector<Trajectory>& trajs, const IntersectionConfig& cfg,
                                      const SignalLog* log, const ClassifyParams& params) {
  TrajectoryIndex index;
  for (const Trajectory& tr : trajs) {
    TrajectoryInfo info;
    info.cls = tr.cls;
    info.in_region = enters_region(tr, cfg);
    if (info.in_region) {
      if (is_vehicle(tr.cls)) {
        info.movement = classify_vehicle_movement(tr, cfg);
        if (info.movement) info.phase = vehicle_phase(*info.movement, cfg);
      } else {
        info.phase = pedestrian_phase(tr, cfg);
        info.jaywalk = flag_jaywalk(tr, info.phase, cfg, log, params);
      }
    }
    index.emplace(tr.object_id, info);
  }
  return index;
}

namespace {

const Trajectory* find_trajectory(const std::vector<Trajectory>& trajs, const std::string& id) {
  auto it = std::lower_bound(trajs.begin(), trajs.end(), id,
                             [](const Trajectory& t, const std::string& v) { return t.object_id < v; });
  return it != trajs.end() && it->object_id == id ? &*it : nullptr;
}

std::optional<Leg> crosswalk_at(Vec2 p, const IntersectionConfig& cfg) {
  for (Leg l : kAllLegs) {
    if (cfg.crosswalk(l).contains_dilated(p, cfg.crosswalk_buffer)) return l;
  }
  return std::nullopt;
}

}  // namespace

void classify_events(std::vector<ConflictEvent>& events, const std::vector<Trajectory>& trajs,
                     const TrajectoryIndex& index, const IntersectionConfig& cfg, const EngineParams& params) {
  for (ConflictEvent& e : events) {
    e.severe = e.metric == Metric::TTC ? e.value <= params.ttc.ttc_severe : e.value <= params.pet.pet_severe;
    e.movement.reset();
    e.p2v_type.reset();
    e.ped_role.reset();
    e.jaywalk = false;
    if (e.kind != ConflictKind::P2V) continue;

    const bool a_is_ped = e.class_a == ObjectClass::Pedestrian;
    const std::string& ped_id = a_is_ped ? e.id_a : e.id_b;
    const std::string& veh_id = a_is_ped ? e.id_b : e.id_a;
    const auto ped_it = index.find(ped_id);
    const auto veh_it = index.find(veh_id);
    if (ped_it != index.end()) e.jaywalk = ped_it->second.jaywalk;
    if (veh_it == index.end() || !veh_it->second.movement) continue;
    e.movement = veh_it->second.movement;

    std::optional<Leg> ped_leg;
    if (ped_it != index.end() && ped_it->second.phase.value != 0) {
      ped_leg = leg_of_pedestrian_phase(ped_it->second.phase, cfg);
    } else if (const Trajectory* tr = find_trajectory(trajs, ped_id)) {
      ped_leg = crosswalk_at(tr->position_at(e.t), cfg);
    }
    if (!ped_leg) continue;
    e.ped_role = crosswalk_role(*e.movement, *ped_leg, cfg);
    e.p2v_type = p2v_type(e.movement->turn, *e.ped_role);
  }
}

std::vector<MovementCount> movement_histogram(const std::vector<ConflictEvent>& events) {
  std::map<std::string, MovementCount> counts;
  for (const ConflictEvent& e : events) {
    if (!e.movement) continue;
    auto& c = counts[e.movement->str()];
    c.movement = *e.movement;
    ++c.count;
  }
  std::vector<MovementCount> out;
  for (const auto& [code, c] : counts) out.push_back(c);
  std::stable_sort(out.begin(), out.end(),
                   [](const MovementCount& a, const MovementCount& b) { return a.count > b.count; });
  return out;
}

std::vector<ConflictEvent> jaywalk_p2v(const std::vector<ConflictEvent>& events) {
  std::vector<ConflictEvent> out;
  std::copy_if(events.begin(), events.end(), std::back_inserter(out),
               [](const ConflictEvent& e) { return e.kind == ConflictKind::P2V && e.jaywalk; });
  return out;
}

std::array<std::size_t, 7> p2v_type_counts(const std::vector<ConflictEvent>& events) {
  std::array<std::size_t, 7> counts{};
  for (const ConflictEvent& e : events) {
    if (e.kind != ConflictKind::P2V) continue;
    ++counts[e.p2v_type ? static_cast<std::size_t>(*e.p2v_type) : 0];
  }
  return counts;
}

}  // namespace intersafe

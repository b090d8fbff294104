#pragma once
/**
 * @file synth.hpp
 * @brief Deterministic synthetic intersection scenarios with known conflicts.
 *
 * Background traffic follows a fixed two-group signal plan: north-south movements and the
 * east/west crosswalks run first, east-west movements and the north/south crosswalks
 * second. Arrivals are Poisson (thinned for surge windows) and are held until their
 * group's launch window, so legal traffic only meets pedestrians as turning vehicles
 * crossing a walking crosswalk. Scripted conflicts add exact TTC or PET instances on top
 * and are listed in the ground-truth manifest.
 *
 * The generator assumes a rectilinear four-leg layout (legs at 0/90/180/270 degrees).
 */

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "intersafe/config.hpp"
#include "intersafe/event.hpp"
#include "intersafe/ingest.hpp"
#include "intersafe/types.hpp"

namespace intersafe {

struct SignalPlan {
  double cycle = 90.0;
  double green = 40.0;         // per group; the second group starts at cycle / 2
  double yellow = 4.0;
  double walk = 32.0;          // walk indication from group start
  double ped_launch = 8.0;     // pedestrians step off within this many seconds of walk
  double veh_launch_begin = 2.0;
  double veh_launch_end = 22.0;  // vehicles enter the region within [begin, end) of green
};

enum class SurgeTarget : std::uint8_t { Pedestrian, Vehicle, All };

struct Surge {
  double start = 0.0;
  double end = 0.0;
  double multiplier = 1.0;
  SurgeTarget target = SurgeTarget::Pedestrian;
};

enum class ScriptKind : std::uint8_t { TtcCase1, TtcCase2, TtcCase3, Pet, PetSeries };

struct ConflictScript {
  std::string id;
  ScriptKind kind = ScriptKind::Pet;
  double t = 0.0;      // TTC: instant of the scripted value; PET: vehicle start time
  double value = 0.0;  // TTC seconds, or PET gap seconds
  Vec2 at;             // TTC: reference location
  MovementCode movement{Bound::WB, Turn::T};  // PET
  Leg crosswalk = Leg::W;                     // PET
  // PetSeries: `count` conflicts spread over [t, until), one per signal cycle, placed in the
  // vehicle's green while the crosswalk shows dont_walk.
  std::size_t count = 0;
  double until = 0.0;
};

struct ScenarioSpec {
  std::string name;
  std::uint64_t seed = 1;
  std::string date = "2022-10-08";
  double start = 8.0 * 3600.0;
  double end = 9.0 * 3600.0;
  std::optional<double> game_start;
  SignalPlan signal;
  std::map<Leg, double> pedestrian_rates;            // per hour, by crosswalk
  std::map<std::string, double> vehicle_rates;       // per hour, by movement code
  std::vector<Surge> surges;
  double vehicle_speed = 8.0;
  double turn_speed = 6.0;
  double ped_speed_min = 1.2;
  double ped_speed_max = 1.6;
  double headway = 2.5;
  double lane_offset = 3.5;
  double bus_share = 0.03;
  double truck_share = 0.05;
  std::vector<ConflictScript> scripts;

  /// Throws ConfigError for invalid rates, windows or infeasible scripts.
  void validate() const;
};

ScenarioSpec scenario_from_json(const nlohmann::json& j);
ScenarioSpec load_scenario(const std::filesystem::path& path);

struct GroundTruth {
  std::string script_id;
  Metric metric = Metric::TTC;
  double value = 0.0;
  double t = 0.0;
  std::string id_a;  // id_a < id_b
  std::string id_b;
};

inline constexpr const char* kGroundTruthHeader = "script_id,metric,value,t,id_a,id_b";

struct SynthOutput {
  std::vector<Trajectory> trajectories;  // sorted by id, values rounded as written to CSV
  SignalLog signal_log;
  std::vector<GroundTruth> truth;
};

SynthOutput generate(const ScenarioSpec& spec, const IntersectionConfig& cfg, const EngineParams& params = {});

void write_ground_truth(std::ostream& out, const std::vector<GroundTruth>& truth);
std::vector<GroundTruth> read_ground_truth(std::istream& in);

/// Ground-truth rows with a detected event of the same pair and metric within `tol`.
std::size_t matched_truth(const std::vector<GroundTruth>& truth, const std::vector<ConflictEvent>& events,
                          double tol);

}  // namespace intersafe

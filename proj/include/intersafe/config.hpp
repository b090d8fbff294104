#pragma once
/**
 * @file config.hpp
 * @brief Intersection geometry and engine parameters, loaded from JSON.
 *
 * Default thresholds:
 *   - candidate filter: 10 m separation over >= 3 consecutive frames
 *   - stationary below 0.2 m/s; "same line" within 5 deg and 1.0 m lateral
 *   - severe TTC <= 2.0 s (literature range 1.5-3.0 s), severe PET <= 3.0 s
 *   - PET recording window 10 s
 */

#include <array>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "intersafe/geometry.hpp"
#include "intersafe/types.hpp"

namespace intersafe {

enum class Axis : std::uint8_t { NorthSouth, EastWest };

struct IntersectionConfig {
  Vec2 center;
  std::array<double, 4> leg_bearings{0.0, 90.0, 180.0, 270.0};  // indexed by Leg
  std::array<Polygon, 4> crosswalks;                            // indexed by Leg
  Polygon analysis_region;
  Axis major_axis = Axis::NorthSouth;
  double mesh_cell_size = 1.0;
  double crosswalk_buffer = 1.0;

  // Through phase per direction of travel, indexed by Bound (NB, EB, SB, WB).
  std::array<int, 4> through_phases{2, 4, 6, 8};
  // Pedestrian phase of each leg's crosswalk, indexed by Leg (N, E, S, W).
  std::array<int, 4> pedestrian_phases{4, 2, 8, 6};

  bool right_hand_traffic = true;
  double entry_band = 2.0;          // meters inside the region boundary
  double crosswalk_fraction = 0.5;  // share of in-region samples needed to own a crosswalk

  const Polygon& crosswalk(Leg l) const { return crosswalks[static_cast<std::size_t>(l)]; }
  double bearing(Leg l) const { return leg_bearings[static_cast<std::size_t>(l)]; }

  /// Throws ConfigError describing the first violated invariant.
  void validate() const;
};

struct ClearanceLengths {
  double default_length = 4.5;
  double pedestrian = 0.5;
  double car = 4.5;
  double bus = 12.0;
  double truck = 4.5;
  double motorcyclist = 4.5;

  double of(ObjectClass c) const;
};

struct TtcParams {
  double d_max = 10.0;
  int k_min = 3;
  double v_stop = 0.2;
  double theta_par_deg = 5.0;
  double w_lat = 1.0;
  ClearanceLengths clearance;
  double ttc_severe = 2.0;
  bool include_following = true;  // V2V same-line (case 2) events
};

struct PetParams {
  double pet_window = 10.0;
  double pet_severe = 3.0;
};

struct ClassifyParams {
  double t_grace = 1.0;
};

enum class PValueMethod : std::uint8_t { TDist, Permutation };

struct StatsParams {
  PValueMethod p_method = PValueMethod::TDist;
  std::size_t monte_carlo_samples = 100000;
  std::uint64_t seed = 20221015;
};

struct IngestParams {
  bool force_velocity = false;
  int smoothing_window = 1;  // odd; 1 disables smoothing
};

struct EngineParams {
  TtcParams ttc;
  PetParams pet;
  ClassifyParams classify;
  StatsParams stats;
  IngestParams ingest;
  std::optional<double> kde_bandwidth;  // meters; Scott's rule when empty

  void validate() const;
};

IntersectionConfig intersection_from_json(const nlohmann::json& j);
IntersectionConfig load_intersection_config(const std::filesystem::path& path);
nlohmann::json to_json(const IntersectionConfig& cfg);

/// Applies the keys present in `j` on top of `base`; unknown keys are a ConfigError.
EngineParams params_from_json(const nlohmann::json& j, EngineParams base = {});
nlohmann::json to_json(const EngineParams& p);

/// Reference four-leg layout: 40 m square box, 20 m wide roads, 3 m crosswalks.
IntersectionConfig default_intersection();

}  // namespace intersafe

#pragma once
/**
 * @file analytics.hpp
 * @brief Volume matrices, time-of-day buckets, aggregated conflict series, spatial
 *        histograms, KDE and the volume / win-probability correlation.
 *
 * All time bins are half-open [start, end). A crossing is placed in time by its median
 * sample time.
 */

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "intersafe/conflict.hpp"
#include "intersafe/event.hpp"
#include "intersafe/games.hpp"
#include "intersafe/pet.hpp"
#include "intersafe/stats.hpp"

namespace intersafe {

enum class VolumeMode : std::uint8_t { Pedestrian, Vehicle };
std::string_view to_string(VolumeMode m);
std::optional<VolumeMode> parse_volume_mode(std::string_view s);

struct VolumeMatrix {
  VolumeMode mode = VolumeMode::Pedestrian;
  std::vector<int> phases;                      // row keys
  std::vector<std::array<std::size_t, 24>> counts;  // [row][hour]

  std::size_t at(int phase, int hour) const;
  std::size_t total() const;
  std::array<std::size_t, 24> hourly_totals() const;
};

/// Pedestrians by phase {0,2,4,6,8}; vehicles by phase 1..8 (unclassifiable movements are
/// skipped). Only trajectories with a sample inside the analysis region count.
VolumeMatrix volume_matrix(const std::vector<Trajectory>& trajs, const TrajectoryIndex& index, VolumeMode mode);

/// Whether a trajectory contributes to volumes in `mode`.
bool counts_toward_volume(const TrajectoryInfo& info, VolumeMode mode);

enum class TimeBucket : std::uint8_t { EarlyMorning, LateMorning, EarlyAfternoon, LateAfternoon, Evening, Night };
inline constexpr std::array<TimeBucket, 6> kAllBuckets = {TimeBucket::EarlyMorning,   TimeBucket::LateMorning,
                                                          TimeBucket::EarlyAfternoon, TimeBucket::LateAfternoon,
                                                          TimeBucket::Evening,        TimeBucket::Night};
std::string_view to_string(TimeBucket b);
/// 08:00-10:00 Early Morning through 18:00-20:00 Night; none outside 08:00-20:00.
std::optional<TimeBucket> bucket_of(double t);

/// Event counts per hour of day for one day.
std::array<double, 24> hourly_counts(const std::vector<ConflictEvent>& events);

struct DayCounts {
  std::string date;
  std::string group;  // e.g. "Saturday-gameday"
  std::array<double, 24> hourly{};
};

struct AggregatePoint {
  int hour = 0;
  MeanBand band;
};

struct AggregateSeries {
  std::string group;
  std::size_t days = 0;
  std::vector<AggregatePoint> points;  // hours first_hour .. last_hour
};

/// Per group and hour: mean daily count with a 95% Student-t band across days. Groups are
/// returned in name order; any listed in `expected_groups` without days is reported in
/// `warnings` and omitted.
std::vector<AggregateSeries> aggregate_conflicts(const std::vector<DayCounts>& days,
                                                 const std::vector<std::string>& expected_groups,
                                                 std::vector<std::string>* warnings = nullptr, int first_hour = 7,
                                                 int last_hour = 17);

struct SpatialHistogram {
  MeshGrid mesh;
  std::vector<std::size_t> counts;
  std::size_t overflow = 0;  // events outside the mesh

  std::size_t total() const;
};

SpatialHistogram spatial_histogram(const std::vector<Vec2>& points, const MeshGrid& mesh);
std::vector<Vec2> event_locations(const std::vector<ConflictEvent>& events);

struct KdeSurface {
  MeshGrid mesh;
  std::vector<double> density;  // per cell, evaluated at the cell center
  double bandwidth_x = 0.0;
  double bandwidth_y = 0.0;

  double integral() const;  // Riemann sum
};

/// Per-axis Scott bandwidth sigma * n^(-1/6); an axis with zero spread falls back to `fallback`.
std::pair<double, double> scott_bandwidth(const std::vector<Vec2>& points, double fallback);

/// Gaussian KDE evaluated at cell centers of `mesh`. A given bandwidth applies to both axes.
KdeSurface spatial_kde(const std::vector<Vec2>& points, const MeshGrid& mesh, std::optional<double> bandwidth = {});

/// `mesh` grown by `margin` meters on every side, same cell size.
MeshGrid padded_mesh(const MeshGrid& mesh, double margin);

/// Crossings whose median time lies in [start - window, start).
std::size_t pregame_volume(const std::vector<Trajectory>& trajs, const TrajectoryIndex& index, double game_start,
                           VolumeMode mode, double window = 6.0 * kHour);

struct GameVolume {
  GameRecord game;
  double volume = 0.0;
};

struct CorrelationPoint {
  std::string matchup;
  std::string date;
  double win_prob = 0.0;
  double volume = 0.0;
  double win_prob_norm = 0.0;
  double volume_norm = 0.0;
};

struct CorrelationResult {
  double r = 0.0;
  double p = 1.0;
  PValueMethod method = PValueMethod::TDist;
  bool home_probability = false;
  std::vector<CorrelationPoint> points;  // sorted by normalized probability, then date
};

/// Correlates volumes with the away (default) or home win probability after min-max
/// normalization of both series. Needs at least 3 games.
CorrelationResult correlate_volume_win_prob(const std::vector<GameVolume>& games, const StatsParams& params,
                                            bool use_home_probability = false);

// CSV exports.
std::string volume_csv(const VolumeMatrix& m);
std::string histogram_csv(const SpatialHistogram& h);
std::string kde_csv(const KdeSurface& k);
std::string aggregate_csv(const std::vector<AggregateSeries>& series);
std::string correlation_csv(const CorrelationResult& c);

}  // namespace intersafe

#pragma once
/**
 * @file ingest.hpp
 * @brief Trajectory and signal-log CSV ingest, plus velocity estimation.
 *
 * Trajectory file header (exact): object_id,class,t,x,y,vx,vy
 * vx/vy may both be empty. Times are seconds since local midnight, coordinates are
 * meters in the rectilinear intersection plane.
 */

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "intersafe/types.hpp"

namespace intersafe {

inline constexpr const char* kTrajectoryHeader = "object_id,class,t,x,y,vx,vy";
inline constexpr const char* kSignalLogHeader = "t_start,t_end,phase,state";

struct RejectedRow {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string reason;
};

struct TrajectoryParseResult {
  std::vector<Trajectory> trajectories;  // sorted by object_id
  std::vector<RejectedRow> rejected;
  std::vector<std::string> warnings;
  std::size_t rows_read = 0;
};

TrajectoryParseResult parse_trajectories(std::istream& in);
TrajectoryParseResult parse_trajectories(const std::filesystem::path& path);

/// Fixed formatting: seconds with 1 decimal, meters and m/s with 3 decimals.
void write_trajectories(std::ostream& out, const std::vector<Trajectory>& trajs);

struct VelocityOptions {
  bool force = false;        // recompute even where the input carries velocities
  int smoothing_window = 1;  // odd centered moving average on positions; 1 = off
};

/// Central differences inside, one-sided at the ends. Requires >= 2 points.
Trajectory estimate_velocities(const Trajectory& traj, const VelocityOptions& opts = {});

enum class SignalState : std::uint8_t { Walk, DontWalk, Green, Yellow, Red };
std::string_view to_string(SignalState s);

struct SignalInterval {
  double t_start = 0.0;
  double t_end = 0.0;
  int phase = 0;
  SignalState state = SignalState::Red;
};

struct SignalLog {
  std::vector<SignalInterval> intervals;  // sorted by (phase, pedestrian/vehicle channel, t_start)

  /// Total time within [t0, t1] that `phase` spends in `state`.
  double overlap(int phase, SignalState state, double t0, double t1) const;
};

/// Overlapping intervals for one phase, or t_start >= t_end, throw DataError.
SignalLog parse_signal_log(std::istream& in);
SignalLog parse_signal_log(const std::filesystem::path& path);
void write_signal_log(std::ostream& out, const SignalLog& log);

}  // namespace intersafe

#pragma once
/**
 * @file ttc.hpp
 * @brief Time-to-collision over the three geometric cases and TTC conflict detection.
 *
 * Case 1: at least one object below v_stop. Only a mover aimed at the other object
 *         (within w_lat of its ray) can collide: t = s / |v|.
 * Case 2: directions parallel within theta_par. Only coincident lines (offset <= w_lat)
 *         can collide. Same direction: t = s / (|v_follower| - |v_leader|) when the
 *         follower is faster. Opposite directions closing on each other: t = s / (|v1| + |v2|).
 * Case 3: crossing lines. Both objects must be heading toward the conflict point; if the
 *         first to arrive clears it (its clearance length at its speed) before the second
 *         arrives there is no collision, otherwise TTC = max(t1, t2).
 *
 * Every result is either a non-negative time or +infinity.
 */

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "intersafe/config.hpp"
#include "intersafe/event.hpp"
#include "intersafe/types.hpp"

namespace intersafe {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct ObjectState {
  Vec2 pos;
  Vec2 vel;
  ObjectClass cls = ObjectClass::Car;
};

struct PairState {
  std::string id_a;
  std::string id_b;
  double t = 0.0;
  ObjectState a;
  ObjectState b;
  double s = 0.0;  // center distance

  static PairState make(std::string id_a, ObjectState a, std::string id_b, ObjectState b, double t = 0.0);
};

struct TtcResult {
  double value = kInfinity;
  int case_id = 0;
  std::optional<Vec2> conflict_point;

  bool finite() const { return value < kInfinity; }
};

TtcResult ttc_case1(const PairState& pair, const TtcParams& params);
TtcResult ttc_case2(const PairState& pair, const TtcParams& params);
TtcResult ttc_case3(const PairState& pair, const TtcParams& params);

/// Which case governs the pair: 1 (someone stationary), 2 (parallel), or 3 (crossing).
int applicable_case(const PairState& pair, const TtcParams& params);
TtcResult compute_ttc(const PairState& pair, const TtcParams& params);

/// One object at one frame.
struct FrameObject {
  std::size_t track = 0;  // caller-defined index, also used for pair ordering
  std::string_view id;
  ObjectState state;
};

struct CandidatePair {
  std::size_t track_a = 0;  // track_a < track_b
  std::size_t track_b = 0;
  PairState state;
  TtcResult ttc;
};

/// Per-frame filter: not pedestrian-pedestrian, s <= d_max, and a finite TTC.
std::vector<CandidatePair> frame_candidates(const std::vector<FrameObject>& frame, double t, const TtcParams& params);

/// Stateful candidate filter: a pair is surfaced once it has passed the per-frame filter
/// on k_min consecutive frames, and on every following frame while the streak lasts.
class CandidateFilter {
 public:
  explicit CandidateFilter(TtcParams params) : params_(std::move(params)) {}

  /// Frames must be supplied in increasing order; a skipped index breaks every streak.
  std::vector<CandidatePair> advance(long frame_index, const std::vector<FrameObject>& frame);

 private:
  TtcParams params_;
  long last_frame_ = std::numeric_limits<long>::min();
  std::vector<std::pair<std::pair<std::size_t, std::size_t>, int>> streaks_;
};

/// Frame-by-frame TTC over all trajectories. Each maximal run of frames in which a pair
/// passes the filter (at least k_min long) yields one event at its minimum-TTC frame.
/// Velocities must be present. Output sorted by (t, id_a, id_b).
std::vector<ConflictEvent> detect_ttc_conflicts(const std::vector<Trajectory>& trajs, const TtcParams& params,
                                                unsigned threads = 0);

}  // namespace intersafe

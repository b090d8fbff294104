#include "intersafe/ttc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <unordered_map>

#include "intersafe/errors.hpp"
#include "intersafe/parallel.hpp"

namespace intersafe {

PairState PairState::make(std::string id_a, ObjectState a, std::string id_b, ObjectState b, double t) {
  PairState p;
  p.id_a = std::move(id_a);
  p.id_b = std::move(id_b);
  p.t = t;
  p.a = a;
  p.b = b;
  p.s = distance(a.pos, b.pos);
  return p;
}

namespace {

TtcResult infinite(int case_id) { return TtcResult{kInfinity, case_id, std::nullopt}; }

TtcResult finite_or_infinite(double t, int case_id, std::optional<Vec2> point) {
  if (!(t > 0.0) || !std::isfinite(t)) return infinite(case_id);
  return TtcResult{t, case_id, point};
}

}  // namespace

TtcResult ttc_case1(const PairState& pair, const TtcParams& params) {
  const double sa = pair.a.vel.norm();
  const double sb = pair.b.vel.norm();
  const bool a_moves = sa >= params.v_stop;
  const bool b_moves = sb >= params.v_stop;
  if (!a_moves && !b_moves) return infinite(1);

  // With both moving this reduces to checking each as the mover against the other's
  // current position; callers only route here when at least one is stationary.
  const ObjectState& mover = a_moves ? pair.a : pair.b;
  const ObjectState& target = a_moves ? pair.b : pair.a;
  const double speed = a_moves ? sa : sb;
  const Vec2 dir = mover.vel / speed;
  const Vec2 rel = target.pos - mover.pos;
  const double along = dot(rel, dir);
  const double lateral = std::abs(cross(dir, rel));
  if (along <= 0.0 || lateral > params.w_lat) return infinite(1);
  return finite_or_infinite(pair.s / speed, 1, target.pos);
}

TtcResult ttc_case2(const PairState& pair, const TtcParams& params) {
  const double sa = pair.a.vel.norm();
  const double sb = pair.b.vel.norm();
  if (sa == 0.0 || sb == 0.0) return infinite(2);
  const Vec2 ua = pair.a.vel / sa;
  const Vec2 ub = pair.b.vel / sb;
  const Vec2 d = pair.b.pos - pair.a.pos;

  if (dot(ua, ub) > 0.0) {
    const Vec2 sum = ua + ub;
    const Vec2 u = sum / sum.norm();
    if (std::abs(cross(u, d)) > params.w_lat) return infinite(2);
    // Positive projection means b is ahead, so a follows.
    const bool a_follows = dot(d, u) > 0.0;
    const double v_follow = a_follows ? sa : sb;
    const double v_lead = a_follows ? sb : sa;
    if (v_follow <= v_lead) return infinite(2);
    const double t = pair.s / (v_follow - v_lead);
    const ObjectState& follower = a_follows ? pair.a : pair.b;
    return finite_or_infinite(t, 2, follower.pos + follower.vel * t);
  }

  if (std::abs(cross(ua, d)) > params.w_lat) return infinite(2);
  if (dot(d, ua) <= 0.0) return infinite(2);  // already past each other
  const double t = pair.s / (sa + sb);
  return finite_or_infinite(t, 2, pair.a.pos + pair.a.vel * t);
}

TtcResult ttc_case3(const PairState& pair, const TtcParams& params) {
  const double sa = pair.a.vel.norm();
  const double sb = pair.b.vel.norm();
  if (sa == 0.0 || sb == 0.0) return infinite(3);
  const Vec2 ua = pair.a.vel / sa;
  const Vec2 ub = pair.b.vel / sb;
  const double denom = cross(ua, ub);
  if (denom == 0.0) return infinite(3);
  const Vec2 d = pair.b.pos - pair.a.pos;
  // Signed distances of a and b to the crossing point of their lines of motion.
  const double dist_a = cross(d, ub) / denom;
  const double dist_b = cross(d, ua) / denom;
  if (dist_a < 0.0 || dist_b < 0.0) return infinite(3);
  const Vec2 conflict = pair.a.pos + ua * dist_a;

  const double ta = dist_a / sa;
  const double tb = dist_b / sb;
  const bool a_first = ta <= tb;
  const double t_first = a_first ? ta : tb;
  const double t_second = a_first ? tb : ta;
  const ObjectState& first = a_first ? pair.a : pair.b;
  const double clear_time = t_first + params.clearance.of(first.cls) / (a_first ? sa : sb);
  if (clear_time < t_second) return infinite(3);
  return finite_or_infinite(std::max(ta, tb), 3, conflict);
}

int applicable_case(const PairState& pair, const TtcParams& params) {
  const double sa = pair.a.vel.norm();
  const double sb = pair.b.vel.norm();
  if (sa < params.v_stop || sb < params.v_stop) return 1;
  const double c = std::clamp(dot(pair.a.vel, pair.b.vel) / (sa * sb), -1.0, 1.0);
  const double angle = std::acos(c) * 180.0 / std::numbers::pi;
  if (angle <= params.theta_par_deg || angle >= 180.0 - params.theta_par_deg) return 2;
  return 3;
}

TtcResult compute_ttc(const PairState& pair, const TtcParams& params) {
  switch (applicable_case(pair, params)) {
    case 1: return ttc_case1(pair, params);
    case 2: return ttc_case2(pair, params);
    default: return ttc_case3(pair, params);
  }
}

std::vector<CandidatePair> frame_candidates(const std::vector<FrameObject>& frame, double t,
                                            const TtcParams& params) {
  // Uniform hash grid with d_max cells: any pair within d_max sits in adjacent cells.
  const double cell = params.d_max;
  auto key_of = [cell](Vec2 p) {
    return std::pair<long, long>{static_cast<long>(std::floor(p.x / cell)), static_cast<long>(std::floor(p.y / cell))};
  };
  std::map<std::pair<long, long>, std::vector<std::size_t>> grid;
  for (std::size_t i = 0; i < frame.size(); ++i) grid[key_of(frame[i].state.pos)].push_back(i);

  std::vector<CandidatePair> out;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const auto [cx, cy] = key_of(frame[i].state.pos);
    for (long dx = -1; dx <= 1; ++dx) {
      for (long dy = -1; dy <= 1; ++dy) {
        auto it = grid.find({cx + dx, cy + dy});
        if (it == grid.end()) continue;
        for (std::size_t j : it->second) {
          const FrameObject& fa = frame[i];
          const FrameObject& fb = frame[j];
          if (fa.track >= fb.track) continue;
          if (!conflict_kind(fa.state.cls, fb.state.cls)) continue;
          PairState ps = PairState::make(std::string(fa.id), fa.state, std::string(fb.id), fb.state, t);
          if (ps.s > params.d_max) continue;
          TtcResult r = compute_ttc(ps, params);
          if (!r.finite()) continue;
          if (r.case_id == 2 && !params.include_following && is_vehicle(fa.state.cls) && is_vehicle(fb.state.cls)) {
            continue;
          }
          out.push_back(CandidatePair{fa.track, fb.track, std::move(ps), r});
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const CandidatePair& x, const CandidatePair& y) {
    return std::pair(x.track_a, x.track_b) < std::pair(y.track_a, y.track_b);
  });
  return out;
}

std::vector<CandidatePair> CandidateFilter::advance(long frame_index, const std::vector<FrameObject>& frame) {
  if (frame_index != last_frame_ + 1) streaks_.clear();
  last_frame_ = frame_index;
  auto passing = frame_candidates(frame, static_cast<double>(frame_index) * kFramePeriod, params_);

  std::vector<std::pair<std::pair<std::size_t, std::size_t>, int>> next;
  std::vector<CandidatePair> surfaced;
  next.reserve(passing.size());
  for (auto& c : passing) {
    const std::pair key{c.track_a, c.track_b};
    auto it = std::lower_bound(streaks_.begin(), streaks_.end(), key,
                               [](const auto& e, const auto& k) { return e.first < k; });
    const int streak = (it != streaks_.end() && it->first == key) ? it->second + 1 : 1;
    next.emplace_back(key, streak);
    if (streak >= params_.k_min) surfaced.push_back(std::move(c));
  }
  streaks_ = std::move(next);
  return surfaced;
}

namespace {

struct FrameRecord {
  std::size_t a = 0;
  std::size_t b = 0;
  long frame = 0;
  double ttc = 0.0;
  Vec2 midpoint;
};

}  // namespace

std::vector<ConflictEvent> detect_ttc_conflicts(const std::vector<Trajectory>& trajs, const TtcParams& params,
                                                unsigned threads) {
  // Work in object_id order so results do not depend on input order.
  std::vector<std::size_t> order(trajs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return trajs[x].object_id < trajs[y].object_id; });

  struct Entry {
    long frame;
    std::size_t rank;
    std::size_t point;
  };
  std::vector<Entry> entries;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const Trajectory& tr = trajs[order[rank]];
    if (!tr.has_velocities()) throw DataError("TTC detection: missing velocities for object " + tr.object_id);
    for (std::size_t k = 0; k < tr.points.size(); ++k) {
      entries.push_back({std::lround(tr.points[k].t / kFramePeriod), rank, k});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    return x.frame != y.frame ? x.frame < y.frame : x.rank < y.rank;
  });
  // Irregular timestamps can land two samples of one object in the same frame; keep the first.
  entries.erase(std::unique(entries.begin(), entries.end(),
                            [](const Entry& x, const Entry& y) { return x.frame == y.frame && x.rank == y.rank; }),
                entries.end());

  // Frame boundaries, then contiguous windows of frames processed independently.
  std::vector<std::size_t> frame_starts;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i == 0 || entries[i].frame != entries[i - 1].frame) frame_starts.push_back(i);
  }
  frame_starts.push_back(entries.size());
  const std::size_t n_frames = frame_starts.size() - 1;
  const std::size_t n_windows = std::max<std::size_t>(1, std::min<std::size_t>(n_frames, 4 * resolve_threads(threads)));
  std::vector<std::vector<FrameRecord>> per_window(n_windows);

  parallel_for(n_windows, threads, [&](std::size_t w) {
    const std::size_t f0 = n_frames * w / n_windows;
    const std::size_t f1 = n_frames * (w + 1) / n_windows;
    std::vector<FrameObject> frame;
    for (std::size_t f = f0; f < f1; ++f) {
      frame.clear();
      for (std::size_t e = frame_starts[f]; e < frame_starts[f + 1]; ++e) {
        const Trajectory& tr = trajs[order[entries[e].rank]];
        const TrackPoint& p = tr.points[entries[e].point];
        frame.push_back(FrameObject{entries[e].rank, tr.object_id, ObjectState{p.pos, *p.vel, tr.cls}});
      }
      const long frame_index = entries[frame_starts[f]].frame;
      for (const CandidatePair& c : frame_candidates(frame, static_cast<double>(frame_index) * kFramePeriod, params)) {
        per_window[w].push_back(
            FrameRecord{c.track_a, c.track_b, frame_index, c.ttc.value, (c.state.a.pos + c.state.b.pos) * 0.5});
      }
    }
  });

  // Deterministic single-threaded reduce: episodes may straddle window boundaries.
  std::vector<FrameRecord> records;
  for (auto& w : per_window) records.insert(records.end(), w.begin(), w.end());
  std::stable_sort(records.begin(), records.end(), [](const FrameRecord& x, const FrameRecord& y) {
    if (x.a != y.a) return x.a < y.a;
    if (x.b != y.b) return x.b < y.b;
    return x.frame < y.frame;
  });

  std::vector<ConflictEvent> events;
  std::size_t i = 0;
  while (i < records.size()) {
    std::size_t j = i + 1;
    while (j < records.size() && records[j].a == records[i].a && records[j].b == records[i].b &&
           records[j].frame == records[j - 1].frame + 1) {
      ++j;
    }
    if (static_cast<int>(j - i) >= params.k_min) {
      std::size_t best = i;
      for (std::size_t k = i + 1; k < j; ++k) {
        if (records[k].ttc < records[best].ttc) best = k;
      }
      const FrameRecord& r = records[best];
      const Trajectory& ta = trajs[order[r.a]];
      const Trajectory& tb = trajs[order[r.b]];
      ConflictEvent e;
      e.kind = *conflict_kind(ta.cls, tb.cls);
      e.metric = Metric::TTC;
      e.value = r.ttc;
      e.t = static_cast<double>(r.frame) * kFramePeriod;
      e.location = r.midpoint;
      e.id_a = ta.object_id;
      e.class_a = ta.cls;
      e.id_b = tb.object_id;
      e.class_b = tb.cls;
      e.severe = r.ttc <= params.ttc_severe;
      events.push_back(std::move(e));
    }
    i = j;
  }
  sort_events(events);
  return events;
}

}  // namespace intersafe

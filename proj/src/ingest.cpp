#include "intersafe/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "intersafe/csv.hpp"
#include "intersafe/errors.hpp"
#include "intersafe/format.hpp"

namespace intersafe {

TrajectoryParseResult parse_trajectories(std::istream& in) {
  TrajectoryParseResult result;
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kTrajectoryHeader) {
    throw DataError(std::string("trajectory file: header must be exactly '") + kTrajectoryHeader + "'");
  }

  struct Row {
    std::size_t line;
    TrackPoint pt;
  };
  std::map<std::string, std::vector<Row>> by_id;
  std::map<std::string, ObjectClass> classes;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = strip_cr(line);
    if (row.empty()) continue;
    ++result.rows_read;
    const auto f = split_csv(row);
    auto reject = [&](std::string why) { result.rejected.push_back({line_no, std::move(why)}); };
    if (f.size() != 7) {
      reject("expected 7 fields, got " + std::to_string(f.size()));
      continue;
    }
    if (f[0].empty()) {
      reject("empty object_id");
      continue;
    }
    const auto cls = parse_object_class(f[1]);
    if (!cls) {
      reject("unknown class '" + std::string(f[1]) + "'");
      continue;
    }
    TrackPoint pt;
    if (!parse_double(f[2], pt.t) || !parse_double(f[3], pt.pos.x) || !parse_double(f[4], pt.pos.y)) {
      reject("unparsable t/x/y");
      continue;
    }
    if (!std::isfinite(pt.t) || !std::isfinite(pt.pos.x) || !std::isfinite(pt.pos.y)) {
      reject("non-finite t/x/y");
      continue;
    }
    if (pt.t < 0.0) {
      reject("negative timestamp");
      continue;
    }
    if (f[5].empty() != f[6].empty()) {
      reject("vx and vy must both be present or both empty");
      continue;
    }
    if (!f[5].empty()) {
      Vec2 v;
      if (!parse_double(f[5], v.x) || !parse_double(f[6], v.y) || !std::isfinite(v.x) || !std::isfinite(v.y)) {
        reject("non-finite velocity");
        continue;
      }
      pt.vel = v;
    }
    const std::string id(f[0]);
    auto [it, inserted] = classes.emplace(id, *cls);
    if (!inserted && it->second != *cls) {
      reject("class differs from earlier rows of object " + id);
      continue;
    }
    by_id[id].push_back({line_no, pt});
  }

  for (auto& [id, rows] : by_id) {
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.pt.t < b.pt.t; });
    Trajectory traj;
    traj.object_id = id;
    traj.cls = classes.at(id);
    // Rows with equal t are adjacent after the stable sort; keep the first in file order.
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!traj.points.empty() && rows[i].pt.t == traj.points.back().t) {
        result.rejected.push_back({rows[i].line, "duplicate timestamp for object " + id});
        result.warnings.push_back("line " + std::to_string(rows[i].line) + ": duplicate (" + id + ", t=" +
                                  fixed(rows[i].pt.t, 1) + ") dropped");
        continue;
      }
      traj.points.push_back(rows[i].pt);
    }
    result.trajectories.push_back(std::move(traj));
  }
  std::sort(result.rejected.begin(), result.rejected.end(),
            [](const RejectedRow& a, const RejectedRow& b) { return a.line < b.line; });
  return result;
}

TrajectoryParseResult parse_trajectories(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open trajectory file: " + path.string());
  return parse_trajectories(in);
}

void write_trajectories(std::ostream& out, const std::vector<Trajectory>& trajs) {
  out << kTrajectoryHeader << '\n';
  for (const Trajectory& tr : trajs) {
    for (const TrackPoint& p : tr.points) {
      out << tr.object_id << ',' << to_string(tr.cls) << ',' << fixed(p.t, 1) << ',' << fixed(p.pos.x, 3)
          << ',' << fixed(p.pos.y, 3) << ',';
      if (p.vel) out << fixed(p.vel->x, 3) << ',' << fixed(p.vel->y, 3);
      else out << ',';
      out << '\n';
    }
  }
}

Trajectory estimate_velocities(const Trajectory& traj, const VelocityOptions& opts) {
  const std::size_t n = traj.points.size();
  if (n < 2) throw DataError("velocity estimation needs >= 2 points (object " + traj.object_id + ")");
  if (opts.smoothing_window < 1 || opts.smoothing_window % 2 == 0) {
    throw ConfigError("smoothing_window must be a positive odd integer");
  }

  std::vector<Vec2> pos(n);
  const std::size_t half = static_cast<std::size_t>(opts.smoothing_window / 2);
  for (std::size_t i = 0; i < n; ++i) {
    // Window shrinks symmetrically near the ends so it stays centered.
    const std::size_t h = std::min({half, i, n - 1 - i});
    Vec2 acc;
    for (std::size_t k = i - h; k <= i + h; ++k) acc = acc + traj.points[k].pos;
    pos[i] = acc / static_cast<double>(2 * h + 1);
  }

  Trajectory out = traj;
  for (std::size_t i = 0; i < n; ++i) {
    TrackPoint& p = out.points[i];
    if (p.vel && !opts.force) continue;
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
    const double dt = traj.points[hi].t - traj.points[lo].t;
    p.vel = (pos[hi] - pos[lo]) / dt;
  }
  return out;
}

std::string_view to_string(SignalState s) {
  switch (s) {
    case SignalState::Walk: return "walk";
    case SignalState::DontWalk: return "dont_walk";
    case SignalState::Green: return "green";
    case SignalState::Yellow: return "yellow";
    case SignalState::Red: return "red";
  }
  return "red";
}

namespace {

std::optional<SignalState> parse_state(std::string_view s) {
  for (SignalState st : {SignalState::Walk, SignalState::DontWalk, SignalState::Green, SignalState::Yellow,
                         SignalState::Red}) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

}  // namespace

double SignalLog::overlap(int phase, SignalState state, double t0, double t1) const {
  double total = 0.0;
  for (const SignalInterval& iv : intervals) {
    if (iv.phase != phase || iv.state != state) continue;
    const double lo = std::max(t0, iv.t_start);
    const double hi = std::min(t1, iv.t_end);
    if (hi > lo) total += hi - lo;
  }
  return total;
}

SignalLog parse_signal_log(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kSignalLogHeader) {
    throw DataError(std::string("signal log: header must be exactly '") + kSignalLogHeader + "'");
  }
  SignalLog log;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = strip_cr(line);
    if (row.empty()) continue;
    const auto f = split_csv(row);
    const std::string where = "signal log line " + std::to_string(line_no);
    if (f.size() != 4) throw DataError(where + ": expected 4 fields");
    SignalInterval iv;
    double phase = 0.0;
    if (!parse_double(f[0], iv.t_start) || !parse_double(f[1], iv.t_end) || !parse_double(f[2], phase) ||
        !std::isfinite(iv.t_start) || !std::isfinite(iv.t_end)) {
      throw DataError(where + ": unparsable number");
    }
    if (phase != std::floor(phase) || phase < 0 || phase > 8) throw DataError(where + ": phase must be 0..8");
    iv.phase = static_cast<int>(phase);
    const auto st = parse_state(f[3]);
    if (!st) throw DataError(where + ": unknown state '" + std::string(f[3]) + "'");
    iv.state = *st;
    if (!(iv.t_start < iv.t_end)) throw DataError(where + ": t_start must be < t_end");
    log.intervals.push_back(iv);
  }
  // Pedestrian (walk/dont_walk) and vehicle (green/yellow/red) indications share phase
  // numbers, so overlap is checked per phase and channel.
  auto channel = [](SignalState s) { return s == SignalState::Walk || s == SignalState::DontWalk ? 0 : 1; };
  std::sort(log.intervals.begin(), log.intervals.end(), [&](const SignalInterval& a, const SignalInterval& b) {
    return std::tuple(a.phase, channel(a.state), a.t_start) < std::tuple(b.phase, channel(b.state), b.t_start);
  });
  for (std::size_t i = 1; i < log.intervals.size(); ++i) {
    const auto& prev = log.intervals[i - 1];
    const auto& cur = log.intervals[i];
    if (prev.phase == cur.phase && channel(prev.state) == channel(cur.state) && cur.t_start < prev.t_end) {
      throw DataError("signal log: overlapping intervals for phase " + std::to_string(cur.phase));
    }
  }
  return log;
}

SignalLog parse_signal_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open signal log: " + path.string());
  return parse_signal_log(in);
}

void write_signal_log(std::ostream& out, const SignalLog& log) {
  out << kSignalLogHeader << '\n';
  for (const SignalInterval& iv : log.intervals) {
    out << fixed(iv.t_start, 1) << ',' << fixed(iv.t_end, 1) << ',' << iv.phase << ',' << to_string(iv.state)
        << '\n';
  }
}

}  // namespace intersafe

#include "intersafe/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <tuple>

#include "intersafe/errors.hpp"
#include "intersafe/format.hpp"

namespace intersafe {

std::string_view to_string(VolumeMode m) { return m == VolumeMode::Pedestrian ? "pedestrian" : "vehicle"; }

std::optional<VolumeMode> parse_volume_mode(std::string_view s) {
  if (s == "pedestrian") return VolumeMode::Pedestrian;
  if (s == "vehicle") return VolumeMode::Vehicle;
  return std::nullopt;
}

std::size_t VolumeMatrix::at(int phase, int hour) const {
  const auto it = std::find(phases.begin(), phases.end(), phase);
  if (it == phases.end() || hour < 0 || hour >= 24) return 0;
  return counts[static_cast<std::size_t>(it - phases.begin())][static_cast<std::size_t>(hour)];
}

std::size_t VolumeMatrix::total() const {
  std::size_t n = 0;
  for (const auto& row : counts) n = std::accumulate(row.begin(), row.end(), n);
  return n;
}

std::array<std::size_t, 24> VolumeMatrix::hourly_totals() const {
  std::array<std::size_t, 24> out{};
  for (const auto& row : counts) {
    for (std::size_t h = 0; h < 24; ++h) out[h] += row[h];
  }
  return out;
}

bool counts_toward_volume(const TrajectoryInfo& info, VolumeMode mode) {
  if (!info.in_region) return false;
  if (mode == VolumeMode::Pedestrian) return info.cls == ObjectClass::Pedestrian;
  return is_vehicle(info.cls) && info.movement.has_value();
}

namespace {

std::optional<int> hour_of(double t) {
  if (t < 0.0 || t >= 24.0 * kHour) return std::nullopt;
  return static_cast<int>(std::floor(t / kHour));
}

}  // namespace

VolumeMatrix volume_matrix(const std::vector<Trajectory>& trajs, const TrajectoryIndex& index, VolumeMode mode) {
  VolumeMatrix m;
  m.mode = mode;
  m.phases = mode == VolumeMode::Pedestrian ? std::vector<int>{0, 2, 4, 6, 8} : std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8};
  m.counts.assign(m.phases.size(), {});
  for (const Trajectory& tr : trajs) {
    const auto it = index.find(tr.object_id);
    if (it == index.end() || !counts_toward_volume(it->second, mode)) continue;
    const auto hour = hour_of(tr.mid_time());
    if (!hour) continue;
    const auto row = std::find(m.phases.begin(), m.phases.end(), it->second.phase.value);
    if (row == m.phases.end()) continue;
    ++m.counts[static_cast<std::size_t>(row - m.phases.begin())][static_cast<std::size_t>(*hour)];
  }
  return m;
}

std::string_view to_string(TimeBucket b) {
  switch (b) {
    case TimeBucket::EarlyMorning: return "Early Morning";
    case TimeBucket::LateMorning: return "Late Morning";
    case TimeBucket::EarlyAfternoon: return "Early Afternoon";
    case TimeBucket::LateAfternoon: return "Late Afternoon";
    case TimeBucket::Evening: return "Evening";
    case TimeBucket::Night: return "Night";
  }
  return "";
}

std::optional<TimeBucket> bucket_of(double t) {
  if (t < 8.0 * kHour || t >= 20.0 * kHour) return std::nullopt;
  return kAllBuckets[static_cast<std::size_t>((t - 8.0 * kHour) / (2.0 * kHour))];
}

std::array<double, 24> hourly_counts(const std::vector<ConflictEvent>& events) {
  std::array<double, 24> out{};
  for (const ConflictEvent& e : events) {
    if (const auto h = hour_of(e.t)) out[static_cast<std::size_t>(*h)] += 1.0;
  }
  return out;
}

std::vector<AggregateSeries> aggregate_conflicts(const std::vector<DayCounts>& days,
                                                 const std::vector<std::string>& expected_groups,
                                                 std::vector<std::string>* warnings, int first_hour, int last_hour) {
  std::map<std::string, std::vector<const DayCounts*>> groups;
  for (const DayCounts& d : days) groups[d.group].push_back(&d);
  for (const std::string& g : expected_groups) {
    if (!groups.contains(g) && warnings) warnings->push_back("group '" + g + "' has no days; omitted");
  }
  std::vector<AggregateSeries> out;
  for (const auto& [name, members] : groups) {
    AggregateSeries s;
    s.group = name;
    s.days = members.size();
    for (int h = first_hour; h <= last_hour; ++h) {
      std::vector<double> xs;
      for (const DayCounts* d : members) xs.push_back(d->hourly[static_cast<std::size_t>(h)]);
      s.points.push_back({h, mean_confidence(xs)});
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::size_t SpatialHistogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), overflow);
}

SpatialHistogram spatial_histogram(const std::vector<Vec2>& points, const MeshGrid& mesh) {
  SpatialHistogram h;
  h.mesh = mesh;
  h.counts.assign(mesh.cell_count(), 0);
  for (Vec2 p : points) {
    if (const auto c = mesh.cell_of(p)) ++h.counts[*c];
    else ++h.overflow;
  }
  return h;
}

std::vector<Vec2> event_locations(const std::vector<ConflictEvent>& events) {
  std::vector<Vec2> out;
  out.reserve(events.size());
  for (const ConflictEvent& e : events) out.push_back(e.location);
  return out;
}

double KdeSurface::integral() const {
  const double area = mesh.cell_size * mesh.cell_size;
  return std::accumulate(density.begin(), density.end(), 0.0) * area;
}

std::pair<double, double> scott_bandwidth(const std::vector<Vec2>& points, double fallback) {
  const double n = static_cast<double>(points.size());
  auto sd = [&](auto coord) {
    if (points.size() < 2) return 0.0;
    double mean = 0.0;
    for (Vec2 p : points) mean += coord(p);
    mean /= n;
    double ss = 0.0;
    for (Vec2 p : points) ss += (coord(p) - mean) * (coord(p) - mean);
    return std::sqrt(ss / (n - 1.0));
  };
  const double factor = std::pow(n, -1.0 / 6.0);
  double bx = sd([](Vec2 p) { return p.x; }) * factor;
  double by = sd([](Vec2 p) { return p.y; }) * factor;
  if (!(bx > 0.0)) bx = fallback;
  if (!(by > 0.0)) by = fallback;
  return {bx, by};
}

KdeSurface spatial_kde(const std::vector<Vec2>& points, const MeshGrid& mesh, std::optional<double> bandwidth) {
  if (points.empty()) throw ComputationError("KDE needs at least one event");
  KdeSurface k;
  k.mesh = mesh;
  if (bandwidth) {
    if (!(*bandwidth > 0.0)) throw ConfigError("KDE bandwidth must be > 0");
    k.bandwidth_x = k.bandwidth_y = *bandwidth;
  } else {
    std::tie(k.bandwidth_x, k.bandwidth_y) = scott_bandwidth(points, mesh.cell_size);
  }
  const double norm =
      1.0 / (2.0 * std::numbers::pi * k.bandwidth_x * k.bandwidth_y * static_cast<double>(points.size()));
  k.density.assign(mesh.cell_count(), 0.0);
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    const Vec2 q = mesh.cell_center(c);
    double sum = 0.0;
    for (Vec2 p : points) {
      const double zx = (q.x - p.x) / k.bandwidth_x;
      const double zy = (q.y - p.y) / k.bandwidth_y;
      sum += std::exp(-0.5 * (zx * zx + zy * zy));
    }
    k.density[c] = sum * norm;
  }
  return k;
}

MeshGrid padded_mesh(const MeshGrid& mesh, double margin) {
  const int pad = static_cast<int>(std::ceil(margin / mesh.cell_size));
  MeshGrid m = mesh;
  m.origin = mesh.origin - Vec2{pad * mesh.cell_size, pad * mesh.cell_size};
  m.n_cols += 2 * pad;
  m.n_rows += 2 * pad;
  return m;
}

std::size_t pregame_volume(const std::vector<Trajectory>& trajs, const TrajectoryIndex& index, double game_start,
                           VolumeMode mode, double window) {
  std::size_t n = 0;
  for (const Trajectory& tr : trajs) {
    const auto it = index.find(tr.object_id);
    if (it == index.end() || !counts_toward_volume(it->second, mode)) continue;
    const double t = tr.mid_time();
    if (t >= game_start - window && t < game_start) ++n;
  }
  return n;
}

CorrelationResult correlate_volume_win_prob(const std::vector<GameVolume>& games, const StatsParams& params,
                                            bool use_home_probability) {
  if (games.size() < 3) throw ComputationError("correlation needs at least 3 games");
  std::vector<double> probs;
  std::vector<double> volumes;
  for (const GameVolume& g : games) {
    probs.push_back(use_home_probability ? g.game.home_win_prob : g.game.away_win_prob);
    volumes.push_back(g.volume);
  }
  const auto probs_n = min_max_normalize(probs);
  const auto volumes_n = min_max_normalize(volumes);

  CorrelationResult res;
  res.r = pearson_r(probs_n, volumes_n);
  res.p = p_value(probs_n, volumes_n, params);
  res.method = params.p_method;
  res.home_probability = use_home_probability;
  for (std::size_t i = 0; i < games.size(); ++i) {
    res.points.push_back({games[i].game.matchup, games[i].game.date, probs[i], volumes[i], probs_n[i], volumes_n[i]});
  }
  std::sort(res.points.begin(), res.points.end(), [](const CorrelationPoint& a, const CorrelationPoint& b) {
    return std::tie(a.win_prob_norm, a.date) < std::tie(b.win_prob_norm, b.date);
  });
  return res;
}

std::string volume_csv(const VolumeMatrix& m) {
  std::ostringstream out;
  out << "phase";
  for (int h = 0; h < 24; ++h) out << ',' << (h < 10 ? "0" : "") << h << ":00";
  out << '\n';
  for (std::size_t r = 0; r < m.phases.size(); ++r) {
    out << m.phases[r];
    for (std::size_t c : m.counts[r]) out << ',' << c;
    out << '\n';
  }
  return out.str();
}

std::string histogram_csv(const SpatialHistogram& h) {
  std::ostringstream out;
  out << "col,row,x,y,count\n";
  for (std::size_t c = 0; c < h.counts.size(); ++c) {
    const Vec2 p = h.mesh.cell_center(c);
    out << h.mesh.col_of(c) << ',' << h.mesh.row_of(c) << ',' << fixed(p.x, 3) << ',' << fixed(p.y, 3) << ','
        << h.counts[c] << '\n';
  }
  out << "overflow,,,," << h.overflow << '\n';
  return out.str();
}

std::string kde_csv(const KdeSurface& k) {
  std::ostringstream out;
  out << "col,row,x,y,density\n";
  for (std::size_t c = 0; c < k.density.size(); ++c) {
    const Vec2 p = k.mesh.cell_center(c);
    out << k.mesh.col_of(c) << ',' << k.mesh.row_of(c) << ',' << fixed(p.x, 3) << ',' << fixed(p.y, 3) << ','
        << fixed(k.density[c], 9) << '\n';
  }
  return out.str();
}

std::string aggregate_csv(const std::vector<AggregateSeries>& series) {
  std::ostringstream out;
  out << "group,days,hour,mean,low,high\n";
  for (const AggregateSeries& s : series) {
    for (const AggregatePoint& p : s.points) {
      out << s.group << ',' << s.days << ',' << p.hour << ',' << fixed(p.band.mean, 3) << ','
          << fixed(p.band.low, 3) << ',' << fixed(p.band.high, 3) << '\n';
    }
  }
  return out.str();
}

std::string correlation_csv(const CorrelationResult& c) {
  std::ostringstream out;
  out << "matchup,date," << (c.home_probability ? "home" : "away")
      << "_win_prob,volume,win_prob_norm,volume_norm\n";
  for (const CorrelationPoint& p : c.points) {
    out << p.matchup << ',' << p.date << ',' << fixed(p.win_prob, 3) << ',' << fixed(p.volume, 3) << ','
        << fixed(p.win_prob_norm, 6) << ',' << fixed(p.volume_norm, 6) << '\n';
  }
  return out.str();
}

}  // namespace intersafe

#include "intersafe/pet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "intersafe/errors.hpp"
#include "intersafe/parallel.hpp"

namespace intersafe {

std::optional<std::size_t> MeshGrid::cell_of(Vec2 p) const {
  const double gx = (p.x - origin.x) / cell_size;
  const double gy = (p.y - origin.y) / cell_size;
  if (gx < 0.0 || gy < 0.0 || gx > n_cols || gy > n_rows) return std::nullopt;
  const int col = std::min(static_cast<int>(std::floor(gx)), n_cols - 1);
  const int row = std::min(static_cast<int>(std::floor(gy)), n_rows - 1);
  return index(col, row);
}

Vec2 MeshGrid::cell_center(std::size_t idx) const {
  return {origin.x + (col_of(idx) + 0.5) * cell_size, origin.y + (row_of(idx) + 0.5) * cell_size};
}

MeshGrid build_mesh(const Box& box, double cell_size) {
  if (!(cell_size > 0.0)) throw ConfigError("mesh cell size must be > 0");
  MeshGrid m;
  m.origin = box.min;
  m.cell_size = cell_size;
  // Relative slack keeps exact multiples (30 m / 1 m) from gaining a spurious column.
  m.n_cols = std::max(1, static_cast<int>(std::ceil(box.width() / cell_size - 1e-9)));
  m.n_rows = std::max(1, static_cast<int>(std::ceil(box.height() / cell_size - 1e-9)));
  return m;
}

MeshGrid build_mesh(const IntersectionConfig& cfg) { return build_mesh(cfg.analysis_region.bounds(), cfg.mesh_cell_size); }

std::size_t TransitTable::total() const {
  std::size_t n = 0;
  for (const auto& c : cells) n += c.size();
  return n;
}

namespace {

struct Visit {
  std::size_t cell;
  double t0;
  double t1;
};

// Liang-Barsky clip of p0 + u*d, u in [0,1], against [0,w]x[0,h].
bool clip(Vec2 p0, Vec2 d, double w, double h, double& u0, double& u1) {
  u0 = 0.0;
  u1 = 1.0;
  const double p[4] = {-d.x, d.x, -d.y, d.y};
  const double q[4] = {p0.x, w - p0.x, p0.y, h - p0.y};
  for (int k = 0; k < 4; ++k) {
    if (p[k] == 0.0) {
      if (q[k] < 0.0) return false;
      continue;
    }
    const double r = q[k] / p[k];
    if (p[k] < 0.0) u0 = std::max(u0, r);
    else u1 = std::min(u1, r);
  }
  return u0 <= u1;
}

int start_index(double g, double dir, int n) {
  int c = static_cast<int>(std::floor(g));
  // On a grid line and moving toward lower indices: the segment lives in the lower cell.
  if (dir < 0.0 && g == std::floor(g)) --c;
  return std::clamp(c, 0, n - 1);
}

// Grid traversal (Amanatides-Woo) of one segment, emitting time intervals per cell.
void sweep_segment(const MeshGrid& mesh, Vec2 a, Vec2 b, double ta, double tb, std::vector<Visit>& out) {
  const Vec2 g0 = (a - mesh.origin) / mesh.cell_size;
  const Vec2 g1 = (b - mesh.origin) / mesh.cell_size;
  const Vec2 d = g1 - g0;
  const double dur = tb - ta;

  if (d.x == 0.0 && d.y == 0.0) {
    if (auto c = mesh.cell_of(a)) out.push_back({*c, ta, tb});
    return;
  }
  double u0 = 0.0;
  double u1 = 1.0;
  if (!clip(g0, d, mesh.n_cols, mesh.n_rows, u0, u1)) return;

  const Vec2 gs = g0 + d * u0;
  int col = start_index(gs.x, d.x, mesh.n_cols);
  int row = start_index(gs.y, d.y, mesh.n_rows);
  const int step_x = d.x > 0.0 ? 1 : (d.x < 0.0 ? -1 : 0);
  const int step_y = d.y > 0.0 ? 1 : (d.y < 0.0 ? -1 : 0);
  auto next_boundary = [](int cell, int step, double g0c, double dc) {
    if (step == 0) return std::numeric_limits<double>::infinity();
    const double edge = step > 0 ? cell + 1.0 : static_cast<double>(cell);
    return (edge - g0c) / dc;
  };
  double u_next_x = next_boundary(col, step_x, g0.x, d.x);
  double u_next_y = next_boundary(row, step_y, g0.y, d.y);
  const double du_x = step_x != 0 ? 1.0 / std::abs(d.x) : std::numeric_limits<double>::infinity();
  const double du_y = step_y != 0 ? 1.0 / std::abs(d.y) : std::numeric_limits<double>::infinity();

  double u = u0;
  while (true) {
    const double u_exit = std::min({u_next_x, u_next_y, u1});
    out.push_back({mesh.index(col, row), ta + u * dur, ta + u_exit * dur});
    if (u_exit >= u1) break;
    const bool cross_x = u_next_x <= u_exit;
    const bool cross_y = u_next_y <= u_exit;
    if (cross_x) {
      col += step_x;
      u_next_x += du_x;
    }
    if (cross_y) {
      row += step_y;
      u_next_y += du_y;
    }
    if (col < 0 || col >= mesh.n_cols || row < 0 || row >= mesh.n_rows) break;
    u = u_exit;
  }
}

}  // namespace

std::vector<CellTransit> trajectory_transits(const Trajectory& traj, const MeshGrid& mesh) {
  std::vector<Visit> visits;
  const auto& pts = traj.points;
  if (pts.size() == 1) {
    if (auto c = mesh.cell_of(pts[0].pos)) visits.push_back({*c, pts[0].t, pts[0].t});
  }
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    sweep_segment(mesh, pts[k].pos, pts[k + 1].pos, pts[k].t, pts[k + 1].t, visits);
  }

  std::vector<CellTransit> out;
  // Merge against the most recent transit of the same cell, which is the previous one
  // unless the path briefly left and came back.
  std::map<std::size_t, std::size_t> last_of_cell;
  for (const Visit& v : visits) {
    auto it = last_of_cell.find(v.cell);
    if (it != last_of_cell.end() && v.t0 - out[it->second].t_exit < kFramePeriod) {
      out[it->second].t_exit = std::max(out[it->second].t_exit, v.t1);
      continue;
    }
    last_of_cell[v.cell] = out.size();
    out.push_back(CellTransit{v.cell, traj.object_id, traj.cls, v.t0, v.t1});
  }
  return out;
}

TransitTable extract_transits(const std::vector<Trajectory>& trajs, const MeshGrid& mesh, unsigned threads) {
  std::vector<std::vector<CellTransit>> per_traj(trajs.size());
  parallel_for(trajs.size(), threads, [&](std::size_t i) { per_traj[i] = trajectory_transits(trajs[i], mesh); });

  TransitTable table;
  table.mesh = mesh;
  table.cells.resize(mesh.cell_count());
  for (auto& list : per_traj) {
    for (auto& tr : list) table.cells[tr.cell].push_back(std::move(tr));
  }
  for (auto& cell : table.cells) {
    std::sort(cell.begin(), cell.end(), [](const CellTransit& a, const CellTransit& b) {
      return std::tie(a.t_enter, a.object_id, a.t_exit) < std::tie(b.t_enter, b.object_id, b.t_exit);
    });
  }
  return table;
}

std::vector<PetRecord> pet_records(const TransitTable& table, const PetParams& params) {
  std::vector<PetRecord> out;
  for (const auto& cell : table.cells) {
    for (std::size_t k = 0; k + 1 < cell.size(); ++k) {
      const CellTransit& lead = cell[k];
      const CellTransit& follow = cell[k + 1];
      if (lead.object_id == follow.object_id) continue;
      if (!conflict_kind(lead.cls, follow.cls)) continue;
      const double raw = follow.t_enter - lead.t_exit;
      const double pet = std::max(0.0, raw);
      if (pet > params.pet_window) continue;
      out.push_back(PetRecord{lead.cell, lead.object_id, lead.cls, follow.object_id, follow.cls, lead.t_exit,
                              follow.t_enter, pet, raw < 0.0});
    }
  }
  return out;
}

std::vector<ConflictEvent> detect_pet_conflicts(const TransitTable& table, const PetParams& params) {
  std::vector<PetRecord> records = pet_records(table, params);

  auto pair_key = [](const PetRecord& r) {
    return r.leader < r.follower ? std::pair(r.leader, r.follower) : std::pair(r.follower, r.leader);
  };
  auto window_start = [](const PetRecord& r) { return std::min(r.leader_exit, r.follower_enter); };
  auto window_end = [](const PetRecord& r) { return std::max(r.leader_exit, r.follower_enter); };

  std::sort(records.begin(), records.end(), [&](const PetRecord& x, const PetRecord& y) {
    return std::tuple(pair_key(x), window_start(x), x.cell) < std::tuple(pair_key(y), window_start(y), y.cell);
  });

  std::vector<ConflictEvent> events;
  std::size_t i = 0;
  while (i < records.size()) {
    const auto key = pair_key(records[i]);
    double end = window_end(records[i]);
    std::size_t best = i;
    std::size_t j = i + 1;
    while (j < records.size() && pair_key(records[j]) == key && window_start(records[j]) <= end + kFramePeriod) {
      end = std::max(end, window_end(records[j]));
      const PetRecord& r = records[j];
      const PetRecord& b = records[best];
      if (std::tie(r.pet, r.follower_enter, r.cell) < std::tie(b.pet, b.follower_enter, b.cell)) best = j;
      ++j;
    }
    const PetRecord& r = records[best];
    const bool leader_is_a = r.leader < r.follower;
    ConflictEvent e;
    e.kind = *conflict_kind(r.leader_cls, r.follower_cls);
    e.metric = Metric::PET;
    e.value = r.pet;
    e.t = r.follower_enter;
    e.location = table.mesh.cell_center(r.cell);
    e.id_a = leader_is_a ? r.leader : r.follower;
    e.class_a = leader_is_a ? r.leader_cls : r.follower_cls;
    e.id_b = leader_is_a ? r.follower : r.leader;
    e.class_b = leader_is_a ? r.follower_cls : r.leader_cls;
    e.severe = r.pet <= params.pet_severe;
    events.push_back(std::move(e));
    i = j;
  }
  sort_events(events);
  return events;
}

}  // namespace intersafe

#pragma once
/**
 * @file pet.hpp
 * @brief Mesh-grid post-encroachment time.
 *
 * The analysis region's bounding box is divided into square cells. Each trajectory is
 * swept segment by segment through the grid so fast objects cannot skip cells between
 * samples. For every cell, consecutive transits by different objects give
 * PET = t_enter(follower) - t_exit(leader), clamped at 0 when occupancy overlaps.
 */

#include <optional>
#include <string>
#include <vector>

#include "intersafe/config.hpp"
#include "intersafe/event.hpp"
#include "intersafe/types.hpp"

namespace intersafe {

struct MeshGrid {
  Vec2 origin;  // lower-left corner
  double cell_size = 1.0;
  int n_cols = 0;
  int n_rows = 0;

  std::size_t cell_count() const { return static_cast<std::size_t>(n_cols) * static_cast<std::size_t>(n_rows); }
  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(n_cols) + static_cast<std::size_t>(col);
  }
  int col_of(std::size_t idx) const { return static_cast<int>(idx % static_cast<std::size_t>(n_cols)); }
  int row_of(std::size_t idx) const { return static_cast<int>(idx / static_cast<std::size_t>(n_cols)); }

  /// Cell containing p; points on the far edges belong to the last column/row.
  std::optional<std::size_t> cell_of(Vec2 p) const;
  Vec2 cell_center(std::size_t idx) const;
};

/// Grid of cfg.mesh_cell_size covering the bounding box of the analysis region.
MeshGrid build_mesh(const IntersectionConfig& cfg);
MeshGrid build_mesh(const Box& box, double cell_size);

struct CellTransit {
  std::size_t cell = 0;
  std::string object_id;
  ObjectClass cls = ObjectClass::Car;
  double t_enter = 0.0;
  double t_exit = 0.0;
};

/// Per-cell transit lists, each sorted by (t_enter, object_id).
struct TransitTable {
  MeshGrid mesh;
  std::vector<std::vector<CellTransit>> cells;

  std::size_t total() const;
};

/// Transits of one object, in path order. Visits to one cell separated by less than one
/// frame are merged.
std::vector<CellTransit> trajectory_transits(const Trajectory& traj, const MeshGrid& mesh);

TransitTable extract_transits(const std::vector<Trajectory>& trajs, const MeshGrid& mesh, unsigned threads = 0);

/// Per-cell PET record before episode collapsing.
struct PetRecord {
  std::size_t cell = 0;
  std::string leader;
  ObjectClass leader_cls = ObjectClass::Car;
  std::string follower;
  ObjectClass follower_cls = ObjectClass::Car;
  double leader_exit = 0.0;
  double follower_enter = 0.0;
  double pet = 0.0;
  bool overlap = false;
};

/// Every consecutive-transit record with 0 <= PET <= pet_window, pedestrian pairs dropped.
std::vector<PetRecord> pet_records(const TransitTable& table, const PetParams& params);

/// Records of one object pair whose encroachment windows chain together (each starts no
/// later than one frame after the running window end) form an episode; each episode
/// becomes one event at its minimum-PET cell. Output sorted by (t, id_a, id_b).
std::vector<ConflictEvent> detect_pet_conflicts(const TransitTable& table, const PetParams& params);

}  // namespace intersafe

#pragma once
/**
 * @file svg.hpp
 * @brief Minimal SVG renderings of volume heatmaps, KDE surfaces and aggregate series.
 */

#include <optional>
#include <string>
#include <vector>

#include "intersafe/analytics.hpp"

namespace intersafe {

struct GameMarkers {
  double start = 0.0;
  double end = 0.0;
};

/// Phase-by-hour heatmap. Game start/end markers are drawn when they fall inside
/// [0, data_end); the end marker is dropped when the game outlasts the data.
std::string volume_heatmap_svg(const VolumeMatrix& m, const std::optional<GameMarkers>& game, double data_end);

std::string kde_svg(const KdeSurface& k);

std::string aggregate_svg(const std::vector<AggregateSeries>& series);

}  // namespace intersafe

#include <gtest/gtest.h>

#include <cmath>

#include "builders.hpp"
#include "intersafe/analytics.hpp"
#include "intersafe/errors.hpp"
#include "intersafe/pet.hpp"
#include "intersafe/stats.hpp"
#include "intersafe/svg.hpp"

using namespace intersafe;
using intersafe::testing::path_track;

namespace {

const IntersectionConfig& cfg() {
  static const IntersectionConfig c = default_intersection();
  return c;
}

Trajectory north_walker(std::string id, double t0) {
  return path_track(std::move(id), ObjectClass::Pedestrian, {{-9, 12.5}, {9, 12.5}}, 1.4, t0);
}

GameRecord game(const std::string& date, double home, double start = 12 * kHour) {
  GameRecord g;
  g.matchup = "Away @ Home";
  g.date = date;
  g.start_time = start;
  g.home_win_prob = home;
  return normalize_game(g);
}

}  // namespace

TEST(Volume, SingleCrossingLandsInItsHour) {
  const std::vector<Trajectory> trajs = {north_walker("p", 9.5 * kHour)};
  const auto index = classify_trajectories(trajs, cfg(), nullptr, ClassifyParams{});
  const VolumeMatrix m = volume_matrix(trajs, index, VolumeMode::Pedestrian);
  EXPECT_EQ(m.phases, (std::vector<int>{0, 2, 4, 6, 8}));
  EXPECT_EQ(m.at(4, 9), 1u);
  EXPECT_EQ(m.total(), 1u);
}

TEST(Volume, EmptyInputIsAllZero) {
  const VolumeMatrix m = volume_matrix({}, {}, VolumeMode::Vehicle);
  EXPECT_EQ(m.phases.size(), 8u);
  EXPECT_EQ(m.total(), 0u);
}

TEST(Volume, VehiclesByPhase) {
  const std::vector<Trajectory> trajs = {
      path_track("v1", ObjectClass::Car, {{20, 2}, {-20, 2}}, 8.0, 10 * kHour),
      path_track("v2", ObjectClass::Car, {{-2, 20}, {-2, 2}, {-20, 2}}, 6.0, 10 * kHour),
      path_track("v3", ObjectClass::Car, {{-2, 20}, {-2, 10}}, 6.0, 10 * kHour),  // clipped
  };
  const auto index = classify_trajectories(trajs, cfg(), nullptr, ClassifyParams{});
  const VolumeMatrix m = volume_matrix(trajs, index, VolumeMode::Vehicle);
  EXPECT_EQ(m.at(8, 10), 1u);
  EXPECT_EQ(m.at(6, 10), 1u);
  EXPECT_EQ(m.total(), 2u);
}

TEST(Volume, CsvHasHourColumns) {
  const std::string csv = volume_csv(volume_matrix({}, {}, VolumeMode::Pedestrian));
  EXPECT_EQ(csv.substr(0, csv.find('\n')).substr(0, 18), "phase,00:00,01:00,");
  EXPECT_NE(csv.find("\n4,0,0,"), std::string::npos);
}

TEST(Buckets, Boundaries) {
  EXPECT_EQ(bucket_of(8 * kHour), TimeBucket::EarlyMorning);
  EXPECT_EQ(bucket_of(10 * kHour), TimeBucket::LateMorning);
  EXPECT_EQ(bucket_of(10 * kHour - 1), TimeBucket::EarlyMorning);
  EXPECT_FALSE(bucket_of(21 * kHour));
  EXPECT_FALSE(bucket_of(7.5 * kHour));
}

TEST(Aggregate, MeanOfTwoDays) {
  DayCounts a{"2022-10-01", "Saturday-gameday", {}};
  DayCounts b{"2022-10-08", "Saturday-gameday", {}};
  a.hourly[10] = 4;
  b.hourly[10] = 6;
  const auto series = aggregate_conflicts({a, b}, {"Saturday-gameday"});
  ASSERT_EQ(series.size(), 1u);
  EXPECT_EQ(series[0].days, 2u);
  EXPECT_EQ(series[0].points.front().hour, 7);
  EXPECT_EQ(series[0].points.back().hour, 17);
  EXPECT_DOUBLE_EQ(series[0].points[3].band.mean, 5.0);
}

TEST(Aggregate, ThreeDayBand) {
  std::vector<DayCounts> days;
  for (double c : {3.0, 5.0, 7.0}) {
    DayCounts d{"d" + std::to_string(static_cast<int>(c)), "Saturday-non-gameday", {}};
    d.hourly[9] = c;
    days.push_back(d);
  }
  const auto series = aggregate_conflicts(days, {});
  const MeanBand b = series[0].points[2].band;
  EXPECT_DOUBLE_EQ(b.mean, 5.0);
  EXPECT_NEAR(b.high - 5.0, 4.303 * 2.0 / std::sqrt(3.0), 1e-3);
}

TEST(Aggregate, MissingGroupWarns) {
  DayCounts a{"2022-10-01", "Saturday-gameday", {}};
  std::vector<std::string> warnings;
  const auto series = aggregate_conflicts({a}, {"Saturday-gameday", "Sunday-gameday"}, &warnings);
  EXPECT_EQ(series.size(), 1u);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("Sunday-gameday"), std::string::npos);
  EXPECT_EQ(series[0].points[0].band.low, series[0].points[0].band.mean);
}

TEST(Histogram, CountsAndOverflow) {
  const MeshGrid mesh = build_mesh(cfg());
  const auto h = spatial_histogram({{0.5, 0.5}, {0.6, 0.4}, {100, 100}}, mesh);
  EXPECT_EQ(h.overflow, 1u);
  EXPECT_EQ(h.counts[*mesh.cell_of({0.5, 0.5})], 2u);
  EXPECT_EQ(h.total(), 3u);
  const std::string csv = histogram_csv(h);
  EXPECT_NE(csv.find("overflow,,,,1\n"), std::string::npos);
}

TEST(Kde, SingleEventPeaksAtItsCell) {
  const MeshGrid mesh = build_mesh(cfg());
  const KdeSurface k = spatial_kde({{3.5, -4.5}}, mesh);
  const auto peak = std::max_element(k.density.begin(), k.density.end()) - k.density.begin();
  EXPECT_EQ(static_cast<std::size_t>(peak), *mesh.cell_of({3.5, -4.5}));
}

TEST(Kde, TwoDistantEventsGiveEqualPeaks) {
  const MeshGrid mesh = build_mesh(cfg());
  const KdeSurface k = spatial_kde({{-10.5, 0.5}, {10.5, 0.5}}, mesh, 1.0);
  const double left = k.density[*mesh.cell_of({-10.5, 0.5})];
  const double right = k.density[*mesh.cell_of({10.5, 0.5})];
  EXPECT_NEAR(left, right, 1e-12 * left);
  EXPECT_GT(left, 10 * k.density[*mesh.cell_of({0.5, 0.5})]);
}

TEST(Kde, IntegratesToOne) {
  std::vector<Vec2> pts;
  for (int i = 0; i < 40; ++i) pts.push_back({-8.0 + 0.4 * i, 3.0 * std::sin(i)});
  const KdeSurface k = spatial_kde(pts, padded_mesh(build_mesh(cfg()), 20.0));
  EXPECT_NEAR(k.integral(), 1.0, 0.02);
}

TEST(Kde, ScottBandwidthFallsBackOnZeroSpread) {
  const auto [bx, by] = scott_bandwidth({{1, 2}, {3, 2}, {5, 2}}, 1.0);
  EXPECT_NEAR(bx, 2.0 * std::pow(3.0, -1.0 / 6.0), 1e-12);
  EXPECT_EQ(by, 1.0);
}

TEST(Kde, EmptyInputIsAnError) {
  EXPECT_THROW(spatial_kde({}, build_mesh(cfg())), ComputationError);
}

TEST(Pregame, WindowIsHalfOpen) {
  // Eleven samples one second apart, median exactly at noon.
  Trajectory noon{"noon", ObjectClass::Pedestrian, {}};
  for (int i = 0; i <= 10; ++i) {
    noon.points.push_back({12 * kHour - 5 + i, {-9.0 + 1.8 * i, 12.5}, Vec2{1.8, 0}});
  }
  const std::vector<Trajectory> trajs = {north_walker("early", 6.5 * kHour), noon, north_walker("dawn", 5.0 * kHour)};
  const auto index = classify_trajectories(trajs, cfg(), nullptr, ClassifyParams{});
  EXPECT_DOUBLE_EQ(trajs[1].mid_time(), 12 * kHour);
  EXPECT_EQ(pregame_volume(trajs, index, 12 * kHour, VolumeMode::Pedestrian), 1u);
}

TEST(Pregame, CountsEveryCrossingInWindow) {
  std::vector<Trajectory> trajs;
  for (int i = 0; i < 17; ++i) trajs.push_back(north_walker("p" + std::to_string(i), 7 * kHour + 600.0 * i));
  const auto index = classify_trajectories(trajs, cfg(), nullptr, ClassifyParams{});
  EXPECT_EQ(pregame_volume(trajs, index, 12 * kHour, VolumeMode::Pedestrian), 17u);
}

TEST(Correlation, ProportionalToAwayProbability) {
  std::vector<GameVolume> gv;
  const std::vector<double> home = {0.25, 0.85, 0.55, 0.1, 0.7, 0.4};
  for (std::size_t i = 0; i < home.size(); ++i) {
    gv.push_back({game("2022-10-0" + std::to_string(i + 1), home[i]), 1000.0 * (1.0 - home[i])});
  }
  const auto away = correlate_volume_win_prob(gv, StatsParams{});
  EXPECT_NEAR(away.r, 1.0, 1e-12);
  EXPECT_EQ(away.points.size(), 6u);
  EXPECT_LE(away.points.front().win_prob_norm, away.points.back().win_prob_norm);
  const auto homes = correlate_volume_win_prob(gv, StatsParams{}, true);
  EXPECT_NEAR(homes.r, -1.0, 1e-12);
  StatsParams perm;
  perm.p_method = PValueMethod::Permutation;
  EXPECT_EQ(correlate_volume_win_prob(gv, perm).p, 2.0 / 720.0);
}

TEST(Correlation, NeedsThreeGames) {
  std::vector<GameVolume> gv = {{game("2022-10-01", 0.2), 1}, {game("2022-10-02", 0.4), 2}};
  EXPECT_THROW(correlate_volume_win_prob(gv, StatsParams{}), ComputationError);
}

TEST(Svg, GameMarkersRespectDataEnd) {
  const VolumeMatrix m = volume_matrix({}, {}, VolumeMode::Pedestrian);
  const GameMarkers g{12 * kHour, 15 * kHour + 22 * 60};
  const std::string both = volume_heatmap_svg(m, g, 24 * kHour);
  const std::string start_only = volume_heatmap_svg(m, g, 14 * kHour);
  EXPECT_NE(both.find(">end<"), std::string::npos);
  EXPECT_NE(start_only.find(">start<"), std::string::npos);
  EXPECT_EQ(start_only.find(">end<"), std::string::npos);
  EXPECT_EQ(volume_heatmap_svg(m, std::nullopt, 24 * kHour).find(">start<"), std::string::npos);
}

#include <gtest/gtest.h>

#include <sstream>

#include "builders.hpp"
#include "intersafe/classify.hpp"
#include "intersafe/conflict.hpp"

using namespace intersafe;
using intersafe::testing::path_track;

namespace {

const IntersectionConfig& cfg() {
  static const IntersectionConfig c = default_intersection();
  return c;
}

MovementCode mv(const char* s) { return *MovementCode::parse(s); }

SignalLog log_of(const std::string& body) {
  std::istringstream in(std::string(kSignalLogHeader) + "\n" + body);
  return parse_signal_log(in);
}

ConflictEvent p2v(const std::string& ped, const std::string& veh, double t, double value) {
  ConflictEvent e;
  e.kind = ConflictKind::P2V;
  e.metric = Metric::PET;
  e.value = value;
  e.t = t;
  e.id_a = ped;
  e.class_a = ObjectClass::Pedestrian;
  e.id_b = veh;
  e.class_b = ObjectClass::Car;
  return e;
}

}  // namespace

TEST(P2vType, SixPairsMapAndTheRestDoNot) {
  const std::map<std::pair<Turn, CrosswalkRole>, int> table = {
      {{Turn::R, CrosswalkRole::AdjacentParallel}, 1}, {{Turn::R, CrosswalkRole::Near}, 2},
      {{Turn::L, CrosswalkRole::ParallelOpposite}, 3}, {{Turn::L, CrosswalkRole::AdjacentParallel}, 4},
      {{Turn::T, CrosswalkRole::Far}, 5},              {{Turn::T, CrosswalkRole::Near}, 6},
  };
  int mapped = 0;
  for (Turn t : {Turn::L, Turn::T, Turn::R}) {
    for (CrosswalkRole r : kAllRoles) {
      const auto got = p2v_type(t, r);
      const auto it = table.find({t, r});
      if (it == table.end()) {
        EXPECT_FALSE(got);
      } else {
        EXPECT_EQ(got, it->second);
        ++mapped;
      }
    }
  }
  EXPECT_EQ(mapped, 6);
}

TEST(P2vType, Examples) {
  EXPECT_EQ(classify_p2v_type(mv("NBR"), Leg::E, cfg()), 1);
  EXPECT_EQ(classify_p2v_type(mv("WBT"), Leg::W, cfg()), 5);
  EXPECT_FALSE(classify_p2v_type(mv("NBL"), Leg::S, cfg()));
}

TEST(Jaywalk, PhaseZeroWalker) {
  const auto ped = path_track("p", ObjectClass::Pedestrian, {{0, -20}, {0, 20}}, 1.4, 0.0);
  EXPECT_TRUE(flag_jaywalk(ped, Phase{0}, cfg(), nullptr, ClassifyParams{}));
}

TEST(Jaywalk, CrossingDuringWalk) {
  const SignalLog log = log_of("0.0,30.0,2,walk\n30.0,90.0,2,dont_walk\n");
  const auto ped = path_track("p", ObjectClass::Pedestrian, {{12.5, -10}, {12.5, 10}}, 1.4, 1.0);
  const Phase phase = pedestrian_phase(ped, cfg());
  ASSERT_EQ(phase.value, 2);
  EXPECT_FALSE(flag_jaywalk(ped, phase, cfg(), &log, ClassifyParams{}));
}

TEST(Jaywalk, CrossingStartingInDontWalk) {
  const SignalLog log = log_of("0.0,30.0,2,walk\n30.0,90.0,2,dont_walk\n");
  const auto ped = path_track("p", ObjectClass::Pedestrian, {{12.5, -10}, {12.5, 10}}, 1.4, 35.0);
  EXPECT_TRUE(flag_jaywalk(ped, pedestrian_phase(ped, cfg()), cfg(), &log, ClassifyParams{}));
}

TEST(Jaywalk, ShortOverlapWithinGrace) {
  // Crossing ends 0.5 s into dont_walk.
  const SignalLog log = log_of("0.0,30.0,2,walk\n30.0,90.0,2,dont_walk\n");
  const auto ped = path_track("p", ObjectClass::Pedestrian, {{12.5, -10}, {12.5, 10}}, 1.0, 10.5);
  const auto span = crossing_interval(ped, Leg::E, cfg());
  ASSERT_TRUE(span);
  ASSERT_LT(span->second, 31.0);
  EXPECT_FALSE(flag_jaywalk(ped, pedestrian_phase(ped, cfg()), cfg(), &log, ClassifyParams{}));
}

TEST(Jaywalk, WithoutLogOnlyPhaseZeroCounts) {
  const auto ped = path_track("p", ObjectClass::Pedestrian, {{12.5, -10}, {12.5, 10}}, 1.4, 35.0);
  EXPECT_FALSE(flag_jaywalk(ped, pedestrian_phase(ped, cfg()), cfg(), nullptr, ClassifyParams{}));
}

TEST(ClassifyEvents, ThroughVehicleAgainstFarCrosswalk) {
  const SignalLog log = log_of("0.0,30.0,6,walk\n30.0,90.0,6,dont_walk\n");
  const std::vector<Trajectory> trajs = {
      path_track("ped", ObjectClass::Pedestrian, {{-12.5, -10}, {-12.5, 10}}, 1.4, 40.0),
      path_track("veh", ObjectClass::Car, {{20, 2}, {-20, 2}}, 8.0, 45.0),
  };
  const TrajectoryIndex index = classify_trajectories(trajs, cfg(), &log, ClassifyParams{});
  EXPECT_EQ(index.at("veh").movement, mv("WBT"));
  EXPECT_TRUE(index.at("ped").jaywalk);
  std::vector<ConflictEvent> events = {p2v("ped", "veh", 50.0, 1.5)};
  classify_events(events, trajs, index, cfg(), EngineParams{});
  EXPECT_EQ(events[0].movement, mv("WBT"));
  EXPECT_EQ(events[0].p2v_type, 5);
  EXPECT_EQ(events[0].ped_role, CrosswalkRole::Far);
  EXPECT_TRUE(events[0].jaywalk);
  EXPECT_TRUE(events[0].severe);
}

TEST(ClassifyEvents, VehicleEventsCarryNoMovement) {
  const std::vector<Trajectory> trajs = {
      path_track("a", ObjectClass::Car, {{20, 2}, {-20, 2}}, 8.0, 0.0),
      path_track("b", ObjectClass::Car, {{-2, 20}, {-2, -20}}, 8.0, 0.0),
  };
  const TrajectoryIndex index = classify_trajectories(trajs, cfg(), nullptr, ClassifyParams{});
  ConflictEvent e;
  e.metric = Metric::TTC;
  e.value = 2.5;
  e.id_a = "a";
  e.id_b = "b";
  std::vector<ConflictEvent> events{e};
  classify_events(events, trajs, index, cfg(), EngineParams{});
  EXPECT_FALSE(events[0].movement);
  EXPECT_FALSE(events[0].p2v_type);
  EXPECT_FALSE(events[0].severe);
}

TEST(MovementHistogram, CountsDescending) {
  std::vector<ConflictEvent> events(3);
  events[0].movement = mv("WBT");
  events[1].movement = mv("SBR");
  events[2].movement = mv("WBT");
  const auto h = movement_histogram(events);
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h[0].movement, mv("WBT"));
  EXPECT_EQ(h[0].count, 2u);
  EXPECT_EQ(h[1].movement, mv("SBR"));
  EXPECT_EQ(h[1].count, 1u);
}

TEST(MovementHistogram, EmptyInput) { EXPECT_TRUE(movement_histogram({}).empty()); }

TEST(MovementHistogram, TiesBrokenByCode) {
  std::vector<ConflictEvent> events(2);
  events[0].movement = mv("WBT");
  events[1].movement = mv("EBL");
  const auto h = movement_histogram(events);
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h[0].movement.str(), "EBL");
}

TEST(TypeCounts, UntypedGoesToSlotZero) {
  std::vector<ConflictEvent> events = {p2v("p", "v", 0, 1), p2v("p", "w", 0, 1), p2v("q", "v", 0, 1)};
  events[0].p2v_type = 5;
  events[1].p2v_type = 5;
  const auto counts = p2v_type_counts(events);
  EXPECT_EQ(counts[5], 2u);
  EXPECT_EQ(counts[0], 1u);
  const auto jay = jaywalk_p2v(events);
  EXPECT_TRUE(jay.empty());
}

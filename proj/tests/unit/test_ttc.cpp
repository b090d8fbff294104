#include <gtest/gtest.h>

#include "builders.hpp"
#include "intersafe/ttc.hpp"

using namespace intersafe;
using intersafe::testing::line_track;

namespace {

PairState pair(Vec2 pa, Vec2 va, Vec2 pb, Vec2 vb, ObjectClass ca = ObjectClass::Car,
               ObjectClass cb = ObjectClass::Car) {
  return PairState::make("a", {pa, va, ca}, "b", {pb, vb, cb});
}

const TtcParams kParams{};

}  // namespace

TEST(TtcCase1, MoverAtStationaryTarget) {
  const auto r = compute_ttc(pair({0, 0}, {5, 0}, {10, 0}, {0, 0}), kParams);
  EXPECT_EQ(r.case_id, 1);
  EXPECT_DOUBLE_EQ(r.value, 2.0);
}

TEST(TtcCase1, BothStationaryIsInfinite) {
  const auto r = compute_ttc(pair({0, 0}, {0, 0}, {1, 0}, {0, 0}), kParams);
  EXPECT_FALSE(r.finite());
}

TEST(TtcCase1, RayMissesByMoreThanLateralTolerance) {
  EXPECT_FALSE(compute_ttc(pair({0, 0}, {5, 0}, {10, 3}, {0, 0}), kParams).finite());
}

TEST(TtcCase1, TargetBehindMover) {
  EXPECT_FALSE(compute_ttc(pair({0, 0}, {5, 0}, {-10, 0}, {0, 0}), kParams).finite());
}

TEST(TtcCase2, FasterFollower) {
  const auto r = compute_ttc(pair({0, 0}, {15, 0}, {10, 0}, {10, 0}), kParams);
  EXPECT_EQ(r.case_id, 2);
  EXPECT_DOUBLE_EQ(r.value, 2.0);
  // Argument order does not matter.
  EXPECT_DOUBLE_EQ(compute_ttc(pair({10, 0}, {10, 0}, {0, 0}, {15, 0}), kParams).value, 2.0);
}

TEST(TtcCase2, EqualSpeedsAreInfinite) {
  EXPECT_EQ(compute_ttc(pair({0, 0}, {10, 0}, {10, 0}, {10, 0}), kParams).value, kInfinity);
}

TEST(TtcCase2, SlowerFollowerIsInfinite) {
  EXPECT_EQ(compute_ttc(pair({0, 0}, {8, 0}, {10, 0}, {10, 0}), kParams).value, kInfinity);
}

TEST(TtcCase2, HeadOnClosing) {
  const auto r = compute_ttc(pair({0, 0}, {5, 0}, {20, 0}, {-5, 0}), kParams);
  EXPECT_EQ(r.case_id, 2);
  EXPECT_DOUBLE_EQ(r.value, 2.0);
}

TEST(TtcCase2, OffsetLanesAreInfinite) {
  EXPECT_FALSE(compute_ttc(pair({0, 0}, {15, 0}, {10, 3.5}, {10, 0}), kParams).finite());
}

TEST(TtcCase3, PerpendicularArrivalsTogether) {
  const auto r = compute_ttc(pair({-10, 0}, {5, 0}, {0, -10}, {0, 5}), kParams);
  EXPECT_EQ(r.case_id, 3);
  EXPECT_DOUBLE_EQ(r.value, 2.0);
  ASSERT_TRUE(r.conflict_point);
  EXPECT_NEAR(r.conflict_point->x, 0.0, 1e-12);
  EXPECT_NEAR(r.conflict_point->y, 0.0, 1e-12);
}

TEST(TtcCase3, FirstClearsBeforeSecondArrives) {
  // t1 = 1.0 s, clearance 4.5 m / 15 m/s = 0.3 s, t2 = 1.8 s.
  EXPECT_FALSE(compute_ttc(pair({-15, 0}, {15, 0}, {0, -9}, {0, 5}), kParams).finite());
}

TEST(TtcCase3, SecondArrivesWhileFirstOccupies) {
  // t1 = 1.0 s, clearance 0.3 s, t2 = 1.2 s -> TTC = t2.
  const auto r = compute_ttc(pair({-15, 0}, {15, 0}, {0, -6}, {0, 5}), kParams);
  EXPECT_NEAR(r.value, 1.2, 1e-12);
}

TEST(TtcCase3, DivergingIsInfinite) {
  EXPECT_FALSE(compute_ttc(pair({-10, 0}, {-5, 0}, {0, -10}, {0, 5}), kParams).finite());
}

TEST(TtcCase3, BusClearanceIsLonger) {
  // A bus needs 12 m / 15 m/s = 0.8 s to clear, so t2 = 1.6 s still conflicts.
  const auto car = compute_ttc(pair({-15, 0}, {15, 0}, {0, -8}, {0, 5}), kParams);
  const auto bus = compute_ttc(pair({-15, 0}, {15, 0}, {0, -8}, {0, 5}, ObjectClass::Bus), kParams);
  EXPECT_FALSE(car.finite());
  EXPECT_NEAR(bus.value, 1.6, 1e-12);
}

TEST(TtcCases, ApplicabilityByAngle) {
  EXPECT_EQ(applicable_case(pair({0, 0}, {0.1, 0}, {5, 0}, {5, 0}), kParams), 1);
  EXPECT_EQ(applicable_case(pair({0, 0}, {5, 0}, {5, 0}, {5, 0.3}), kParams), 2);
  EXPECT_EQ(applicable_case(pair({0, 0}, {5, 0}, {5, 0}, {0, 5}), kParams), 3);
}

TEST(TtcCandidates, FarVehiclesExcluded) {
  const std::vector<FrameObject> frame = {{0, "a", {{0, 0}, {5, 0}, ObjectClass::Car}},
                                          {1, "b", {{50, 0}, {-5, 0}, ObjectClass::Car}}};
  EXPECT_TRUE(frame_candidates(frame, 0.0, kParams).empty());
}

TEST(TtcCandidates, PedestrianPairsExcluded) {
  const std::vector<FrameObject> frame = {{0, "a", {{0, 0}, {1, 0}, ObjectClass::Pedestrian}},
                                          {1, "b", {{1, 0}, {-1, 0}, ObjectClass::Pedestrian}}};
  EXPECT_TRUE(frame_candidates(frame, 0.0, kParams).empty());
}

TEST(TtcCandidates, ConvergingPairNeedsThreeFrames) {
  CandidateFilter filter(kParams);
  std::size_t emitted = 0;
  for (long f = 0; f < 3; ++f) {
    const double dx = 8.0 - 0.5 * static_cast<double>(f);
    const std::vector<FrameObject> frame = {{0, "veh", {{0, 0}, {5, 0}, ObjectClass::Car}},
                                            {1, "ped", {{dx, 0.2}, {-0.1, 0}, ObjectClass::Pedestrian}}};
    const auto out = filter.advance(f, frame);
    if (f < 2) {
      EXPECT_TRUE(out.empty());
    }
    emitted += out.size();
  }
  EXPECT_EQ(emitted, 1u);
}

TEST(TtcDetect, OneEpisodeOneEventAtMinimum) {
  // Vehicle drives at a standing pedestrian; track ends before contact.
  const auto veh = line_track("veh", ObjectClass::Car, {-20, 0}, {5, 0}, 0.0, 3.5);
  const auto ped = line_track("ped", ObjectClass::Pedestrian, {0, 0}, {0, 0}, 0.0, 3.5);
  const auto events = detect_ttc_conflicts({ped, veh}, kParams);
  ASSERT_EQ(events.size(), 1u);
  const ConflictEvent& e = events[0];
  EXPECT_EQ(e.kind, ConflictKind::P2V);
  EXPECT_EQ(e.metric, Metric::TTC);
  EXPECT_NEAR(e.value, 0.5, 1e-9);
  EXPECT_NEAR(e.t, 3.5, 1e-9);
  EXPECT_TRUE(e.severe);
}

TEST(TtcDetect, SevereThreshold) {
  const auto veh = line_track("veh", ObjectClass::Car, {-20, 0}, {5, 0}, 0.0, 2.3);
  const auto ped = line_track("ped", ObjectClass::Pedestrian, {0, 0}, {0, 0}, 0.0, 2.3);
  const auto events = detect_ttc_conflicts({ped, veh}, kParams);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_NEAR(events[0].value, 1.7, 1e-9);
  EXPECT_TRUE(events[0].severe);
}

TEST(TtcDetect, TwoDisjointEpisodes) {
  auto veh = line_track("veh", ObjectClass::Car, {-20, 0}, {5, 0}, 0.0, 3.0);
  const auto second = line_track("veh", ObjectClass::Car, {-20, 0}, {5, 0}, 33.0, 36.0);
  veh.points.insert(veh.points.end(), second.points.begin(), second.points.end());
  const auto ped = line_track("ped", ObjectClass::Pedestrian, {0, 0}, {0, 0}, 0.0, 36.0);
  const auto events = detect_ttc_conflicts({ped, veh}, kParams);
  ASSERT_EQ(events.size(), 2u);
  EXPECT_NEAR(events[0].t, 3.0, 1e-9);
  EXPECT_NEAR(events[1].t, 36.0, 1e-9);
}

TEST(TtcDetect, ThreadCountDoesNotChangeResult) {
  std::vector<Trajectory> trajs;
  for (int i = 0; i < 12; ++i) {
    const double y = 2.0 * i;
    trajs.push_back(line_track("v" + std::to_string(i), ObjectClass::Car, {-20, y}, {6, 0}, 0.1 * i, 6.0));
    trajs.push_back(line_track("p" + std::to_string(i), ObjectClass::Pedestrian, {0, y + 0.3}, {0, 0}, 0.0, 6.0));
  }
  const auto one = detect_ttc_conflicts(trajs, kParams, 1);
  const auto many = detect_ttc_conflicts(trajs, kParams, 4);
  ASSERT_EQ(one.size(), many.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].id_a, many[i].id_a);
    EXPECT_EQ(one[i].value, many[i].value);
  }
  EXPECT_FALSE(one.empty());
}

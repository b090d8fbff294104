#include <gtest/gtest.h>

#include <set>

#include "builders.hpp"
#include "intersafe/classify.hpp"
#include "intersafe/config.hpp"
#include "intersafe/errors.hpp"
#include "intersafe/geometry.hpp"

using namespace intersafe;
using intersafe::testing::path_track;

namespace {

const IntersectionConfig& cfg() {
  static const IntersectionConfig c = default_intersection();
  return c;
}

MovementCode mv(const char* s) { return *MovementCode::parse(s); }

}  // namespace

TEST(Geometry, BearingIsCompassSense) {
  EXPECT_NEAR(bearing_deg({0, 1}), 0.0, 1e-12);
  EXPECT_NEAR(bearing_deg({1, 0}), 90.0, 1e-12);
  EXPECT_NEAR(bearing_deg({0, -1}), 180.0, 1e-12);
  EXPECT_NEAR(bearing_deg({-1, 0}), 270.0, 1e-12);
}

TEST(Geometry, RotateClockwiseTurnsNorthIntoEast) {
  const Vec2 p = rotate_cw({0, 1}, {0, 0}, 90.0);
  EXPECT_NEAR(p.x, 1.0, 1e-12);
  EXPECT_NEAR(p.y, 0.0, 1e-12);
}

TEST(Geometry, PolygonContainmentAndDilation) {
  const Polygon sq({{0, 0}, {2, 0}, {2, 2}, {0, 2}});
  EXPECT_TRUE(sq.contains({1, 1}));
  EXPECT_FALSE(sq.contains({3, 1}));
  EXPECT_TRUE(sq.contains_dilated({2.5, 1}, 1.0));
  EXPECT_FALSE(sq.contains_dilated({3.5, 1}, 1.0));
  EXPECT_NEAR(std::abs(sq.signed_area()), 4.0, 1e-12);
  EXPECT_TRUE(sq.is_simple());
  EXPECT_FALSE(Polygon({{0, 0}, {2, 2}, {2, 0}, {0, 2}}).is_simple());
}

TEST(Geometry, SegmentDistances) {
  EXPECT_NEAR(point_segment_distance({0, 1}, {-1, 0}, {1, 0}), 1.0, 1e-12);
  EXPECT_NEAR(point_segment_distance({3, 0}, {-1, 0}, {1, 0}), 2.0, 1e-12);
  EXPECT_NEAR(segment_segment_distance({0, 0}, {2, 2}, {0, 2}, {2, 0}), 0.0, 1e-12);
  EXPECT_NEAR(segment_segment_distance({0, 0}, {1, 0}, {0, 3}, {1, 3}), 3.0, 1e-12);
}

TEST(Types, MovementCodesRoundTrip) {
  std::set<std::string> seen;
  for (const MovementCode& m : all_movements()) {
    EXPECT_EQ(MovementCode::parse(m.str()), m);
    seen.insert(m.str());
  }
  EXPECT_EQ(seen.size(), 12u);
  EXPECT_FALSE(MovementCode::parse("NBX"));
  EXPECT_FALSE(MovementCode::parse("XBT"));
}

TEST(Types, ClockFormatting) {
  EXPECT_EQ(parse_clock("09:30"), 9.5 * kHour);
  EXPECT_EQ(format_clock(15 * kHour + 22 * 60), "15:22");
  EXPECT_FALSE(parse_clock("25:00"));
}

TEST(Config, DefaultLayoutValidates) { EXPECT_NO_THROW(cfg().validate()); }

TEST(Config, ZeroCellSizeRejected) {
  IntersectionConfig c = cfg();
  c.mesh_cell_size = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  const IntersectionConfig back = intersection_from_json(to_json(cfg()));
  EXPECT_EQ(to_json(back), to_json(cfg()));
}

TEST(Config, UnknownParamKeyRejected) {
  EXPECT_THROW(params_from_json(nlohmann::json{{"d_maxx", 3}}), ConfigError);
}

TEST(Classify, WestToEastIsEbt) {
  const auto tr = path_track("v", ObjectClass::Car, {{-20, -2}, {20, -2}}, 8.0, 0.0);
  EXPECT_EQ(classify_vehicle_movement(tr, cfg()), mv("EBT"));
}

TEST(Classify, NorthToWestIsSbr) {
  const auto tr = path_track("v", ObjectClass::Car, {{-2, 20}, {-2, 2}, {-20, 2}}, 6.0, 0.0);
  EXPECT_EQ(classify_vehicle_movement(tr, cfg()), mv("SBR"));
}

TEST(Classify, UTurnIsUnclassifiable) {
  const auto tr = path_track("v", ObjectClass::Car, {{-2, 20}, {-2, 5}, {2, 5}, {2, 20}}, 6.0, 0.0);
  EXPECT_FALSE(classify_vehicle_movement(tr, cfg()));
}

TEST(Classify, AllSixteenLegPairs) {
  const std::map<Leg, Vec2> ends = {{Leg::N, {0, 20}}, {Leg::E, {20, 0}}, {Leg::S, {0, -20}}, {Leg::W, {-20, 0}}};
  // (entry, exit) -> expected movement; same-leg pairs are unclassifiable.
  const std::map<std::pair<Leg, Leg>, std::string> table = {
      {{Leg::S, Leg::N}, "NBT"}, {{Leg::S, Leg::E}, "NBR"}, {{Leg::S, Leg::W}, "NBL"},
      {{Leg::N, Leg::S}, "SBT"}, {{Leg::N, Leg::W}, "SBR"}, {{Leg::N, Leg::E}, "SBL"},
      {{Leg::W, Leg::E}, "EBT"}, {{Leg::W, Leg::S}, "EBR"}, {{Leg::W, Leg::N}, "EBL"},
      {{Leg::E, Leg::W}, "WBT"}, {{Leg::E, Leg::N}, "WBR"}, {{Leg::E, Leg::S}, "WBL"},
  };
  for (Leg in : kAllLegs) {
    for (Leg out : kAllLegs) {
      const Vec2 mid = in == out ? (ends.at(in) * 0.25) : Vec2{0.5, 0.5};
      const auto tr = path_track("v", ObjectClass::Car, {ends.at(in), mid, ends.at(out)}, 6.0, 0.0);
      const auto got = classify_vehicle_movement(tr, cfg());
      const auto it = table.find({in, out});
      if (it == table.end()) {
        EXPECT_FALSE(got) << to_string(in) << "->" << to_string(out);
      } else {
        ASSERT_TRUE(got) << to_string(in) << "->" << to_string(out);
        EXPECT_EQ(got->str(), it->second);
      }
    }
  }
}

TEST(Classify, ClippedTrackIsUnclassifiable) {
  const auto tr = path_track("v", ObjectClass::Car, {{-20, -2}, {0, -2}}, 8.0, 0.0);
  EXPECT_FALSE(classify_vehicle_movement(tr, cfg()));
}

TEST(Classify, VehiclePhases) {
  EXPECT_EQ(vehicle_phase(mv("NBT"), cfg()).value, 2);
  EXPECT_EQ(vehicle_phase(mv("SBT"), cfg()).value, 6);
  EXPECT_EQ(vehicle_phase(mv("EBT"), cfg()).value, 4);
  EXPECT_EQ(vehicle_phase(mv("WBT"), cfg()).value, 8);
  EXPECT_EQ(vehicle_phase(mv("NBL"), cfg()).value, 5);
  EXPECT_EQ(vehicle_phase(mv("SBL"), cfg()).value, 1);
  EXPECT_EQ(vehicle_phase(mv("EBL"), cfg()).value, 7);
  EXPECT_EQ(vehicle_phase(mv("WBL"), cfg()).value, 3);
  EXPECT_EQ(vehicle_phase(mv("NBR"), cfg()).value, 2);
}

TEST(Classify, PedestrianInsideNorthCrosswalk) {
  const auto tr = path_track("p", ObjectClass::Pedestrian, {{-9, 12.5}, {9, 12.5}}, 1.4, 0.0);
  EXPECT_EQ(pedestrian_crosswalk(tr, cfg()), Leg::N);
  EXPECT_EQ(pedestrian_phase(tr, cfg()), crosswalk_phase(Leg::N, cfg()));
  EXPECT_EQ(leg_of_pedestrian_phase(crosswalk_phase(Leg::N, cfg()), cfg()), Leg::N);
}

TEST(Classify, MedianWalkerIsPhaseZero) {
  const auto tr = path_track("p", ObjectClass::Pedestrian, {{0, -20}, {0, 20}}, 1.4, 0.0);
  EXPECT_EQ(pedestrian_phase(tr, cfg()).value, 0);
}

TEST(Classify, MinorityCrosswalkShareIsPhaseZero) {
  const auto tr = path_track("p", ObjectClass::Pedestrian, {{12.5, -4}, {12.5, 4}, {-7.5, 4}}, 1.4, 0.0);
  EXPECT_EQ(pedestrian_phase(tr, cfg()).value, 0);
}

TEST(Classify, CrosswalkRoleExamples) {
  EXPECT_EQ(crosswalk_role(mv("NBT"), Leg::S, cfg()), CrosswalkRole::Near);
  EXPECT_EQ(crosswalk_role(mv("NBT"), Leg::N, cfg()), CrosswalkRole::Far);
  EXPECT_EQ(crosswalk_role(mv("NBR"), Leg::E, cfg()), CrosswalkRole::AdjacentParallel);
  EXPECT_EQ(crosswalk_role(mv("NBL"), Leg::W, cfg()), CrosswalkRole::ParallelOpposite);
}

TEST(Classify, CrosswalkRoleIsABijectionPerMovement) {
  for (bool rht : {true, false}) {
    IntersectionConfig c = cfg();
    c.right_hand_traffic = rht;
    for (const MovementCode& m : all_movements()) {
      std::set<CrosswalkRole> roles;
      for (Leg l : kAllLegs) roles.insert(crosswalk_role(m, l, c));
      EXPECT_EQ(roles.size(), 4u) << m.str();
    }
  }
}

TEST(Classify, RegionEntry) {
  EXPECT_TRUE(enters_region(path_track("v", ObjectClass::Car, {{-30, 0}, {30, 0}}, 8.0, 0.0), cfg()));
  EXPECT_FALSE(enters_region(path_track("v", ObjectClass::Car, {{-30, 40}, {30, 40}}, 8.0, 0.0), cfg()));
}

TEST(Classify, ConfigReportListsPhases) {
  const std::string csv = config_report_csv(cfg());
  EXPECT_NE(csv.find("crosswalk,N,4\n"), std::string::npos);
  EXPECT_NE(csv.find("crosswalk,E,2\n"), std::string::npos);
  EXPECT_NE(csv.find("movement,NBL,5\n"), std::string::npos);
}

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "intersafe/analytics.hpp"
#include "intersafe/errors.hpp"
#include "intersafe/pet.hpp"
#include "intersafe/synth.hpp"
#include "intersafe/ttc.hpp"

using namespace intersafe;

namespace {

const IntersectionConfig& cfg() {
  static const IntersectionConfig c = default_intersection();
  return c;
}

ScenarioSpec scripted(const nlohmann::json& scripts) {
  return scenario_from_json({{"name", "t"}, {"seed", 3}, {"start", "09:00"}, {"end", "09:10"}, {"scripts", scripts}});
}

std::vector<ConflictEvent> events_between(const std::vector<ConflictEvent>& events, const GroundTruth& g) {
  std::vector<ConflictEvent> out;
  for (const auto& e : events) {
    if (e.id_a == g.id_a && e.id_b == g.id_b && e.metric == g.metric) out.push_back(e);
  }
  return out;
}

}  // namespace

TEST(Synth, CaseOneScriptDetected) {
  const auto out = generate(scripted({{{"id", "c1"}, {"kind", "ttc_case1"}, {"t", "09:01"}, {"value", 2.0}}}), cfg());
  ASSERT_EQ(out.truth.size(), 1u);
  const auto events = detect_ttc_conflicts(out.trajectories, TtcParams{});
  EXPECT_EQ(events.size(), 1u);
  const auto mine = events_between(events, out.truth[0]);
  ASSERT_EQ(mine.size(), 1u);
  EXPECT_NEAR(mine[0].value, 2.0, 0.05);
}

TEST(Synth, CaseTwoAndThreeScriptsDetected) {
  const auto out = generate(scripted({{{"id", "c2"}, {"kind", "ttc_case2"}, {"t", "09:01"}, {"value", 1.5}},
                                      {{"id", "c3"}, {"kind", "ttc_case3"}, {"t", "09:04"}, {"value", 3.0}}}),
                            cfg());
  ASSERT_EQ(out.truth.size(), 2u);
  const auto events = detect_ttc_conflicts(out.trajectories, TtcParams{});
  for (const GroundTruth& g : out.truth) {
    const auto mine = events_between(events, g);
    ASSERT_EQ(mine.size(), 1u) << g.script_id;
    EXPECT_NEAR(mine[0].value, g.value, 0.05) << g.script_id;
  }
  EXPECT_EQ(matched_truth(out.truth, events, 0.05), 2u);
}

TEST(Synth, PetScriptGivesOneSevereEvent) {
  const auto out = generate(scripted({{{"id", "p"}, {"kind", "pet"}, {"t", "09:02"}, {"value", 2.5},
                                       {"movement", "WBT"}, {"crosswalk", "W"}}}),
                            cfg());
  const auto events = detect_pet_conflicts(extract_transits(out.trajectories, build_mesh(cfg())), PetParams{});
  ASSERT_EQ(events.size(), 1u);
  EXPECT_NEAR(events[0].value, 2.5, 0.01);
  EXPECT_TRUE(events[0].severe);
  EXPECT_EQ(events[0].kind, ConflictKind::P2V);
}

TEST(Synth, SurgeTriplesPedestrianVolume) {
  const ScenarioSpec spec = scenario_from_json({
      {"seed", 11},
      {"start", "08:00"},
      {"end", "14:00"},
      {"pedestrian_rates", {{"N", 40}, {"E", 40}, {"S", 40}, {"W", 40}}},
      {"surges", {{{"start", "10:00"}, {"end", "12:00"}, {"multiplier", 3}}}},
  });
  const auto out = generate(spec, cfg());
  const auto index = classify_trajectories(out.trajectories, cfg(), &out.signal_log, ClassifyParams{});
  const auto hourly = volume_matrix(out.trajectories, index, VolumeMode::Pedestrian).hourly_totals();
  const double surge = static_cast<double>(hourly[10] + hourly[11]) / 2.0;
  const double base = static_cast<double>(hourly[8] + hourly[9] + hourly[12] + hourly[13]) / 4.0;
  EXPECT_GE(surge / base, 2.5);
  EXPECT_LE(surge / base, 3.5);
}

TEST(Synth, LegalBackgroundHasNoJaywalkers) {
  const ScenarioSpec spec = scenario_from_json({
      {"seed", 5},
      {"start", "08:00"},
      {"end", "08:30"},
      {"pedestrian_rates", {{"N", 60}, {"E", 60}, {"S", 60}, {"W", 60}}},
  });
  const auto out = generate(spec, cfg());
  const auto index = classify_trajectories(out.trajectories, cfg(), &out.signal_log, ClassifyParams{});
  std::size_t peds = 0;
  for (const auto& [id, info] : index) {
    if (info.cls != ObjectClass::Pedestrian) continue;
    ++peds;
    EXPECT_FALSE(info.jaywalk) << id;
    EXPECT_NE(info.phase.value, 0) << id;
  }
  EXPECT_GT(peds, 50u);
}

TEST(Synth, SameSeedSameOutput) {
  std::ifstream in(std::filesystem::path(INTERSAFE_SOURCE_DIR) / "scenarios" / "gameday.json");
  ASSERT_TRUE(in);
  ScenarioSpec spec = scenario_from_json(nlohmann::json::parse(in));
  spec.end = spec.start + 1800.0;
  spec.scripts.clear();
  auto dump = [&](const ScenarioSpec& s) {
    const auto out = generate(s, cfg());
    std::ostringstream os;
    write_trajectories(os, out.trajectories);
    write_signal_log(os, out.signal_log);
    return os.str();
  };
  const std::string a = dump(spec);
  EXPECT_EQ(a, dump(spec));
  spec.seed += 1;
  EXPECT_NE(a, dump(spec));
}

TEST(Synth, ValidationErrors) {
  EXPECT_THROW(scenario_from_json({{"start", "10:00"}, {"end", "09:00"}}).validate(), ConfigError);
  EXPECT_THROW(scenario_from_json({{"surges", {{{"start", "08:00"}, {"end", "09:00"}, {"multiplier", 0.5}}}}})
                   .validate(),
               ConfigError);
  EXPECT_THROW(scenario_from_json({{"vehicle_rates", {{"XBT", 3}}}}), ConfigError);
  EXPECT_THROW(scenario_from_json({{"scripts", {{{"id", "x"}, {"kind", "ttc_case9"}, {"t", 0}, {"value", 1}}}}}),
               ConfigError);
}

TEST(Synth, NonRectilinearLayoutRejected) {
  IntersectionConfig skew = cfg();
  skew = intersection_from_json([&] {
    auto j = to_json(cfg());
    j["leg_bearings"]["E"] = 80.0;
    return j;
  }());
  EXPECT_THROW(generate(scripted(nlohmann::json::array()), skew), ConfigError);
}

TEST(Synth, GroundTruthRoundTrip) {
  const auto out = generate(scripted({{{"id", "c1"}, {"kind", "ttc_case1"}, {"t", "09:01"}, {"value", 2.0}}}), cfg());
  std::ostringstream os;
  write_ground_truth(os, out.truth);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), kGroundTruthHeader);
  std::istringstream is(os.str());
  const auto back = read_ground_truth(is);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].script_id, "c1");
  EXPECT_EQ(back[0].id_a, out.truth[0].id_a);
  EXPECT_DOUBLE_EQ(back[0].value, 2.0);
}

#include "intersafe/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <tuple>

#include "intersafe/classify.hpp"
#include "intersafe/csv.hpp"
#include "intersafe/errors.hpp"
#include "intersafe/format.hpp"
#include "intersafe/pet.hpp"
#include "intersafe/ttc.hpp"

namespace intersafe {

// ---------------------------------------------------------------------------------------
// Spec parsing

namespace {

double time_field(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    // "HH:MM" or "HH:MM:SS"
    if (s.size() == 8 && s[5] == ':') {
      const auto hm = parse_clock(s.substr(0, 5));
      if (hm) return *hm + std::stod(s.substr(6));
    }
    if (const auto hm = parse_clock(s)) return *hm;
  }
  throw ConfigError("scenario: bad time value " + j.dump());
}

ScriptKind parse_script_kind(const std::string& s) {
  if (s == "ttc_case1") return ScriptKind::TtcCase1;
  if (s == "ttc_case2") return ScriptKind::TtcCase2;
  if (s == "ttc_case3") return ScriptKind::TtcCase3;
  if (s == "pet") return ScriptKind::Pet;
  if (s == "pet_series") return ScriptKind::PetSeries;
  throw ConfigError("scenario: unknown script kind '" + s + "'");
}

SurgeTarget parse_surge_target(const std::string& s) {
  if (s == "pedestrian") return SurgeTarget::Pedestrian;
  if (s == "vehicle") return SurgeTarget::Vehicle;
  if (s == "all") return SurgeTarget::All;
  throw ConfigError("scenario: unknown surge target '" + s + "'");
}

}  // namespace

ScenarioSpec scenario_from_json(const nlohmann::json& j) {
  ScenarioSpec s;
  try {
    s.name = j.value("name", std::string("scenario"));
    s.seed = j.value("seed", std::uint64_t{1});
    s.date = j.value("date", s.date);
    if (j.contains("start")) s.start = time_field(j["start"]);
    if (j.contains("end")) s.end = time_field(j["end"]);
    if (j.contains("game_start")) s.game_start = time_field(j["game_start"]);
    if (j.contains("signal")) {
      const auto& g = j["signal"];
      s.signal.cycle = g.value("cycle", s.signal.cycle);
      s.signal.green = g.value("green", s.signal.green);
      s.signal.yellow = g.value("yellow", s.signal.yellow);
      s.signal.walk = g.value("walk", s.signal.walk);
      s.signal.ped_launch = g.value("ped_launch", s.signal.ped_launch);
      s.signal.veh_launch_begin = g.value("veh_launch_begin", s.signal.veh_launch_begin);
      s.signal.veh_launch_end = g.value("veh_launch_end", s.signal.veh_launch_end);
    }
    const nlohmann::json ped_rates = j.value("pedestrian_rates", nlohmann::json::object());
    for (const auto& [k, v] : ped_rates.items()) {
      const auto leg = parse_leg(k);
      if (!leg) throw ConfigError("scenario: unknown crosswalk '" + k + "'");
      s.pedestrian_rates[*leg] = v.get<double>();
    }
    const nlohmann::json veh_rates = j.value("vehicle_rates", nlohmann::json::object());
    for (const auto& [k, v] : veh_rates.items()) {
      if (!MovementCode::parse(k)) throw ConfigError("scenario: unknown movement '" + k + "'");
      s.vehicle_rates[k] = v.get<double>();
    }
    for (const auto& sj : j.value("surges", nlohmann::json::array())) {
      Surge u;
      u.start = time_field(sj.at("start"));
      u.end = time_field(sj.at("end"));
      u.multiplier = sj.at("multiplier").get<double>();
      u.target = parse_surge_target(sj.value("target", std::string("pedestrian")));
      s.surges.push_back(u);
    }
    s.vehicle_speed = j.value("vehicle_speed", s.vehicle_speed);
    s.turn_speed = j.value("turn_speed", s.turn_speed);
    s.ped_speed_min = j.value("ped_speed_min", s.ped_speed_min);
    s.ped_speed_max = j.value("ped_speed_max", s.ped_speed_max);
    s.headway = j.value("headway", s.headway);
    s.lane_offset = j.value("lane_offset", s.lane_offset);
    s.bus_share = j.value("bus_share", s.bus_share);
    s.truck_share = j.value("truck_share", s.truck_share);
    for (const auto& cj : j.value("scripts", nlohmann::json::array())) {
      ConflictScript c;
      c.id = cj.at("id").get<std::string>();
      c.kind = parse_script_kind(cj.at("kind").get<std::string>());
      c.t = time_field(cj.at("t"));
      c.value = cj.at("value").get<double>();
      if (cj.contains("at")) c.at = {cj["at"].at(0).get<double>(), cj["at"].at(1).get<double>()};
      if (cj.contains("movement")) {
        const auto mv = MovementCode::parse(cj["movement"].get<std::string>());
        if (!mv) throw ConfigError("scenario: bad movement in script " + c.id);
        c.movement = *mv;
      }
      if (cj.contains("crosswalk")) {
        const auto leg = parse_leg(cj["crosswalk"].get<std::string>());
        if (!leg) throw ConfigError("scenario: bad crosswalk in script " + c.id);
        c.crosswalk = *leg;
      }
      c.count = cj.value("count", std::size_t{0});
      if (cj.contains("until")) c.until = time_field(cj["until"]);
      s.scripts.push_back(c);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  s.validate();
  return s;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("scenario " + path.string() + ": " + e.what());
  }
  return scenario_from_json(j);
}

void ScenarioSpec::validate() const {
  if (!(end > start)) throw ConfigError("scenario: end must be after start");
  const auto& g = signal;
  if (!(g.cycle > 0.0) || !(g.green > 0.0) || g.green + g.yellow > g.cycle / 2.0) {
    throw ConfigError("scenario: each signal group must fit in half a cycle");
  }
  if (!(g.walk > 0.0) || g.walk > g.cycle / 2.0 || !(g.ped_launch > 0.0) || g.ped_launch > g.walk) {
    throw ConfigError("scenario: walk timing invalid");
  }
  if (!(g.veh_launch_begin >= 0.0) || !(g.veh_launch_end > g.veh_launch_begin) || g.veh_launch_end > g.green) {
    throw ConfigError("scenario: vehicle launch window must lie inside green");
  }
  for (const auto& [leg, r] : pedestrian_rates) {
    if (!(r >= 0.0)) throw ConfigError("scenario: negative pedestrian rate");
  }
  for (const auto& [mv, r] : vehicle_rates) {
    if (!(r >= 0.0)) throw ConfigError("scenario: negative vehicle rate");
  }
  for (const Surge& u : surges) {
    if (!(u.multiplier >= 1.0)) throw ConfigError("scenario: surge multiplier must be >= 1");
    if (!(u.end > u.start)) throw ConfigError("scenario: surge window is empty");
  }
  if (!(vehicle_speed > 0.0) || !(turn_speed > 0.0) || !(ped_speed_min > 0.0) || ped_speed_max < ped_speed_min) {
    throw ConfigError("scenario: speeds must be positive");
  }
  if (!(headway > 0.0)) throw ConfigError("scenario: headway must be positive");
  if (bus_share < 0.0 || truck_share < 0.0 || bus_share + truck_share > 1.0) {
    throw ConfigError("scenario: class shares must lie in [0,1]");
  }
  for (const ConflictScript& c : scripts) {
    if (!(c.value > 0.0)) throw ConfigError("script " + c.id + ": value must be > 0");
    if (c.kind == ScriptKind::PetSeries) {
      if (c.count == 0 || !(c.until > c.t)) throw ConfigError("script " + c.id + ": empty series");
    }
    if (c.t < start || c.t >= end) throw ConfigError("script " + c.id + ": starts outside the scenario");
    if ((c.kind == ScriptKind::Pet || c.kind == ScriptKind::PetSeries) && c.value >= end - start) {
      throw ConfigError("script " + c.id + ": PET gap exceeds the scenario duration");
    }
  }
}

// ---------------------------------------------------------------------------------------
// Kinematics

namespace {

/// Constant-velocity piece starting at t0 from p0.
struct Piece {
  double t0;
  Vec2 p0;
  Vec2 v;
};

double snap(double v, int decimals) {
  double out = 0.0;
  parse_double(fixed(v, decimals), out);
  return out;
}

double grid_time(long k) { return static_cast<double>(k) / 10.0; }

/// Samples piecewise motion on the 0.1 s frame grid over [t_begin, t_end]. A sample at a
/// piece boundary reports the velocity of the piece that is ending.
Trajectory sample_motion(std::string id, ObjectClass cls, const std::vector<Piece>& pieces, double t_begin,
                         double t_end) {
  Trajectory tr;
  tr.object_id = std::move(id);
  tr.cls = cls;
  const long k0 = static_cast<long>(std::ceil(t_begin * 10.0 - 1e-9));
  const long k1 = static_cast<long>(std::floor(t_end * 10.0 + 1e-9));
  for (long k = k0; k <= k1; ++k) {
    const double t = grid_time(k);
    std::size_t i = 0;
    while (i + 1 < pieces.size() && pieces[i + 1].t0 < t) ++i;
    const Piece& p = pieces[i];
    const Vec2 pos = p.p0 + p.v * (t - p.t0);
    TrackPoint pt;
    pt.t = t;
    pt.pos = {snap(pos.x, 3), snap(pos.y, 3)};
    pt.vel = Vec2{snap(p.v.x, 3), snap(p.v.y, 3)};
    tr.points.push_back(pt);
  }
  return tr;
}

struct Polyline {
  std::vector<Vec2> pts;

  double length() const {
    double s = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) s += distance(pts[i - 1], pts[i]);
    return s;
  }

  std::vector<Piece> pieces(double t0, double speed) const {
    std::vector<Piece> out;
    double t = t0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const Vec2 d = pts[i] - pts[i - 1];
      const double len = d.norm();
      if (len == 0.0) continue;
      out.push_back({t, pts[i - 1], d * (speed / len)});
      t += len / speed;
    }
    return out;
  }
};

void append_arc(Polyline& pl, Vec2 center, double radius, double from_deg, double to_deg, int steps) {
  for (int i = 1; i <= steps; ++i) {
    const double a = (from_deg + (to_deg - from_deg) * i / steps) * std::numbers::pi / 180.0;
    pl.pts.push_back(center + Vec2{radius * std::cos(a), radius * std::sin(a)});
  }
}

int bound_rotation_deg(Bound b) {
  switch (b) {
    case Bound::NB: return 0;
    case Bound::EB: return 90;
    case Bound::SB: return 180;
    case Bound::WB: return 270;
  }
  return 0;
}

/// Path of a vehicle movement: built for northbound and rotated to the actual bound.
Polyline movement_path(MovementCode mv, const IntersectionConfig& cfg, double lane, double reach) {
  Polyline nb;
  const double r_right = lane;
  const double r_left = 2.0 * lane;
  switch (mv.turn) {
    case Turn::T:
      nb.pts = {{lane, -reach}, {lane, reach}};
      break;
    case Turn::R:
      nb.pts = {{lane, -reach}, {lane, -lane - r_right}};
      append_arc(nb, {lane + r_right, -lane - r_right}, r_right, 180.0, 90.0, 12);
      nb.pts.push_back({reach, -lane});
      break;
    case Turn::L:
      nb.pts = {{lane, -reach}, {lane, -lane}};
      append_arc(nb, {lane - r_left, -lane}, r_left, 0.0, 90.0, 16);
      nb.pts.push_back({-reach, lane});
      break;
  }
  Polyline out;
  const double rot = bound_rotation_deg(mv.bound);
  for (Vec2 p : nb.pts) out.pts.push_back(rotate_cw(p, {}, rot) + cfg.center);
  return out;
}

/// Pedestrian line along the crosswalk on `leg`, from one end to the other.
Polyline crosswalk_path(Leg leg, const IntersectionConfig& cfg, double lateral, bool reverse) {
  const Box b = cfg.crosswalk(leg).bounds();
  const Vec2 c{(b.min.x + b.max.x) / 2.0, (b.min.y + b.max.y) / 2.0};
  const double ext = 0.5;
  Polyline pl;
  if (b.width() >= b.height()) {
    pl.pts = {{b.min.x - ext, c.y + lateral}, {b.max.x + ext, c.y + lateral}};
  } else {
    pl.pts = {{c.x + lateral, b.min.y - ext}, {c.x + lateral, b.max.y + ext}};
  }
  if (reverse) std::swap(pl.pts[0], pl.pts[1]);
  return pl;
}

// ---------------------------------------------------------------------------------------
// Randomness, kept independent of the standard library's distribution implementations.

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
double uniform(std::mt19937_64& rng, double a, double b) { return a + (b - a) * uniform01(rng); }

double surge_multiplier(const std::vector<Surge>& surges, bool pedestrian, double t) {
  double m = 1.0;
  for (const Surge& u : surges) {
    const bool applies = u.target == SurgeTarget::All || (pedestrian == (u.target == SurgeTarget::Pedestrian));
    if (applies && t >= u.start && t < u.end) m = std::max(m, u.multiplier);
  }
  return m;
}

/// Inhomogeneous Poisson arrivals by thinning.
std::vector<double> poisson_arrivals(std::mt19937_64& rng, double per_hour, const std::vector<Surge>& surges,
                                     bool pedestrian, double start, double end) {
  std::vector<double> out;
  if (per_hour <= 0.0) return out;
  double peak = 1.0;
  for (const Surge& u : surges) peak = std::max(peak, u.multiplier);
  const double lambda_max = per_hour * peak / 3600.0;
  double t = start;
  while (true) {
    t += -std::log(1.0 - uniform01(rng)) / lambda_max;
    if (t >= end) break;
    if (uniform01(rng) * peak < surge_multiplier(surges, pedestrian, t)) out.push_back(t);
  }
  return out;
}

// ---------------------------------------------------------------------------------------
// Signal plan

bool group_a(Bound b) { return b == Bound::NB || b == Bound::SB; }
bool group_a(Leg crosswalk) { return crosswalk == Leg::E || crosswalk == Leg::W; }

struct Clock {
  const ScenarioSpec& spec;

  double group_offset(bool a) const { return a ? 0.0 : spec.signal.cycle / 2.0; }

  /// Earliest time >= t inside [group start + lo, group start + hi) of some cycle.
  double next_window(double t, bool a, double lo, double hi) const {
    const double cycle = spec.signal.cycle;
    const double base = spec.start + group_offset(a);
    double k = std::floor((t - base) / cycle);
    while (true) {
      const double ws = base + k * cycle + lo;
      const double we = base + k * cycle + hi;
      if (t < we) return std::max(t, ws);
      k += 1.0;
    }
  }

  /// Green start of group `a` in the cycle containing t (or the next one).
  double group_start_at_or_after(double t, bool a) const {
    const double cycle = spec.signal.cycle;
    const double base = spec.start + group_offset(a);
    return base + std::ceil((t - base) / cycle) * cycle;
  }
};

SignalLog build_signal_log(const ScenarioSpec& spec, const IntersectionConfig& cfg) {
  SignalLog log;
  const auto& g = spec.signal;
  const double half = g.cycle / 2.0;
  auto add = [&](double a, double b, int phase, SignalState s) {
    a = std::max(a, spec.start);
    b = std::min(b, spec.end);
    if (b > a && phase > 0) log.intervals.push_back({snap(a, 1), snap(b, 1), phase, s});
  };
  for (double c0 = spec.start; c0 < spec.end; c0 += g.cycle) {
    for (bool a : {true, false}) {
      const double gs = c0 + (a ? 0.0 : half);
      std::vector<int> veh;
      for (Bound b : kAllBounds) {
        if (group_a(b) != a) continue;
        veh.push_back(vehicle_phase({b, Turn::T}, cfg).value);
        veh.push_back(vehicle_phase({b, Turn::L}, cfg).value);
      }
      for (int p : veh) {
        add(c0, gs, p, SignalState::Red);
        add(gs, gs + g.green, p, SignalState::Green);
        add(gs + g.green, gs + g.green + g.yellow, p, SignalState::Yellow);
        add(gs + g.green + g.yellow, c0 + g.cycle, p, SignalState::Red);
      }
      for (Leg l : kAllLegs) {
        if (group_a(l) != a) continue;
        const int p = crosswalk_phase(l, cfg).value;
        add(c0, gs, p, SignalState::DontWalk);
        add(gs, gs + g.walk, p, SignalState::Walk);
        add(gs + g.walk, c0 + g.cycle, p, SignalState::DontWalk);
      }
    }
  }
  std::sort(log.intervals.begin(), log.intervals.end(), [](const SignalInterval& x, const SignalInterval& y) {
    return std::tie(x.phase, x.t_start, x.state) < std::tie(y.phase, y.t_start, y.state);
  });
  return log;
}

// ---------------------------------------------------------------------------------------
// Scripts

struct Reservation {
  bool pedestrian;
  int key;  // Bound or Leg index
  double begin;
  double end;
};

double after_reservations(const std::vector<Reservation>& res, bool pedestrian, int key, double t) {
  bool moved = true;
  while (moved) {
    moved = false;
    for (const Reservation& r : res) {
      if (r.pedestrian == pedestrian && r.key == key && t >= r.begin && t < r.end) {
        t = r.end;
        moved = true;
      }
    }
  }
  return t;
}

GroundTruth make_truth(const std::string& script, Metric m, double value, double t, const std::string& a,
                       const std::string& b) {
  return a < b ? GroundTruth{script, m, value, t, a, b} : GroundTruth{script, m, value, t, b, a};
}

struct ScriptBuilder {
  const ScenarioSpec& spec;
  const IntersectionConfig& cfg;
  const EngineParams& params;
  std::vector<Trajectory>& out;
  std::vector<GroundTruth>& truth;

  double reach() const {
    const Box b = cfg.analysis_region.bounds();
    return std::max({b.max.x - cfg.center.x, b.max.y - cfg.center.y, cfg.center.x - b.min.x,
                     cfg.center.y - b.min.y}) + 2.0;
  }

  void check_ttc(const std::string& script, const Trajectory& a, const Trajectory& b, double t_star, double want) {
    auto state_at = [&](const Trajectory& tr) {
      for (const TrackPoint& p : tr.points) {
        if (std::abs(p.t - t_star) < 1e-9) return ObjectState{p.pos, *p.vel, tr.cls};
      }
      throw ComputationError("script " + script + ": no sample at the scripted instant");
    };
    const auto pair = PairState::make(a.object_id, state_at(a), b.object_id, state_at(b), t_star);
    const TtcResult r = compute_ttc(pair, params.ttc);
    if (!r.finite() || std::abs(r.value - want) > 0.01) {
      throw ConfigError("script " + script + ": infeasible, realized TTC " + fixed(r.value, 3));
    }
    if (pair.s > params.ttc.d_max) throw ConfigError("script " + script + ": objects too far apart at the instant");
    truth.push_back(make_truth(script, Metric::TTC, r.value, t_star, a.object_id, b.object_id));
  }

  void ttc_case1(const ConflictScript& c) {
    const double t_star = snap(c.t, 1);
    const double v = std::min(spec.vehicle_speed, (params.ttc.d_max - 2.0) / c.value);
    const double pre = 4.0;
    const double post = 3.0;
    const Vec2 hit_from = c.at - Vec2{c.value * v, 0.0};
    const std::vector<Piece> mover = {{t_star - pre, hit_from - Vec2{pre * v, 0.0}, {v, 0.0}},
                                      {t_star, hit_from, {0.0, v}}};
    const std::vector<Piece> still = {{t_star - pre, c.at, {0.0, 0.0}}};
    Trajectory a = sample_motion("scr-" + c.id + "-a", ObjectClass::Car, mover, t_star - pre, t_star + post);
    Trajectory b = sample_motion("scr-" + c.id + "-b", ObjectClass::Car, still, t_star - pre, t_star + post);
    check_ttc(c.id, a, b, t_star, c.value);
    out.push_back(std::move(a));
    out.push_back(std::move(b));
  }

  void ttc_case2(const ConflictScript& c) {
    const double t_star = snap(c.t, 1);
    const double gap = 6.0;
    const double vl = 5.0;
    const double dv = gap / c.value;
    const double pre = 3.0;
    const double post = 3.0;
    const Vec2 lead_at = c.at;
    const Vec2 follow_at = c.at - Vec2{gap, 0.0};
    const std::vector<Piece> leader = {{t_star - pre, lead_at - Vec2{pre * vl, 0.0}, {vl, 0.0}}};
    const std::vector<Piece> follower = {{t_star - pre, follow_at - Vec2{pre * (vl + dv), 0.0}, {vl + dv, 0.0}},
                                         {t_star, follow_at, {vl, 0.0}}};
    Trajectory a = sample_motion("scr-" + c.id + "-a", ObjectClass::Car, follower, t_star - pre, t_star + post);
    Trajectory b = sample_motion("scr-" + c.id + "-b", ObjectClass::Car, leader, t_star - pre, t_star + post);
    check_ttc(c.id, a, b, t_star, c.value);
    out.push_back(std::move(a));
    out.push_back(std::move(b));
  }

  void ttc_case3(const ConflictScript& c) {
    const double t_star = snap(c.t, 1);
    const double vp = 1.4;
    const double dp = c.value * vp;
    const double room = params.ttc.d_max - 2.0;
    if (dp >= room) throw ConfigError("script " + c.id + ": TTC too long for a crossing conflict");
    const double vv = std::min(spec.turn_speed, std::sqrt(room * room - dp * dp) / c.value);
    const double pre = 3.0;
    const double post = c.value + 3.0;
    const Vec2 veh_at = c.at - Vec2{c.value * vv, 0.0};
    const Vec2 ped_at = c.at + Vec2{0.0, dp};
    const std::vector<Piece> veh = {{t_star - pre, veh_at - Vec2{pre * vv, 0.0}, {vv, 0.0}}};
    const std::vector<Piece> ped = {{t_star - pre, ped_at + Vec2{0.0, pre * vp}, {0.0, -vp}},
                                    {t_star, ped_at, {0.0, 0.0}}};
    Trajectory a = sample_motion("scr-" + c.id + "-a", ObjectClass::Car, veh, t_star - pre, t_star + post);
    Trajectory b = sample_motion("scr-" + c.id + "-b", ObjectClass::Pedestrian, ped, t_star - pre, t_star + post);
    check_ttc(c.id, a, b, t_star, c.value);
    out.push_back(std::move(a));
    out.push_back(std::move(b));
  }

  /// Vehicle entering at `depart`, pedestrian timed so the smallest shared-cell PET is `gap`.
  void pet(const std::string& script, const std::string& suffix, MovementCode mv, Leg leg, double depart,
           double gap) {
    const double speed = mv.turn == Turn::T ? spec.vehicle_speed : spec.turn_speed;
    const Polyline vpath = movement_path(mv, cfg, spec.lane_offset, reach());
    const double v_end = depart + vpath.length() / speed;
    Trajectory veh = sample_motion("scr-" + script + suffix + "-v", ObjectClass::Car, vpath.pieces(depart, speed),
                                   depart, v_end);

    // Start from the end of the crosswalk nearer to the vehicle's path.
    const Polyline fwd = crosswalk_path(leg, cfg, 0.0, false);
    double d_fwd = 1e300;
    double d_rev = 1e300;
    for (const TrackPoint& p : veh.points) {
      d_fwd = std::min(d_fwd, distance(p.pos, fwd.pts[0]));
      d_rev = std::min(d_rev, distance(p.pos, fwd.pts[1]));
    }
    const Polyline ppath = crosswalk_path(leg, cfg, 0.0, d_rev < d_fwd);
    const double vp = (spec.ped_speed_min + spec.ped_speed_max) / 2.0;
    const double p_dur = ppath.length() / vp;

    const MeshGrid mesh = build_mesh(cfg);
    Trajectory probe;
    probe.object_id = "probe";
    probe.cls = ObjectClass::Pedestrian;
    probe.points = {{0.0, ppath.pts[0], {}}, {p_dur, ppath.pts[1], {}}};
    const auto veh_tr = trajectory_transits(veh, mesh);
    const auto ped_tr = trajectory_transits(probe, mesh);
    double best = 1e300;
    for (const auto& pt : ped_tr) {
      for (const auto& vt : veh_tr) {
        if (vt.cell == pt.cell) best = std::min(best, pt.t_enter - vt.t_exit);
      }
    }
    if (best > 1e299) throw ConfigError("script " + script + ": vehicle path never meets the crosswalk");
    const double p_start = gap - best;
    Trajectory ped = sample_motion("scr-" + script + suffix + "-p", ObjectClass::Pedestrian,
                                   ppath.pieces(p_start, vp), p_start, p_start + p_dur);

    // Measure the realized value the way the engine will.
    TransitTable table;
    table.mesh = mesh;
    table.cells.resize(mesh.cell_count());
    for (const Trajectory* tr : {&veh, &ped}) {
      for (auto& ct : trajectory_transits(*tr, mesh)) table.cells[ct.cell].push_back(ct);
    }
    for (auto& cell : table.cells) {
      std::sort(cell.begin(), cell.end(),
                [](const CellTransit& a, const CellTransit& b) { return a.t_enter < b.t_enter; });
    }
    const auto events = detect_pet_conflicts(table, params.pet);
    if (events.size() != 1 || std::abs(events[0].value - gap) > 0.01) {
      throw ConfigError("script " + script + ": infeasible PET gap");
    }
    truth.push_back(make_truth(script, Metric::PET, events[0].value, events[0].t, veh.object_id, ped.object_id));
    out.push_back(std::move(veh));
    out.push_back(std::move(ped));
  }
};

std::string padded(std::size_t n, int width) {
  std::string s = std::to_string(n);
  return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
}

}  // namespace

// ---------------------------------------------------------------------------------------

SynthOutput generate(const ScenarioSpec& spec, const IntersectionConfig& cfg, const EngineParams& params) {
  spec.validate();
  cfg.validate();
  for (Leg l : kAllLegs) {
    if (std::abs(cfg.bearing(l) - 90.0 * static_cast<int>(l)) > 1e-9) {
      throw ConfigError("synth: only rectilinear layouts (legs at 0/90/180/270) are supported");
    }
  }

  SynthOutput result;
  std::mt19937_64 rng(spec.seed);
  const Clock clock{spec};
  ScriptBuilder builder{spec, cfg, params, result.trajectories, result.truth};
  std::vector<Reservation> reservations;

  // Scripts first so background traffic can be kept clear of them.
  for (const ConflictScript& c : spec.scripts) {
    switch (c.kind) {
      case ScriptKind::TtcCase1: builder.ttc_case1(c); break;
      case ScriptKind::TtcCase2: builder.ttc_case2(c); break;
      case ScriptKind::TtcCase3: builder.ttc_case3(c); break;
      case ScriptKind::Pet:
      case ScriptKind::PetSeries: {
        std::vector<double> departs;
        if (c.kind == ScriptKind::Pet) {
          departs.push_back(c.t);
        } else {
          const bool a = group_a(c.movement.bound);
          const double first = clock.group_start_at_or_after(c.t, a);
          const auto cycles = static_cast<std::size_t>(std::floor((c.until - first) / spec.signal.cycle));
          if (cycles < c.count) throw ConfigError("script " + c.id + ": more conflicts than signal cycles");
          for (std::size_t i = 0; i < c.count; ++i) {
            const double gs = first + static_cast<double>(i * cycles / c.count) * spec.signal.cycle;
            departs.push_back(gs + (spec.signal.veh_launch_begin + spec.signal.veh_launch_end) / 2.0);
          }
        }
        for (std::size_t i = 0; i < departs.size(); ++i) {
          const double d = departs[i];
          const std::string suffix = departs.size() > 1 ? "-" + padded(i, 3) : "";
          builder.pet(c.id, suffix, c.movement, c.crosswalk, d, c.value);
          const Bound oncoming = bound_from_entry(opposite(entry_leg(c.movement.bound)));
          for (Bound b : {c.movement.bound, oncoming}) {
            reservations.push_back({false, static_cast<int>(b), d - 15.0, d + 30.0});
          }
          reservations.push_back({true, static_cast<int>(c.crosswalk), d - 40.0, d + 40.0});
        }
        break;
      }
    }
  }

  const double reach = builder.reach();

  // Pedestrians.
  std::size_t ped_n = 0;
  for (Leg leg : kAllLegs) {
    const auto it = spec.pedestrian_rates.find(leg);
    if (it == spec.pedestrian_rates.end()) continue;
    const bool a = group_a(leg);
    for (double t : poisson_arrivals(rng, it->second, spec.surges, true, spec.start, spec.end)) {
      double launch = t;
      while (true) {
        const double w = clock.next_window(launch, a, 0.0, spec.signal.ped_launch);
        // Arrivals that wait for the walk step off together, spread over 2 s.
        launch = w > launch ? w + uniform(rng, 0.0, 2.0) : w;
        const double moved = after_reservations(reservations, true, static_cast<int>(leg), launch);
        if (moved == launch) break;
        launch = moved;
      }
      const double lateral = uniform(rng, -1.0, 1.0);
      const bool reverse = uniform01(rng) < 0.5;
      const double speed = uniform(rng, spec.ped_speed_min, spec.ped_speed_max);
      if (launch >= spec.end) continue;
      const Polyline path = crosswalk_path(leg, cfg, lateral, reverse);
      result.trajectories.push_back(sample_motion("ped-" + padded(ped_n++, 5), ObjectClass::Pedestrian,
                                                  path.pieces(launch, speed), launch,
                                                  launch + path.length() / speed));
    }
  }

  // Vehicles, one queue per approach.
  std::size_t veh_n = 0;
  for (Bound bound : kAllBounds) {
    std::vector<std::pair<double, MovementCode>> arrivals;
    for (const MovementCode& mv : all_movements()) {
      if (mv.bound != bound) continue;
      const auto it = spec.vehicle_rates.find(mv.str());
      if (it == spec.vehicle_rates.end()) continue;
      for (double t : poisson_arrivals(rng, it->second, spec.surges, false, spec.start, spec.end)) {
        arrivals.emplace_back(t, mv);
      }
    }
    std::stable_sort(arrivals.begin(), arrivals.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    const bool a = group_a(bound);
    double next_free = spec.start;
    for (const auto& [t, mv] : arrivals) {
      double depart = std::max(t, next_free);
      while (true) {
        const double w = clock.next_window(depart, a, spec.signal.veh_launch_begin, spec.signal.veh_launch_end);
        const double moved = after_reservations(reservations, false, static_cast<int>(bound), w);
        if (moved == w) {
          depart = w;
          break;
        }
        depart = moved;
      }
      next_free = depart + spec.headway;
      const double u = uniform01(rng);
      const ObjectClass cls = u < spec.bus_share                     ? ObjectClass::Bus
                              : u < spec.bus_share + spec.truck_share ? ObjectClass::Truck
                                                                      : ObjectClass::Car;
      if (depart >= spec.end) continue;
      const double speed = mv.turn == Turn::T ? spec.vehicle_speed : spec.turn_speed;
      const Polyline path = movement_path(mv, cfg, spec.lane_offset, reach);
      result.trajectories.push_back(sample_motion("veh-" + padded(veh_n++, 5), cls, path.pieces(depart, speed),
                                                  depart, depart + path.length() / speed));
    }
  }

  std::erase_if(result.trajectories, [](const Trajectory& tr) { return tr.points.size() < 2; });
  std::sort(result.trajectories.begin(), result.trajectories.end(),
            [](const Trajectory& x, const Trajectory& y) { return x.object_id < y.object_id; });
  result.signal_log = build_signal_log(spec, cfg);
  std::sort(result.truth.begin(), result.truth.end(), [](const GroundTruth& x, const GroundTruth& y) {
    return std::tie(x.t, x.id_a, x.id_b) < std::tie(y.t, y.id_a, y.id_b);
  });
  return result;
}

void write_ground_truth(std::ostream& out, const std::vector<GroundTruth>& truth) {
  out << kGroundTruthHeader << '\n';
  for (const GroundTruth& g : truth) {
    out << g.script_id << ',' << to_string(g.metric) << ',' << fixed(g.value, 3) << ',' << fixed(g.t, 3) << ','
        << g.id_a << ',' << g.id_b << '\n';
  }
}

std::vector<GroundTruth> read_ground_truth(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kGroundTruthHeader) {
    throw DataError("ground truth: unexpected header");
  }
  std::vector<GroundTruth> out;
  while (std::getline(in, line)) {
    const auto row = strip_cr(line);
    if (row.empty()) continue;
    const auto f = split_csv(row);
    if (f.size() != 6) throw DataError("ground truth: expected 6 fields");
    GroundTruth g;
    g.script_id = std::string(f[0]);
    if (f[1] == "TTC") g.metric = Metric::TTC;
    else if (f[1] == "PET") g.metric = Metric::PET;
    else throw DataError("ground truth: unknown metric");
    if (!parse_double(f[2], g.value) || !parse_double(f[3], g.t)) throw DataError("ground truth: bad number");
    g.id_a = std::string(f[4]);
    g.id_b = std::string(f[5]);
    out.push_back(std::move(g));
  }
  return out;
}

std::size_t matched_truth(const std::vector<GroundTruth>& truth, const std::vector<ConflictEvent>& events,
                          double tol) {
  std::size_t n = 0;
  for (const GroundTruth& g : truth) {
    const bool hit = std::any_of(events.begin(), events.end(), [&](const ConflictEvent& e) {
      return e.metric == g.metric && e.id_a == g.id_a && e.id_b == g.id_b && std::abs(e.value - g.value) <= tol;
    });
    if (hit) ++n;
  }
  return n;
}

}  // namespace intersafe

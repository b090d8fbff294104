#include "intersafe/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "intersafe/errors.hpp"

namespace intersafe {

using nlohmann::json;

namespace {

std::size_t idx(Leg l) { return static_cast<std::size_t>(l); }
std::size_t idx(Bound b) { return static_cast<std::size_t>(b); }

Vec2 vec_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError(what + ": expected [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Polygon polygon_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + ": expected a list of [x, y] vertices");
  std::vector<Vec2> pts;
  for (const auto& v : j) pts.push_back(vec_from_json(v, what));
  return Polygon(std::move(pts));
}

json polygon_to_json(const Polygon& p) {
  json out = json::array();
  for (const Vec2& v : p.vertices()) out.push_back({v.x, v.y});
  return out;
}

void check_polygon(const Polygon& p, const std::string& what) {
  if (p.vertices().size() < 3) throw ConfigError(what + ": polygon needs at least 3 vertices");
  if (!p.is_simple()) throw ConfigError(what + ": polygon is not simple");
  if (std::abs(p.signed_area()) < 1e-9) throw ConfigError(what + ": polygon is degenerate");
}

void check_pair(int a, int b, int lo, int hi, const std::string& what) {
  if (std::min(a, b) != lo || std::max(a, b) != hi) {
    throw ConfigError(what + ": expected phases {" + std::to_string(lo) + ", " + std::to_string(hi) + "}");
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

double ClearanceLengths::of(ObjectClass c) const {
  switch (c) {
    case ObjectClass::Pedestrian: return pedestrian;
    case ObjectClass::Car: return car;
    case ObjectClass::Bus: return bus;
    case ObjectClass::Truck: return truck;
    case ObjectClass::Motorcyclist: return motorcyclist;
  }
  return default_length;
}

void IntersectionConfig::validate() const {
  check_polygon(analysis_region, "analysis_region");
  for (Leg l : kAllLegs) check_polygon(crosswalk(l), "crosswalk " + std::string(to_string(l)));
  if (!(mesh_cell_size > 0.0)) throw ConfigError("mesh_cell_size must be > 0");
  if (!(crosswalk_buffer >= 0.0)) throw ConfigError("crosswalk_buffer must be >= 0");
  if (!(entry_band > 0.0)) throw ConfigError("entry_band must be > 0");
  if (!(crosswalk_fraction > 0.0 && crosswalk_fraction <= 1.0)) {
    throw ConfigError("crosswalk_fraction must be in (0, 1]");
  }
  std::set<int> bearings;
  for (double b : leg_bearings) {
    if (!std::isfinite(b)) throw ConfigError("leg bearing must be finite");
  }
  for (Leg a : kAllLegs) {
    for (Leg b : kAllLegs) {
      if (a != b && bearing_diff_deg(bearing(a), bearing(b)) < 1.0) {
        throw ConfigError("leg bearings must be distinct");
      }
    }
  }

  const bool ns_major = major_axis == Axis::NorthSouth;
  const int nb = through_phases[idx(Bound::NB)];
  const int sb = through_phases[idx(Bound::SB)];
  const int eb = through_phases[idx(Bound::EB)];
  const int wb = through_phases[idx(Bound::WB)];
  check_pair(nb, sb, ns_major ? 2 : 4, ns_major ? 6 : 8, "through_phases NB/SB");
  check_pair(eb, wb, ns_major ? 4 : 2, ns_major ? 8 : 6, "through_phases EB/WB");

  // A crosswalk runs alongside the road it does not cross, so it shares that road's phases.
  const int pn = pedestrian_phases[idx(Leg::N)];
  const int ps = pedestrian_phases[idx(Leg::S)];
  const int pe = pedestrian_phases[idx(Leg::E)];
  const int pw = pedestrian_phases[idx(Leg::W)];
  check_pair(pn, ps, ns_major ? 4 : 2, ns_major ? 8 : 6, "pedestrian_phases N/S");
  check_pair(pe, pw, ns_major ? 2 : 4, ns_major ? 6 : 8, "pedestrian_phases E/W");
}

IntersectionConfig intersection_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("intersection config must be a JSON object");
  for (const char* key : {"center", "crosswalks", "analysis_region", "major_axis"}) {
    if (!j.contains(key)) throw ConfigError(std::string("intersection config missing '") + key + "'");
  }
  IntersectionConfig cfg;
  cfg.center = vec_from_json(j.at("center"), "center");

  const std::string axis = j.at("major_axis").is_string() ? j.at("major_axis").get<std::string>() : "";
  if (axis == "NS") {
    cfg.major_axis = Axis::NorthSouth;
  } else if (axis == "EW") {
    cfg.major_axis = Axis::EastWest;
  } else {
    throw ConfigError("major_axis must be \"NS\" or \"EW\"");
  }
  if (cfg.major_axis == Axis::EastWest) {
    cfg.through_phases = {4, 2, 8, 6};
    cfg.pedestrian_phases = {2, 4, 6, 8};
  }

  if (j.contains("leg_bearings")) {
    for (auto& [k, v] : j.at("leg_bearings").items()) {
      auto leg = parse_leg(k);
      if (!leg || !v.is_number()) throw ConfigError("leg_bearings: bad entry '" + k + "'");
      cfg.leg_bearings[idx(*leg)] = v.get<double>();
    }
  }

  const json& cw = j.at("crosswalks");
  for (Leg l : kAllLegs) {
    const std::string key(to_string(l));
    if (!cw.contains(key)) throw ConfigError("crosswalks: missing leg " + key);
    cfg.crosswalks[idx(l)] = polygon_from_json(cw.at(key), "crosswalk " + key);
  }
  if (cw.size() != 4) throw ConfigError("crosswalks: exactly four legs expected");
  cfg.analysis_region = polygon_from_json(j.at("analysis_region"), "analysis_region");

  cfg.mesh_cell_size = get_or(j, "mesh_cell_size", cfg.mesh_cell_size);
  cfg.crosswalk_buffer = get_or(j, "crosswalk_buffer", cfg.crosswalk_buffer);
  cfg.right_hand_traffic = get_or(j, "right_hand_traffic", cfg.right_hand_traffic);
  cfg.entry_band = get_or(j, "entry_band", cfg.entry_band);
  cfg.crosswalk_fraction = get_or(j, "crosswalk_fraction", cfg.crosswalk_fraction);

  if (j.contains("through_phases")) {
    for (auto& [k, v] : j.at("through_phases").items()) {
      auto b = parse_bound(k);
      if (!b || !v.is_number_integer()) throw ConfigError("through_phases: bad entry '" + k + "'");
      cfg.through_phases[idx(*b)] = v.get<int>();
    }
  }
  if (j.contains("pedestrian_phases")) {
    for (auto& [k, v] : j.at("pedestrian_phases").items()) {
      auto l = parse_leg(k);
      if (!l || !v.is_number_integer()) throw ConfigError("pedestrian_phases: bad entry '" + k + "'");
      cfg.pedestrian_phases[idx(*l)] = v.get<int>();
    }
  }
  cfg.validate();
  return cfg;
}

IntersectionConfig load_intersection_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open intersection config: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("intersection config " + path.string() + ": " + e.what());
  }
  return intersection_from_json(j);
}

json to_json(const IntersectionConfig& cfg) {
  json j;
  j["center"] = {cfg.center.x, cfg.center.y};
  j["major_axis"] = cfg.major_axis == Axis::NorthSouth ? "NS" : "EW";
  for (Leg l : kAllLegs) {
    j["leg_bearings"][std::string(to_string(l))] = cfg.bearing(l);
    j["crosswalks"][std::string(to_string(l))] = polygon_to_json(cfg.crosswalk(l));
    j["pedestrian_phases"][std::string(to_string(l))] = cfg.pedestrian_phases[idx(l)];
  }
  for (Bound b : kAllBounds) j["through_phases"][std::string(to_string(b))] = cfg.through_phases[idx(b)];
  j["analysis_region"] = polygon_to_json(cfg.analysis_region);
  j["mesh_cell_size"] = cfg.mesh_cell_size;
  j["crosswalk_buffer"] = cfg.crosswalk_buffer;
  j["right_hand_traffic"] = cfg.right_hand_traffic;
  j["entry_band"] = cfg.entry_band;
  j["crosswalk_fraction"] = cfg.crosswalk_fraction;
  return j;
}

void EngineParams::validate() const {
  if (!(ttc.d_max > 0.0)) throw ConfigError("d_max must be > 0");
  if (ttc.k_min < 1) throw ConfigError("k_min must be >= 1");
  if (!(ttc.v_stop >= 0.0)) throw ConfigError("v_stop must be >= 0");
  if (!(ttc.theta_par_deg > 0.0 && ttc.theta_par_deg < 90.0)) throw ConfigError("theta_par must be in (0, 90)");
  if (!(ttc.w_lat >= 0.0)) throw ConfigError("w_lat must be >= 0");
  if (!(ttc.ttc_severe > 0.0)) throw ConfigError("ttc_severe must be > 0");
  for (ObjectClass c : kAllClasses) {
    if (!(ttc.clearance.of(c) >= 0.0)) throw ConfigError("l_clear must be >= 0");
  }
  if (!(pet.pet_window >= 0.0)) throw ConfigError("pet_window must be >= 0");
  if (!(pet.pet_severe >= 0.0)) throw ConfigError("pet_severe must be >= 0");
  if (!(classify.t_grace >= 0.0)) throw ConfigError("t_grace must be >= 0");
  if (ingest.smoothing_window < 1 || ingest.smoothing_window % 2 == 0) {
    throw ConfigError("smoothing_window must be a positive odd integer");
  }
  if (kde_bandwidth && !(*kde_bandwidth > 0.0)) throw ConfigError("kde_bandwidth must be > 0");
  if (stats.monte_carlo_samples == 0) throw ConfigError("monte_carlo_samples must be > 0");
}

EngineParams params_from_json(const json& j, EngineParams p) {
  if (j.is_null()) return p;
  if (!j.is_object()) throw ConfigError("params must be a JSON object");
  static const std::set<std::string> known = {
      "d_max",      "k_min",          "v_stop",  "theta_par",           "w_lat",
      "l_clear",    "ttc_severe",     "include_following", "pet_window", "pet_severe",
      "t_grace",    "p_method",       "monte_carlo_samples", "seed",   "force_velocity",
      "smoothing_window", "kde_bandwidth"};
  for (auto& [k, v] : j.items()) {
    if (!known.count(k)) throw ConfigError("unknown parameter '" + k + "'");
  }
  p.ttc.d_max = get_or(j, "d_max", p.ttc.d_max);
  p.ttc.k_min = get_or(j, "k_min", p.ttc.k_min);
  p.ttc.v_stop = get_or(j, "v_stop", p.ttc.v_stop);
  p.ttc.theta_par_deg = get_or(j, "theta_par", p.ttc.theta_par_deg);
  p.ttc.w_lat = get_or(j, "w_lat", p.ttc.w_lat);
  p.ttc.ttc_severe = get_or(j, "ttc_severe", p.ttc.ttc_severe);
  p.ttc.include_following = get_or(j, "include_following", p.ttc.include_following);
  if (j.contains("l_clear")) {
    const json& lc = j.at("l_clear");
    if (!lc.is_object()) throw ConfigError("l_clear must map class names to meters");
    auto& c = p.ttc.clearance;
    if (lc.contains("default")) {
      const double d = lc.at("default").get<double>();
      c.default_length = c.car = c.truck = c.motorcyclist = d;
    }
    for (auto& [k, v] : lc.items()) {
      if (k == "default") continue;
      auto cls = parse_object_class(k);
      if (!cls || !v.is_number()) throw ConfigError("l_clear: bad entry '" + k + "'");
      const double len = v.get<double>();
      switch (*cls) {
        case ObjectClass::Pedestrian: c.pedestrian = len; break;
        case ObjectClass::Car: c.car = len; break;
        case ObjectClass::Bus: c.bus = len; break;
        case ObjectClass::Truck: c.truck = len; break;
        case ObjectClass::Motorcyclist: c.motorcyclist = len; break;
      }
    }
  }
  p.pet.pet_window = get_or(j, "pet_window", p.pet.pet_window);
  p.pet.pet_severe = get_or(j, "pet_severe", p.pet.pet_severe);
  p.classify.t_grace = get_or(j, "t_grace", p.classify.t_grace);
  if (j.contains("p_method")) {
    const auto m = get_or<std::string>(j, "p_method", "");
    if (m == "t_dist") {
      p.stats.p_method = PValueMethod::TDist;
    } else if (m == "permutation") {
      p.stats.p_method = PValueMethod::Permutation;
    } else {
      throw ConfigError("p_method must be \"t_dist\" or \"permutation\"");
    }
  }
  p.stats.monte_carlo_samples = get_or(j, "monte_carlo_samples", p.stats.monte_carlo_samples);
  p.stats.seed = get_or(j, "seed", p.stats.seed);
  p.ingest.force_velocity = get_or(j, "force_velocity", p.ingest.force_velocity);
  p.ingest.smoothing_window = get_or(j, "smoothing_window", p.ingest.smoothing_window);
  if (j.contains("kde_bandwidth")) {
    if (j.at("kde_bandwidth").is_null()) {
      p.kde_bandwidth.reset();
    } else {
      p.kde_bandwidth = get_or(j, "kde_bandwidth", 0.0);
    }
  }
  p.validate();
  return p;
}

json to_json(const EngineParams& p) {
  json j;
  j["d_max"] = p.ttc.d_max;
  j["k_min"] = p.ttc.k_min;
  j["v_stop"] = p.ttc.v_stop;
  j["theta_par"] = p.ttc.theta_par_deg;
  j["w_lat"] = p.ttc.w_lat;
  j["l_clear"] = {{"default", p.ttc.clearance.default_length},
                  {"pedestrian", p.ttc.clearance.pedestrian},
                  {"car", p.ttc.clearance.car},
                  {"bus", p.ttc.clearance.bus},
                  {"truck", p.ttc.clearance.truck},
                  {"motorcyclist", p.ttc.clearance.motorcyclist}};
  j["ttc_severe"] = p.ttc.ttc_severe;
  j["include_following"] = p.ttc.include_following;
  j["pet_window"] = p.pet.pet_window;
  j["pet_severe"] = p.pet.pet_severe;
  j["t_grace"] = p.classify.t_grace;
  j["p_method"] = p.stats.p_method == PValueMethod::TDist ? "t_dist" : "permutation";
  j["monte_carlo_samples"] = p.stats.monte_carlo_samples;
  j["seed"] = p.stats.seed;
  j["force_velocity"] = p.ingest.force_velocity;
  j["smoothing_window"] = p.ingest.smoothing_window;
  j["kde_bandwidth"] = p.kde_bandwidth ? json(*p.kde_bandwidth) : json(nullptr);
  return j;
}

IntersectionConfig default_intersection() {
  IntersectionConfig cfg;
  cfg.center = {0.0, 0.0};
  cfg.analysis_region = Polygon({{-20, -20}, {20, -20}, {20, 20}, {-20, 20}});
  cfg.crosswalks[idx(Leg::N)] = Polygon({{-10, 11}, {10, 11}, {10, 14}, {-10, 14}});
  cfg.crosswalks[idx(Leg::S)] = Polygon({{-10, -14}, {10, -14}, {10, -11}, {-10, -11}});
  cfg.crosswalks[idx(Leg::E)] = Polygon({{11, -10}, {14, -10}, {14, 10}, {11, 10}});
  cfg.crosswalks[idx(Leg::W)] = Polygon({{-14, -10}, {-11, -10}, {-11, 10}, {-14, 10}});
  cfg.major_axis = Axis::NorthSouth;
  cfg.validate();
  return cfg;
}

}  // namespace intersafe

#include "intersafe/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "intersafe/classify.hpp"
#include "intersafe/errors.hpp"
#include "intersafe/format.hpp"
#include "intersafe/parallel.hpp"
#include "intersafe/pet.hpp"
#include "intersafe/svg.hpp"
#include "intersafe/synth.hpp"
#include "intersafe/ttc.hpp"

#ifndef INTERSAFE_DATA_DIR
#define INTERSAFE_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace intersafe {

// ---------------------------------------------------------------------------------------
// Hashing

namespace {

std::string hex(const unsigned char* data, unsigned len) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(digits[data[i] >> 4]);
    out.push_back(digits[data[i] & 0xF]);
  }
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw ComputationError("SHA-256 failed");
  }
  return hex(md, len);
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

// ---------------------------------------------------------------------------------------
// Run config

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

void require_file(const fs::path& p, const std::string& what) {
  if (!fs::is_regular_file(p)) throw ConfigError(what + " not found: " + p.string());
}

GameSource parse_game_source(const std::string& s) {
  if (s == "http") return GameSource::Http;
  if (s == "fixture") return GameSource::Fixture;
  throw ConfigError("games.source must be \"http\" or \"fixture\"");
}

}  // namespace

RunConfig load_run_config(const fs::path& path) {
  RunConfig rc;
  rc.source = path;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open run config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("run config " + path.string() + ": " + e.what());
  }
  const fs::path base = path.parent_path();
  try {
    if (j.contains("intersection")) {
      rc.intersection_path = resolve(base, j["intersection"].get<std::string>());
      require_file(rc.intersection_path, "intersection config");
      rc.intersection = load_intersection_config(rc.intersection_path);
    } else {
      rc.intersection = default_intersection();
    }
    std::set<std::string> dates;
    for (const auto& dj : j.value("days", json::array())) {
      DayInput d;
      d.date = dj.at("date").get<std::string>();
      d.label = dj.value("label", std::string("day"));
      d.weekday = dj.value("weekday", std::string("Any"));
      if (!dates.insert(d.date).second) throw ConfigError("duplicate day " + d.date);
      if (dj.contains("trajectories")) {
        d.trajectories = resolve(base, dj["trajectories"].get<std::string>());
        require_file(d.trajectories, "trajectory file");
      }
      if (dj.contains("signal_log")) {
        d.signal_log = resolve(base, dj["signal_log"].get<std::string>());
        require_file(*d.signal_log, "signal log");
      }
      if (dj.contains("events")) {
        d.events = resolve(base, dj["events"].get<std::string>());
        require_file(*d.events, "events file");
      }
      if (d.trajectories.empty() && !d.events) throw ConfigError("day " + d.date + " has no input files");
      rc.days.push_back(std::move(d));
    }
    if (j.contains("params")) rc.params = params_from_json(j["params"]);
    rc.params.validate();
    const json g = j.value("games", json::object());
    rc.games.source = parse_game_source(g.value("source", std::string("fixture")));
    rc.games.base_url = g.value("base_url", rc.games.base_url);
    rc.games.team = g.value("team", rc.games.team);
    rc.games.fixture_path = g.contains("fixture") ? resolve(base, g["fixture"].get<std::string>())
                                                  : fs::path(INTERSAFE_DATA_DIR) / "cfb_games_fixture.csv";
    if (g.contains("cache_dir")) rc.games.cache_dir = resolve(base, g["cache_dir"].get<std::string>());
    rc.games.time_zone.standard_offset_minutes =
        g.value("standard_offset_minutes", rc.games.time_zone.standard_offset_minutes);
    rc.games.time_zone.us_daylight_saving = g.value("us_daylight_saving", rc.games.time_zone.us_daylight_saving);
    if (j.contains("output_dir")) rc.output_dir = resolve(base, j["output_dir"].get<std::string>());
    rc.threads = j.value("threads", 0u);
  } catch (const json::exception& e) {
    throw ConfigError("run config " + path.string() + ": " + e.what());
  }
  rc.games.api_key = api_key_from_env();
  return rc;
}

std::optional<MetricSelection> parse_metric_selection(std::string_view s) {
  if (s == "ttc") return MetricSelection::Ttc;
  if (s == "pet") return MetricSelection::Pet;
  if (s == "both") return MetricSelection::Both;
  return std::nullopt;
}

// ---------------------------------------------------------------------------------------
// Per-day processing

DayData load_day(const DayInput& day, const RunConfig& cfg) {
  DayData d;
  d.input = day;
  if (day.trajectories.empty()) throw ConfigError("day " + day.date + " has no trajectory file");
  auto parsed = parse_trajectories(day.trajectories);
  d.rows_read = parsed.rows_read;
  d.rejected_count = parsed.rejected.size();
  d.warnings = std::move(parsed.warnings);
  const VelocityOptions vopts{cfg.params.ingest.force_velocity, cfg.params.ingest.smoothing_window};
  for (Trajectory& tr : parsed.trajectories) {
    if (tr.points.size() < 2) {
      d.warnings.push_back("trajectory " + tr.object_id + " has a single sample; dropped");
      continue;
    }
    d.trajectories.push_back(tr.has_velocities() && !vopts.force ? std::move(tr) : estimate_velocities(tr, vopts));
  }
  if (day.signal_log) d.signal_log = parse_signal_log(*day.signal_log);
  d.index = classify_trajectories(d.trajectories, cfg.intersection, d.signal_log ? &*d.signal_log : nullptr,
                                  cfg.params.classify);
  return d;
}

std::vector<ConflictEvent> day_conflicts(const DayData& day, const RunConfig& cfg, MetricSelection metric) {
  std::vector<ConflictEvent> events;
  if (metric != MetricSelection::Pet) {
    events = detect_ttc_conflicts(day.trajectories, cfg.params.ttc, cfg.threads);
  }
  if (metric != MetricSelection::Ttc) {
    const MeshGrid mesh = build_mesh(cfg.intersection);
    auto pet = detect_pet_conflicts(extract_transits(day.trajectories, mesh, cfg.threads), cfg.params.pet);
    events.insert(events.end(), std::make_move_iterator(pet.begin()), std::make_move_iterator(pet.end()));
  }
  classify_events(events, day.trajectories, day.index, cfg.intersection, cfg.params);
  sort_events(events);
  return events;
}

std::vector<ConflictEvent> day_events(const DayInput& day, const RunConfig& cfg, MetricSelection metric) {
  if (day.events) {
    auto events = read_events(*day.events);
    std::erase_if(events, [&](const ConflictEvent& e) {
      return (metric == MetricSelection::Ttc && e.metric != Metric::TTC) ||
             (metric == MetricSelection::Pet && e.metric != Metric::PET);
    });
    return events;
  }
  return day_conflicts(load_day(day, cfg), cfg, metric);
}

std::string daily_average_csv(const std::vector<DayTotal>& days) {
  std::map<std::string, std::vector<double>> groups;
  for (const DayTotal& d : days) groups[d.group].push_back(static_cast<double>(d.conflicts));
  std::ostringstream out;
  out << "group,days,mean_conflicts_per_day\n";
  for (const auto& [g, xs] : groups) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    out << g << ',' << xs.size() << ',' << fixed(sum / static_cast<double>(xs.size()), 2) << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------------------
// Commands

namespace {

std::string to_csv(const std::vector<ConflictEvent>& events) {
  std::ostringstream out;
  write_events(out, events);
  return out.str();
}

std::vector<const DayInput*> selected_days(const RunConfig& rc, const CommandOptions& opts) {
  std::vector<const DayInput*> out;
  for (const std::string& want : opts.days) {
    if (std::none_of(rc.days.begin(), rc.days.end(), [&](const DayInput& d) { return d.date == want; })) {
      throw ConfigError("--days: no configured day " + want);
    }
  }
  for (const DayInput& d : rc.days) {
    if (opts.days.empty() || std::find(opts.days.begin(), opts.days.end(), d.date) != opts.days.end()) {
      out.push_back(&d);
    }
  }
  if (out.empty()) throw ConfigError("no days selected");
  return out;
}

std::string_view metric_name(MetricSelection m) {
  switch (m) {
    case MetricSelection::Ttc: return "ttc";
    case MetricSelection::Pet: return "pet";
    case MetricSelection::Both: return "both";
  }
  return "";
}

json manifest_base(const CommandOptions& opts, const RunConfig* rc) {
  json m;
  m["command"] = opts.command;
  if (rc) {
    const fs::path base = rc->source.parent_path();
    auto rel = [&](const fs::path& p) { return p.lexically_relative(base).generic_string(); };
    m["config"] = {{"file", rc->source.filename().generic_string()}, {"sha256", sha256_file(rc->source)}};
    m["intersection"] = rc->intersection_path.empty()
                            ? json{{"file", "built-in"}, {"sha256", sha256_hex(to_json(rc->intersection).dump())}}
                            : json{{"file", rel(rc->intersection_path)}, {"sha256", sha256_file(rc->intersection_path)}};
    json inputs = json::array();
    for (const DayInput* d : selected_days(*rc, opts)) {
      json e = {{"date", d->date}, {"group", d->group()}};
      if (!d->trajectories.empty()) e["trajectories"] = {{"file", rel(d->trajectories)}, {"sha256", sha256_file(d->trajectories)}};
      if (d->signal_log) e["signal_log"] = {{"file", rel(*d->signal_log)}, {"sha256", sha256_file(*d->signal_log)}};
      if (d->events) e["events"] = {{"file", rel(*d->events)}, {"sha256", sha256_file(*d->events)}};
      inputs.push_back(e);
    }
    m["inputs"] = inputs;
    m["params"] = to_json(rc->params);
  }
  m["options"] = {{"days", opts.days},
                  {"mode", to_string(opts.mode)},
                  {"metric", metric_name(opts.metric)},
                  {"svg", opts.svg}};
  return m;
}

void finish(Artifacts& art, json manifest) {
  json outputs = json::object();
  for (const auto& [name, bytes] : art) outputs[name] = sha256_hex(bytes);
  manifest["outputs"] = outputs;
  art["manifest.json"] = manifest.dump(2) + "\n";
}

GameClient make_game_client(const RunConfig& rc, const CommandOptions& opts) {
  GameClientOptions g = rc.games;
  if (opts.game_source) g.source = *opts.game_source;
  return GameClient(g);
}

Artifacts cmd_ingest(const CommandOptions& opts, const RunConfig& rc, json& manifest) {
  Artifacts art;
  std::ostringstream report;
  report << "date,rows_read,rows_rejected,trajectories,warnings\n";
  for (const DayInput* day : selected_days(rc, opts)) {
    const DayData d = load_day(*day, rc);
    std::ostringstream traj;
    write_trajectories(traj, d.trajectories);
    art[day->date + "_trajectories.csv"] = traj.str();
    report << day->date << ',' << d.rows_read << ',' << d.rejected_count << ',' << d.trajectories.size() << ','
           << d.warnings.size() << '\n';
  }
  art["ingest_report.csv"] = report.str();
  (void)manifest;
  return art;
}

Artifacts cmd_conflicts(const CommandOptions& opts, const RunConfig& rc, json& manifest) {
  Artifacts art;
  json jaywalk_mode = json::object();
  for (const DayInput* day : selected_days(rc, opts)) {
    const DayData d = load_day(*day, rc);
    art[day->date + "_events.csv"] = to_csv(day_conflicts(d, rc, opts.metric));
    jaywalk_mode[day->date] = d.signal_log ? "signal-aware" : "signal-unaware";
  }
  manifest["jaywalk_mode"] = jaywalk_mode;
  return art;
}

Artifacts cmd_volumes(const CommandOptions& opts, const RunConfig& rc, json& manifest) {
  Artifacts art;
  GameClient games = make_game_client(rc, opts);
  for (const DayInput* day : selected_days(rc, opts)) {
    const DayData d = load_day(*day, rc);
    const VolumeMatrix m = volume_matrix(d.trajectories, d.index, opts.mode);
    const std::string stem = day->date + "_" + std::string(to_string(opts.mode)) + "_volume";
    art[stem + ".csv"] = volume_csv(m);
    if (opts.svg) {
      std::optional<GameMarkers> markers;
      if (const auto g = games.fetch_game(day->date)) markers = GameMarkers{g->start_time, estimated_end(g->start_time)};
      double data_end = 0.0;
      for (const Trajectory& tr : d.trajectories) data_end = std::max(data_end, tr.end_time());
      art[stem + ".svg"] = volume_heatmap_svg(m, markers, data_end);
    }
  }
  if (!games.notes().empty()) manifest["game_notes"] = games.notes();
  return art;
}

std::vector<ConflictEvent> mode_events(std::vector<ConflictEvent> events, VolumeMode mode) {
  const ConflictKind want = mode == VolumeMode::Pedestrian ? ConflictKind::P2V : ConflictKind::V2V;
  std::erase_if(events, [&](const ConflictEvent& e) { return e.kind != want; });
  return events;
}

Artifacts cmd_aggregate(const CommandOptions& opts, const RunConfig& rc, json& manifest) {
  std::vector<DayCounts> days;
  std::set<std::string> groups;
  for (const DayInput* day : selected_days(rc, opts)) {
    const auto events = mode_events(day_events(*day, rc, opts.metric), opts.mode);
    days.push_back({day->date, day->group(), hourly_counts(events)});
    groups.insert(day->group());
  }
  std::vector<std::string> warnings;
  const auto series = aggregate_conflicts(days, {groups.begin(), groups.end()}, &warnings);
  Artifacts art;
  const std::string stem = std::string("aggregate_") + (opts.mode == VolumeMode::Pedestrian ? "p2v" : "v2v");
  art[stem + ".csv"] = aggregate_csv(series);
  if (opts.svg) art[stem + ".svg"] = aggregate_svg(series);
  if (!warnings.empty()) manifest["warnings"] = warnings;
  return art;
}

Artifacts cmd_spatial(const CommandOptions& opts, const RunConfig& rc, json& manifest) {
  std::vector<ConflictEvent> all;
  for (const DayInput* day : selected_days(rc, opts)) {
    auto events = mode_events(day_events(*day, rc, opts.metric), opts.mode);
    all.insert(all.end(), events.begin(), events.end());
  }
  const MeshGrid mesh = build_mesh(rc.intersection);
  const auto points = event_locations(all);
  const SpatialHistogram hist = spatial_histogram(points, mesh);
  Artifacts art;
  art["spatial_histogram.csv"] = histogram_csv(hist);
  manifest["spatial"] = {{"events", all.size()}, {"overflow", hist.overflow}};
  if (!points.empty()) {
    const KdeSurface kde = spatial_kde(points, mesh, rc.params.kde_bandwidth);
    art["spatial_kde.csv"] = kde_csv(kde);
    if (opts.svg) art["spatial_kde.svg"] = kde_svg(kde);
    manifest["spatial"]["bandwidth"] = {kde.bandwidth_x, kde.bandwidth_y};
  } else {
    manifest["spatial"]["kde"] = "skipped: no events";
  }
  return art;
}

Artifacts cmd_correlate(const CommandOptions& opts, const RunConfig& rc, json& manifest) {
  GameClient games = make_game_client(rc, opts);
  std::vector<GameVolume> volumes;
  for (const DayInput* day : selected_days(rc, opts)) {
    const auto game = games.fetch_game(day->date);
    if (!game) continue;
    const DayData d = load_day(*day, rc);
    volumes.push_back({*game, static_cast<double>(pregame_volume(d.trajectories, d.index, game->start_time, opts.mode))});
  }
  const CorrelationResult res = correlate_volume_win_prob(volumes, rc.params.stats);
  Artifacts art;
  art["correlation.csv"] = correlation_csv(res);
  std::ostringstream summary;
  summary << "statistic,value\n"
          << "n," << volumes.size() << '\n'
          << "r," << fixed(res.r, 3) << '\n'
          << "p," << fixed(res.p, 4) << '\n'
          << "p_method," << (res.method == PValueMethod::TDist ? "t_dist" : "permutation") << '\n'
          << "probability,away\n";
  art["correlation_summary.csv"] = summary.str();
  if (!games.notes().empty()) manifest["game_notes"] = games.notes();
  return art;
}

Artifacts cmd_report(const CommandOptions& opts, const RunConfig& rc, json& manifest) {
  (void)manifest;
  std::vector<DayTotal> totals_all;
  std::vector<DayTotal> totals_p2v;
  std::vector<DayTotal> totals_v2v;
  std::vector<ConflictEvent> all;
  std::ostringstream per_day;
  per_day << "date,group,conflicts,p2v,v2v,severe,jaywalk_p2v\n";
  for (const DayInput* day : selected_days(rc, opts)) {
    const auto events = day_events(*day, rc, opts.metric);
    std::size_t p2v = 0;
    std::size_t severe = 0;
    std::size_t jay = 0;
    for (const ConflictEvent& e : events) {
      p2v += e.kind == ConflictKind::P2V;
      severe += e.severe;
      jay += e.kind == ConflictKind::P2V && e.jaywalk;
    }
    totals_all.push_back({day->group(), events.size()});
    totals_p2v.push_back({day->group(), p2v});
    totals_v2v.push_back({day->group(), events.size() - p2v});
    per_day << day->date << ',' << day->group() << ',' << events.size() << ',' << p2v << ','
            << events.size() - p2v << ',' << severe << ',' << jay << '\n';
    all.insert(all.end(), events.begin(), events.end());
  }

  const auto types = p2v_type_counts(all);
  const std::size_t p2v_total = std::accumulate(types.begin(), types.end(), std::size_t{0});
  const auto hist = movement_histogram(jaywalk_p2v(all));

  std::ostringstream doc;
  doc << "# Conflict report\n\n## Mean conflicts per day\n\n";
  doc << "### All conflicts\n\n" << daily_average_csv(totals_all) << '\n';
  doc << "### P2V\n\n" << daily_average_csv(totals_p2v) << '\n';
  doc << "### V2V\n\n" << daily_average_csv(totals_v2v) << '\n';
  doc << "## P2V types\n\ntype,count\n";
  for (int t = 1; t <= 6; ++t) doc << t << ',' << types[static_cast<std::size_t>(t)] << '\n';
  doc << "none," << types[0] << '\n';
  doc << "\nUntyped P2V share: "
      << (p2v_total ? fixed(static_cast<double>(types[0]) / static_cast<double>(p2v_total), 3) : "n/a") << "\n\n";
  doc << "## Jaywalking P2V conflicts by vehicle movement\n\nmovement,count\n";
  for (const MovementCount& c : hist) doc << c.movement.str() << ',' << c.count << '\n';

  Artifacts art;
  art["report.md"] = doc.str();
  art["report_days.csv"] = per_day.str();
  art["daily_averages.csv"] = daily_average_csv(totals_all);
  return art;
}

Artifacts cmd_config_report(const RunConfig& rc) {
  Artifacts art;
  art["config_report.csv"] = config_report_csv(rc.intersection);
  return art;
}

Artifacts cmd_synth(const CommandOptions& opts, json& manifest) {
  if (opts.scenario.empty()) throw ConfigError("synth needs --scenario");
  ScenarioSpec spec = load_scenario(opts.scenario);
  if (opts.seed) spec.seed = *opts.seed;
  IntersectionConfig cfg = default_intersection();
  EngineParams params;
  if (!opts.config.empty()) {
    const RunConfig rc = load_run_config(opts.config);
    cfg = rc.intersection;
    params = rc.params;
  }
  const SynthOutput out = generate(spec, cfg, params);
  Artifacts art;
  std::ostringstream traj;
  write_trajectories(traj, out.trajectories);
  art["trajectories.csv"] = traj.str();
  std::ostringstream log;
  write_signal_log(log, out.signal_log);
  art["signal_log.csv"] = log.str();
  std::ostringstream truth;
  write_ground_truth(truth, out.truth);
  art["ground_truth.csv"] = truth.str();
  manifest["scenario"] = {{"file", opts.scenario.filename().generic_string()},
                          {"sha256", sha256_file(opts.scenario)},
                          {"seed", spec.seed}};
  return art;
}

}  // namespace

Artifacts run_command(const CommandOptions& opts) {
  if (opts.command == "synth") {
    json manifest = manifest_base(opts, nullptr);
    Artifacts art = cmd_synth(opts, manifest);
    finish(art, manifest);
    return art;
  }
  if (opts.config.empty()) throw ConfigError(opts.command + " needs --config");
  const RunConfig rc = load_run_config(opts.config);
  json manifest = manifest_base(opts, &rc);
  Artifacts art;
  if (opts.command == "ingest") art = cmd_ingest(opts, rc, manifest);
  else if (opts.command == "conflicts") art = cmd_conflicts(opts, rc, manifest);
  else if (opts.command == "volumes") art = cmd_volumes(opts, rc, manifest);
  else if (opts.command == "aggregate") art = cmd_aggregate(opts, rc, manifest);
  else if (opts.command == "spatial") art = cmd_spatial(opts, rc, manifest);
  else if (opts.command == "correlate") art = cmd_correlate(opts, rc, manifest);
  else if (opts.command == "report") art = cmd_report(opts, rc, manifest);
  else if (opts.command == "config-report") art = cmd_config_report(rc);
  else throw ConfigError("unknown command '" + opts.command + "'");
  finish(art, manifest);
  return art;
}

void commit_artifacts(const Artifacts& artifacts, const fs::path& out) {
  const fs::path staging = out / ".staging";
  fs::remove_all(staging);
  fs::create_directories(staging);
  try {
    for (const auto& [name, bytes] : artifacts) {
      std::ofstream f(staging / name, std::ios::binary | std::ios::trunc);
      f << bytes;
      if (!f) throw DataError("cannot write " + (staging / name).string());
    }
    for (const auto& [name, bytes] : artifacts) fs::rename(staging / name, out / name);
  } catch (...) {
    fs::remove_all(staging);
    throw;
  }
  fs::remove_all(staging);
}

}  // namespace intersafe

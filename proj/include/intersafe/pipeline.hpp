#pragma once
/**
 * @file pipeline.hpp
 * @brief Run configuration and the ingest -> analysis -> export commands behind the CLI.
 *
 * Commands build their artifacts in memory (file name -> bytes); `commit_artifacts`
 * writes them through a staging directory so a failed run leaves nothing behind.
 */

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "intersafe/analytics.hpp"
#include "intersafe/config.hpp"
#include "intersafe/conflict.hpp"
#include "intersafe/games.hpp"
#include "intersafe/ingest.hpp"

namespace intersafe {

struct DayInput {
  std::string date;     // YYYY-MM-DD
  std::string label;    // e.g. "gameday", "non-gameday"
  std::string weekday;  // e.g. "Saturday"
  std::filesystem::path trajectories;
  std::optional<std::filesystem::path> signal_log;
  std::optional<std::filesystem::path> events;  // precomputed events, used by report/aggregate

  std::string group() const { return weekday + "-" + label; }
};

struct RunConfig {
  std::filesystem::path source;  // the config file itself
  std::filesystem::path intersection_path;
  IntersectionConfig intersection;
  std::vector<DayInput> days;
  EngineParams params;
  GameClientOptions games;
  std::filesystem::path output_dir;  // empty: the caller decides
  unsigned threads = 0;
};

/// Relative paths resolve against the config file's directory. Every referenced input
/// must exist and dates must be unique. Throws ConfigError.
RunConfig load_run_config(const std::filesystem::path& path);

enum class MetricSelection : std::uint8_t { Ttc, Pet, Both };
std::optional<MetricSelection> parse_metric_selection(std::string_view s);

struct DayData {
  DayInput input;
  std::vector<Trajectory> trajectories;
  std::optional<SignalLog> signal_log;
  TrajectoryIndex index;
  std::size_t rejected_count = 0;
  std::size_t rows_read = 0;
  std::vector<std::string> warnings;
};

/// Parses, fills velocities and classifies every trajectory of one day.
DayData load_day(const DayInput& day, const RunConfig& cfg);

/// TTC and/or PET events for one day, classified and sorted.
std::vector<ConflictEvent> day_conflicts(const DayData& day, const RunConfig& cfg, MetricSelection metric);

/// Events from the day's precomputed events file when given, otherwise detected.
std::vector<ConflictEvent> day_events(const DayInput& day, const RunConfig& cfg, MetricSelection metric);

struct CommandOptions {
  std::string command;
  std::filesystem::path config;
  std::vector<std::string> days;  // empty: all
  VolumeMode mode = VolumeMode::Pedestrian;
  MetricSelection metric = MetricSelection::Both;
  std::optional<GameSource> game_source;
  bool svg = false;
  std::optional<std::uint64_t> seed;
  std::filesystem::path scenario;  // synth
};

using Artifacts = std::map<std::string, std::string>;

/// Runs a command and returns its artifacts, including manifest.json.
Artifacts run_command(const CommandOptions& opts);

/// Writes artifacts into `out` via `<out>/.staging`, replacing same-named files.
void commit_artifacts(const Artifacts& artifacts, const std::filesystem::path& out);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

struct DayTotal {
  std::string group;
  std::size_t conflicts = 0;
};

/// CSV of mean conflicts per day for each group, two decimals ("507.60").
std::string daily_average_csv(const std::vector<DayTotal>& days);

}  // namespace intersafe

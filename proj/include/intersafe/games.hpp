#pragma once
/**
 * @file games.hpp
 * @brief Football game metadata: fixture file, HTTP client with a disk cache, and
 *        derived game times.
 *
 * Fixture CSV header (exact):
 *   matchup,date,start_time,attendance,excitement_index,home_win_prob
 * date is YYYY-MM-DD, start_time is local HH:MM.
 */

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace intersafe {

struct GameRecord {
  std::string matchup;  // "Away @ Home"
  std::string date;     // YYYY-MM-DD, local
  double start_time = 0.0;  // seconds since local midnight
  long long attendance = 0;
  double excitement_index = 0.0;
  double home_win_prob = 0.0;
  double away_win_prob = 0.0;  // always 1 - home_win_prob
};

inline constexpr const char* kGameFixtureHeader =
    "matchup,date,start_time,attendance,excitement_index,home_win_prob";

/// Average game length: 3 h 22 min.
inline constexpr double kGameLength = 202.0 * 60.0;
double estimated_end(double start_time);

/// Validates ranges and fills away_win_prob. Throws DataError.
GameRecord normalize_game(GameRecord g);

std::vector<GameRecord> load_game_fixture(const std::filesystem::path& path);
std::optional<GameRecord> find_game(const std::vector<GameRecord>& games, const std::string& date);

nlohmann::json to_json(const GameRecord& g);
GameRecord game_from_json(const nlohmann::json& j);

/// Local clock for converting provider UTC kick-off times.
struct TimeZoneRule {
  int standard_offset_minutes = -300;  // Eastern standard time
  bool us_daylight_saving = true;      // second Sunday of March to first Sunday of November

  /// Local (date, seconds since midnight) of a UTC instant given as "YYYY-MM-DDTHH:MM[:SS]...".
  std::pair<std::string, double> to_local(const std::string& iso_utc) const;
};

enum class GameSource : std::uint8_t { Http, Fixture };

struct GameClientOptions {
  GameSource source = GameSource::Fixture;
  std::string base_url = "https://api.collegefootballdata.com";
  std::string team = "Florida";
  std::filesystem::path fixture_path;
  std::filesystem::path cache_dir;  // empty disables the cache
  std::optional<std::string> api_key;
  TimeZoneRule time_zone;
  int timeout_seconds = 10;
};

/// Resolves game records by date. HTTP mode reads the disk cache first, then queries the
/// provider (bearer token), then falls back to the fixture; a malformed payload is a
/// DataError carrying an excerpt of the body.
class GameClient {
 public:
  explicit GameClient(GameClientOptions opts);

  std::optional<GameRecord> fetch_game(const std::string& date);

  /// Human-readable notes about fallbacks taken, in order.
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  std::optional<GameRecord> from_fixture(const std::string& date);
  std::optional<GameRecord> from_http(const std::string& date);
  std::optional<std::optional<GameRecord>> read_cache(const std::string& date) const;
  void write_cache(const std::string& date, const std::optional<GameRecord>& game) const;

  GameClientOptions opts_;
  std::optional<std::vector<GameRecord>> fixture_;
  std::vector<std::string> notes_;
};

/// Reads CFB_API_KEY from the environment.
std::optional<std::string> api_key_from_env();

}  // namespace intersafe

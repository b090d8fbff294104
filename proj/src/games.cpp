#include "intersafe/games.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "intersafe/csv.hpp"
#include "intersafe/errors.hpp"
#include "intersafe/format.hpp"
#include "intersafe/types.hpp"

namespace intersafe {

double estimated_end(double start_time) { return start_time + kGameLength; }

GameRecord normalize_game(GameRecord g) {
  if (g.attendance < 0) throw DataError("game " + g.date + ": negative attendance");
  if (!(g.home_win_prob >= 0.0 && g.home_win_prob <= 1.0)) {
    throw DataError("game " + g.date + ": home win probability outside [0,1]");
  }
  g.away_win_prob = 1.0 - g.home_win_prob;
  return g;
}

std::vector<GameRecord> load_game_fixture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open game fixture " + path.string());
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kGameFixtureHeader) {
    throw DataError(std::string("game fixture: header must be exactly '") + kGameFixtureHeader + "'");
  }
  std::vector<GameRecord> games;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = strip_cr(line);
    if (row.empty()) continue;
    const auto f = split_csv(row);
    const std::string where = "game fixture line " + std::to_string(line_no);
    if (f.size() != 6) throw DataError(where + ": expected 6 fields");
    GameRecord g;
    g.matchup = std::string(f[0]);
    g.date = std::string(f[1]);
    const auto start = parse_clock(f[2]);
    double attendance = 0.0;
    if (!start || !parse_double(f[3], attendance) || !parse_double(f[4], g.excitement_index) ||
        !parse_double(f[5], g.home_win_prob)) {
      throw DataError(where + ": unparsable field");
    }
    g.start_time = *start;
    g.attendance = std::llround(attendance);
    games.push_back(normalize_game(std::move(g)));
  }
  return games;
}

std::optional<GameRecord> find_game(const std::vector<GameRecord>& games, const std::string& date) {
  for (const GameRecord& g : games) {
    if (g.date == date) return g;
  }
  return std::nullopt;
}

nlohmann::json to_json(const GameRecord& g) {
  return {{"matchup", g.matchup},
          {"date", g.date},
          {"start_time", format_clock(g.start_time)},
          {"attendance", g.attendance},
          {"excitement_index", g.excitement_index},
          {"home_win_prob", g.home_win_prob}};
}

GameRecord game_from_json(const nlohmann::json& j) {
  GameRecord g;
  try {
    g.matchup = j.at("matchup").get<std::string>();
    g.date = j.at("date").get<std::string>();
    const auto start = parse_clock(j.at("start_time").get<std::string>());
    if (!start) throw DataError("game record: bad start_time");
    g.start_time = *start;
    g.attendance = j.at("attendance").get<long long>();
    g.excitement_index = j.at("excitement_index").get<double>();
    g.home_win_prob = j.at("home_win_prob").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("game record: ") + e.what());
  }
  return normalize_game(std::move(g));
}

namespace {

bool in_us_dst(std::chrono::sys_seconds local_standard) {
  using namespace std::chrono;
  const year_month_day ymd{floor<days>(local_standard)};
  const sys_seconds begin = sys_days{ymd.year() / March / Sunday[2]} + hours{2};
  // Clocks fall back at 02:00 daylight time, which is 01:00 standard time.
  const sys_seconds end = sys_days{ymd.year() / November / Sunday[1]} + hours{1};
  return local_standard >= begin && local_standard < end;
}

std::string date_string(std::chrono::year_month_day ymd) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string excerpt(const std::string& body) { return body.size() > 200 ? body.substr(0, 200) + "..." : body; }

// Provider payloads have used both snake_case and camelCase keys.
const nlohmann::json* field(const nlohmann::json& j, const char* snake, const char* camel) {
  if (auto it = j.find(snake); it != j.end() && !it->is_null()) return &*it;
  if (auto it = j.find(camel); it != j.end() && !it->is_null()) return &*it;
  return nullptr;
}

}  // namespace

std::pair<std::string, double> TimeZoneRule::to_local(const std::string& iso_utc) const {
  using namespace std::chrono;
  int y = 0;
  unsigned mo = 0;
  unsigned d = 0;
  int hh = 0;
  int mm = 0;
  int ss = 0;
  if (std::sscanf(iso_utc.c_str(), "%d-%u-%uT%d:%d:%d", &y, &mo, &d, &hh, &mm, &ss) < 5) {
    throw DataError("unparsable UTC timestamp '" + iso_utc + "'");
  }
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok()) throw DataError("invalid UTC date '" + iso_utc + "'");
  sys_seconds t = sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
  t += minutes{standard_offset_minutes};
  if (us_daylight_saving && in_us_dst(t)) t += hours{1};
  const auto day_start = floor<days>(t);
  return {date_string(year_month_day{day_start}), static_cast<double>((t - day_start).count())};
}

std::optional<std::string> api_key_from_env() {
  const char* key = std::getenv("CFB_API_KEY");
  if (!key || !*key) return std::nullopt;
  return std::string(key);
}

GameClient::GameClient(GameClientOptions opts) : opts_(std::move(opts)) {}

std::optional<GameRecord> GameClient::from_fixture(const std::string& date) {
  if (!fixture_) fixture_ = load_game_fixture(opts_.fixture_path);
  return find_game(*fixture_, date);
}

std::optional<std::optional<GameRecord>> GameClient::read_cache(const std::string& date) const {
  if (opts_.cache_dir.empty()) return std::nullopt;
  std::ifstream in(opts_.cache_dir / (date + ".json"));
  if (!in) return std::nullopt;
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;  // torn or foreign file: treat as a miss
  }
  if (!j.contains("game")) return std::nullopt;
  if (j["game"].is_null()) return std::optional<GameRecord>{};
  return std::optional<GameRecord>{game_from_json(j["game"])};
}

void GameClient::write_cache(const std::string& date, const std::optional<GameRecord>& game) const {
  if (opts_.cache_dir.empty()) return;
  std::filesystem::create_directories(opts_.cache_dir);
  const auto final_path = opts_.cache_dir / (date + ".json");
  const auto tmp_path = opts_.cache_dir / (date + ".json.tmp");
  {
    std::ofstream out(tmp_path, std::ios::trunc);
    const nlohmann::json j = {{"date", date}, {"game", game ? to_json(*game) : nlohmann::json(nullptr)}};
    out << j.dump(2) << '\n';
    if (!out) throw DataError("cannot write game cache " + tmp_path.string());
  }
  std::filesystem::rename(tmp_path, final_path);
}

std::optional<GameRecord> GameClient::from_http(const std::string& date) {
  if (!opts_.api_key) throw std::runtime_error("CFB_API_KEY is not set");
  httplib::Client cli(opts_.base_url);
  cli.set_connection_timeout(opts_.timeout_seconds, 0);
  cli.set_read_timeout(opts_.timeout_seconds, 0);
  const httplib::Headers headers = {{"Authorization", "Bearer " + *opts_.api_key}, {"Accept", "application/json"}};
  const std::string year = date.substr(0, 4);

  auto get = [&](const std::string& path) {
    auto res = cli.Get(path, headers);
    if (!res) throw std::runtime_error("request " + path + " failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw std::runtime_error("request " + path + " returned HTTP " + std::to_string(res->status));
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception&) {
      throw DataError("malformed provider payload from " + path + ": " + excerpt(res->body));
    }
    if (!j.is_array()) throw DataError("provider payload from " + path + " is not a list: " + excerpt(res->body));
    return std::pair(j, res->body);
  };

  const auto [games, games_body] = get("/games?year=" + year + "&team=" + httplib::detail::encode_url(opts_.team));
  try {
    for (const auto& g : games) {
      const auto* start = field(g, "start_date", "startDate");
      if (!start) continue;
      const auto [local_date, local_start] = opts_.time_zone.to_local(start->get<std::string>());
      if (local_date != date) continue;

      GameRecord rec;
      rec.date = date;
      rec.start_time = std::round(local_start / 60.0) * 60.0;
      rec.matchup = field(g, "away_team", "awayTeam")->get<std::string>() + " @ " +
                    field(g, "home_team", "homeTeam")->get<std::string>();
      if (const auto* a = field(g, "attendance", "attendance")) rec.attendance = a->get<long long>();
      if (const auto* x = field(g, "excitement_index", "excitementIndex")) rec.excitement_index = x->get<double>();
      const long long game_id = field(g, "id", "id")->get<long long>();

      const auto [wp, wp_body] =
          get("/metrics/wp/pregame?year=" + year + "&team=" + httplib::detail::encode_url(opts_.team));
      bool found = false;
      for (const auto& w : wp) {
        const auto* id = field(w, "game_id", "gameId");
        if (!id || id->get<long long>() != game_id) continue;
        rec.home_win_prob = field(w, "home_win_prob", "homeWinProb")->get<double>();
        found = true;
        break;
      }
      if (!found) throw DataError("no pregame win probability for game " + std::to_string(game_id));
      return normalize_game(std::move(rec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed provider payload: ") + e.what() + ": " + excerpt(games_body));
  }
  return std::nullopt;
}

std::optional<GameRecord> GameClient::fetch_game(const std::string& date) {
  if (opts_.source == GameSource::Fixture) return from_fixture(date);

  if (auto cached = read_cache(date)) return *cached;
  try {
    auto game = from_http(date);
    write_cache(date, game);
    return game;
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& e) {
    notes_.push_back(std::string("http unavailable (") + e.what() + "), using fixture for " + date);
  }
  if (opts_.fixture_path.empty() || !std::filesystem::exists(opts_.fixture_path)) {
    throw DataError("no game data for " + date + ": provider unreachable and no fixture");
  }
  return from_fixture(date);
}

}  // namespace intersafe

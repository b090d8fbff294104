// intersafe command-line entry point.

#include <iostream>

#include "CLI11.hpp"

#include "intersafe/errors.hpp"
#include "intersafe/pipeline.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitComputation = 4;

}  // namespace

int main(int argc, char** argv) {
  using namespace intersafe;

  CLI::App app{"Intersection safety analytics from road-user trajectories"};
  app.require_subcommand(1);

  CommandOptions opts;
  std::string out;
  std::string mode = "pedestrian";
  std::string metric = "both";
  std::string game_source;
  std::string days;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", opts.config, "Run configuration JSON");
    if (needs_config) c->required();
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--days", days, "Comma-separated dates (YYYY-MM-DD); default all");
    sub->add_option("--mode", mode, "pedestrian or vehicle")->check(CLI::IsMember({"pedestrian", "vehicle"}));
    sub->add_option("--metric", metric, "ttc, pet or both")->check(CLI::IsMember({"ttc", "pet", "both"}));
    sub->add_option("--game-source", game_source, "http or fixture")->check(CLI::IsMember({"http", "fixture"}));
    sub->add_flag("--svg", opts.svg, "Also write SVG figures");
    sub->add_option("--seed", seed, "Random seed override");
  };

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"ingest", "Validate trajectories and fill velocities"},
      {"conflicts", "Detect and classify TTC/PET conflicts"},
      {"volumes", "Hourly phase volume matrices"},
      {"aggregate", "Hourly conflict series per day group"},
      {"spatial", "Conflict location histogram and KDE"},
      {"correlate", "Pre-game volume against win probability"},
      {"report", "Summary of conflicts per day group"},
      {"config-report", "Derived leg, phase and crosswalk table"},
  };
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), true);
  auto* synth = app.add_subcommand("synth", "Generate a synthetic scenario");
  add_common(synth, false);
  synth->add_option("--scenario", opts.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  opts.command = sub->get_name();
  opts.mode = *parse_volume_mode(mode);
  opts.metric = *parse_metric_selection(metric);
  if (!game_source.empty()) opts.game_source = game_source == "http" ? GameSource::Http : GameSource::Fixture;
  if (sub->count("--seed")) opts.seed = seed;
  for (const auto& d : CLI::detail::split(days, ',')) {
    if (!d.empty()) opts.days.push_back(CLI::detail::trim_copy(d));
  }

  try {
    std::filesystem::path out_dir = out;
    if (out_dir.empty() && !opts.config.empty()) out_dir = load_run_config(opts.config).output_dir;
    if (out_dir.empty()) throw ConfigError("no output directory: pass --out or set output_dir in the config");
    const Artifacts artifacts = run_command(opts);
    std::filesystem::create_directories(out_dir);
    commit_artifacts(artifacts, out_dir);
    for (const auto& [name, bytes] : artifacts) std::cout << (out_dir / name).string() << '\n';
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const ComputationError& e) {
    std::cerr << "computation error: " << e.what() << '\n';
    return kExitComputation;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  }
}

// deskzone: occupant state inference, zone diversity, surrogate lighting
// models and layout optimisation from the command line.
//
// Exit codes: 0 success, 1 input error, 2 internal error.

#include <cstdint>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "deskzone/error.hpp"

namespace {

using deskzone::cli::RunConfig;

/// Flags that override config values when given.
class Overrides {
 public:
  template <typename T>
  CLI::Option* add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    auto value = std::make_shared<std::optional<T>>();
    CLI::Option* opt = app->add_option(flag, *value, help);
    apply_.push_back([value, key](RunConfig& c) {
      if (*value) c.set(key, **value);
    });
    return opt;
  }

  CLI::Option* add_list(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    auto value = std::make_shared<std::vector<std::string>>();
    CLI::Option* opt = app->add_option(flag, *value, help);
    apply_.push_back([value, key](RunConfig& c) {
      if (!value->empty()) c.set(key, *value);
    });
    return opt;
  }

  void apply(RunConfig& config) const {
    for (const auto& f : apply_) f(config);
  }

 private:
  std::vector<std::function<void(RunConfig&)>> apply_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Occupant-aware desk layout optimisation for zone lighting energy", "deskzone"};
  app.set_version_flag("--version", std::string(DESKZONE_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  Overrides ov;
  app.add_option("-c,--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  ov.add<std::uint64_t>(&app, "--seed", "seed", "Master seed");
  ov.add<std::string>(&app, "-o,--out", "paths/output_dir", "Output directory");
  ov.add<int>(&app, "--utc-offset", "utc_offset_minutes", "Local time offset east of UTC, minutes");
  ov.add<std::string>(&app, "--plug-load", "paths/plug_load", "Plug-load events CSV");
  ov.add<std::string>(&app, "--grid", "paths/grid", "Resampled power grid CSV");
  ov.add<std::string>(&app, "--zone-map", "paths/zone_map", "Zone map CSV");
  ov.add<std::string>(&app, "--layout", "paths/layout", "Layout CSV (overrides the zone map)");
  ov.add<std::string>(&app, "--lighting", "paths/lighting", "Hourly lighting energy CSV");
  ov.add<std::string>(&app, "--states", "paths/states", "State grid CSV");
  ov.add<std::string>(&app, "--model", "paths/model", "Surrogate model JSON");

  auto* ingest = app.add_subcommand("ingest", "Resample plug-load events to the 15-minute grid");
  ov.add<std::string>(ingest, "--start", "ingest/start", "First civil day (YYYY-MM-DD)");
  ov.add<std::string>(ingest, "--end", "ingest/end", "Civil day after the last one (YYYY-MM-DD)");

  auto* infer = app.add_subcommand("infer-states", "Infer activity states from plug-load power");
  ov.add<int>(infer, "--max-components", "states/max_components", "Mixture components per fit");

  auto* diversity = app.add_subcommand("diversity-report", "Daily zone diversity against lighting energy");

  auto* train = app.add_subcommand("train-surrogate", "Train a lighting energy surrogate");
  ov.add<std::string>(train, "--kind", "surrogate/model", "Model kind")->check(CLI::IsMember({"mlr", "rf"}));
  ov.add<std::size_t>(train, "--n-trees", "surrogate/n_trees", "Random forest size");
  ov.add<std::size_t>(train, "--cv-folds", "surrogate/cv_folds", "Cross-validation folds (0 skips)");
  ov.add<double>(train, "--train-fraction", "surrogate/train_fraction", "Chronological training share");

  auto* optimize = app.add_subcommand("optimize", "Optimise the occupant layout");
  ov.add<std::string>(optimize, "--method", "optimize/method", "Optimiser")->check(CLI::IsMember({"cluster", "ga"}));
  ov.add<std::size_t>(optimize, "--dims", "optimize/dims", "Concept-space dimensions for clustering (0: raw)");
  ov.add_list(optimize, "--seed-layouts", "optimize/seed_layouts", "Layout files or directories seeding the GA");
  ov.add<std::size_t>(optimize, "--batch", "optimize/batch", "Independent runs");
  ov.add<std::size_t>(optimize, "--first-run", "optimize/first_run", "Index of the first run");
  ov.add<std::size_t>(optimize, "--iter-limit", "optimize/iter_limit", "Clustering iterations (0: 50 per occupant)");
  ov.add<std::size_t>(optimize, "--generations", "optimize/generations", "GA generations");
  ov.add<std::size_t>(optimize, "--population", "optimize/population", "GA population");
  ov.add<std::size_t>(optimize, "--random-baselines", "optimize/random_baselines", "Random layouts in the baseline");

  auto* simulate = app.add_subcommand("simulate", "Energy of a layout under the surrogate or the lighting oracle");
  bool use_oracle = false;
  simulate->add_flag("--oracle", use_oracle, "Use the rule-based lighting oracle instead of a model");

  auto* count = app.add_subcommand("count-layouts", "Number of distinct assignments of I occupants to n zones");
  std::size_t count_i = 0, count_n = 0;
  bool distinct_zones = false;
  count->add_option("I", count_i, "Occupants")->required();
  count->add_option("n", count_n, "Zones of equal size")->required();
  count->add_flag("--distinct-zones", distinct_zones, "Treat zones as distinguishable");

  auto* synth = app.add_subcommand("synth-demo", "Synthetic archetype floor: oracle, surrogate and both optimisers");
  ov.add<std::size_t>(synth, "--days", "synth/days", "Simulated days");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(count)) {
      deskzone::cli::cmd_count_layouts(count_i, count_n, distinct_zones);
      return 0;
    }
    RunConfig config;
    if (!config_path.empty()) config.merge_file(config_path);
    ov.apply(config);

    if (app.got_subcommand(ingest)) deskzone::cli::cmd_ingest(config);
    else if (app.got_subcommand(infer)) deskzone::cli::cmd_infer_states(config);
    else if (app.got_subcommand(diversity)) deskzone::cli::cmd_diversity_report(config);
    else if (app.got_subcommand(train)) deskzone::cli::cmd_train_surrogate(config);
    else if (app.got_subcommand(optimize)) deskzone::cli::cmd_optimize(config);
    else if (app.got_subcommand(simulate)) deskzone::cli::cmd_simulate(config, use_oracle);
    else if (app.got_subcommand(synth)) deskzone::cli::cmd_synth_demo(config);
    return 0;
  } catch (const deskzone::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
}

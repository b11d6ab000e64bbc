#include <iostream>
#include <limits>
#include <ostream>

#include "commands.hpp"
#include "deskzone/diversity.hpp"
#include "deskzone/error.hpp"
#include "deskzone/genetic.hpp"
#include "deskzone/swap.hpp"
#include "deskzone/synth.hpp"
#include "output.hpp"

namespace deskzone::cli {

namespace {

// Independent streams derived from the master seed.
enum Stream : std::uint64_t { kPopulation = 1, kCorpus, kForest, kBaseline, kClusterStart, kCluster, kGa };

}  // namespace

void cmd_synth_demo(const RunConfig& config) {
  const std::uint64_t seed = config.seed();
  const PopulationSpec pop = config.population();
  const auto zones = config.get<std::size_t>("synth/zones");
  const auto n_random = config.get<std::size_t>("optimize/random_baselines");
  const LightingOracleConfig oracle = config.oracle();
  if (zones == 0) throw InputError("synth.zones must be at least 1");
  if (n_random == 0) throw InputError("synth-demo needs optimize.random_baselines >= 1");

  const StateGrid states = generate_population(pop, mix_seed(seed, kPopulation));
  const Layout pure = archetype_pure_layout(states, zones);
  const auto frame = pure.frame_ptr();
  const ScheduleSet raw = align_to_frame(schedules_from_states(states), *frame);
  auto oracle_wh = [&](const Layout& l) { return total_energy(oracle_lighting(l, states, oracle)); };

  // Surrogate trained on oracle energy of layouts around the pure layout.
  const Dataset corpus = oracle_corpus(states, pure, config.corpus(), oracle, mix_seed(seed, kCorpus));
  ModelSpec spec = config.surrogate();
  spec.seed = mix_seed(seed, kForest);
  const EnergyModel model = fit_model(spec, corpus, frame->zone_ids);
  LayoutEnergySimulator sim(model, states, *frame);

  Rng baseline_rng(mix_seed(seed, kBaseline));
  double random_oracle = 0.0, random_pred = 0.0, random_div = 0.0;
  for (std::size_t k = 0; k < n_random; ++k) {
    const Layout l = random_layout(frame, baseline_rng);
    random_oracle += oracle_wh(l) / static_cast<double>(n_random);
    random_pred += sim(l) / static_cast<double>(n_random);
    random_div += layout_diversity(l, raw).total / static_cast<double>(n_random);
  }

  Rng start_rng(mix_seed(seed, kClusterStart));
  SwapConfig sc;
  sc.iter_limit = config.get<std::size_t>("optimize/iter_limit");
  sc.seed = mix_seed(seed, kCluster);
  const SwapResult cluster = swap_optimize(raw, random_layout(frame, start_rng), sc);
  const GaResult ga = ga_optimize(frame, [&](const Layout& l) { return sim(l); }, config.ga(), mix_seed(seed, kGa));

  const OutputDir out(config, "synth-demo");
  out.csv("states.csv", [&](std::ostream& os) { write_states(os, states); });
  out.csv("heatmap.csv", [&](std::ostream& os) {
    os << "occupant_id,archetype,day,step,state\n";
    for (std::size_t i = 0; i < states.occupants(); ++i) {
      const auto& id = states.occupant_ids()[i];
      const int arch = archetype_of(id).value_or(0);
      for (std::size_t c = 0; c < states.columns(); ++c)
        os << id << ',' << arch << ',' << c / kStepsPerDay << ',' << c % kStepsPerDay << ','
           << static_cast<int>(states.at(i, c)) << '\n';
    }
  });
  out.csv("layout_pure.csv", [&](std::ostream& os) { write_layout(os, pure); });
  out.csv("layout_cluster.csv", [&](std::ostream& os) { write_layout(os, cluster.layout); });
  out.csv("layout_ga.csv", [&](std::ostream& os) { write_layout(os, ga.best); });
  out.csv("trace_cluster.csv", [&](std::ostream& os) { write_trace(os, cluster.trace); });
  out.csv("trace_ga.csv", [&](std::ostream& os) { write_trace(os, ga.trace); });
  out.csv("lighting_pure.csv",
          [&](std::ostream& os) { write_lighting(os, to_lighting_data(oracle_lighting(pure, states, oracle), *frame, states.axis())); });
  out.json("model.json", nlohmann::json::parse(to_json(model)));

  struct Row {
    const char* label;
    double oracle, predicted, diversity;
  };
  const Row rows[] = {
      {"pure", oracle_wh(pure), sim(pure), layout_diversity(pure, raw).total},
      {"random_mean", random_oracle, random_pred, random_div},
      {"cluster", oracle_wh(cluster.layout), sim(cluster.layout), layout_diversity(cluster.layout, raw).total},
      {"ga", oracle_wh(ga.best), sim(ga.best), layout_diversity(ga.best, raw).total},
  };
  const std::string savings = out.csv("savings.csv", [&](std::ostream& os) {
    os << "layout,oracle_energy_wh,predicted_energy_wh,diversity,pct_vs_random\n";
    for (const auto& r : rows)
      os << r.label << ',' << cell(r.oracle) << ',' << cell(r.predicted) << ',' << cell(r.diversity) << ','
         << cell(percent_change(r.oracle, random_oracle)) << '\n';
  });

  std::cout << states.occupants() << " occupants, " << states.axis().days() << " day(s), " << zones << " zones\n";
  for (const auto& r : rows)
    std::cout << "  " << r.label << ": oracle " << r.oracle << " Wh (" << percent_change(r.oracle, random_oracle)
              << "% vs random)\n";
  std::cout << "wrote " << savings << " and companion files in " << out.path().string() << '\n';
}

}  // namespace deskzone::cli

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <ostream>

#include "commands.hpp"
#include "deskzone/diversity.hpp"
#include "deskzone/error.hpp"
#include "deskzone/genetic.hpp"
#include "deskzone/reduce.hpp"
#include "deskzone/swap.hpp"
#include "output.hpp"

namespace deskzone::cli {

namespace {

namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Stream reserved for the random-layout baseline.
constexpr std::uint64_t kBaselineStream = 0x72616e646f6dULL;

std::string run_tag(std::size_t run) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", run);
  return buf;
}

/// Seed layouts from files or directories; a directory contributes its
/// `layout_*.csv` files in name order.
std::vector<Layout> load_seed_layouts(const std::vector<std::string>& sources,
                                      const std::shared_ptr<const LayoutFrame>& frame) {
  std::vector<Layout> out;
  for (const auto& src : sources) {
    if (!fs::exists(src)) throw FileError(src, "no such file or directory");
    std::vector<fs::path> files;
    if (fs::is_directory(src)) {
      for (const auto& entry : fs::directory_iterator(src)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && name.starts_with("layout_") && name.ends_with(".csv")) files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      if (files.empty()) throw FileError(src, "directory holds no layout_*.csv files");
    } else {
      files.emplace_back(src);
    }
    for (const auto& f : files) {
      try {
        out.push_back(read_layout(f.string(), frame));
      } catch (const FileError&) {
        throw;
      } catch (const InputError& e) {
        throw FileError(f.string(), e.what());
      }
    }
  }
  return out;
}

struct Row {
  std::string label;
  std::string seed;
  double diversity = 0.0;
  double energy = kNaN;
};

}  // namespace

void cmd_optimize(const RunConfig& config) {
  const auto method = config.get<std::string>("optimize/method");
  if (method != "cluster" && method != "ga") throw InputError("unknown optimize method '" + method + "' (cluster, ga)");
  const bool have_model = !config.path("model").empty();
  if (method == "ga" && !have_model)
    throw InputError("the ga method needs a trained surrogate: set paths.model or pass --model");

  const StateGrid states = load_states(config);
  const Layout existing = load_current_layout(config);
  const auto frame = existing.frame_ptr();
  const std::optional<EnergyModel> model = have_model ? std::optional<EnergyModel>(load_model(config)) : std::nullopt;
  std::optional<LayoutEnergySimulator> sim;
  if (model) sim.emplace(*model, states, *frame);

  const std::uint64_t seed = config.seed();
  const auto batch = config.get<std::size_t>("optimize/batch");
  const auto first_run = config.get<std::size_t>("optimize/first_run");
  const auto n_random = config.get<std::size_t>("optimize/random_baselines");
  if (batch == 0) throw InputError("optimize.batch must be at least 1");

  const ScheduleSet raw = align_to_frame(schedules_from_states(states), *frame);
  const OutputDir out(config, "optimize");
  auto measure = [&](const Layout& l, std::string label, std::string run_seed) {
    return Row{std::move(label), std::move(run_seed), layout_diversity(l, raw).total, sim ? (*sim)(l) : kNaN};
  };

  std::vector<Row> rows;
  rows.push_back(measure(existing, "existing", ""));
  if (n_random > 0) {
    Rng rng(mix_seed(seed, kBaselineStream));
    Row mean{"random_mean", "", 0.0, sim ? 0.0 : kNaN};
    for (std::size_t k = 0; k < n_random; ++k) {
      const Row r = measure(random_layout(frame, rng), "", "");
      mean.diversity += r.diversity / static_cast<double>(n_random);
      mean.energy += r.energy / static_cast<double>(n_random);
    }
    rows.push_back(mean);
  }

  if (method == "cluster") {
    const auto dims = config.get<std::size_t>("optimize/dims");
    ScheduleSet vectors = raw;
    if (dims > 0) {
      const SvdFactors factors = svd_decompose(time_by_occupant(raw));
      if (dims > factors.rank())
        throw InputError("--dims " + std::to_string(dims) + " exceeds the schedule matrix rank " +
                         std::to_string(factors.rank()));
      vectors = reduced_schedules(raw, factors, dims);
      write_factors((out.path() / "svd").string(), factors, out.provenance());
    }
    SwapConfig sc;
    sc.iter_limit = config.get<std::size_t>("optimize/iter_limit");
    for (std::size_t r = first_run; r < first_run + batch; ++r) {
      const std::uint64_t run_seed = seed + r;
      Rng start_rng(mix_seed(run_seed, 1));
      sc.seed = run_seed;
      const SwapResult res = swap_optimize(vectors, random_layout(frame, start_rng), sc);
      const std::string tag = "cluster_" + run_tag(r);
      out.csv("layout_" + tag + ".csv", [&](std::ostream& os) { write_layout(os, res.layout); },
              {{"run_seed", std::to_string(run_seed)}, {"representation", vectors.representation}});
      out.csv("trace_" + tag + ".csv", [&](std::ostream& os) { write_trace(os, res.trace); },
              {{"run_seed", std::to_string(run_seed)}});
      rows.push_back(measure(res.layout, tag, std::to_string(run_seed)));
    }
  } else {
    const GaConfig gc = config.ga();
    std::vector<std::string> sources = config.get<std::vector<std::string>>("optimize/seed_layouts");
    const std::vector<Layout> seeds_in = load_seed_layouts(sources, frame);
    const LayoutFitness fitness = [&](const Layout& l) { return (*sim)(l); };
    for (std::size_t r = first_run; r < first_run + batch; ++r) {
      const std::uint64_t run_seed = seed + r;
      const GaResult res = ga_optimize(frame, fitness, gc, run_seed, seeds_in);
      const std::string tag = "ga_" + run_tag(r);
      out.csv("layout_" + tag + ".csv", [&](std::ostream& os) { write_layout(os, res.best); },
              {{"run_seed", std::to_string(run_seed)}, {"seed_layouts", std::to_string(seeds_in.size())}});
      out.csv("trace_" + tag + ".csv", [&](std::ostream& os) { write_trace(os, res.trace); },
              {{"run_seed", std::to_string(run_seed)}});
      rows.push_back(measure(res.best, tag, std::to_string(run_seed)));
    }
  }

  const double base_existing = rows[0].energy;
  const double base_random = n_random > 0 ? rows[1].energy : kNaN;
  auto pct = [](double v, double base) { return std::isnan(v) || std::isnan(base) || base == 0.0 ? kNaN : percent_change(v, base); };
  const std::string name =
      "summary_" + method + "_" + run_tag(first_run) + "-" + run_tag(first_run + batch - 1) + ".csv";
  const std::string path = out.csv(name, [&](std::ostream& os) {
    os << "layout,seed,diversity,energy_wh,pct_vs_existing,pct_vs_random\n";
    for (const auto& r : rows)
      os << r.label << ',' << r.seed << ',' << cell(r.diversity) << ',' << cell(r.energy) << ','
         << cell(pct(r.energy, base_existing)) << ',' << cell(pct(r.energy, base_random)) << '\n';
  });
  std::cout << "wrote " << batch << " layouts and " << path << '\n';
}

}  // namespace deskzone::cli

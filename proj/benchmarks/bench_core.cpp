#include <benchmark/benchmark.h>

#include <vector>

#include "deskzone/diversity.hpp"
#include "deskzone/reduce.hpp"
#include "deskzone/surrogate.hpp"
#include "deskzone/swap.hpp"
#include "deskzone/synth.hpp"
#include "deskzone/vbgmm.hpp"

namespace {

using namespace deskzone;

// Reference archetype population scaled by `per_archetype`, over `days` days.
StateGrid population(std::size_t per_archetype, std::size_t days) {
  return generate_population(std::vector<std::size_t>(4, per_archetype), days, 17);
}

void BM_SwapDelta(benchmark::State& state) {
  const auto per = static_cast<std::size_t>(state.range(0));
  const StateGrid grid = population(per, 5);
  const Layout pure = archetype_pure_layout(grid, 4);
  const ScheduleSet sched = align_to_frame(schedules_from_states(grid), pure.frame());
  const auto zone = pure.zone_of_occupant();
  Rng rng(1);
  for (auto _ : state) {
    std::uint32_t a, b;
    do {
      a = static_cast<std::uint32_t>(rng.below(pure.desks()));
      b = static_cast<std::uint32_t>(rng.below(pure.desks()));
    } while (zone[a] == zone[b]);
    benchmark::DoNotOptimize(swap_delta(pure, a, b, sched));
  }
}
BENCHMARK(BM_SwapDelta)->Arg(9)->Arg(25);

void BM_SwapOptimize(benchmark::State& state) {
  const StateGrid grid = population(9, 1);
  const Layout pure = archetype_pure_layout(grid, 4);
  const ScheduleSet sched = align_to_frame(schedules_from_states(grid), pure.frame());
  Rng rng(2);
  const Layout start = random_layout(pure.frame_ptr(), rng);
  for (auto _ : state) benchmark::DoNotOptimize(swap_optimize(sched, start, {2000, 3}).layout);
}
BENCHMARK(BM_SwapOptimize)->Unit(benchmark::kMillisecond);

void BM_ForestPredict(benchmark::State& state) {
  const StateGrid grid = population(9, 1);
  const Layout pure = archetype_pure_layout(grid, 4);
  const Dataset corpus = oracle_corpus(grid, pure, {10, 5}, {}, 4);
  ModelSpec spec;
  spec.forest.n_trees = static_cast<std::size_t>(state.range(0));
  const EnergyModel model = fit_model(spec, corpus, pure.frame().zone_ids);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(corpus.rows[i++ % corpus.size()]));
}
BENCHMARK(BM_ForestPredict)->Arg(50)->Arg(200);

void BM_FitVbGmm(benchmark::State& state) {
  Rng rng(5);
  std::vector<double> samples;
  for (int k = 0; k < state.range(0); ++k) {
    const double level[] = {1.5, 30.0, 110.0};
    samples.push_back(level[rng.below(3)] + rng.normal());
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_vbgmm(samples, {}, 6).weights);
}
BENCHMARK(BM_FitVbGmm)->Arg(96 * 30)->Unit(benchmark::kMillisecond);

void BM_Svd(benchmark::State& state) {
  const StateGrid grid = population(11, static_cast<std::size_t>(state.range(0)));
  const Matrix m = time_by_occupant(schedules_from_states(grid));
  for (auto _ : state) benchmark::DoNotOptimize(svd_decompose(m).sigma);
}
BENCHMARK(BM_Svd)->Arg(10)->Arg(60)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

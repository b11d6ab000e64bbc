#include "deskzone/genetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "deskzone/error.hpp"

namespace deskzone {

namespace {

void require_same_frame(const Layout& a, const Layout& b) {
  if (a.frame_ptr() != b.frame_ptr() && !(a.frame() == b.frame()))
    throw InputError("layouts do not share a zone structure");
}

}  // namespace

void validate(const GaConfig& c) {
  if (c.population < 2) throw InputError("GA population must be >= 2");
  if (c.elites + c.random_survivors < 2) throw InputError("GA needs at least two survivors (|B| + |R| >= 2)");
  if (c.elites + c.random_survivors > c.population) throw InputError("GA survivors exceed the population");
  if (!(c.mutation_prob >= 0.0 && c.mutation_prob <= 1.0)) throw InputError("mutation probability outside [0, 1]");
  if (c.generations < 1) throw InputError("GA needs at least one generation");
}

Layout crossover(const Layout& parent_a, const Layout& parent_b, Rng& rng) {
  require_same_frame(parent_a, parent_b);
  const std::size_t n = parent_a.desks();
  std::vector<std::uint32_t> child(n, 0);
  std::vector<bool> placed(n, false);
  std::vector<std::size_t> deferred;
  for (std::size_t d = 0; d < n; ++d) {
    const bool from_a = rng.bernoulli(0.5);
    const std::uint32_t first = from_a ? parent_a.occupant_at(d) : parent_b.occupant_at(d);
    const std::uint32_t second = from_a ? parent_b.occupant_at(d) : parent_a.occupant_at(d);
    if (!placed[first]) {
      child[d] = first;
    } else if (!placed[second]) {
      child[d] = second;
    } else {
      deferred.push_back(d);
      continue;
    }
    placed[child[d]] = true;
  }
  if (!deferred.empty()) {
    std::vector<std::uint32_t> remaining;
    for (std::uint32_t o = 0; o < n; ++o)
      if (!placed[o]) remaining.push_back(o);
    rng.shuffle(remaining);
    for (std::size_t k = 0; k < deferred.size(); ++k) child[deferred[k]] = remaining[k];
  }
  return Layout(parent_a.frame_ptr(), std::move(child));
}

Layout crossover(const Layout& parent_a, const Layout& parent_b, std::uint64_t seed) {
  Rng rng(seed);
  return crossover(parent_a, parent_b, rng);
}

Layout mutate(const Layout& layout, double mutation_prob, Rng& rng) {
  Layout out = layout;
  if (!rng.bernoulli(mutation_prob)) return out;
  const auto& f = layout.frame();
  std::vector<std::size_t> occupied;
  for (std::size_t z = 0; z < f.zones(); ++z)
    if (f.zone_size(z) > 0) occupied.push_back(z);
  if (occupied.size() < 2) return out;
  for (std::size_t k = 0; k < occupied.size(); ++k) {
    const std::size_t z = occupied[k];
    const std::size_t desk = f.zone_offsets[z] + static_cast<std::size_t>(rng.below(f.zone_size(z)));
    std::size_t other = static_cast<std::size_t>(rng.below(occupied.size() - 1));
    if (other >= k) ++other;
    const std::size_t oz = occupied[other];
    const std::size_t odesk = f.zone_offsets[oz] + static_cast<std::size_t>(rng.below(f.zone_size(oz)));
    out.swap_desks(desk, odesk);
  }
  return out;
}

Layout mutate(const Layout& layout, double mutation_prob, std::uint64_t seed) {
  Rng rng(seed);
  return mutate(layout, mutation_prob, rng);
}

GaResult ga_optimize(const std::shared_ptr<const LayoutFrame>& frame, const LayoutFitness& fitness,
                     const GaConfig& config, std::uint64_t seed, const std::vector<Layout>& seeds_in) {
  validate(config);
  if (!frame || frame->desks() == 0) throw InputError("cannot optimise an empty layout");
  Rng rng(seed);

  std::vector<Layout> population;
  population.reserve(config.population);
  for (const auto& s : seeds_in) {
    if (population.size() == config.population) break;
    if (!(s.frame() == *frame)) throw InputError("seed layout does not match the zone structure");
    population.emplace_back(frame, std::vector<std::uint32_t>(s.assignment().begin(), s.assignment().end()));
  }
  while (population.size() < config.population) population.push_back(random_layout(frame, rng));

  GaResult result;
  result.best_fitness = std::numeric_limits<double>::infinity();
  std::vector<double> scores(config.population);
  std::vector<std::size_t> order(config.population);

  for (std::size_t gen = 0; gen < config.generations; ++gen) {
    for (std::size_t i = 0; i < population.size(); ++i) {
      scores[i] = fitness(population[i]);
      if (!std::isfinite(scores[i])) throw InputError("fitness returned a non-finite value");
    }
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    if (scores[order.front()] < result.best_fitness) {
      result.best_fitness = scores[order.front()];
      result.best = population[order.front()];
    }
    result.trace.record(scores[order.front()]);
    if (gen + 1 == config.generations) break;

    // Survivors: the |B| best, then |R| distinct random others.
    std::vector<std::size_t> survivors(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(config.elites));
    std::vector<std::size_t> rest(order.begin() + static_cast<std::ptrdiff_t>(config.elites), order.end());
    rng.shuffle(rest);
    survivors.insert(survivors.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(config.random_survivors));

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < survivors.size(); ++i)
      for (std::size_t j = i + 1; j < survivors.size(); ++j) pairs.emplace_back(survivors[i], survivors[j]);
    rng.shuffle(pairs);
    const std::size_t per_pair = config.children_per_pair
                                     ? config.children_per_pair
                                     : (config.population + pairs.size() - 1) / pairs.size();

    std::vector<Layout> next;
    next.reserve(config.population);
    for (std::size_t p = 0; next.size() < config.population; p = (p + 1) % pairs.size()) {
      const auto& [ia, ib] = pairs[p];
      for (std::size_t c = 0; c < per_pair && next.size() < config.population; ++c)
        next.push_back(mutate(crossover(population[ia], population[ib], rng), config.mutation_prob, rng));
    }
    population = std::move(next);
  }
  return result;
}

}  // namespace deskzone

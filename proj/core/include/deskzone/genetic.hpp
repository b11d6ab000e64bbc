#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "deskzone/layout.hpp"
#include "deskzone/swap.hpp"

namespace deskzone {

struct GaConfig {
  std::size_t population = 600;
  std::size_t elites = 60;           // |B|: best layouts kept as parents
  std::size_t random_survivors = 15; // |R|: random non-elite parents
  std::size_t children_per_pair = 0; // 0: enough for the pairs to refill the population
  double mutation_prob = 0.5;
  std::size_t generations = 200;
};

/// Lower is better. Must be pure and finite on every valid layout.
using LayoutFitness = std::function<double(const Layout&)>;

struct GaResult {
  Layout best;
  double best_fitness = 0.0;
  OptTrace trace;  // one entry per generation: generation best and best-ever
};

/// Throws InputError when the configuration cannot run.
void validate(const GaConfig& config);

/// Per desk, the occupant of one parent chosen with probability 1/2. Desks
/// whose pick is already placed fall back to the other parent; if both are
/// placed the desk is filled at the end from the unplaced occupants in random
/// order.
Layout crossover(const Layout& parent_a, const Layout& parent_b, Rng& rng);
Layout crossover(const Layout& parent_a, const Layout& parent_b, std::uint64_t seed);

/// With probability `mutation_prob`: for every zone, one random desk trades
/// occupants with a random desk of a random other zone.
Layout mutate(const Layout& layout, double mutation_prob, Rng& rng);
Layout mutate(const Layout& layout, double mutation_prob, std::uint64_t seed);

/// Generational GA without elitism: every generation is bred entirely from the
/// |B| best and |R| random survivors of the previous one. The initial
/// population is `seeds_in` followed by uniformly random layouts.
GaResult ga_optimize(const std::shared_ptr<const LayoutFrame>& frame, const LayoutFitness& fitness,
                     const GaConfig& config, std::uint64_t seed, const std::vector<Layout>& seeds_in = {});

}  // namespace deskzone

#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "deskzone/diversity.hpp"
#include "deskzone/layout.hpp"

namespace deskzone {

/// Objective history of an optimisation run.
struct OptTrace {
  struct Swap {
    std::size_t iteration = 0;
    std::uint32_t occupant_a = 0;
    std::uint32_t occupant_b = 0;
    double delta = 0.0;
  };
  std::vector<double> objective;    // after each iteration / generation
  std::vector<double> best_so_far;  // running minimum of objective
  std::vector<Swap> accepted;       // swap optimiser only

  void record(double value) {
    objective.push_back(value);
    best_so_far.push_back(best_so_far.empty() ? value : std::min(best_so_far.back(), value));
  }
};

/// `iteration,objective,best_so_far`, iterations counted from 0.
void write_trace(std::ostream& out, const OptTrace& trace);

/// Change in total zone diversity if occupants a and b (indices into the frame's
/// occupants) trade desks. Only the two affected zones are recomputed.
/// a == b is the null swap (0); a and b in the same zone is an InputError.
double swap_delta(const Layout& layout, std::uint32_t occupant_a, std::uint32_t occupant_b,
                  const ScheduleSet& aligned);

struct SwapConfig {
  std::size_t iter_limit = 0;  // 0 selects 50 x occupants
  std::uint64_t seed = 0;
};

struct SwapResult {
  Layout layout;
  OptTrace trace;
};

/// Stochastic constrained swap clustering. Each iteration draws a random
/// occupied desk and executes the best of: the null swap, or swapping its
/// occupant with any occupant of another zone. Ties keep the null swap, then
/// the lowest occupant index. `aligned` must follow the layout frame's occupant
/// order.
SwapResult swap_optimize(const ScheduleSet& aligned, const Layout& initial, const SwapConfig& config);

}  // namespace deskzone

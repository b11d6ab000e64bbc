#include "deskzone/swap.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "deskzone/csv.hpp"
#include "deskzone/error.hpp"
#include "deskzone/rng.hpp"

namespace deskzone {

namespace {

double pair_norm(std::size_t m) { return m < 2 ? 0.0 : 2.0 / static_cast<double>(m * (m - 1)); }

// Cached pairwise distances plus, for every occupant, the summed distance to
// the members of each zone. A swap delta is O(1); executing a swap is O(I).
class SwapState {
 public:
  SwapState(const ScheduleSet& v, const Layout& layout)
      : n_(v.size()), zones_(layout.zones()), dist_(n_ * n_, 0.0), to_zone_(n_ * zones_, 0.0), zone_sum_(zones_, 0.0) {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j) dist_[i * n_ + j] = dist_[j * n_ + i] = pairwise_distance(v.vector(i), v.vector(j));
    zone_of_ = layout.zone_of_occupant();
    for (std::size_t z = 0; z < zones_; ++z) norm_.push_back(pair_norm(layout.frame().zone_size(z)));
    for (std::size_t o = 0; o < n_; ++o)
      for (std::size_t x = 0; x < n_; ++x) to_zone_[o * zones_ + zone_of_[x]] += d(o, x);
    for (std::size_t o = 0; o < n_; ++o) zone_sum_[zone_of_[o]] += 0.5 * to_zone_[o * zones_ + zone_of_[o]];
  }

  double d(std::size_t a, std::size_t b) const { return dist_[a * n_ + b]; }
  std::size_t zone_of(std::size_t o) const { return zone_of_[o]; }

  double total() const {
    double t = 0.0;
    for (std::size_t z = 0; z < zones_; ++z) t += norm_[z] * zone_sum_[z];
    return t;
  }

  double delta(std::size_t a, std::size_t b) const {
    const std::size_t za = zone_of_[a], zb = zone_of_[b];
    const double dab = d(a, b);
    const double da = to_zone_[b * zones_ + za] - dab - to_zone_[a * zones_ + za];
    const double db = to_zone_[a * zones_ + zb] - dab - to_zone_[b * zones_ + zb];
    return norm_[za] * da + norm_[zb] * db;
  }

  void apply(std::size_t a, std::size_t b) {
    const std::size_t za = zone_of_[a], zb = zone_of_[b];
    const double dab = d(a, b);
    zone_sum_[za] += to_zone_[b * zones_ + za] - dab - to_zone_[a * zones_ + za];
    zone_sum_[zb] += to_zone_[a * zones_ + zb] - dab - to_zone_[b * zones_ + zb];
    for (std::size_t o = 0; o < n_; ++o) {
      const double shift = d(o, b) - d(o, a);
      to_zone_[o * zones_ + za] += shift;
      to_zone_[o * zones_ + zb] -= shift;
    }
    std::swap(zone_of_[a], zone_of_[b]);
  }

 private:
  std::size_t n_, zones_;
  std::vector<double> dist_, to_zone_, zone_sum_, norm_;
  std::vector<std::size_t> zone_of_;
};

void check_aligned(const ScheduleSet& v, const Layout& layout) {
  if (v.size() != layout.frame().occupant_ids.size() || v.occupant_ids != layout.frame().occupant_ids)
    throw InputError("schedule vectors are not aligned to the layout's occupants");
}

}  // namespace

double swap_delta(const Layout& layout, std::uint32_t occupant_a, std::uint32_t occupant_b,
                  const ScheduleSet& aligned) {
  check_aligned(aligned, layout);
  if (occupant_a == occupant_b) return 0.0;
  const auto zone_of = layout.zone_of_occupant();
  const std::size_t za = zone_of.at(occupant_a), zb = zone_of.at(occupant_b);
  if (za == zb) throw InputError("swap candidates are in the same zone");

  auto zone_value = [&](std::size_t z, std::uint32_t out, std::uint32_t in) {
    std::vector<std::span<const double>> members;
    for (auto o : layout.zone_members(z)) members.push_back(aligned.vector(o == out ? in : o));
    return zone_diversity(members);
  };
  auto zone_now = [&](std::size_t z) { return zone_value(z, occupant_a, occupant_a); };
  const double before = zone_now(za) + zone_now(zb);
  const double after = zone_value(za, occupant_a, occupant_b) + zone_value(zb, occupant_b, occupant_a);
  return after - before;
}

SwapResult swap_optimize(const ScheduleSet& aligned, const Layout& initial, const SwapConfig& config) {
  if (initial.desks() == 0) throw InputError("cannot optimise an empty layout");
  check_aligned(aligned, initial);
  const std::size_t n = initial.desks();
  const std::size_t iters = config.iter_limit ? config.iter_limit : 50 * n;

  SwapResult result{initial, {}};
  Layout& layout = result.layout;
  auto desk_of = layout.desk_of_occupant();
  SwapState state(aligned, layout);
  Rng rng(config.seed);

  for (std::size_t it = 0; it < iters; ++it) {
    const std::size_t desk = static_cast<std::size_t>(rng.below(n));
    const std::uint32_t a = layout.occupant_at(desk);
    const double eps = 1e-12 * std::max(1.0, state.total());
    double best = 0.0;  // null swap
    std::size_t best_b = n;
    for (std::uint32_t b = 0; b < n; ++b) {
      if (state.zone_of(b) == state.zone_of(a)) continue;
      const double dlt = state.delta(a, b);
      if (dlt < best - eps) {
        best = dlt;
        best_b = b;
      }
    }
    if (best_b != n) {
      state.apply(a, best_b);
      layout.swap_desks(desk_of[a], desk_of[best_b]);
      std::swap(desk_of[a], desk_of[best_b]);
      result.trace.accepted.push_back({it, a, static_cast<std::uint32_t>(best_b), best});
    }
    result.trace.record(state.total());
  }
  return result;
}

void write_trace(std::ostream& out, const OptTrace& trace) {
  out << "iteration,objective,best_so_far\n";
  for (std::size_t i = 0; i < trace.objective.size(); ++i)
    out << i << ',' << csv::format_double(trace.objective[i]) << ',' << csv::format_double(trace.best_so_far[i]) << '\n';
}

}  // namespace deskzone

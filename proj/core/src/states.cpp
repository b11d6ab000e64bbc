#include "deskzone/states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

#include "deskzone/csv.hpp"
#include "deskzone/error.hpp"
#include "deskzone/rng.hpp"

namespace deskzone {

StateGrid::StateGrid(std::vector<std::string> occupants, DayAxis axis)
    : ids_(std::move(occupants)), axis_(std::move(axis)), states_(ids_.size() * axis_.columns(), 1) {}

void StateGrid::set(std::size_t occupant, std::size_t col, int state) {
  if (state < 1 || state > 3) throw InputError("state must be 1, 2 or 3, got " + std::to_string(state));
  states_[occupant * columns() + col] = static_cast<std::uint8_t>(state);
}

std::optional<std::size_t> StateGrid::find(const std::string& occupant_id) const {
  for (std::size_t i = 0; i < ids_.size(); ++i)
    if (ids_[i] == occupant_id) return i;
  return std::nullopt;
}

const char* to_string(StatePath path) {
  switch (path) {
    case StatePath::kConstant: return "constant";
    case StatePath::kSingleComponent: return "single_component";
    case StatePath::kTwoStep: return "two_step";
    case StatePath::kTwoStepNoMedium: return "two_step_no_medium";
  }
  return "unknown";
}

namespace {

bool has_two_distinct(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) != v.end();
}

// Position (in `active`, sorted by mean) after which the component means have
// their widest gap.
std::size_t widest_gap(const VbGmmModel& m, const std::vector<std::size_t>& active) {
  std::size_t split = 0;
  double best = -1.0;
  for (std::size_t j = 0; j + 1 < active.size(); ++j) {
    const double gap = m.means[active[j + 1]] - m.means[active[j]];
    if (gap > best) {
      best = gap;
      split = j;
    }
  }
  return split;
}

}  // namespace

std::vector<std::uint8_t> classify_series(std::span<const double> power, const StateInferenceConfig& config,
                                          std::uint64_t seed, OccupantStateFit* fit) {
  const std::size_t n = power.size();
  std::vector<std::uint8_t> states(n, 1);
  if (n == 0) return states;

  VbGmmModel first = fit_vbgmm(power, config.gmm, seed);
  const auto active = first.active_components(config.weight_floor);
  StatePath path;
  std::optional<VbGmmModel> second;

  if (first.degenerate || active.size() <= 1) {
    double level = 0.0;
    for (double v : power) level += v;
    level /= static_cast<double>(n);
    // A constant series carries no usage signal and is treated as idle.
    const bool idle = first.degenerate || level < config.idle_threshold_w;
    std::fill(states.begin(), states.end(), idle ? 1 : 3);
    path = first.degenerate ? StatePath::kConstant : StatePath::kSingleComponent;
  } else {
    // Step one: the lowest-mean component is the low state; everything else
    // is the higher-energy group that gets clustered again.
    std::vector<double> high;
    std::vector<std::size_t> high_idx;
    for (std::size_t t = 0; t < n; ++t) {
      if (first.assign(power[t], active) == 0) {
        states[t] = 1;
      } else {
        high.push_back(power[t]);
        high_idx.push_back(t);
      }
    }
    path = StatePath::kTwoStepNoMedium;
    std::vector<std::uint8_t> high_states(high.size(), 3);
    if (high.size() >= 2 && has_two_distinct(high)) {
      second = fit_vbgmm(high, config.gmm, mix_seed(seed, 1));
      const auto active2 = second->active_components(config.weight_floor);
      if (!second->degenerate && active2.size() >= 2) {
        // Two components split directly; more split at the widest gap.
        const std::size_t last_medium = active2.size() == 2 ? 0 : widest_gap(*second, active2);
        for (std::size_t j = 0; j < high.size(); ++j)
          high_states[j] = second->assign(high[j], active2) <= last_medium ? 2 : 3;
        path = StatePath::kTwoStep;
      }
    }
    for (std::size_t j = 0; j < high.size(); ++j) states[high_idx[j]] = high_states[j];
  }

  if (fit) {
    fit->path = path;
    fit->first = std::move(first);
    fit->second = std::move(second);
  }
  return states;
}

StateInference infer_states_detailed(const TimeSeriesGrid& grid, const StateInferenceConfig& config) {
  StateInference out;
  out.states = StateGrid(grid.occupants, grid.axis);
  out.states.state_mean_power.resize(grid.occupants.size());
  out.fits.resize(grid.occupants.size());
  for (std::size_t i = 0; i < grid.occupants.size(); ++i) {
    const auto power = grid.values.row(i);
    OccupantStateFit& fit = out.fits[i];
    fit.occupant_id = grid.occupants[i];
    const auto states = classify_series(power, config, mix_seed(config.seed, i), &fit);
    std::array<double, 3> sum{}, count{};
    for (std::size_t c = 0; c < states.size(); ++c) {
      out.states.set(i, c, states[c]);
      sum[states[c] - 1] += power[c];
      count[states[c] - 1] += 1.0;
    }
    for (int s = 0; s < 3; ++s)
      out.states.state_mean_power[i][s] = count[s] > 0 ? sum[s] / count[s] : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

StateGrid infer_states(const TimeSeriesGrid& grid, const StateInferenceConfig& config) {
  return infer_states_detailed(grid, config).states;
}

void write_states(std::ostream& out, const StateGrid& grid) {
  out << "occupant_id,timestamp,state\n";
  for (std::size_t i = 0; i < grid.occupants(); ++i) {
    const auto& id = grid.occupant_ids()[i];
    for (std::size_t c = 0; c < grid.columns(); ++c)
      out << id << ',' << format_instant(grid.axis().column_start(c)) << ',' << int(grid.at(i, c)) << '\n';
  }
}

StateGrid read_states(const std::string& path, Calendar calendar) {
  auto table = csv::read_file(path);
  csv::require_header(table, {"occupant_id", "timestamp", "state"});
  struct Cell {
    Instant t;
    int state;
  };
  std::vector<std::string> ids;
  std::map<std::string, std::vector<Cell>> cells;
  std::set<Instant> days;
  for (const auto& row : table.rows) {
    Instant t;
    try {
      t = parse_instant(row.fields[1]);
    } catch (const InputError& e) {
      throw FileError(path, e.what(), row.line);
    }
    const long long s = csv::parse_int(row.fields[2], path, row.line);
    if (s < 1 || s > 3) throw FileError(path, "state must be 1, 2 or 3", row.line);
    if ((t - calendar.day_start(t)) % kStepMs != std::chrono::milliseconds(0))
      throw FileError(path, "timestamp not on a 15-minute boundary", row.line);
    auto [it, inserted] = cells.try_emplace(row.fields[0]);
    if (inserted) ids.push_back(row.fields[0]);
    it->second.push_back(Cell{t, static_cast<int>(s)});
    days.insert(calendar.day_start(t));
  }
  DayAxis axis;
  axis.calendar = calendar;
  axis.day_starts.assign(days.begin(), days.end());
  std::map<Instant, std::size_t> day_index;
  for (std::size_t d = 0; d < axis.day_starts.size(); ++d) day_index[axis.day_starts[d]] = d;

  StateGrid grid(ids, axis);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& list = cells[ids[i]];
    if (list.size() != grid.columns())
      throw FileError(path, "occupant '" + ids[i] + "' does not cover every step of the grid");
    std::vector<bool> seen(grid.columns(), false);
    for (const auto& cell : list) {
      const Instant ds = calendar.day_start(cell.t);
      const auto col = day_index[ds] * kStepsPerDay + static_cast<std::size_t>((cell.t - ds) / kStepMs);
      if (seen[col]) throw FileError(path, "duplicate step for occupant '" + ids[i] + "'");
      seen[col] = true;
      grid.set(i, col, cell.state);
    }
  }
  return grid;
}

std::string fits_to_json(const StateInference& inference, const StateInferenceConfig& config) {
  nlohmann::json j;
  j["config"] = {{"max_components", config.gmm.max_components},
                 {"dirichlet_concentration", config.gmm.priors.dirichlet_concentration},
                 {"mean_precision", config.gmm.priors.mean_precision},
                 {"degrees_of_freedom", config.gmm.priors.degrees_of_freedom},
                 {"tol", config.gmm.tol},
                 {"max_iter", config.gmm.max_iter},
                 {"weight_floor", config.weight_floor},
                 {"idle_threshold_w", config.idle_threshold_w}};
  j["seed"] = config.seed;
  auto& occ = j["occupants"] = nlohmann::json::array();
  for (const auto& fit : inference.fits) {
    nlohmann::json o;
    o["occupant_id"] = fit.occupant_id;
    o["path"] = to_string(fit.path);
    o["first"] = nlohmann::json::parse(to_json(fit.first));
    o["second"] = fit.second ? nlohmann::json::parse(to_json(*fit.second)) : nlohmann::json();
    occ.push_back(std::move(o));
  }
  return j.dump(2);
}

}  // namespace deskzone

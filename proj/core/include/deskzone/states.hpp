#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "deskzone/ingest.hpp"
#include "deskzone/time.hpp"
#include "deskzone/vbgmm.hpp"

namespace deskzone {

/// Activity state per occupant per 15-minute step: 1 low, 2 medium, 3 high.
class StateGrid {
 public:
  StateGrid() = default;
  StateGrid(std::vector<std::string> occupants, DayAxis axis);

  std::size_t occupants() const noexcept { return ids_.size(); }
  std::size_t columns() const noexcept { return axis_.columns(); }
  const std::vector<std::string>& occupant_ids() const noexcept { return ids_; }
  const DayAxis& axis() const noexcept { return axis_; }

  std::uint8_t at(std::size_t occupant, std::size_t col) const { return states_[occupant * columns() + col]; }
  /// Throws InputError unless state is 1, 2 or 3.
  void set(std::size_t occupant, std::size_t col, int state);

  std::span<const std::uint8_t> row(std::size_t occupant) const {
    return {states_.data() + occupant * columns(), columns()};
  }

  /// Mean power of the samples assigned to each state (NaN when unused).
  /// Only populated by inference.
  std::vector<std::array<double, 3>> state_mean_power;

  /// Index of an occupant id, if present.
  std::optional<std::size_t> find(const std::string& occupant_id) const;

  /// States of the given occupant restricted to one day.
  std::span<const std::uint8_t> day(std::size_t occupant, std::size_t day_index) const {
    return row(occupant).subspan(day_index * kStepsPerDay, kStepsPerDay);
  }

  friend bool operator==(const StateGrid& a, const StateGrid& b) {
    return a.ids_ == b.ids_ && a.axis_ == b.axis_ && a.states_ == b.states_;
  }

 private:
  std::vector<std::string> ids_;
  DayAxis axis_;
  std::vector<std::uint8_t> states_;
};

struct StateInferenceConfig {
  VbGmmConfig gmm;
  double weight_floor = 1e-2;
  /// Used only when the first fit finds a single component.
  double idle_threshold_w = 5.0;
  std::uint64_t seed = 0;
};

/// How an occupant's samples were mapped to states.
enum class StatePath {
  kConstant,          // degenerate first fit
  kSingleComponent,   // one component: all state 1 or all state 3
  kTwoStep,           // low cluster -> 1, second fit splits the rest into 2/3
  kTwoStepNoMedium,   // second fit found one component: rest -> 3
};

struct OccupantStateFit {
  std::string occupant_id;
  StatePath path = StatePath::kConstant;
  VbGmmModel first;
  std::optional<VbGmmModel> second;
};

struct StateInference {
  StateGrid states;
  std::vector<OccupantStateFit> fits;
};

/// Two-step mixture clustering of each occupant's power series into states.
StateInference infer_states_detailed(const TimeSeriesGrid& grid, const StateInferenceConfig& config);
StateGrid infer_states(const TimeSeriesGrid& grid, const StateInferenceConfig& config);

/// States for one series; exposed for testing.
std::vector<std::uint8_t> classify_series(std::span<const double> power, const StateInferenceConfig& config,
                                          std::uint64_t seed, OccupantStateFit* fit = nullptr);

const char* to_string(StatePath path);

/// `occupant_id,timestamp,state`, one row per occupant per step.
void write_states(std::ostream& out, const StateGrid& grid);
StateGrid read_states(const std::string& path, Calendar calendar = {});

/// JSON document with the per-occupant mixture fits plus the config and seed.
std::string fits_to_json(const StateInference& inference, const StateInferenceConfig& config);

}  // namespace deskzone

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "deskzone/features.hpp"
#include "deskzone/ingest.hpp"
#include "deskzone/layout.hpp"
#include "deskzone/matrix.hpp"
#include "deskzone/states.hpp"

namespace deskzone {

/// Minutes since civil midnight.
struct TimeBlock {
  int start_min = 0;
  int duration_min = 0;
  bool contains(int minute) const { return minute >= start_min && minute < start_min + duration_min; }
};

/// Daily behaviour template: present between arrival and departure except
/// during lunch and meetings.
struct Archetype {
  std::string name;
  int arrival_min = 0;
  std::optional<TimeBlock> lunch;
  std::vector<TimeBlock> meetings;
  int departure_min = 0;

  bool working(int minute) const;
};

/// The four office archetypes of the reference synthetic floor. Archetype 4's
/// lunch is at 11am.
std::vector<Archetype> reference_archetypes();

/// Day-to-day variation layered on an archetype. All zero by default, which
/// reproduces the archetype exactly every day.
struct ScheduleVariation {
  int arrival_jitter_steps = 0;    // uniform shift in [-j, j] per day
  int departure_jitter_steps = 0;
  int block_jitter_steps = 0;      // shift of lunch/meeting starts
  double skip_lunch_prob = 0.0;
  double skip_meeting_prob = 0.0;
  double absent_day_prob = 0.0;    // weekday absence
  bool weekends_off = false;       // absent on Saturday/Sunday
  double weekend_visit_prob = 0.0; // if weekends_off, chance of working anyway
};

/// 96 * n_days states. Working steps are state 3 with probability p_high,
/// otherwise 2; every other step is state 1.
std::vector<std::uint8_t> generate_schedule(const Archetype& archetype, std::size_t n_days, double p_high,
                                            std::uint64_t seed);

/// Calendar-aware variant with day-to-day variation.
std::vector<std::uint8_t> generate_schedule(const Archetype& archetype, const DayAxis& axis, double p_high,
                                            const ScheduleVariation& variation, std::uint64_t seed);

struct PopulationSpec {
  std::vector<Archetype> archetypes = reference_archetypes();
  std::vector<std::size_t> counts;  // per archetype
  DayAxis axis;                     // defaults to one Monday
  double p_high = 0.8;
  ScheduleVariation variation;
};

/// Monday 2019-10-07, civil midnight UTC.
Instant default_synthetic_start();

/// Occupant ids are `a<k>_<nnn>` with k the 1-based archetype number.
StateGrid generate_population(const PopulationSpec& spec, std::uint64_t seed);
StateGrid generate_population(const std::vector<std::size_t>& counts, std::size_t n_days, std::uint64_t seed);

/// 1-based archetype number encoded in a generated occupant id, if any.
std::optional<int> archetype_of(const std::string& occupant_id);

/// Equal zones, each filled with one archetype where possible (occupants in
/// archetype order, then id order). Zone count must divide the occupants.
Layout archetype_pure_layout(const StateGrid& states, std::size_t zones);

struct LightingOracleConfig {
  double lit_power_w = 500.0;
  double standby_power_w = 20.0;
  int hold_weekday_min = 20;
  int hold_weekend_min = 10;
  int motion_state = 3;
  /// Peak fractional dimming of lit power at solar noon; 0 disables.
  double daylight_depth = 0.0;
};

void validate(const LightingOracleConfig& config);

/// Energy (Wh) per zone per step: zones x columns. A zone is lit at step t when
/// some occupant reached motion_state within the trailing hold window
/// (ceil(hold / 15) steps before t, plus t).
Matrix oracle_lighting(const Layout& layout, const StateGrid& states, const LightingOracleConfig& config);

/// Layouts used to teach a surrogate how energy responds to occupant placement:
/// the anchor with 0, 1, ... perturbed-1 random desk swaps applied, then
/// uniformly random layouts.
struct CorpusSpec {
  std::size_t perturbed = 40;
  std::size_t random = 20;
};

/// Oracle-labelled features of every corpus layout, concatenated in corpus order.
Dataset oracle_corpus(const StateGrid& states, const Layout& anchor, const CorpusSpec& spec,
                      const LightingOracleConfig& config, std::uint64_t seed);

/// Sums of each zone's per-step energy.
double total_energy(const Matrix& zone_step_energy);

/// Hourly records in the lighting file schema, from per-step zone energy.
LightingData to_lighting_data(const Matrix& zone_step_energy, const LayoutFrame& frame, const DayAxis& axis);

}  // namespace deskzone

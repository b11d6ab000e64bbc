#include "deskzone/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "deskzone/error.hpp"
#include "deskzone/rng.hpp"

namespace deskzone {

bool Archetype::working(int minute) const {
  if (minute < arrival_min || minute >= departure_min) return false;
  if (lunch && lunch->contains(minute)) return false;
  for (const auto& m : meetings)
    if (m.contains(minute)) return false;
  return true;
}

std::vector<Archetype> reference_archetypes() {
  constexpr int h = 60;
  return {
      Archetype{"archetype-1", 9 * h, TimeBlock{12 * h, 60}, {TimeBlock{15 * h, 60}}, 17 * h},
      Archetype{"archetype-2", 9 * h, std::nullopt, {}, 16 * h},
      Archetype{"archetype-3", 11 * h, TimeBlock{15 * h, 60}, {TimeBlock{15 * h, 60}}, 19 * h},
      Archetype{"archetype-4", 7 * h, TimeBlock{11 * h, 60}, {TimeBlock{13 * h, 120}}, 17 * h},
  };
}

std::vector<std::uint8_t> generate_schedule(const Archetype& archetype, std::size_t n_days, double p_high,
                                            std::uint64_t seed) {
  return generate_schedule(archetype, DayAxis::contiguous(default_synthetic_start(), n_days), p_high, {}, seed);
}

std::vector<std::uint8_t> generate_schedule(const Archetype& archetype, const DayAxis& axis, double p_high,
                                            const ScheduleVariation& v, std::uint64_t seed) {
  if (!(p_high >= 0.0 && p_high <= 1.0)) throw InputError("p_high must lie in [0, 1]");
  Rng rng(seed);
  auto jitter = [&](int steps) {
    return steps > 0 ? 15 * (static_cast<int>(rng.below(2 * static_cast<std::uint64_t>(steps) + 1)) - steps) : 0;
  };
  std::vector<std::uint8_t> out(axis.columns(), 1);
  for (std::size_t d = 0; d < axis.days(); ++d) {
    const bool weekend = axis.calendar.is_weekend(axis.day_starts[d]);
    // Draw every per-day variate unconditionally so the random stream does not
    // depend on which branches are taken.
    const bool absent = rng.bernoulli(v.absent_day_prob);
    const bool visits = rng.bernoulli(v.weekend_visit_prob);
    Archetype day = archetype;
    day.arrival_min += jitter(v.arrival_jitter_steps);
    day.departure_min += jitter(v.departure_jitter_steps);
    if (day.lunch) {
      day.lunch->start_min += jitter(v.block_jitter_steps);
      if (rng.bernoulli(v.skip_lunch_prob)) day.lunch.reset();
    }
    std::vector<TimeBlock> kept;
    for (auto m : day.meetings) {
      m.start_min += jitter(v.block_jitter_steps);
      if (!rng.bernoulli(v.skip_meeting_prob)) kept.push_back(m);
    }
    day.meetings = std::move(kept);

    bool present = !(weekend && v.weekends_off) || visits;
    if (!weekend && absent) present = false;
    for (int s = 0; s < kStepsPerDay; ++s) {
      const bool high = rng.bernoulli(p_high);
      if (present && day.working(15 * s)) out[d * kStepsPerDay + static_cast<std::size_t>(s)] = high ? 3 : 2;
    }
  }
  return out;
}

Instant default_synthetic_start() {
  using namespace std::chrono;
  return time_point_cast<milliseconds>(sys_days{year{2019} / 10 / 7});
}

StateGrid generate_population(const PopulationSpec& spec, std::uint64_t seed) {
  if (spec.counts.size() > spec.archetypes.size()) throw InputError("more counts than archetypes");
  DayAxis axis = spec.axis.days() ? spec.axis : DayAxis::contiguous(default_synthetic_start(), 1);
  std::vector<std::string> ids;
  std::vector<std::size_t> arche;
  for (std::size_t k = 0; k < spec.counts.size(); ++k)
    for (std::size_t c = 0; c < spec.counts[k]; ++c) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "a%zu_%03zu", k + 1, c);
      ids.emplace_back(buf);
      arche.push_back(k);
    }
  StateGrid grid(ids, axis);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto states = generate_schedule(spec.archetypes[arche[i]], axis, spec.p_high, spec.variation, mix_seed(seed, i));
    for (std::size_t c = 0; c < states.size(); ++c) grid.set(i, c, states[c]);
  }
  return grid;
}

StateGrid generate_population(const std::vector<std::size_t>& counts, std::size_t n_days, std::uint64_t seed) {
  PopulationSpec spec;
  spec.counts = counts;
  spec.axis = DayAxis::contiguous(default_synthetic_start(), n_days);
  return generate_population(spec, seed);
}

std::optional<int> archetype_of(const std::string& id) {
  if (id.size() < 3 || id[0] != 'a') return std::nullopt;
  const auto us = id.find('_');
  if (us == std::string::npos || us == 1) return std::nullopt;
  int k = 0;
  for (std::size_t i = 1; i < us; ++i) {
    if (id[i] < '0' || id[i] > '9') return std::nullopt;
    k = k * 10 + (id[i] - '0');
  }
  return k;
}

Layout archetype_pure_layout(const StateGrid& states, std::size_t zones) {
  const std::size_t n = states.occupants();
  if (zones == 0 || n % zones != 0) throw InputError("zones must divide the occupant count");
  std::vector<std::string> ids = states.occupant_ids();
  std::stable_sort(ids.begin(), ids.end(), [](const std::string& a, const std::string& b) {
    return archetype_of(a).value_or(0) < archetype_of(b).value_or(0);
  });
  return Layout(LayoutFrame::uniform(zones, n / zones, std::move(ids)));
}

void validate(const LightingOracleConfig& c) {
  if (!(c.lit_power_w > c.standby_power_w) || c.standby_power_w < 0.0)
    throw InputError("lighting oracle needs lit_power > standby_power >= 0");
  if (c.hold_weekday_min <= 0 || c.hold_weekend_min <= 0) throw InputError("lighting hold times must be positive");
  if (c.motion_state < 1 || c.motion_state > 3) throw InputError("motion_state must be 1, 2 or 3");
  if (c.daylight_depth < 0.0 || c.daylight_depth >= 1.0) throw InputError("daylight_depth must lie in [0, 1)");
}

Matrix oracle_lighting(const Layout& layout, const StateGrid& states, const LightingOracleConfig& config) {
  validate(config);
  const auto& frame = layout.frame();
  const auto& axis = states.axis();
  const std::size_t cols = states.columns();
  std::vector<std::size_t> row_of(frame.occupant_ids.size());
  for (std::size_t o = 0; o < row_of.size(); ++o) {
    auto idx = states.find(frame.occupant_ids[o]);
    if (!idx) throw InputError("occupant '" + frame.occupant_ids[o] + "' has no states");
    row_of[o] = *idx;
  }
  const int hold_weekday = (config.hold_weekday_min + 14) / 15;
  const int hold_weekend = (config.hold_weekend_min + 14) / 15;
  const double step_h = 0.25;

  Matrix energy(layout.zones(), cols);
  std::vector<bool> motion(cols);
  for (std::size_t z = 0; z < layout.zones(); ++z) {
    std::fill(motion.begin(), motion.end(), false);
    for (auto o : layout.zone_members(z)) {
      const auto row = states.row(row_of[o]);
      for (std::size_t c = 0; c < cols; ++c)
        if (row[c] >= config.motion_state) motion[c] = true;
    }
    for (std::size_t c = 0; c < cols; ++c) {
      const StepInfo info = axis.step_info(c);
      const int hold = info.weekend ? hold_weekend : hold_weekday;
      bool lit = motion[c];
      for (int k = 1; k <= hold && !lit; ++k) {
        if (c < static_cast<std::size_t>(k)) break;
        // Only look back across columns that are contiguous in time.
        if (axis.column_start(c - k) != info.start - kStepMs * k) break;
        lit = motion[c - k];
      }
      double power = config.standby_power_w;
      if (lit) {
        power = config.lit_power_w;
        if (config.daylight_depth > 0.0) {
          const double hour = (static_cast<double>(c % kStepsPerDay) + 0.5) / 4.0;
          const double sun = std::max(0.0, std::sin(std::numbers::pi * (hour - 6.0) / 12.0));
          power = config.standby_power_w + (config.lit_power_w - config.standby_power_w) * (1.0 - config.daylight_depth * sun);
        }
      }
      energy(z, c) = power * step_h;
    }
  }
  return energy;
}

double total_energy(const Matrix& m) {
  double t = 0.0;
  for (double v : m.data()) t += v;
  return t;
}

LightingData to_lighting_data(const Matrix& e, const LayoutFrame& frame, const DayAxis& axis) {
  std::vector<LightingRecord> records;
  records.reserve(e.rows() * axis.days() * 24);
  for (std::size_t z = 0; z < e.rows(); ++z)
    for (std::size_t c = 0; c < e.cols(); c += 4) {
      double wh = 0.0;
      for (std::size_t k = 0; k < 4; ++k) wh += e(z, c + k);
      records.push_back(LightingRecord{frame.zone_ids[z], axis.column_start(c), wh});
    }
  return LightingData(std::move(records));
}

Dataset oracle_corpus(const StateGrid& states, const Layout& anchor, const CorpusSpec& spec,
                      const LightingOracleConfig& config, std::uint64_t seed) {
  if (spec.perturbed + spec.random == 0) throw InputError("empty layout corpus");
  Rng rng(seed);
  const std::size_t n = anchor.desks();
  Dataset out;
  auto add = [&](const Layout& l) { out.append(dataset_from_zone_energy(states, l, oracle_lighting(l, states, config))); };
  for (std::size_t k = 0; k < spec.perturbed; ++k) {
    Layout l = anchor;
    for (std::size_t q = 0; q < k; ++q) {
      const auto a = static_cast<std::size_t>(rng.below(n));
      l.swap_desks(a, static_cast<std::size_t>(rng.below(n)));
    }
    add(l);
  }
  for (std::size_t k = 0; k < spec.random; ++k) add(random_layout(anchor.frame_ptr(), rng));
  return out;
}

}  // namespace deskzone

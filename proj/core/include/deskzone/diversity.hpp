#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "deskzone/layout.hpp"
#include "deskzone/matrix.hpp"
#include "deskzone/states.hpp"

namespace deskzone {

/// One numeric vector per occupant (raw states over time, or concept-space
/// coordinates). Row i belongs to `occupant_ids[i]`.
struct ScheduleSet {
  std::vector<std::string> occupant_ids;
  Matrix values;
  std::string representation = "raw";

  std::span<const double> vector(std::size_t i) const { return values.row(i); }
  std::size_t size() const noexcept { return occupant_ids.size(); }
};

/// Raw state values {1,2,3} as doubles.
ScheduleSet schedules_from_states(const StateGrid& states);
/// States of a single day.
ScheduleSet schedules_for_day(const StateGrid& states, std::size_t day_index);

/// Rows reordered to the layout frame's occupant order. Throws InputError if
/// any occupant of the frame has no vector.
ScheduleSet align_to_frame(const ScheduleSet& set, const LayoutFrame& frame);

double pairwise_distance(std::span<const double> a, std::span<const double> b);

/// Mean off-diagonal entry of the distance matrix of `schedules`; 0 for a
/// single schedule.
double zone_diversity(std::span<const std::span<const double>> schedules);

struct DiversityReport {
  std::vector<std::string> zone_ids;
  std::vector<double> per_zone;
  double total = 0.0;
  std::string representation;
};

/// `vectors` must be aligned to the layout frame (see align_to_frame).
DiversityReport layout_diversity(const Layout& layout, const ScheduleSet& vectors);

struct RegressionResult {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_std_err = 0.0;
  double t_statistic = 0.0;
  double p_value = 1.0;
  double r_squared = 0.0;
  std::size_t n = 0;
  bool exact_fit = false;
};

/// Simple OLS of y on x with a two-tailed t-test of the slope (n-2 df).
/// Throws InputError for n < 3, mismatched lengths, or constant x.
RegressionResult ols_regress(std::span<const double> x, std::span<const double> y);

/// Zone diversity for each zone on each day: zones x days.
Matrix daily_zone_diversity(const StateGrid& states, const Layout& layout);

void write_diversity_report(std::ostream& out, const DiversityReport& report);

}  // namespace deskzone

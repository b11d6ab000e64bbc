#include "deskzone/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include "deskzone/csv.hpp"
#include "deskzone/error.hpp"
#include "deskzone/stats.hpp"

namespace deskzone {

ScheduleSet schedules_from_states(const StateGrid& states) {
  ScheduleSet set;
  set.occupant_ids = states.occupant_ids();
  set.values = Matrix(states.occupants(), states.columns());
  for (std::size_t i = 0; i < states.occupants(); ++i)
    for (std::size_t c = 0; c < states.columns(); ++c) set.values(i, c) = states.at(i, c);
  return set;
}

ScheduleSet schedules_for_day(const StateGrid& states, std::size_t day_index) {
  ScheduleSet set;
  set.occupant_ids = states.occupant_ids();
  set.values = Matrix(states.occupants(), kStepsPerDay);
  for (std::size_t i = 0; i < states.occupants(); ++i) {
    const auto day = states.day(i, day_index);
    for (int s = 0; s < kStepsPerDay; ++s) set.values(i, s) = day[s];
  }
  return set;
}

ScheduleSet align_to_frame(const ScheduleSet& set, const LayoutFrame& frame) {
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < set.occupant_ids.size(); ++i) pos[set.occupant_ids[i]] = i;
  ScheduleSet out;
  out.representation = set.representation;
  out.occupant_ids = frame.occupant_ids;
  out.values = Matrix(frame.occupant_ids.size(), set.values.cols());
  for (std::size_t o = 0; o < frame.occupant_ids.size(); ++o) {
    auto it = pos.find(frame.occupant_ids[o]);
    if (it == pos.end()) throw InputError("occupant '" + frame.occupant_ids[o] + "' has no schedule vector");
    const auto src = set.values.row(it->second);
    std::copy(src.begin(), src.end(), out.values.row(o).begin());
  }
  return out;
}

double pairwise_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw InputError("schedule length mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  double acc = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double d = a[t] - b[t];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double zone_diversity(std::span<const std::span<const double>> schedules) {
  const std::size_t n = schedules.size();
  if (n < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) sum += pairwise_distance(schedules[i], schedules[j]);
  // The full matrix holds each pair twice; normalise by its N(N-1) off-diagonal entries.
  return 2.0 * sum / static_cast<double>(n * (n - 1));
}

DiversityReport layout_diversity(const Layout& layout, const ScheduleSet& vectors) {
  const auto& frame = layout.frame();
  if (vectors.size() != frame.occupant_ids.size())
    throw InputError("schedule set is not aligned to the layout's occupants");
  DiversityReport report;
  report.zone_ids = frame.zone_ids;
  report.representation = vectors.representation;
  std::vector<std::span<const double>> members;
  for (std::size_t z = 0; z < layout.zones(); ++z) {
    members.clear();
    for (auto o : layout.zone_members(z)) members.push_back(vectors.vector(o));
    report.per_zone.push_back(zone_diversity(members));
    report.total += report.per_zone.back();
  }
  return report;
}

RegressionResult ols_regress(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("regression inputs differ in length");
  const std::size_t n = x.size();
  if (n < 3) throw InputError("regression needs at least 3 points");
  const double nd = static_cast<double>(n);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= nd;
  my /= nd;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InputError("degenerate regressor: x is constant");

  RegressionResult r;
  r.n = n;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (r.intercept + r.slope * x[i]);
    sse += e * e;
  }
  r.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 0.0;
  // Residuals at rounding level count as an exact fit.
  if (sse <= 1e-24 * std::max(1.0, syy)) {
    r.exact_fit = syy > 0.0;
    r.slope_std_err = 0.0;
    r.t_statistic = syy > 0.0 ? std::copysign(std::numeric_limits<double>::infinity(), r.slope) : 0.0;
    r.p_value = syy > 0.0 ? 0.0 : 1.0;
    return r;
  }
  r.slope_std_err = std::sqrt(sse / (nd - 2.0) / sxx);
  r.t_statistic = r.slope / r.slope_std_err;
  r.p_value = stats::student_t_two_tailed(r.t_statistic, nd - 2.0);
  return r;
}

Matrix daily_zone_diversity(const StateGrid& states, const Layout& layout) {
  const auto& frame = layout.frame();
  std::vector<std::size_t> row_of(frame.occupant_ids.size());
  for (std::size_t o = 0; o < frame.occupant_ids.size(); ++o) {
    auto idx = states.find(frame.occupant_ids[o]);
    if (!idx) throw InputError("occupant '" + frame.occupant_ids[o] + "' has no states");
    row_of[o] = *idx;
  }
  Matrix out(layout.zones(), states.axis().days());
  std::vector<std::vector<double>> buffers;
  std::vector<std::span<const double>> members;
  for (std::size_t d = 0; d < states.axis().days(); ++d) {
    for (std::size_t z = 0; z < layout.zones(); ++z) {
      buffers.clear();
      for (auto o : layout.zone_members(z)) {
        const auto day = states.day(row_of[o], d);
        buffers.emplace_back(day.begin(), day.end());
      }
      members.assign(buffers.begin(), buffers.end());
      out(z, d) = zone_diversity(members);
    }
  }
  return out;
}

void write_diversity_report(std::ostream& out, const DiversityReport& report) {
  out << "zone_id,diversity\n";
  for (std::size_t z = 0; z < report.zone_ids.size(); ++z)
    out << report.zone_ids[z] << ',' << csv::format_double(report.per_zone[z]) << '\n';
}

}  // namespace deskzone

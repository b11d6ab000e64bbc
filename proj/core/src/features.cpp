#include "deskzone/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "deskzone/error.hpp"

namespace deskzone {

const std::array<std::string, FeatureRow::kRawFeatures>& raw_feature_names() {
  static const std::array<std::string, FeatureRow::kRawFeatures> names{"s1",          "s2",         "s3",  "hour",
                                                                       "day_of_week", "is_weekend", "zone"};
  return names;
}

namespace {

std::vector<std::size_t> grid_rows_for(const StateGrid& states, const LayoutFrame& frame) {
  std::vector<std::size_t> rows(frame.occupant_ids.size());
  for (std::size_t o = 0; o < rows.size(); ++o) {
    auto idx = states.find(frame.occupant_ids[o]);
    if (!idx) throw InputError("occupant '" + frame.occupant_ids[o] + "' has no states");
    rows[o] = *idx;
  }
  return rows;
}

}  // namespace

std::vector<FeatureRow> build_features(const StateGrid& states, const Layout& layout) {
  const auto grid_row = grid_rows_for(states, layout.frame());
  const std::size_t cols = states.columns();
  const std::size_t zones = layout.zones();
  std::vector<FeatureRow> out(cols * zones);
  for (std::size_t c = 0; c < cols; ++c) {
    const StepInfo info = states.axis().step_info(c);
    for (std::size_t z = 0; z < zones; ++z) {
      FeatureRow& r = out[c * zones + z];
      r.hour = static_cast<std::uint8_t>(info.hour);
      r.day_of_week = static_cast<std::uint8_t>(info.day_of_week);
      r.is_weekend = info.weekend ? 1 : 0;
      r.zone = static_cast<std::uint16_t>(z);
      r.column = static_cast<std::uint32_t>(c);
    }
  }
  for (std::size_t z = 0; z < zones; ++z)
    for (auto o : layout.zone_members(z)) {
      const auto row = states.row(grid_row[o]);
      for (std::size_t c = 0; c < cols; ++c) {
        FeatureRow& r = out[c * zones + z];
        switch (row[c]) {
          case 1: ++r.s1; break;
          case 2: ++r.s2; break;
          default: ++r.s3; break;
        }
      }
    }
  return out;
}

double occupancy_transform(double s) { return 2.0 / (1.0 + std::exp(-s)) - 1.0; }

std::pair<double, double> hour_harmonics(int hour) {
  const double a = 2.0 * std::numbers::pi * hour / 24.0;
  return {std::sin(a), std::cos(a)};
}

std::size_t encoded_width(std::size_t n_zones) { return 13 + n_zones; }

std::vector<double> encode(const FeatureRow& row, std::size_t n_zones) {
  if (row.zone >= n_zones) throw InputError("zone index out of range for encoding");
  std::vector<double> v(encoded_width(n_zones), 0.0);
  v[0] = occupancy_transform(row.s1);
  v[1] = occupancy_transform(row.s2);
  v[2] = occupancy_transform(row.s3);
  const auto [s, c] = hour_harmonics(row.hour);
  v[3] = (s + 1.0) / 2.0;
  v[4] = (c + 1.0) / 2.0;
  v[5 + row.day_of_week] = 1.0;
  v[12] = row.is_weekend;
  v[13 + row.zone] = 1.0;
  return v;
}

Matrix encode_all(std::span<const FeatureRow> rows, std::size_t n_zones) {
  Matrix x(rows.size(), encoded_width(n_zones));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto v = encode(rows[i], n_zones);
    std::copy(v.begin(), v.end(), x.row(i).begin());
  }
  return x;
}

MinMaxScaler MinMaxScaler::fit(const Matrix& x) {
  if (x.rows() == 0) throw InputError("cannot fit a scaler on zero rows");
  MinMaxScaler s;
  s.min.assign(x.cols(), 0.0);
  s.max.assign(x.cols(), 0.0);
  for (std::size_t j = 0; j < x.cols(); ++j) {
    s.min[j] = s.max[j] = x(0, j);
    for (std::size_t i = 1; i < x.rows(); ++i) {
      s.min[j] = std::min(s.min[j], x(i, j));
      s.max[j] = std::max(s.max[j], x(i, j));
    }
  }
  return s;
}

void MinMaxScaler::transform_in_place(std::span<double> row) const {
  if (row.size() != min.size()) throw InputError("scaler width mismatch");
  for (std::size_t j = 0; j < row.size(); ++j) {
    const double span = max[j] - min[j];
    row[j] = span > 0.0 ? std::clamp((row[j] - min[j]) / span, 0.0, 1.0) : 0.0;
  }
}

Matrix MinMaxScaler::transform(const Matrix& x) const {
  Matrix out = x;
  for (std::size_t i = 0; i < out.rows(); ++i) transform_in_place(out.row(i));
  return out;
}

Dataset Dataset::subset(std::size_t begin, std::size_t end) const {
  Dataset d;
  d.rows.assign(rows.begin() + static_cast<std::ptrdiff_t>(begin), rows.begin() + static_cast<std::ptrdiff_t>(end));
  d.targets.assign(targets.begin() + static_cast<std::ptrdiff_t>(begin),
                   targets.begin() + static_cast<std::ptrdiff_t>(end));
  return d;
}

void Dataset::append(const Dataset& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
  targets.insert(targets.end(), other.targets.begin(), other.targets.end());
}

TrainingSet build_training_set(const StateGrid& states, const Layout& layout, const LightingData& lighting) {
  TrainingSet ts;
  ts.zone_ids = layout.frame().zone_ids;
  const auto rows = build_features(states, layout);
  const auto& axis = states.axis();
  for (const auto& r : rows) {
    const Instant hour_start = axis.column_start(r.column - r.column % 4);
    const auto e = lighting.energy(ts.zone_ids[r.zone], hour_start);
    if (!e) {
      ++ts.dropped_steps;
      continue;
    }
    ts.data.rows.push_back(r);
    ts.data.targets.push_back(*e / 4.0);
  }
  return ts;
}

Dataset dataset_from_zone_energy(const StateGrid& states, const Layout& layout, const Matrix& e) {
  if (e.rows() != layout.zones() || e.cols() != states.columns())
    throw InputError("zone energy matrix does not match layout and grid");
  Dataset d;
  d.rows = build_features(states, layout);
  d.targets.reserve(d.rows.size());
  for (const auto& r : d.rows) d.targets.push_back(e(r.zone, r.column));
  return d;
}

std::pair<Dataset, Dataset> time_split(const Dataset& data, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw InputError("split fraction must lie strictly between 0 and 1");
  if (data.rows.size() != data.targets.size()) throw InputError("rows and targets differ in length");
  if (data.rows.empty()) throw InputError("cannot split an empty dataset");
  for (std::size_t i = 1; i < data.rows.size(); ++i)
    if (data.rows[i].column < data.rows[i - 1].column) throw InputError("dataset rows are not in time order");
  const auto boundary = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(data.rows.size())));
  std::size_t cut = data.rows.size();
  if (boundary < data.rows.size()) {
    const auto day = data.rows[boundary].column / kStepsPerDay;
    cut = static_cast<std::size_t>(
        std::find_if(data.rows.begin(), data.rows.end(), [&](const FeatureRow& r) { return r.column / kStepsPerDay == day; }) -
        data.rows.begin());
  }
  if (cut == 0 || cut == data.rows.size()) throw InputError("time split leaves one side empty");
  return {data.subset(0, cut), data.subset(cut, data.rows.size())};
}

std::vector<std::uint64_t> hourly_groups(std::span<const FeatureRow> rows) {
  std::vector<std::uint64_t> g(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) g[i] = (std::uint64_t{rows[i].zone} << 32) | (rows[i].column / 4);
  return g;
}

std::vector<std::uint64_t> daily_groups(std::span<const FeatureRow> rows) {
  std::vector<std::uint64_t> g(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    g[i] = (std::uint64_t{rows[i].zone} << 32) | (rows[i].column / kStepsPerDay);
  return g;
}

}  // namespace deskzone

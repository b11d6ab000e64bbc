#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "deskzone/ingest.hpp"
#include "deskzone/layout.hpp"
#include "deskzone/matrix.hpp"
#include "deskzone/states.hpp"

namespace deskzone {

/// Zone-level predictors at one 15-minute step.
struct FeatureRow {
  std::uint16_t s1 = 0, s2 = 0, s3 = 0;  // occupants per state
  std::uint8_t hour = 0;
  std::uint8_t day_of_week = 0;  // Monday = 0
  std::uint8_t is_weekend = 0;
  std::uint16_t zone = 0;     // index into the owning zone list
  std::uint32_t column = 0;   // grid column the row describes

  static constexpr std::size_t kRawFeatures = 7;
  std::array<double, kRawFeatures> raw() const {
    return {double(s1), double(s2), double(s3), double(hour), double(day_of_week), double(is_weekend), double(zone)};
  }
  friend bool operator==(const FeatureRow&, const FeatureRow&) = default;
};

const std::array<std::string, FeatureRow::kRawFeatures>& raw_feature_names();

/// One row per step per zone, time-major (all zones of column 0, then column 1, ...).
/// Every layout occupant must appear in the grid.
std::vector<FeatureRow> build_features(const StateGrid& states, const Layout& layout);

/// 2 / (1 + e^-s) - 1.
double occupancy_transform(double s);

/// (sin, cos) of the hour on the 24-hour circle.
std::pair<double, double> hour_harmonics(int hour);

/// 13 + n_zones values: transformed s1..s3, sin and cos mapped to [0, 1],
/// one-hot day of week, weekend flag, one-hot zone. Not yet min-max scaled.
std::size_t encoded_width(std::size_t n_zones);
std::vector<double> encode(const FeatureRow& row, std::size_t n_zones);
Matrix encode_all(std::span<const FeatureRow> rows, std::size_t n_zones);

/// Per-column min-max scaling fitted on training data. Transformed values are
/// clamped to [0, 1]; constant columns map to 0.
struct MinMaxScaler {
  std::vector<double> min, max;

  static MinMaxScaler fit(const Matrix& x);
  void transform_in_place(std::span<double> row) const;
  Matrix transform(const Matrix& x) const;
};

/// Rows with their per-step energy targets, in time order.
struct Dataset {
  std::vector<FeatureRow> rows;
  std::vector<double> targets;

  std::size_t size() const noexcept { return rows.size(); }
  Dataset subset(std::size_t begin, std::size_t end) const;
  void append(const Dataset& other);
};

/// Features joined to hourly lighting energy spread evenly over the hour's
/// four steps. Steps whose hour has no lighting record are dropped and counted.
struct TrainingSet {
  Dataset data;
  std::vector<std::string> zone_ids;
  std::size_t dropped_steps = 0;
};
TrainingSet build_training_set(const StateGrid& states, const Layout& layout, const LightingData& lighting);

/// Same, but targets come from per-zone per-step energy (zones x columns).
Dataset dataset_from_zone_energy(const StateGrid& states, const Layout& layout, const Matrix& zone_step_energy);

/// Whole-day split at `fraction` of the rows: the day containing the boundary
/// row goes to the test side.
std::pair<Dataset, Dataset> time_split(const Dataset& data, double fraction = 0.8);

/// Group labels for aggregated metrics: (zone, hour) and (zone, day).
std::vector<std::uint64_t> hourly_groups(std::span<const FeatureRow> rows);
std::vector<std::uint64_t> daily_groups(std::span<const FeatureRow> rows);

}  // namespace deskzone

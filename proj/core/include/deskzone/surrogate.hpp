#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "deskzone/features.hpp"
#include "deskzone/forest.hpp"
#include "deskzone/mlr.hpp"

namespace deskzone {

/// Linear model on encoded, min-max scaled features.
struct LinearEnergyModel {
  std::size_t n_zones = 0;
  MinMaxScaler scaler;
  MlrModel mlr;

  double predict(const FeatureRow& row) const;
};

LinearEnergyModel fit_linear_energy_model(const Dataset& train, std::size_t n_zones, double ridge = 1e-8);

enum class ModelKind { kMlr, kRandomForest };
std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

struct ModelSpec {
  ModelKind kind = ModelKind::kRandomForest;
  RfConfig forest;
  double ridge = 1e-8;
  std::uint64_t seed = 0;
};

/// A trained per-step zone energy predictor bound to the zone ids it saw.
class EnergyModel {
 public:
  EnergyModel() = default;
  EnergyModel(std::vector<std::string> zone_ids, LinearEnergyModel model);
  EnergyModel(std::vector<std::string> zone_ids, RfModel model);

  ModelKind kind() const noexcept;
  const std::vector<std::string>& zone_ids() const noexcept { return zone_ids_; }
  /// Index of `zone_id` in the training zones; throws InputError if unknown.
  std::size_t zone_index(const std::string& zone_id) const;

  /// Raw model output (may be negative).
  double predict(const FeatureRow& row) const;
  std::vector<double> predict(std::span<const FeatureRow> rows) const;

  const LinearEnergyModel* linear() const { return std::get_if<LinearEnergyModel>(&model_); }
  const RfModel* forest() const { return std::get_if<RfModel>(&model_); }

 private:
  std::vector<std::string> zone_ids_;
  std::variant<LinearEnergyModel, RfModel> model_;
};

EnergyModel fit_model(const ModelSpec& spec, const Dataset& train, const std::vector<std::string>& zone_ids);

std::string to_json(const EnergyModel& model);
EnergyModel energy_model_from_json(const std::string& text);

struct Metrics {
  double mae = 0.0;
  double mse = 0.0;
  double r_squared = 0.0;         // per step
  double r_squared_hourly = 0.0;  // after summing within hourly groups
  double r_squared_daily = 0.0;   // after summing within daily groups
  std::size_t n = 0;
};

/// 1 - SSres/SStot. With constant actuals this is 1 for an exact fit and 0 otherwise.
double r_squared(std::span<const double> y, std::span<const double> yhat);

Metrics evaluate(std::span<const double> y, std::span<const double> yhat, std::span<const std::uint64_t> hourly,
                 std::span<const std::uint64_t> daily);
Metrics evaluate(const EnergyModel& model, const Dataset& test);

struct CrossValidation {
  Metrics mean;
  std::vector<Metrics> folds;
  std::vector<std::pair<std::size_t, std::size_t>> bounds;  // [begin, end) per fold
};

/// Contiguous folds; the first n % k folds get one extra row.
std::vector<std::pair<std::size_t, std::size_t>> fold_bounds(std::size_t n, std::size_t k);
CrossValidation cross_validate(const Dataset& data, std::size_t k, const ModelSpec& spec,
                               const std::vector<std::string>& zone_ids);

struct EnergyReport {
  std::vector<std::string> zone_ids;  // layout zones
  DayAxis axis;
  Matrix energy;  // zones x columns, predictions clamped at 0
  std::vector<double> zone_totals;
  std::vector<double> day_totals;
  double total = 0.0;
};

EnergyReport predict_energy(const EnergyModel& model, const Layout& layout, const StateGrid& states);

/// 100 * (report - baseline) / baseline on grand totals.
double percent_change(const EnergyReport& report, const EnergyReport& baseline);
double percent_change(double value, double baseline);

/// `zone_id,period_start,energy_pred_wh`, one row per zone per step.
void write_energy_report(std::ostream& out, const EnergyReport& report);

/// Total clamped predicted energy of layouts over a fixed grid, memoizing
/// predictions by feature row. Not safe for concurrent use.
class LayoutEnergySimulator {
 public:
  LayoutEnergySimulator(const EnergyModel& model, const StateGrid& states, const LayoutFrame& frame);

  double operator()(const Layout& layout);
  std::size_t cache_size() const noexcept { return cache_.size(); }

 private:
  const EnergyModel& model_;
  const StateGrid& states_;
  std::vector<std::size_t> grid_row_;   // frame occupant -> grid row
  std::vector<std::size_t> model_zone_; // frame zone -> model zone
  std::vector<StepInfo> steps_;
  std::vector<std::uint16_t> counts_;   // scratch: 3 per column
  std::unordered_map<std::uint64_t, double> cache_;
};

}  // namespace deskzone

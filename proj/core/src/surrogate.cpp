#include "deskzone/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include <nlohmann/json.hpp>

#include "deskzone/csv.hpp"
#include "deskzone/error.hpp"

namespace deskzone {

double LinearEnergyModel::predict(const FeatureRow& row) const {
  auto v = encode(row, n_zones);
  scaler.transform_in_place(v);
  return mlr.predict(v);
}

LinearEnergyModel fit_linear_energy_model(const Dataset& train, std::size_t n_zones, double ridge) {
  if (train.rows.empty()) throw InputError("empty training set");
  LinearEnergyModel m;
  m.n_zones = n_zones;
  const Matrix x = encode_all(train.rows, n_zones);
  m.scaler = MinMaxScaler::fit(x);
  m.mlr = fit_mlr(m.scaler.transform(x), train.targets, ridge);
  return m;
}

std::string to_string(ModelKind kind) { return kind == ModelKind::kMlr ? "mlr" : "rf"; }

ModelKind parse_model_kind(const std::string& name) {
  if (name == "mlr") return ModelKind::kMlr;
  if (name == "rf") return ModelKind::kRandomForest;
  throw InputError("unknown model kind '" + name + "' (expected mlr or rf)");
}

EnergyModel::EnergyModel(std::vector<std::string> zone_ids, LinearEnergyModel model)
    : zone_ids_(std::move(zone_ids)), model_(std::move(model)) {}

EnergyModel::EnergyModel(std::vector<std::string> zone_ids, RfModel model)
    : zone_ids_(std::move(zone_ids)), model_(std::move(model)) {}

ModelKind EnergyModel::kind() const noexcept {
  return std::holds_alternative<LinearEnergyModel>(model_) ? ModelKind::kMlr : ModelKind::kRandomForest;
}

std::size_t EnergyModel::zone_index(const std::string& zone_id) const {
  const auto it = std::find(zone_ids_.begin(), zone_ids_.end(), zone_id);
  if (it == zone_ids_.end()) throw InputError("zone '" + zone_id + "' is unknown to the model");
  return static_cast<std::size_t>(it - zone_ids_.begin());
}

double EnergyModel::predict(const FeatureRow& row) const {
  return std::visit([&](const auto& m) { return m.predict(row); }, model_);
}

std::vector<double> EnergyModel::predict(std::span<const FeatureRow> rows) const {
  std::vector<double> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = predict(rows[i]);
  return out;
}

EnergyModel fit_model(const ModelSpec& spec, const Dataset& train, const std::vector<std::string>& zone_ids) {
  if (spec.kind == ModelKind::kMlr)
    return EnergyModel(zone_ids, fit_linear_energy_model(train, zone_ids.size(), spec.ridge));
  return EnergyModel(zone_ids, fit_random_forest(train.rows, train.targets, spec.forest, spec.seed));
}

// JSON layout:
//   {"kind": "mlr"|"rf", "zone_ids": [...], "features": [...], ...}
//   mlr: "intercept", "coefficients", "ridge", "scaler": {"min", "max"}
//   rf: "seed", "config", "split_gain", "trees": [{"feature", "threshold",
//       "value", "left", "right", "samples"} as parallel arrays]
std::string to_json(const EnergyModel& model) {
  using nlohmann::json;
  json j;
  j["kind"] = to_string(model.kind());
  j["zone_ids"] = model.zone_ids();
  if (const auto* lin = model.linear()) {
    j["encoding"] = {{"occupancy_transform", "2/(1+exp(-s))-1"},
                     {"hour", "sin/cos mapped to [0,1]"},
                     {"layout", "g(s1),g(s2),g(s3),sin,cos,dow0..dow6,weekend,zone0..zoneN"}};
    j["n_zones"] = lin->n_zones;
    j["intercept"] = lin->mlr.intercept;
    j["coefficients"] = lin->mlr.coefficients;
    j["ridge"] = lin->mlr.ridge;
    j["underdetermined"] = lin->mlr.underdetermined;
    j["scaler"] = {{"min", lin->scaler.min}, {"max", lin->scaler.max}};
  } else {
    const RfModel& rf = *model.forest();
    j["features"] = raw_feature_names();
    j["seed"] = rf.seed;
    j["n_features"] = rf.n_features;
    j["config"] = {{"n_trees", rf.config.n_trees},
                   {"min_split", rf.config.min_split},
                   {"min_leaf", rf.config.min_leaf},
                   {"max_depth", rf.config.max_depth},
                   {"bootstrap", rf.config.bootstrap}};
    j["split_gain"] = rf.split_gain;
    json trees = json::array();
    for (const auto& t : rf.trees) {
      json f = json::array(), th = json::array(), v = json::array(), l = json::array(), r = json::array(),
           s = json::array();
      for (const auto& n : t.nodes) {
        f.push_back(n.feature);
        th.push_back(n.threshold);
        v.push_back(n.value);
        l.push_back(n.left);
        r.push_back(n.right);
        s.push_back(n.samples);
      }
      trees.push_back({{"feature", f}, {"threshold", th}, {"value", v}, {"left", l}, {"right", r}, {"samples", s}});
    }
    j["trees"] = std::move(trees);
  }
  return j.dump(1);
}

EnergyModel energy_model_from_json(const std::string& text) {
  using nlohmann::json;
  try {
    const json j = json::parse(text);
    auto zone_ids = j.at("zone_ids").get<std::vector<std::string>>();
    const ModelKind kind = parse_model_kind(j.at("kind").get<std::string>());
    if (kind == ModelKind::kMlr) {
      LinearEnergyModel m;
      m.n_zones = j.at("n_zones").get<std::size_t>();
      m.mlr.intercept = j.at("intercept").get<double>();
      m.mlr.coefficients = j.at("coefficients").get<std::vector<double>>();
      m.mlr.ridge = j.at("ridge").get<double>();
      m.mlr.underdetermined = j.value("underdetermined", false);
      m.scaler.min = j.at("scaler").at("min").get<std::vector<double>>();
      m.scaler.max = j.at("scaler").at("max").get<std::vector<double>>();
      if (m.mlr.coefficients.size() != encoded_width(m.n_zones) || m.scaler.min.size() != m.mlr.coefficients.size() ||
          m.scaler.max.size() != m.mlr.coefficients.size())
        throw InputError("linear model widths are inconsistent");
      return EnergyModel(std::move(zone_ids), std::move(m));
    }
    RfModel rf;
    rf.seed = j.at("seed").get<std::uint64_t>();
    rf.n_features = j.at("n_features").get<std::size_t>();
    const auto& c = j.at("config");
    rf.config.n_trees = c.at("n_trees").get<std::size_t>();
    rf.config.min_split = c.at("min_split").get<std::size_t>();
    rf.config.min_leaf = c.at("min_leaf").get<std::size_t>();
    rf.config.max_depth = c.at("max_depth").get<std::size_t>();
    rf.config.bootstrap = c.at("bootstrap").get<bool>();
    rf.split_gain = j.at("split_gain").get<std::vector<double>>();
    for (const auto& t : j.at("trees")) {
      const auto f = t.at("feature").get<std::vector<int>>();
      const auto th = t.at("threshold").get<std::vector<double>>();
      const auto v = t.at("value").get<std::vector<double>>();
      const auto l = t.at("left").get<std::vector<std::uint32_t>>();
      const auto r = t.at("right").get<std::vector<std::uint32_t>>();
      const auto s = t.at("samples").get<std::vector<std::uint32_t>>();
      const std::size_t n = f.size();
      if (n == 0 || th.size() != n || v.size() != n || l.size() != n || r.size() != n || s.size() != n)
        throw InputError("tree arrays are inconsistent");
      RegressionTree tree;
      tree.nodes.resize(n);
      for (std::size_t k = 0; k < n; ++k) {
        if (f[k] >= static_cast<int>(rf.n_features) || (f[k] >= 0 && (l[k] >= n || r[k] >= n || l[k] <= k || r[k] <= k)))
          throw InputError("tree node references are invalid");
        tree.nodes[k] = TreeNode{f[k], th[k], v[k], l[k], r[k], s[k]};
      }
      rf.trees.push_back(std::move(tree));
    }
    if (rf.trees.empty()) throw InputError("forest has no trees");
    return EnergyModel(std::move(zone_ids), std::move(rf));
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model JSON: ") + e.what());
  }
}

double r_squared(std::span<const double> y, std::span<const double> yhat) {
  if (y.empty()) return 0.0;
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
  return 1.0 - ss_res / ss_tot;
}

namespace {

double grouped_r_squared(std::span<const double> y, std::span<const double> yhat, std::span<const std::uint64_t> g) {
  std::map<std::uint64_t, std::size_t> slot;
  std::vector<double> ys, ps;
  for (std::size_t i = 0; i < y.size(); ++i) {
    auto [it, fresh] = slot.try_emplace(g[i], ys.size());
    if (fresh) {
      ys.push_back(0.0);
      ps.push_back(0.0);
    }
    ys[it->second] += y[i];
    ps[it->second] += yhat[i];
  }
  return r_squared(ys, ps);
}

}  // namespace

Metrics evaluate(std::span<const double> y, std::span<const double> yhat, std::span<const std::uint64_t> hourly,
                 std::span<const std::uint64_t> daily) {
  if (y.size() != yhat.size() || y.size() != hourly.size() || y.size() != daily.size())
    throw InputError("evaluation inputs differ in length");
  if (y.empty()) throw InputError("nothing to evaluate");
  Metrics m;
  m.n = y.size();
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = yhat[i] - y[i];
    m.mae += std::abs(e);
    m.mse += e * e;
  }
  m.mae /= static_cast<double>(m.n);
  m.mse /= static_cast<double>(m.n);
  m.r_squared = r_squared(y, yhat);
  m.r_squared_hourly = grouped_r_squared(y, yhat, hourly);
  m.r_squared_daily = grouped_r_squared(y, yhat, daily);
  return m;
}

Metrics evaluate(const EnergyModel& model, const Dataset& test) {
  const auto pred = model.predict(test.rows);
  return evaluate(test.targets, pred, hourly_groups(test.rows), daily_groups(test.rows));
}

std::vector<std::pair<std::size_t, std::size_t>> fold_bounds(std::size_t n, std::size_t k) {
  if (k < 2) throw InputError("cross-validation needs k >= 2");
  if (k > n) throw InputError("more folds than rows");
  std::vector<std::pair<std::size_t, std::size_t>> b;
  std::size_t start = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t len = n / k + (f < n % k ? 1 : 0);
    b.emplace_back(start, start + len);
    start += len;
  }
  return b;
}

CrossValidation cross_validate(const Dataset& data, std::size_t k, const ModelSpec& spec,
                               const std::vector<std::string>& zone_ids) {
  CrossValidation cv;
  cv.bounds = fold_bounds(data.size(), k);
  for (const auto& [lo, hi] : cv.bounds) {
    Dataset train = data.subset(0, lo);
    train.append(data.subset(hi, data.size()));
    const EnergyModel model = fit_model(spec, train, zone_ids);
    cv.folds.push_back(evaluate(model, data.subset(lo, hi)));
  }
  const double kk = static_cast<double>(k);
  for (const auto& f : cv.folds) {
    cv.mean.mae += f.mae / kk;
    cv.mean.mse += f.mse / kk;
    cv.mean.r_squared += f.r_squared / kk;
    cv.mean.r_squared_hourly += f.r_squared_hourly / kk;
    cv.mean.r_squared_daily += f.r_squared_daily / kk;
    cv.mean.n += f.n;
  }
  return cv;
}

EnergyReport predict_energy(const EnergyModel& model, const Layout& layout, const StateGrid& states) {
  const auto& frame = layout.frame();
  std::vector<std::uint16_t> model_zone(frame.zones());
  for (std::size_t z = 0; z < frame.zones(); ++z)
    model_zone[z] = static_cast<std::uint16_t>(model.zone_index(frame.zone_ids[z]));
  EnergyReport rep;
  rep.zone_ids = frame.zone_ids;
  rep.axis = states.axis();
  rep.energy = Matrix(frame.zones(), states.columns());
  rep.zone_totals.assign(frame.zones(), 0.0);
  rep.day_totals.assign(rep.axis.days(), 0.0);
  for (FeatureRow r : build_features(states, layout)) {
    const std::size_t z = r.zone;
    r.zone = model_zone[z];
    const double e = std::max(0.0, model.predict(r));
    rep.energy(z, r.column) = e;
  }
  // Totals are summed in a fixed order so equal inputs give equal bits.
  for (std::size_t z = 0; z < frame.zones(); ++z)
    for (std::size_t c = 0; c < states.columns(); ++c) {
      rep.zone_totals[z] += rep.energy(z, c);
      rep.day_totals[c / kStepsPerDay] += rep.energy(z, c);
    }
  for (double t : rep.zone_totals) rep.total += t;
  return rep;
}

double percent_change(double value, double baseline) {
  if (baseline == 0.0) throw InputError("percent change against a zero baseline");
  return 100.0 * (value - baseline) / baseline;
}

double percent_change(const EnergyReport& report, const EnergyReport& baseline) {
  return percent_change(report.total, baseline.total);
}

void write_energy_report(std::ostream& out, const EnergyReport& report) {
  out << "zone_id,period_start,energy_pred_wh\n";
  for (std::size_t z = 0; z < report.zone_ids.size(); ++z)
    for (std::size_t c = 0; c < report.energy.cols(); ++c)
      out << report.zone_ids[z] << ',' << format_instant(report.axis.column_start(c)) << ','
          << csv::format_double(report.energy(z, c)) << '\n';
}

LayoutEnergySimulator::LayoutEnergySimulator(const EnergyModel& model, const StateGrid& states,
                                             const LayoutFrame& frame)
    : model_(model), states_(states) {
  grid_row_.resize(frame.occupant_ids.size());
  for (std::size_t o = 0; o < grid_row_.size(); ++o) {
    auto idx = states.find(frame.occupant_ids[o]);
    if (!idx) throw InputError("occupant '" + frame.occupant_ids[o] + "' has no states");
    grid_row_[o] = *idx;
  }
  for (const auto& z : frame.zone_ids) model_zone_.push_back(model.zone_index(z));
  for (std::size_t z = 0; z < frame.zones(); ++z)
    if (frame.zone_size(z) >= 4096) throw InputError("zone too large for the energy simulator");
  steps_.reserve(states.columns());
  for (std::size_t c = 0; c < states.columns(); ++c) steps_.push_back(states.axis().step_info(c));
  counts_.resize(3 * states.columns());
}

double LayoutEnergySimulator::operator()(const Layout& layout) {
  if (layout.zones() != model_zone_.size() || layout.frame().occupant_ids.size() != grid_row_.size())
    throw InputError("layout does not match the simulator frame");
  const std::size_t cols = states_.columns();
  double total = 0.0;
  for (std::size_t z = 0; z < layout.zones(); ++z) {
    std::fill(counts_.begin(), counts_.end(), 0);
    for (auto o : layout.zone_members(z)) {
      const auto row = states_.row(grid_row_[o]);
      for (std::size_t c = 0; c < cols; ++c) ++counts_[3 * c + row[c] - 1];
    }
    for (std::size_t c = 0; c < cols; ++c) {
      FeatureRow r;
      r.s1 = counts_[3 * c];
      r.s2 = counts_[3 * c + 1];
      r.s3 = counts_[3 * c + 2];
      r.hour = static_cast<std::uint8_t>(steps_[c].hour);
      r.day_of_week = static_cast<std::uint8_t>(steps_[c].day_of_week);
      r.is_weekend = steps_[c].weekend ? 1 : 0;
      r.zone = static_cast<std::uint16_t>(model_zone_[z]);
      const std::uint64_t key = std::uint64_t{r.s1} | std::uint64_t{r.s2} << 12 | std::uint64_t{r.s3} << 24 |
                                std::uint64_t{r.hour} << 36 | std::uint64_t{r.day_of_week} << 41 |
                                std::uint64_t{r.is_weekend} << 44 | std::uint64_t{r.zone} << 45;
      auto it = cache_.find(key);
      if (it == cache_.end()) it = cache_.emplace(key, std::max(0.0, model_.predict(r))).first;
      total += it->second;
    }
  }
  return total;
}

}  // namespace deskzone

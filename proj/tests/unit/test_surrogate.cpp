#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <sstream>

#include "deskzone/error.hpp"
#include "deskzone/rng.hpp"
#include "deskzone/surrogate.hpp"
#include "deskzone/synth.hpp"

using namespace deskzone;

namespace {

const Instant kMonday = parse_instant("2019-10-07T00:00:00Z");

std::shared_ptr<const LayoutFrame> frame_with_sizes(const std::vector<std::size_t>& sizes) {
  auto f = std::make_shared<LayoutFrame>();
  f->zone_offsets.push_back(0);
  std::size_t occ = 0;
  for (std::size_t z = 0; z < sizes.size(); ++z) {
    f->zone_ids.push_back("z" + std::to_string(z));
    for (std::size_t k = 0; k < sizes[z]; ++k, ++occ) {
      f->desk_ids.push_back("d" + std::to_string(occ));
      f->occupant_ids.push_back("o" + std::to_string(occ));
    }
    f->zone_offsets.push_back(occ);
  }
  return f;
}

StateGrid random_grid(const std::vector<std::string>& ids, std::size_t days, std::uint64_t seed) {
  StateGrid g(ids, DayAxis::contiguous(kMonday, days));
  Rng rng(seed);
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t c = 0; c < g.columns(); ++c) g.set(i, c, 1 + static_cast<int>(rng.below(3)));
  return g;
}

Dataset random_dataset(std::size_t days, std::uint64_t seed, double (*target)(const FeatureRow&)) {
  auto frame = frame_with_sizes({3, 3});
  const auto grid = random_grid(frame->occupant_ids, days, seed);
  Dataset d;
  d.rows = build_features(grid, Layout(frame));
  for (const auto& r : d.rows) d.targets.push_back(target(r));
  return d;
}

double linear_target(const FeatureRow& r) { return 1.0 + 4.0 * occupancy_transform(r.s3) - 2.0 * occupancy_transform(r.s2); }

}  // namespace

TEST(Features, CountsPerZoneAndCalendar) {
  auto frame = frame_with_sizes({3, 0, 2});
  StateGrid g(frame->occupant_ids, DayAxis::contiguous(parse_instant("2019-10-05T00:00:00Z"), 1));  // Saturday
  for (std::size_t o = 0; o < 3; ++o) g.set(o, 40, 3);
  g.set(3, 40, 2);
  const auto rows = build_features(g, Layout(frame));
  ASSERT_EQ(rows.size(), 96u * 3);
  const FeatureRow& z0 = rows[40 * 3 + 0];
  EXPECT_EQ(z0.s1, 0);
  EXPECT_EQ(z0.s2, 0);
  EXPECT_EQ(z0.s3, 3);
  EXPECT_EQ(z0.hour, 10);
  EXPECT_EQ(z0.day_of_week, 5);
  EXPECT_EQ(z0.is_weekend, 1);
  for (std::size_t c = 0; c < 96; ++c) {
    const FeatureRow& empty = rows[c * 3 + 1];
    EXPECT_EQ(empty.s1 + empty.s2 + empty.s3, 0);
    const FeatureRow& z2 = rows[c * 3 + 2];
    EXPECT_EQ(z2.s1 + z2.s2 + z2.s3, 2);
  }
  EXPECT_EQ(rows[40 * 3 + 2].s2, 1);
}

TEST(Features, MissingOccupantIsAnError) {
  auto frame = frame_with_sizes({2});
  StateGrid g({"o0"}, DayAxis::contiguous(kMonday, 1));
  EXPECT_THROW(build_features(g, Layout(frame)), InputError);
}

TEST(Encoding, TransformsAndWidth) {
  EXPECT_EQ(occupancy_transform(0.0), 0.0);
  EXPECT_NEAR(occupancy_transform(1.0), 0.4621, 1e-4);
  EXPECT_NEAR(occupancy_transform(1.0), std::tanh(0.5), 1e-15);
  auto [s0, c0] = hour_harmonics(0);
  EXPECT_NEAR(s0, 0.0, 1e-15);
  EXPECT_NEAR(c0, 1.0, 1e-15);
  auto [s6, c6] = hour_harmonics(6);
  EXPECT_NEAR(s6, 1.0, 1e-15);
  EXPECT_NEAR(c6, 0.0, 1e-15);
  EXPECT_EQ(encoded_width(10), 23u);

  FeatureRow r;
  r.s3 = 1;
  r.hour = 6;
  r.day_of_week = 6;
  r.is_weekend = 1;
  r.zone = 2;
  const auto v = encode(r, 4);
  ASSERT_EQ(v.size(), 17u);
  EXPECT_NEAR(v[2], 0.4621, 1e-4);
  EXPECT_NEAR(v[3], 1.0, 1e-15);
  EXPECT_NEAR(v[4], 0.5, 1e-15);
  EXPECT_EQ(v[11], 1.0);
  EXPECT_EQ(v[12], 1.0);
  EXPECT_EQ(v[15], 1.0);
  for (double x : v) {
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 1.0);
  }
}

TEST(Encoding, ScalerClampsAndHandlesConstantColumns) {
  Matrix x(2, 2);
  x(0, 0) = 1;
  x(1, 0) = 3;
  x(0, 1) = x(1, 1) = 7;
  const auto s = MinMaxScaler::fit(x);
  std::vector<double> row{2.0, 7.0};
  s.transform_in_place(row);
  EXPECT_DOUBLE_EQ(row[0], 0.5);
  EXPECT_DOUBLE_EQ(row[1], 0.0);
  std::vector<double> out{9.0, 1.0};
  s.transform_in_place(out);
  EXPECT_DOUBLE_EQ(out[0], 1.0);
}

TEST(Mlr, ExactLinearTargets) {
  Rng rng(1);
  Matrix x(50, 3);
  std::vector<double> y(50);
  for (std::size_t i = 0; i < 50; ++i) {
    for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.normal();
    y[i] = 2.0 + 1.5 * x(i, 0) - 3.0 * x(i, 1) + 0.25 * x(i, 2);
  }
  const auto m = fit_mlr(x, y);
  EXPECT_NEAR(m.intercept, 2.0, 1e-7);
  EXPECT_NEAR(m.coefficients[0], 1.5, 1e-7);
  EXPECT_NEAR(m.coefficients[1], -3.0, 1e-7);
  EXPECT_NEAR(m.coefficients[2], 0.25, 1e-7);
  std::vector<double> pred(50);
  for (std::size_t i = 0; i < 50; ++i) pred[i] = m.predict(x.row(i));
  EXPECT_NEAR(r_squared(y, pred), 1.0, 1e-12);
}

TEST(Mlr, ConstantTargets) {
  Rng rng(2);
  Matrix x(30, 4);
  for (auto& v : x.data()) v = rng.uniform();
  const std::vector<double> y(30, 4.25);
  const auto m = fit_mlr(x, y);
  for (double c : m.coefficients) EXPECT_NEAR(c, 0.0, 1e-12);
  EXPECT_NEAR(m.intercept, 4.25, 1e-12);
}

TEST(Mlr, MatchesIndependentNormalEquations) {
  Rng rng(3);
  const std::size_t n = 1000, p = 6;
  Matrix x(n, p);
  std::vector<double> y(n);
  Eigen::MatrixXd a(n, p + 1);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a(static_cast<Eigen::Index>(i), 0) = 1.0;
    for (std::size_t j = 0; j < p; ++j) {
      x(i, j) = rng.uniform();
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j + 1)) = x(i, j);
    }
    y[i] = b(static_cast<Eigen::Index>(i)) = rng.normal() + 3.0 * x(i, 0);
  }
  const Eigen::VectorXd beta = (a.transpose() * a).ldlt().solve(a.transpose() * b);
  const auto m = fit_mlr(x, y);
  EXPECT_FALSE(m.underdetermined);
  for (std::size_t i = 0; i < n; ++i)
    ASSERT_NEAR(m.predict(x.row(i)), (a.row(static_cast<Eigen::Index>(i)) * beta)(0), 1e-8);
  // Residuals are orthogonal to every design column.
  for (std::size_t j = 0; j <= p; ++j) {
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      dot += (y[i] - m.predict(x.row(i))) * (j == 0 ? 1.0 : x(i, j - 1));
    EXPECT_NEAR(dot, 0.0, 1e-6);
  }
}

TEST(Mlr, UnderdeterminedIsFlaggedAndStillSolved) {
  Matrix x(3, 5);
  Rng rng(4);
  for (auto& v : x.data()) v = rng.normal();
  const std::vector<double> y{1.0, 2.0, 3.0};
  const auto m = fit_mlr(x, y);
  EXPECT_TRUE(m.underdetermined);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(m.predict(x.row(i)), y[i], 1e-6);
  EXPECT_THROW(fit_mlr(Matrix(1, 2), std::vector<double>{1.0}), InputError);
}

TEST(Mlr, CollinearOneHotEncodingIsSafe) {
  const Dataset d = random_dataset(14, 5, linear_target);
  const auto m = fit_linear_energy_model(d, 2);
  for (double c : m.mlr.coefficients) EXPECT_TRUE(std::isfinite(c));
  for (std::size_t i = 0; i < d.size(); i += 37) EXPECT_NEAR(m.predict(d.rows[i]), d.targets[i], 1e-6);
}

TEST(Forest, SingleLeafPredictsGlobalMean) {
  Rng rng(6);
  Matrix x(20, 2);
  std::vector<double> y(20);
  for (std::size_t i = 0; i < 20; ++i) {
    x(i, 0) = rng.normal();
    x(i, 1) = rng.normal();
    y[i] = rng.normal();
  }
  RfConfig cfg;
  cfg.n_trees = 3;
  cfg.min_split = 50;
  cfg.bootstrap = false;
  const auto rf = fit_random_forest(x, y, cfg, 1);
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / 20.0;
  for (std::size_t i = 0; i < 20; ++i) EXPECT_NEAR(rf.predict(x.row(i)), mean, 1e-12);
  EXPECT_EQ(feature_importance(rf), (std::vector<double>{0.0, 0.0}));
}

TEST(Forest, StepFunctionIsRecoveredExactly) {
  Matrix x(200, 2);
  std::vector<double> y(200);
  Rng rng(7);
  for (std::size_t i = 0; i < 200; ++i) {
    x(i, 0) = static_cast<double>(i % 17);
    x(i, 1) = rng.normal();
    y[i] = x(i, 0) < 5 ? 1.0 : x(i, 0) < 11 ? 4.0 : -2.0;
  }
  RfConfig cfg;
  cfg.n_trees = 1;
  cfg.bootstrap = false;
  cfg.min_split = 2;
  cfg.min_leaf = 1;
  const auto rf = fit_random_forest(x, y, cfg, 0);
  for (std::size_t i = 0; i < 200; ++i) EXPECT_DOUBLE_EQ(rf.predict(x.row(i)), y[i]);
  const auto imp = feature_importance(rf);
  EXPECT_DOUBLE_EQ(imp[0], 1.0);
  EXPECT_DOUBLE_EQ(imp[1], 0.0);
}

TEST(Forest, DeterministicAndAveragesTrees) {
  const Dataset d = random_dataset(3, 8, [](const FeatureRow& r) { return 10.0 * r.s3 + r.hour; });
  RfConfig cfg;
  cfg.n_trees = 15;
  const auto a = fit_random_forest(d.rows, d.targets, cfg, 5);
  const auto b = fit_random_forest(d.rows, d.targets, cfg, 5);
  for (std::size_t i = 0; i < d.size(); i += 11) {
    EXPECT_EQ(a.predict(d.rows[i]), b.predict(d.rows[i]));
    const auto raw = d.rows[i].raw();
    double mean = 0.0;
    for (const auto& t : a.trees) mean += t.predict(raw);
    EXPECT_NEAR(a.predict(d.rows[i]), mean / 15.0, 1e-12);
  }
  const auto imp = feature_importance(a);
  EXPECT_NEAR(std::accumulate(imp.begin(), imp.end(), 0.0), 1.0, 1e-9);
  EXPECT_EQ(imp[5], 0.0);  // weekday-only data: weekend flag is constant
}

TEST(Forest, LeafSizeAndDepthLimitsHold) {
  const Dataset d = random_dataset(2, 9, [](const FeatureRow& r) { return r.s3 * 1.0 + 0.1 * r.hour; });
  RfConfig cfg;
  cfg.n_trees = 5;
  cfg.min_split = 10;
  cfg.min_leaf = 4;
  cfg.max_depth = 6;
  const auto rf = fit_random_forest(d.rows, d.targets, cfg, 3);
  for (const auto& t : rf.trees) {
    EXPECT_LE(t.depth(), 6u);
    for (const auto& n : t.nodes)
      if (n.feature < 0) {
        EXPECT_GE(n.samples, 4u);
      }
  }
}

TEST(Forest, InvariantToMonotoneRescaling) {
  Rng rng(10);
  Matrix x(300, 3), xt(300, 3);
  std::vector<double> y(300);
  for (std::size_t i = 0; i < 300; ++i) {
    for (std::size_t j = 0; j < 3; ++j) x(i, j) = xt(i, j) = rng.normal();
    xt(i, 1) = std::exp(3.0 * x(i, 1)) + 7.0;
    y[i] = x(i, 1) > 0.2 ? 5.0 + x(i, 0) : -x(i, 2);
  }
  RfConfig cfg;
  cfg.n_trees = 10;
  cfg.min_split = 5;
  cfg.bootstrap = false;  // out-of-bag points may fall either side of a midpoint
  const auto a = fit_random_forest(x, y, cfg, 2), b = fit_random_forest(xt, y, cfg, 2);
  for (std::size_t i = 0; i < 300; ++i) EXPECT_EQ(a.predict(x.row(i)), b.predict(xt.row(i)));
}

TEST(Forest, RejectsEmptyTrainingSet) {
  EXPECT_THROW(fit_random_forest(Matrix(0, 3), std::vector<double>{}, RfConfig{}, 0), InputError);
}

TEST(TimeSplit, WholeDays) {
  const Dataset d = random_dataset(10, 11, linear_target);
  const auto [train, test] = time_split(d, 0.8);
  EXPECT_EQ(train.size(), 8u * 96 * 2);
  EXPECT_EQ(test.size(), 2u * 96 * 2);
  EXPECT_THROW(time_split(d, 1.0), InputError);
  EXPECT_THROW(time_split(d, 0.0), InputError);
  const auto [tr, te] = time_split(d, 0.75);  // boundary mid-way through day 7
  EXPECT_EQ(tr.size(), 7u * 96 * 2);
  EXPECT_EQ(te.rows.front().column, 7u * 96);
}

TEST(CrossValidate, FoldsPartitionRows) {
  const auto b = fold_bounds(17, 5);
  ASSERT_EQ(b.size(), 5u);
  EXPECT_EQ(b.front().first, 0u);
  EXPECT_EQ(b.back().second, 17u);
  for (std::size_t k = 1; k < b.size(); ++k) EXPECT_EQ(b[k].first, b[k - 1].second);
  EXPECT_THROW(fold_bounds(3, 5), InputError);
  EXPECT_THROW(fold_bounds(10, 1), InputError);
}

TEST(CrossValidate, PerfectModelHasZeroError) {
  const Dataset d = random_dataset(5, 12, linear_target);
  ModelSpec spec;
  spec.kind = ModelKind::kMlr;
  const auto cv = cross_validate(d, 5, spec, {"z0", "z1"});
  ASSERT_EQ(cv.folds.size(), 5u);
  for (const auto& f : cv.folds) EXPECT_NEAR(f.mae, 0.0, 1e-6);
}

TEST(Evaluate, PerfectAndMeanPredictions) {
  const std::vector<double> y{1, 5, 2, 8, 3, 9, 4, 4};
  const std::vector<std::uint64_t> hours{0, 0, 1, 1, 2, 2, 3, 3}, days{0, 0, 0, 0, 1, 1, 1, 1};
  const auto perfect = evaluate(y, y, hours, days);
  EXPECT_EQ(perfect.mae, 0.0);
  EXPECT_EQ(perfect.r_squared, 1.0);
  EXPECT_EQ(perfect.r_squared_hourly, 1.0);
  EXPECT_EQ(perfect.r_squared_daily, 1.0);
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / 8.0;
  const auto flat = evaluate(y, std::vector<double>(8, mean), hours, days);
  EXPECT_NEAR(flat.r_squared, 0.0, 1e-12);
  EXPECT_THROW(evaluate(y, std::vector<double>(7, 0.0), hours, days), InputError);
}

TEST(Evaluate, CancellingErrorsFavourHourlyAggregation) {
  std::vector<double> y, yhat;
  std::vector<std::uint64_t> hours, days;
  Rng rng(13);
  for (std::uint64_t h = 0; h < 48; ++h) {
    const double level = 10.0 * rng.uniform();
    for (int k = 0; k < 4; ++k) {
      y.push_back(level);
      yhat.push_back(level + (k % 2 ? 3.0 : -3.0));
      hours.push_back(h);
      days.push_back(h / 24);
    }
  }
  const auto m = evaluate(y, yhat, hours, days);
  EXPECT_GT(m.r_squared_hourly, m.r_squared);
  EXPECT_NEAR(m.mae, 3.0, 1e-12);
}

TEST(PredictEnergy, ConstantPredictorTotals) {
  auto frame = frame_with_sizes({2, 2, 2});
  const auto grid = random_grid(frame->occupant_ids, 2, 14);
  Dataset d;
  d.rows = build_features(grid, Layout(frame));
  d.targets.assign(d.rows.size(), 2.5);
  ModelSpec spec;
  spec.kind = ModelKind::kMlr;
  const EnergyModel model = fit_model(spec, d, frame->zone_ids);
  const auto rep = predict_energy(model, Layout(frame), grid);
  EXPECT_NEAR(rep.total, 2.5 * 3 * grid.columns(), 1e-6);
  EXPECT_EQ(rep.day_totals.size(), 2u);
  EXPECT_NEAR(percent_change(rep, rep), 0.0, 0.0);
  const auto again = predict_energy(model, Layout(frame), grid);
  EXPECT_EQ(again.energy, rep.energy);
  EXPECT_EQ(again.total, rep.total);

  auto other = std::make_shared<LayoutFrame>(*frame);
  other->zone_ids[1] = "unknown";
  EXPECT_THROW(predict_energy(model, Layout(other), grid), InputError);
}

TEST(PredictEnergy, SimulatorMatchesReportAndClampsNegative) {
  auto frame = frame_with_sizes({3, 3});
  const auto grid = random_grid(frame->occupant_ids, 1, 15);
  Dataset d;
  d.rows = build_features(grid, Layout(frame));
  for (const auto& r : d.rows) d.targets.push_back(r.s3 * 10.0 - 12.0);
  ModelSpec spec;
  spec.forest.n_trees = 10;
  const EnergyModel model = fit_model(spec, d, frame->zone_ids);
  LayoutEnergySimulator sim(model, grid, *frame);
  Rng rng(2);
  for (int t = 0; t < 10; ++t) {
    const Layout l = random_layout(frame, rng);
    const auto rep = predict_energy(model, l, grid);
    for (double e : rep.energy.data()) EXPECT_GE(e, 0.0);
    EXPECT_NEAR(sim(l), rep.total, 1e-9 * std::max(1.0, rep.total));
  }
}

TEST(ModelJson, RoundTripPreservesPredictions) {
  const Dataset d = random_dataset(3, 16, [](const FeatureRow& r) { return 3.0 * r.s3 + r.s2 + 0.1 * r.hour; });
  for (ModelKind kind : {ModelKind::kMlr, ModelKind::kRandomForest}) {
    ModelSpec spec;
    spec.kind = kind;
    spec.forest.n_trees = 4;
    const EnergyModel m = fit_model(spec, d, {"z0", "z1"});
    const EnergyModel back = energy_model_from_json(to_json(m));
    EXPECT_EQ(back.kind(), kind);
    EXPECT_EQ(back.zone_ids(), m.zone_ids());
    for (std::size_t i = 0; i < d.size(); i += 7) EXPECT_EQ(back.predict(d.rows[i]), m.predict(d.rows[i]));
  }
  EXPECT_THROW(energy_model_from_json("{\"kind\": \"svr\"}"), InputError);
  EXPECT_THROW(energy_model_from_json("not json"), InputError);
}

TEST(TrainingSet, SpreadsHourlyEnergyAndDropsMissingHours) {
  auto frame = frame_with_sizes({1, 1});
  const auto grid = random_grid(frame->occupant_ids, 1, 17);
  std::vector<LightingRecord> rec;
  for (int h = 0; h < 23; ++h) rec.push_back({"z0", kMonday + std::chrono::hours(h), 40.0 + h});
  const auto ts = build_training_set(grid, Layout(frame), LightingData(rec));
  EXPECT_EQ(ts.data.size(), 23u * 4);
  EXPECT_EQ(ts.dropped_steps, 96u + 4u);
  EXPECT_DOUBLE_EQ(ts.data.targets[0], 10.0);
  EXPECT_DOUBLE_EQ(ts.data.targets[5], 41.0 / 4.0);
}

#include "commands.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <ostream>

#include "deskzone/count.hpp"
#include "deskzone/diversity.hpp"
#include "deskzone/error.hpp"
#include "deskzone/features.hpp"
#include "deskzone/forest.hpp"
#include "deskzone/ingest.hpp"
#include "deskzone/states.hpp"
#include "deskzone/surrogate.hpp"
#include "deskzone/synth.hpp"
#include "output.hpp"

namespace deskzone::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void report(const std::string& path) { std::cout << "wrote " << path << '\n'; }

void write_metrics_row(std::ostream& out, const std::string& split, const Metrics& m) {
  out << split << ',' << cell(m.mae) << ',' << cell(m.mse) << ',' << cell(m.r_squared) << ','
      << cell(m.r_squared_hourly) << ',' << cell(m.r_squared_daily) << ',' << m.n << '\n';
}

}  // namespace

void cmd_ingest(const RunConfig& config) {
  const TimeSeriesGrid grid = load_grid(config);
  const OutputDir out(config, "ingest");
  report(out.csv("grid.csv", [&](std::ostream& os) { write_grid(os, grid); }));
  std::cout << grid.occupants.size() << " occupants, " << grid.axis.days() << " days\n";
}

void cmd_infer_states(const RunConfig& config) {
  const TimeSeriesGrid grid = load_grid(config);
  const StateInferenceConfig sc = config.states();
  const StateInference inference = infer_states_detailed(grid, sc);
  const OutputDir out(config, "infer-states");
  report(out.csv("states.csv", [&](std::ostream& os) { write_states(os, inference.states); }));
  report(out.json("state_models.json", nlohmann::json::parse(fits_to_json(inference, sc))));
  report(out.csv("state_summary.csv", [&](std::ostream& os) {
    os << "occupant_id,path,mean_w_state1,mean_w_state2,mean_w_state3\n";
    for (std::size_t i = 0; i < inference.fits.size(); ++i) {
      const auto& means = inference.states.state_mean_power[i];
      os << inference.fits[i].occupant_id << ',' << to_string(inference.fits[i].path) << ',' << cell(means[0]) << ','
         << cell(means[1]) << ',' << cell(means[2]) << '\n';
    }
  }));
}

void cmd_diversity_report(const RunConfig& config) {
  const StateGrid states = load_states(config);
  const Layout layout = load_current_layout(config);
  const LightingData lighting = load_lighting(config.require_path("lighting"), config.calendar());
  const auto& frame = layout.frame();
  const auto& axis = states.axis();

  const Matrix diversity = daily_zone_diversity(states, layout);
  // Mean hourly zone energy of each day, over the hours that have a record.
  Matrix energy(frame.zones(), axis.days(), kNaN);
  for (std::size_t z = 0; z < frame.zones(); ++z)
    for (std::size_t d = 0; d < axis.days(); ++d) {
      double sum = 0.0;
      int hours = 0;
      for (int h = 0; h < 24; ++h)
        if (auto e = lighting.energy(frame.zone_ids[z], axis.day_starts[d] + std::chrono::hours(h))) {
          sum += *e;
          ++hours;
        }
      if (hours > 0) energy(z, d) = sum / hours;
    }

  struct ZoneFit {
    RegressionResult fit;
    std::string flag;
  };
  std::vector<ZoneFit> fits(frame.zones());
  csv::Provenance flags;
  for (std::size_t z = 0; z < frame.zones(); ++z) {
    std::vector<double> x, y;
    for (std::size_t d = 0; d < axis.days(); ++d)
      if (!std::isnan(energy(z, d))) {
        x.push_back(diversity(z, d));
        y.push_back(energy(z, d));
      }
    fits[z].fit.n = x.size();
    if (x.size() < 3) {
      fits[z].flag = "insufficient-days";
    } else {
      try {
        fits[z].fit = ols_regress(x, y);
        if (fits[z].fit.exact_fit) fits[z].flag = "exact-fit";
      } catch (const InputError&) {
        fits[z].flag = "degenerate-regressor";
      }
    }
    if (!fits[z].flag.empty()) {
      flags.emplace_back("flag." + frame.zone_ids[z], fits[z].flag);
      std::cerr << "warning: zone " << frame.zone_ids[z] << ": " << fits[z].flag << '\n';
    }
  }

  const OutputDir out(config, "diversity-report");
  report(out.csv("daily_diversity.csv", [&](std::ostream& os) {
    os << "zone_id,date,diversity,energy_wh\n";
    for (std::size_t z = 0; z < frame.zones(); ++z)
      for (std::size_t d = 0; d < axis.days(); ++d)
        os << frame.zone_ids[z] << ',' << axis.calendar.civil_date(axis.day_starts[d]) << ','
           << cell(diversity(z, d)) << ',' << cell(energy(z, d)) << '\n';
  }));
  report(out.csv(
      "diversity_regression.csv",
      [&](std::ostream& os) {
        os << "zone_id,slope,std_err,t,p,r2,n\n";
        for (std::size_t z = 0; z < frame.zones(); ++z) {
          const auto& f = fits[z];
          const bool usable = f.flag.empty() || f.flag == "exact-fit";
          os << frame.zone_ids[z] << ',';
          if (usable) {
            os << cell(f.fit.slope) << ',' << cell(f.fit.slope_std_err) << ',' << cell(f.fit.t_statistic) << ','
               << cell(f.fit.p_value) << ',' << cell(f.fit.r_squared);
          } else {
            os << ",,,,";
          }
          os << ',' << f.fit.n << '\n';
        }
      },
      flags));
  const auto vectors = align_to_frame(schedules_from_states(states), frame);
  report(out.csv("zone_diversity.csv",
                 [&](std::ostream& os) { write_diversity_report(os, layout_diversity(layout, vectors)); }));
}

void cmd_train_surrogate(const RunConfig& config) {
  const StateGrid states = load_states(config);
  const Layout layout = load_current_layout(config);
  const LightingData lighting = load_lighting(config.require_path("lighting"), config.calendar());
  const ModelSpec spec = config.surrogate();
  const auto fraction = config.get<double>("surrogate/train_fraction");
  const auto folds = config.get<std::size_t>("surrogate/cv_folds");

  const TrainingSet ts = build_training_set(states, layout, lighting);
  if (ts.dropped_steps > 0)
    std::cerr << "warning: " << ts.dropped_steps << " zone steps have no lighting record and were dropped\n";
  const auto [train, test] = time_split(ts.data, fraction);

  std::optional<CrossValidation> cv;
  if (folds >= 2) cv = cross_validate(train, folds, spec, ts.zone_ids);
  const EnergyModel model = fit_model(spec, train, ts.zone_ids);
  const Metrics held_out = evaluate(model, test);

  const OutputDir out(config, "train-surrogate");
  report(out.json("model.json", nlohmann::json::parse(to_json(model))));
  report(out.csv("metrics.csv", [&](std::ostream& os) {
    os << "split,mae,mse,r2,r2_hourly,r2_daily,n\n";
    if (cv) {
      for (std::size_t k = 0; k < cv->folds.size(); ++k) write_metrics_row(os, "cv_" + std::to_string(k + 1), cv->folds[k]);
      write_metrics_row(os, "cv_mean", cv->mean);
    }
    write_metrics_row(os, "test", held_out);
  }));
  if (const RfModel* rf = model.forest()) {
    report(out.csv("feature_importance.csv", [&](std::ostream& os) {
      os << "feature,importance\n";
      const auto imp = feature_importance(*rf);
      for (std::size_t f = 0; f < imp.size(); ++f) os << raw_feature_names()[f] << ',' << cell(imp[f]) << '\n';
    }));
  }
  std::cout << to_string(spec.kind) << " test: mae " << held_out.mae << ", r2 " << held_out.r_squared
            << ", hourly r2 " << held_out.r_squared_hourly << ", daily r2 " << held_out.r_squared_daily << '\n';
}

void cmd_simulate(const RunConfig& config, bool oracle) {
  const StateGrid states = load_states(config);
  const Layout layout = load_current_layout(config);
  const auto& frame = layout.frame();
  const OutputDir out(config, oracle ? "simulate-oracle" : "simulate");

  std::vector<double> zone_totals(frame.zones(), 0.0);
  double total = 0.0;
  if (oracle) {
    const Matrix e = oracle_lighting(layout, states, config.oracle());
    for (std::size_t z = 0; z < e.rows(); ++z)
      for (std::size_t c = 0; c < e.cols(); ++c) zone_totals[z] += e(z, c);
    total = total_energy(e);
    report(out.csv("lighting.csv",
                   [&](std::ostream& os) { write_lighting(os, to_lighting_data(e, frame, states.axis())); }));
  } else {
    const EnergyModel model = load_model(config);
    const EnergyReport r = predict_energy(model, layout, states);
    zone_totals = r.zone_totals;
    total = r.total;
    report(out.csv("energy_report.csv", [&](std::ostream& os) { write_energy_report(os, r); }));
  }
  report(out.csv(
      "energy_summary.csv",
      [&](std::ostream& os) {
        os << "zone_id,energy_wh\n";
        for (std::size_t z = 0; z < frame.zones(); ++z) os << frame.zone_ids[z] << ',' << cell(zone_totals[z]) << '\n';
      },
      {{"total_wh", cell(total)}}));
  std::cout << "total energy " << total << " Wh\n";
}

void cmd_count_layouts(std::size_t occupants, std::size_t zones, bool distinct_zones) {
  if (zones == 0 || occupants % zones != 0)
    throw InputError("zone count must divide the occupant count (" + std::to_string(occupants) + " / " +
                     std::to_string(zones) + ")");
  if (distinct_zones) {
    const std::vector<std::size_t> sizes(zones, occupants / zones);
    std::cout << count_layouts_distinct(sizes) << '\n';
  } else {
    std::cout << count_layouts(occupants, zones) << '\n';
  }
}

}  // namespace deskzone::cli

#include "config.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "deskzone/error.hpp"

namespace deskzone::cli {

namespace {

using nlohmann::json;

json defaults() {
  json d = json::parse(R"({
    "seed": 0,
    "utc_offset_minutes": 0,
    "paths": {
      "plug_load": "", "grid": "", "zone_map": "", "layout": "", "lighting": "",
      "states": "", "model": "", "output_dir": "out"
    },
    "ingest": { "start": "", "end": "", "exclude_days": [] },
    "states": {
      "max_components": 10, "dirichlet_concentration": 0.001, "mean_precision": 1.0,
      "degrees_of_freedom": 1.0, "tol": 1e-6, "max_iter": 500,
      "weight_floor": 0.01, "idle_threshold_w": 5.0
    },
    "surrogate": {
      "model": "rf", "n_trees": 200, "min_split": 50, "min_leaf": 2, "max_depth": 300,
      "bootstrap": true, "ridge": 1e-8, "train_fraction": 0.8, "cv_folds": 5
    },
    "optimize": {
      "method": "cluster", "dims": 0, "iter_limit": 0, "batch": 1, "first_run": 0,
      "random_baselines": 100, "seed_layouts": [],
      "population": 600, "elites": 60, "random_survivors": 15, "children_per_pair": 0,
      "mutation_prob": 0.5, "generations": 200
    },
    "oracle": {
      "lit_power_w": 500.0, "standby_power_w": 20.0, "hold_weekday_min": 20,
      "hold_weekend_min": 10, "motion_state": 3, "daylight_depth": 0.0
    },
    "synth": {
      "counts": [9, 9, 9, 9], "zones": 4, "days": 1, "start": "2019-10-07", "p_high": 0.8,
      "corpus_perturbed": 40, "corpus_random": 20,
      "variation": {
        "arrival_jitter_steps": 0, "departure_jitter_steps": 0, "block_jitter_steps": 0,
        "skip_lunch_prob": 0.0, "skip_meeting_prob": 0.0, "absent_day_prob": 0.0,
        "weekends_off": false, "weekend_visit_prob": 0.0
      }
    }
  })");
  d["utc_offset_minutes"] = 0;  // signed: offsets west of UTC are negative
  return d;
}

// Recursively overlays `patch`, insisting that every key already exists with a
// compatible type.
void overlay(json& base, const json& patch, const std::string& where, const std::string& source) {
  for (const auto& [key, value] : patch.items()) {
    const std::string here = where + "/" + key;
    if (!base.contains(key)) throw FileError(source, "unknown config key '" + here + "'");
    json& slot = base[key];
    if (slot.is_object()) {
      if (!value.is_object()) throw FileError(source, "config key '" + here + "' must be an object");
      overlay(slot, value, here, source);
      continue;
    }
    const bool ok = (slot.is_number() && value.is_number()) || (slot.is_string() && value.is_string()) ||
                    (slot.is_boolean() && value.is_boolean()) || (slot.is_array() && value.is_array());
    if (!ok) throw FileError(source, "config key '" + here + "' has the wrong type");
    if (slot.is_number_unsigned() || slot.is_number_integer()) {
      if (!value.is_number_integer()) throw FileError(source, "config key '" + here + "' must be an integer");
      if (slot.is_number_unsigned() && value.get<long long>() < 0)
        throw FileError(source, "config key '" + here + "' must be non-negative");
    }
    slot = slot.is_number_float() ? json(value.get<double>()) : value;
  }
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

RunConfig::RunConfig() : doc_(defaults()) {}

void RunConfig::merge_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError(path, "cannot open config file");
  json patch;
  try {
    patch = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FileError(path, std::string("invalid JSON: ") + e.what());
  }
  if (!patch.is_object()) throw FileError(path, "config must be a JSON object");
  merge(patch, path);
}

void RunConfig::merge(const json& patch, const std::string& source) { overlay(doc_, patch, "", source); }

const json& RunConfig::at(const std::string& pointer) const {
  return doc_.at(json::json_pointer("/" + pointer));
}

std::uint64_t RunConfig::seed() const { return get<std::uint64_t>("seed"); }

Calendar RunConfig::calendar() const { return Calendar(get<int>("utc_offset_minutes")); }

std::string RunConfig::path(const std::string& key) const { return get<std::string>("paths/" + key); }

std::string RunConfig::require_path(const std::string& key) const {
  const std::string p = path(key);
  if (p.empty()) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    throw InputError("missing required path: set paths." + key + " in the config or pass --" + flag);
  }
  if (!std::filesystem::exists(p)) throw FileError(p, "no such file or directory");
  return p;
}

std::string RunConfig::output_dir() const {
  const std::string p = path("output_dir");
  return p.empty() ? std::string(".") : p;
}

std::vector<DayRange> RunConfig::excluded_days() const {
  std::vector<DayRange> out;
  for (const auto& r : at("ingest/exclude_days")) {
    if (!r.is_array() || r.size() != 2 || !r[0].is_string() || !r[1].is_string())
      throw InputError("ingest.exclude_days entries must be [\"YYYY-MM-DD\", \"YYYY-MM-DD\"] pairs");
    out.push_back({r[0].get<std::string>(), r[1].get<std::string>()});
  }
  return out;
}

StateInferenceConfig RunConfig::states() const {
  StateInferenceConfig c;
  c.gmm.max_components = get<int>("states/max_components");
  c.gmm.priors.dirichlet_concentration = get<double>("states/dirichlet_concentration");
  c.gmm.priors.mean_precision = get<double>("states/mean_precision");
  c.gmm.priors.degrees_of_freedom = get<double>("states/degrees_of_freedom");
  c.gmm.tol = get<double>("states/tol");
  c.gmm.max_iter = get<int>("states/max_iter");
  c.weight_floor = get<double>("states/weight_floor");
  c.idle_threshold_w = get<double>("states/idle_threshold_w");
  c.seed = seed();
  return c;
}

ModelSpec RunConfig::surrogate() const {
  ModelSpec s;
  s.kind = parse_model_kind(get<std::string>("surrogate/model"));
  s.forest.n_trees = get<std::size_t>("surrogate/n_trees");
  s.forest.min_split = get<std::size_t>("surrogate/min_split");
  s.forest.min_leaf = get<std::size_t>("surrogate/min_leaf");
  s.forest.max_depth = get<std::size_t>("surrogate/max_depth");
  s.forest.bootstrap = get<bool>("surrogate/bootstrap");
  s.ridge = get<double>("surrogate/ridge");
  s.seed = seed();
  return s;
}

GaConfig RunConfig::ga() const {
  GaConfig g;
  g.population = get<std::size_t>("optimize/population");
  g.elites = get<std::size_t>("optimize/elites");
  g.random_survivors = get<std::size_t>("optimize/random_survivors");
  g.children_per_pair = get<std::size_t>("optimize/children_per_pair");
  g.mutation_prob = get<double>("optimize/mutation_prob");
  g.generations = get<std::size_t>("optimize/generations");
  validate(g);
  return g;
}

LightingOracleConfig RunConfig::oracle() const {
  LightingOracleConfig o;
  o.lit_power_w = get<double>("oracle/lit_power_w");
  o.standby_power_w = get<double>("oracle/standby_power_w");
  o.hold_weekday_min = get<int>("oracle/hold_weekday_min");
  o.hold_weekend_min = get<int>("oracle/hold_weekend_min");
  o.motion_state = get<int>("oracle/motion_state");
  o.daylight_depth = get<double>("oracle/daylight_depth");
  validate(o);
  return o;
}

PopulationSpec RunConfig::population() const {
  PopulationSpec p;
  p.counts = get<std::vector<std::size_t>>("synth/counts");
  if (p.counts.size() != p.archetypes.size())
    throw InputError("synth.counts needs one entry per archetype (" + std::to_string(p.archetypes.size()) + ")");
  const auto days = get<std::size_t>("synth/days");
  if (days == 0) throw InputError("synth.days must be at least 1");
  const Calendar cal = calendar();
  const Instant first =
      parse_instant(get<std::string>("synth/start") + "T00:00:00Z") - std::chrono::minutes(cal.utc_offset_minutes());
  p.axis = DayAxis::contiguous(first, days, cal);
  p.p_high = get<double>("synth/p_high");
  auto& v = p.variation;
  v.arrival_jitter_steps = get<int>("synth/variation/arrival_jitter_steps");
  v.departure_jitter_steps = get<int>("synth/variation/departure_jitter_steps");
  v.block_jitter_steps = get<int>("synth/variation/block_jitter_steps");
  v.skip_lunch_prob = get<double>("synth/variation/skip_lunch_prob");
  v.skip_meeting_prob = get<double>("synth/variation/skip_meeting_prob");
  v.absent_day_prob = get<double>("synth/variation/absent_day_prob");
  v.weekends_off = get<bool>("synth/variation/weekends_off");
  v.weekend_visit_prob = get<double>("synth/variation/weekend_visit_prob");
  return p;
}

CorpusSpec RunConfig::corpus() const {
  return {get<std::size_t>("synth/corpus_perturbed"), get<std::size_t>("synth/corpus_random")};
}

std::string RunConfig::hash() const {
  // Where outputs land does not change what they contain.
  json h = doc_;
  h["paths"].erase("output_dir");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(h.dump())));
  return buf;
}

csv::Provenance RunConfig::provenance(const std::string& command) const {
  return {{"generator", std::string("deskzone ") + DESKZONE_VERSION},
          {"command", command},
          {"config_hash", hash()},
          {"seed", std::to_string(seed())}};
}

}  // namespace deskzone::cli

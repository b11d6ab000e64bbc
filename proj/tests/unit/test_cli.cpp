#ifdef DESKZONE_CLI_PATH

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

#include "deskzone/csv.hpp"
#include "deskzone/ingest.hpp"
#include "deskzone/layout.hpp"
#include "deskzone/states.hpp"
#include "deskzone/synth.hpp"
#include "test_support.hpp"

using namespace deskzone;
using deskzone::testing::run_cli;
using deskzone::testing::slurp;
using deskzone::testing::TempDir;

namespace {

// Three occupants over two days whose power sits on three well separated
// levels, with a small deterministic wobble. One report per step.
struct ThreeLevelFixture {
  PlugLoadEvents events;
  std::vector<std::vector<int>> truth;  // per occupant, per step

  ThreeLevelFixture() {
    const double level[] = {0.0, 1.5, 28.0, 115.0};
    const auto archetypes = reference_archetypes();
    const Instant start = default_synthetic_start();
    for (int o = 0; o < 3; ++o) {
      const auto states = generate_schedule(archetypes[o], 2, 0.7, 40 + o);
      OccupantEvents occ{"occ" + std::to_string(o), {}};
      std::vector<int> t;
      for (std::size_t c = 0; c < states.size(); ++c) {
        const double wobble = 0.3 * static_cast<double>((c * 7 + o) % 5) - 0.6;
        occ.events.push_back({start + kStepMs * static_cast<long long>(c), level[states[c]] + wobble});
        t.push_back(states[c]);
      }
      events.push_back(std::move(occ));
      truth.push_back(std::move(t));
    }
  }
};

std::string header_value(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("# " + key + "=", 0) == 0) return line.substr(key.size() + 3);
  return {};
}

std::string first_data_line(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') return line;
  return {};
}

}  // namespace

TEST(Cli, CountLayouts) {
  TempDir dir("cli_count");
  auto r = run_cli({"count-layouts", "4", "2"}, dir);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out, "3\n");
  r = run_cli({"count-layouts", "50", "5"}, dir);
  EXPECT_EQ(r.out, "402789797982510165934296910320\n");
  r = run_cli({"count-layouts", "4", "2", "--distinct-zones"}, dir);
  EXPECT_EQ(r.out, "6\n");
  r = run_cli({"count-layouts", "10", "3"}, dir);
  EXPECT_EQ(r.exit_code, 1);
}

TEST(Cli, InferStatesRecoversLevelsAndIsDeterministic) {
  TempDir dir("cli_states");
  const ThreeLevelFixture fx;
  std::ostringstream pl;
  write_plug_load(pl, fx.events);
  const auto plug = dir.write("plug.csv", pl.str());

  const auto a = run_cli({"infer-states", "--plug-load", plug, "--seed", "5", "-o", dir.file("a")}, dir);
  ASSERT_EQ(a.exit_code, 0) << a.err;
  const auto b = run_cli({"infer-states", "--plug-load", plug, "--seed", "5", "-o", dir.file("b")}, dir);
  ASSERT_EQ(b.exit_code, 0) << b.err;
  for (const char* f : {"states.csv", "state_models.json", "state_summary.csv"})
    EXPECT_EQ(slurp(dir.file(std::string("a/") + f)), slurp(dir.file(std::string("b/") + f))) << f;

  const StateGrid states = read_states(dir.file("a/states.csv"));
  ASSERT_EQ(states.occupants(), 3u);
  ASSERT_EQ(states.columns(), 2u * kStepsPerDay);
  for (std::size_t o = 0; o < 3; ++o)
    for (std::size_t c = 0; c < states.columns(); ++c) ASSERT_EQ(states.at(o, c), fx.truth[o][c]) << o << ' ' << c;

  const std::string text = slurp(dir.file("a/states.csv"));
  EXPECT_EQ(header_value(text, "seed"), "5");
  EXPECT_EQ(header_value(text, "config_hash").size(), 16u);
}

TEST(Cli, MissingInputNamesThePath) {
  TempDir dir("cli_missing");
  const std::string missing = dir.file("nope/plug.csv");
  const auto r = run_cli({"infer-states", "--plug-load", missing, "-o", dir.file("out")}, dir);
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find(missing), std::string::npos) << r.err;
  EXPECT_FALSE(std::filesystem::exists(dir.file("out")));
}

TEST(Cli, UnknownConfigKeyIsAnInputError) {
  TempDir dir("cli_config");
  const auto cfg = dir.write("cfg.json", R"({"optimize": {"dimz": 3}})");
  const auto r = run_cli({"synth-demo", "-c", cfg}, dir);
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find("/optimize/dimz"), std::string::npos) << r.err;
}

TEST(Cli, GaWithoutSurrogateIsAnError) {
  TempDir dir("cli_ga");
  const auto r = run_cli({"optimize", "--method", "ga", "--states", "s.csv", "--layout", "l.csv"}, dir);
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find("surrogate"), std::string::npos) << r.err;
}

class CliPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir("cli_pipeline");
    const auto cfg = dir_->write("cfg.json", R"({
      "seed": 4,
      "synth": {"days": 7, "variation": {"arrival_jitter_steps": 2, "absent_day_prob": 0.1}},
      "surrogate": {"n_trees": 20, "cv_folds": 0},
      "optimize": {"population": 60, "elites": 10, "random_survivors": 4, "generations": 10, "random_baselines": 10}
    })");
    const auto r = run_cli({"synth-demo", "-c", cfg, "-o", dir_->file("demo")}, *dir_);
    ASSERT_EQ(r.exit_code, 0) << r.err;
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static std::string file(const std::string& name) { return dir_->file(name); }
  static inline TempDir* dir_ = nullptr;
};

TEST_F(CliPipeline, SynthDemoTracesAreMonotone) {
  for (const char* name : {"demo/trace_cluster.csv", "demo/trace_ga.csv"}) {
    const auto table = csv::read_file(file(name));
    ASSERT_FALSE(table.rows.empty()) << name;
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& row : table.rows) {
      const double best = std::stod(row.fields[2]);
      EXPECT_LE(best, prev) << name;
      prev = best;
    }
  }
  const auto savings = csv::read_file(file("demo/savings.csv"));
  ASSERT_EQ(savings.rows.size(), 4u);
  EXPECT_EQ(savings.rows[0].fields[0], "pure");
  EXPECT_LT(std::stod(savings.rows[0].fields[4]), 0.0);  // pure beats the random mean
}

TEST_F(CliPipeline, OracleTrainDiversityOptimizeChain) {
  const std::string cfg = file("cfg.json"), states = file("demo/states.csv"), layout = file("demo/layout_ga.csv");
  auto r = run_cli({"simulate", "--oracle", "-c", cfg, "--states", states, "--layout", layout, "-o", file("sim")}, *dir_);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const std::string lighting = file("sim/lighting.csv");

  r = run_cli({"train-surrogate", "-c", cfg, "--states", states, "--layout", layout, "--lighting", lighting, "-o",
               file("train")},
              *dir_);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(file("train/model.json")));

  r = run_cli({"diversity-report", "-c", cfg, "--states", states, "--layout", layout, "--lighting", lighting, "-o",
               file("div")},
              *dir_);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(first_data_line(slurp(file("div/diversity_regression.csv"))), "zone_id,slope,std_err,t,p,r2,n");

  r = run_cli({"optimize", "-c", cfg, "--method", "cluster", "--batch", "3", "--states", states, "--layout", layout,
               "--model", file("train/model.json"), "-o", file("opt")},
              *dir_);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  std::set<std::string> layouts;
  for (int k = 0; k < 3; ++k) {
    const auto l = read_layout(file("opt/layout_cluster_00" + std::to_string(k) + ".csv"));
    std::ostringstream s;
    write_layout(s, l);
    layouts.insert(s.str());
  }
  EXPECT_EQ(layouts.size(), 3u);
  const auto summary = csv::read_file(file("opt/summary_cluster_000-002.csv"));
  ASSERT_EQ(summary.rows.size(), 5u);
  EXPECT_EQ(summary.rows[0].fields[0], "existing");
  EXPECT_EQ(summary.rows[0].fields[4], "0");

  r = run_cli({"optimize", "-c", cfg, "--method", "ga", "--seed-layouts", file("opt"), "--states", states, "--layout",
               layout, "--model", file("train/model.json"), "-o", file("opt")},
              *dir_);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(header_value(slurp(file("opt/layout_ga_000.csv")), "seed_layouts"), "3");
}

TEST_F(CliPipeline, FlaggedZoneIsNotFatal) {
  // One day of lighting cannot support a regression.
  const std::string cfg = file("cfg.json");
  auto r = run_cli({"synth-demo", "-c", cfg, "--days", "1", "-o", file("one")}, *dir_);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  r = run_cli({"diversity-report", "-c", cfg, "--states", file("one/states.csv"), "--layout",
               file("one/layout_pure.csv"), "--lighting", file("one/lighting_pure.csv"), "-o", file("one_div")},
              *dir_);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const std::string text = slurp(file("one_div/diversity_regression.csv"));
  EXPECT_EQ(header_value(text, "flag.z0"), "insufficient-days");
}

#endif  // DESKZONE_CLI_PATH

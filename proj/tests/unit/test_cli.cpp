#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "spt/experiments.hpp"
#include "spt/types.hpp"

namespace spt::cli {
namespace {

TEST(Grid, LinearAndLogForms) {
  const auto lin = parse_grid("0:1:5").values();
  EXPECT_EQ(lin, (std::vector<double>{0, 0.25, 0.5, 0.75, 1}));
  for (const char* text : {"1:100:3:log", "log:1:100:3"}) {
    const auto v = parse_grid(text).values();
    ASSERT_EQ(v.size(), 3u);
    EXPECT_DOUBLE_EQ(v[0], 1.0);
    EXPECT_NEAR(v[1], 10.0, 1e-12);
    EXPECT_DOUBLE_EQ(v[2], 100.0);
  }
  EXPECT_EQ(parse_grid("2:3:1").values(), std::vector<double>{2});
  const GridSpec bare = parse_grid("log");
  EXPECT_TRUE(bare.default_range);
  EXPECT_THROW(bare.values(), std::logic_error);
  EXPECT_EQ(bare.with_range(1, 4, 2).values(), (std::vector<double>{1, 4}));
}

TEST(Grid, Diagnostics) {
  for (const char* bad : {"", "1:2", "1:2:0", "1:2:x", "a:2:3", "0:1:3:log", "1:2:3:4", "1:nan:2", "1:2:2.5"}) {
    EXPECT_THROW(parse_grid(bad), std::invalid_argument) << bad;
  }
}

TEST(Table, NumberFormatting) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.3333333333");
  EXPECT_EQ(format_number(1e-12), "1e-12");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(format_number(-INFINITY), "-inf");
}

TEST(Table, CsvAndJson) {
  Table t;
  t.meta("experiment", std::string("demo"));
  t.meta("n", 3LL);
  t.set_columns({{"name", false}, {"rate", true}});
  t.add_row({std::string("a,b"), 0.5});
  t.summary("total", 2.0, true);
  t.set_rate_units(10.0, "_mhz");
  EXPECT_EQ(t.csv(), "# experiment: demo\n# n: 3\n# total_mhz: 20\nname,rate_mhz\n\"a,b\",5\n");
  EXPECT_NE(t.csv("2026-01-01").find("# generated: 2026-01-01\n"), std::string::npos);
  const auto j = nlohmann::json::parse(t.json());
  EXPECT_EQ(j["metadata"]["experiment"], "demo");
  EXPECT_EQ(j["summary"]["total_mhz"], 20.0);
  EXPECT_EQ(j["rows"][0]["rate_mhz"], 5.0);
  EXPECT_THROW(t.add_row({1.0}), std::logic_error);
}

ExperimentConfig base(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  c.params.g1 = 0.05;
  c.params.g2 = 1.0;
  c.params.omega = 2.0;
  c.params.kappa1 = -1.0;
  c.params.kappa2 = 1.0;
  c.n2 = 3;
  return c;
}

TEST(RunExperiment, SweepProducesOneRowPerPoint) {
  ExperimentConfig c = base("setting-rate");
  c.sweep = std::make_pair(std::string("g1"), parse_grid("0.05:0.1:3"));
  const Table t = run_experiment(c);
  ASSERT_EQ(t.rows().size(), 3u);
  EXPECT_EQ(t.columns().front().name, "g1");
}

TEST(RunExperiment, TrajectoriesAreDeterministic) {
  ExperimentConfig c = base("trajectories");
  c.n_traj = 20;
  c.seed = 4;
  c.threads = 1;
  c.jump_log = false;
  const std::string a = run_experiment(c).json();
  c.threads = 2;
  EXPECT_EQ(a, run_experiment(c).json());
  c.seed = 5;
  EXPECT_NE(a, run_experiment(c).json());
}

TEST(RunExperiment, ConfigurationErrors) {
  EXPECT_THROW(run_experiment(base("nope")), DomainError);
  ExperimentConfig c = base("gain");
  c.sweep = std::make_pair(std::string("nope"), parse_grid("1:2:2"));
  EXPECT_THROW(run_experiment(c), DomainError);
  c = base("gain");
  c.n1 = 0;
  EXPECT_THROW(run_experiment(c), DomainError);
  c = base("trajectories");
  c.input = "x";
  EXPECT_THROW(run_experiment(c), DomainError);
  c = base("detection");
  c.gain = 10;
  c.modes = 4;
  c.sweep = std::make_pair(std::string("g1"), parse_grid("0.1:0.2:2"));
  EXPECT_THROW(run_experiment(c), DomainError);
}

TEST(RunExperiment, PhysicalUnitsRescaleRates) {
  ExperimentConfig g2 = base("setting-rate");
  ExperimentConfig mhz = g2;
  mhz.units = "mhz";
  mhz.params.g2 = 120.0;
  mhz.params.g1 = 6.0;
  mhz.params.omega = 240.0;
  mhz.params.kappa2 = 120.0;
  // Tables hold g2 units internally and rescale rate columns on output.
  const Table a = run_experiment(g2), b = run_experiment(mhz);
  const double rate = std::get<double>(a.rows()[0][0]);
  EXPECT_NEAR(std::get<double>(b.rows()[0][0]), rate, 1e-12);
  const auto j = nlohmann::json::parse(b.json());
  EXPECT_NEAR(j["rows"][0]["gamma_set_mhz"].get<double>(), 120.0 * rate, 1e-9);
}

TEST(Main, ExitCodes) {
  const auto run = [](std::vector<std::string> args) {
    args.insert(args.begin(), "spt");
    std::vector<char*> argv;
    for (auto& s : args) argv.push_back(s.data());
    testing::internal::CaptureStdout();
    testing::internal::CaptureStderr();
    const int rc = main(static_cast<int>(argv.size()), argv.data());
    testing::internal::GetCapturedStdout();
    testing::internal::GetCapturedStderr();
    return rc;
  };
  EXPECT_EQ(run({"detection", "--gain", "10", "--modes", "4", "--no-timestamp"}), 0);
  EXPECT_EQ(run({"gain", "--n2", "0"}), 2);
  EXPECT_EQ(run({"gain", "--sweep", "g1"}), 2);
  EXPECT_EQ(run({"gain", "--A", "abc"}), 2);
  EXPECT_EQ(run({"gain", "--kappa2", "0", "--n2", "2"}), 3);
}

}  // namespace
}  // namespace spt::cli

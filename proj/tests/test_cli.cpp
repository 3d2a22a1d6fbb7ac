#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "leangreen/cli.hpp"
#include "test_support.hpp"

using namespace leangreen;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("leangreen_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name), std::ios::binary) << text;
    return path(name);
  }

  static std::string read(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  // Runs a command with captured streams.
  template <class F>
  int run(F&& f) {
    out_.str("");
    err_.str("");
    return f(cli::Streams{out_, err_});
  }

  cli::SimulateOptions sim(const std::string& config, std::size_t reps = 5) const {
    cli::SimulateOptions o;
    o.config_path = config;
    o.reps = reps;
    o.timestamp = "2026-01-01T00:00:00Z";
    return o;
  }

  const std::string shipped = lgtest::source_path("configs/solar_line.json");
  fs::path dir_;
  std::ostringstream out_, err_;
};

// Strips the timestamp line so two reports can be compared byte for byte.
std::string without_timestamp(const std::string& json) {
  std::string out;
  std::istringstream in(json);
  for (std::string line; std::getline(in, line);)
    if (line.find("\"timestamp\"") == std::string::npos) out += line + "\n";
  return out;
}

}  // namespace

TEST_F(CliTest, ValidateShippedConfig) {
  EXPECT_EQ(run([&](auto io) { return cli::cmd_validate(shipped, io); }), cli::kOk);
  EXPECT_NE(out_.str().find("takt 168.0"), std::string::npos);
}

TEST_F(CliTest, ValidateBrokenRoutingListsViolations) {
  Json j = Json::parse(read(shipped));
  j["transfers"][3]["to"] = "packaging";
  j["routing"] = "parallel";
  const std::string p = write("broken.json", j.dump());
  EXPECT_EQ(run([&](auto io) { return cli::cmd_validate(p, io); }), cli::kViolations);
  EXPECT_NE(out_.str().find("routing"), std::string::npos);
  EXPECT_NE(out_.str().find("transfers"), std::string::npos);
}

TEST_F(CliTest, ValidateMissingOrMalformedFile) {
  EXPECT_EQ(run([&](auto io) { return cli::cmd_validate(path("nope.json"), io); }), cli::kInputError);
  const std::string bad = write("bad.json", "{\"stations\": [");
  EXPECT_EQ(run([&](auto io) { return cli::cmd_validate(bad, io); }), cli::kInputError);
  EXPECT_NE(err_.str().find("input error"), std::string::npos);
}

TEST_F(CliTest, SimulateCurrentState) {
  auto o = sim(shipped, 30);
  o.out_path = path("report.json");
  EXPECT_EQ(run([&](auto io) { return cli::cmd_simulate(o, io); }), cli::kOk);
  const RunReport r = load_report(read(o.out_path));
  EXPECT_NEAR(r.time_min.lead.mean, 329.1, 0.05 * 329.1);
  EXPECT_EQ(percent_1dp(r.metrics.oeee), 13.0);
  EXPECT_EQ(r.replications, 30u);
  EXPECT_NE(out_.str().find("OEEE 13.0%"), std::string::npos);
}

TEST_F(CliTest, SimulateWritesJsonToStdoutWithoutOut) {
  EXPECT_EQ(run([&](auto io) { return cli::cmd_simulate(sim(shipped), io); }), cli::kOk);
  EXPECT_NO_THROW(load_report(out_.str()));
  EXPECT_NE(err_.str().find("bottlenecks:"), std::string::npos);
}

TEST_F(CliTest, SingleReplicationHasNullHalfWidthsAndWarns) {
  EXPECT_EQ(run([&](auto io) { return cli::cmd_simulate(sim(shipped, 1), io); }), cli::kOk);
  const Json j = Json::parse(out_.str());
  EXPECT_TRUE(j["time_min"]["lead"]["half_width"].is_null());
  EXPECT_TRUE(j["time_min"]["va"]["half_width"].is_null());
  EXPECT_NE(err_.str().find("warning"), std::string::npos);
  EXPECT_FALSE(load_report(out_.str()).time_min.lead.half_width.has_value());
}

TEST_F(CliTest, RepeatedRunsAreByteIdenticalApartFromTimestamp) {
  auto a = sim(shipped, 8);
  auto b = sim(shipped, 8);
  a.timestamp = "2026-01-01T00:00:00Z";
  b.timestamp = "2026-06-30T12:34:56Z";
  b.workers = 3;
  a.out_path = path("a.json");
  b.out_path = path("b.json");
  ASSERT_EQ(run([&](auto io) { return cli::cmd_simulate(a, io); }), cli::kOk);
  ASSERT_EQ(run([&](auto io) { return cli::cmd_simulate(b, io); }), cli::kOk);
  const std::string ta = read(a.out_path), tb = read(b.out_path);
  EXPECT_NE(ta, tb);
  EXPECT_EQ(without_timestamp(ta), without_timestamp(tb));
}

TEST_F(CliTest, ReportRoundTripsAndReverifies) {
  auto o = sim(shipped, 4);
  o.out_path = path("r.json");
  ASSERT_EQ(run([&](auto io) { return cli::cmd_simulate(o, io); }), cli::kOk);
  const std::string text = read(o.out_path);
  const RunReport r = load_report(text);
  EXPECT_EQ(serialize_report(r), text);
  EXPECT_NO_THROW(verify_report(r));
}

TEST_F(CliTest, TamperedReportIsAConsistencyError) {
  auto o = sim(shipped, 4);
  o.out_path = path("r.json");
  ASSERT_EQ(run([&](auto io) { return cli::cmd_simulate(o, io); }), cli::kOk);
  Json j = Json::parse(read(o.out_path));
  j["time_min"]["wait"]["mean"] = j["time_min"]["wait"]["mean"].get<double>() + 10.0;
  EXPECT_THROW(load_report(j.dump()), ConsistencyError);
  const std::string p = write("tampered.json", j.dump());
  cli::EvsmOptions e{shipped, p, "text", ""};
  EXPECT_EQ(run([&](auto io) { return cli::cmd_evsm(e, io); }), cli::kConsistencyError);
}

TEST_F(CliTest, SimulationFailureExitsThree) {
  // A horizon shorter than the first service completes no batch.
  Json j = Json::parse(read(shipped));
  j["horizon_min"] = 1.0;
  const std::string p = write("short.json", j.dump());
  EXPECT_EQ(run([&](auto io) { return cli::cmd_simulate(sim(p), io); }), cli::kSimulationError);
  EXPECT_NE(err_.str().find("simulation error"), std::string::npos);
}

TEST_F(CliTest, SuppliedFactorsWithoutFactorsIsAnInputError) {
  Json j = Json::parse(read(shipped));
  j.erase("oeee_factors");
  const std::string p = write("nofactors.json", j.dump());
  auto o = sim(p);
  o.factors = FactorMode::Supplied;
  EXPECT_EQ(run([&](auto io) { return cli::cmd_simulate(o, io); }), cli::kInputError);
  o.factors.reset();
  EXPECT_EQ(run([&](auto io) { return cli::cmd_simulate(o, io); }), cli::kOk);
  EXPECT_EQ(Json::parse(out_.str())["metrics"]["factors"]["mode"], "derived");
}

TEST_F(CliTest, EvsmTextAndDot) {
  auto o = sim(shipped, 30);
  o.out_path = path("r.json");
  ASSERT_EQ(run([&](auto io) { return cli::cmd_simulate(o, io); }), cli::kOk);
  cli::EvsmOptions e{shipped, o.out_path, "text", ""};
  ASSERT_EQ(run([&](auto io) { return cli::cmd_evsm(e, io); }), cli::kOk);
  EXPECT_NE(out_.str().find("takt 168.0"), std::string::npos);
  e.format = "dot";
  e.out_path = path("map.dot");
  ASSERT_EQ(run([&](auto io) { return cli::cmd_evsm(e, io); }), cli::kOk);
  std::size_t nodes = 0, edges = 0;
  EXPECT_EQ(lgtest::DotChecker(read(e.out_path)).check(nodes, edges), "");
  EXPECT_EQ(nodes, 9u);
  EXPECT_EQ(edges, 8u);
  e.format = "svg";
  EXPECT_EQ(run([&](auto io) { return cli::cmd_evsm(e, io); }), cli::kInputError);
}

TEST_F(CliTest, EvsmWithMismatchedReportExitsFour) {
  auto o = sim(shipped, 3);
  o.out_path = path("r.json");
  ASSERT_EQ(run([&](auto io) { return cli::cmd_simulate(o, io); }), cli::kOk);
  Json j = Json::parse(read(shipped));
  j["stations"][0]["power_active_kw"] = 6.0;
  const std::string other = write("other.json", j.dump());
  cli::EvsmOptions e{other, o.out_path, "text", ""};
  EXPECT_EQ(run([&](auto io) { return cli::cmd_evsm(e, io); }), cli::kConsistencyError);
  EXPECT_NE(err_.str().find("fingerprint"), std::string::npos);
}

TEST_F(CliTest, CompareScenarioOne) {
  cli::CompareOptions c{shipped, lgtest::source_path("configs/scenario1.json"), 30, 42, path("cmp.json"), {}, 0};
  ASSERT_EQ(run([&](auto io) { return cli::cmd_compare(c, io); }), cli::kOk);
  const Json j = Json::parse(read(c.out_path));
  double wait_rate = -1;
  for (const auto& row : j["rows"])
    if (row["parameter"] == "Waiting time") wait_rate = row["improvement_rate"].get<double>();
  EXPECT_NEAR(wait_rate, 0.576, 0.005);
  EXPECT_NE(out_.str().find("Waiting time"), std::string::npos);
}

TEST_F(CliTest, CompareScenarioTwoLeadTime) {
  cli::CompareOptions c{shipped, lgtest::source_path("configs/scenario2.json"), 30, 42, "", {}, 0};
  ASSERT_EQ(run([&](auto io) { return cli::cmd_compare(c, io); }), cli::kOk);
  const Json j = Json::parse(out_.str());
  for (const auto& row : j["rows"])
    if (row["parameter"] == "Lead time") {
      EXPECT_NEAR(row["scenario_value"].get<double>(), 292.0, 0.07 * 292.0);
    }
}

TEST_F(CliTest, CompareEmptyDeltaIsAllZero) {
  cli::CompareOptions c{shipped, lgtest::source_path("configs/empty_delta.json"), 5, 42, "", {}, 0};
  ASSERT_EQ(run([&](auto io) { return cli::cmd_compare(c, io); }), cli::kOk);
  for (const auto& row : Json::parse(out_.str())["rows"]) EXPECT_EQ(row["improvement_rate"].get<double>(), 0.0);
}

TEST_F(CliTest, CompareWithBadDeltaExitsTwo) {
  const std::string d = write("d.json", R"({"name": "x", "edits": [{"op": "set_power", "id": "ghost",
                                             "active_kw": 1, "idle_kw": 0}]})");
  cli::CompareOptions c{shipped, d, 2, 42, "", {}, 0};
  EXPECT_EQ(run([&](auto io) { return cli::cmd_compare(c, io); }), cli::kInputError);
  EXPECT_NE(err_.str().find("scenario:"), std::string::npos);
}

TEST(CliFactorMode, Parsing) {
  EXPECT_EQ(cli::parse_factor_mode("supplied"), FactorMode::Supplied);
  EXPECT_EQ(cli::parse_factor_mode("derived"), FactorMode::Derived);
  EXPECT_FALSE(cli::parse_factor_mode("both").has_value());
}

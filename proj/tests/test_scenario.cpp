#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "coopsafe/errors.hpp"
#include "coopsafe/scenario.hpp"
#include "coopsafe/simulator.hpp"
#include "support.hpp"

namespace coopsafe {
namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json fixture() { return json::parse(read_file(testing::data_path("three_arms.json"))); }

std::string expect_rejected(const json& doc) {
  try {
    parse_scenario(doc.dump());
  } catch (const ValidationError& e) {
    return e.path();
  }
  ADD_FAILURE() << "document was accepted";
  return {};
}

TEST(Scenario, ParsesBundledScenarios) {
  const Scenario desk = load_scenario(testing::scenario_path("desk_cell.json"));
  EXPECT_EQ(desk.robots.size(), 3u);
  EXPECT_EQ(desk.safety.f_min, 40.0);
  EXPECT_EQ(desk.task.timing.profile, TimingProfile::kCubic);
  const Scenario arms = load_scenario(testing::data_path("three_arms.json"));
  EXPECT_TRUE(arms.derive_f_min);
  EXPECT_NEAR(arms.safety.f_min, 66.6, 1e-9);
}

TEST(Scenario, SerializeRoundTrip) {
  for (const std::string path :
       {testing::scenario_path("desk_cell.json"), testing::data_path("three_arms.json")}) {
    const Scenario a = load_scenario(path);
    const Scenario b = parse_scenario(serialize_scenario(a));
    EXPECT_TRUE(a == b) << path;
    EXPECT_EQ(serialize_scenario(a), serialize_scenario(b));
  }
}

TEST(Scenario, DefaultsFillOmittedGains) {
  const Scenario sc = load_scenario(testing::data_path("three_arms.json"));
  EXPECT_EQ(sc.gains.k_sigma, 20.0);
  EXPECT_EQ(sc.gains.lambda_sigma, 100.0);
  EXPECT_EQ(sc.scaling.k_d, 4.5);
  EXPECT_EQ(sc.scaling.k_p, 5.0);
  EXPECT_EQ(sc.supervisor.t_dwell, 0.05);
  EXPECT_EQ(sc.impedance.K, 10.0 * Eigen::MatrixXd::Identity(9, 9));
}

TEST(Scenario, WrongWaypointLengthNamesField) {
  json doc = fixture();
  doc["task"]["nominalPath"][0] = json::array({1.0, 2.0});
  EXPECT_EQ(expect_rejected(doc), "task.nominalPath[0]");
}

TEST(Scenario, UnknownFieldRejected) {
  json doc = fixture();
  doc["sim"]["speed"] = 2.0;
  EXPECT_EQ(expect_rejected(doc), "sim.speed");
}

TEST(Scenario, FloorSpecifiedTwiceRejected) {
  json doc = fixture();
  doc["safety"]["fMin"] = 50.0;
  EXPECT_EQ(expect_rejected(doc), "safety");
}

TEST(Scenario, MissingRequiredField) {
  json doc = fixture();
  doc.erase("task");
  EXPECT_EQ(expect_rejected(doc), "task");
}

TEST(Scenario, BadTimingRejected) {
  json doc = fixture();
  doc["task"]["timing"]["tf"] = -1.0;
  EXPECT_EQ(expect_rejected(doc), "task.timing");
}

TEST(Scenario, MalformedJson) {
  EXPECT_THROW(parse_scenario("{ not json"), ValidationError);
}

TEST(Scenario, NonPositiveStep) {
  json doc = fixture();
  doc["sim"]["dt"] = 0.0;
  EXPECT_EQ(expect_rejected(doc), "sim.dt");
}

// Command line: exit codes and output.

struct Result {
  int code = -1;
  std::string out;
};

Result run_cli(const std::string& args) {
  const std::string cmd = std::string(COOPSAFE_CLI) + " " + args + " 2>/dev/null";
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  Result r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe.get())) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe.release());
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("coopsafe_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string file(const std::string& name) const { return (dir_ / name).string(); }

  std::filesystem::path dir_;
};

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run_cli("").code, 1);
  EXPECT_EQ(run_cli("simulate").code, 1);
  EXPECT_EQ(run_cli("frobnicate").code, 1);
  EXPECT_EQ(run_cli("simulate --scenario " + testing::data_path("three_arms.json")).code, 1);
  EXPECT_EQ(run_cli("--help").code, 0);
}

TEST_F(Cli, Validate) {
  const Result ok = run_cli("validate --scenario " + testing::scenario_path("desk_cell.json"));
  EXPECT_EQ(ok.code, 0);
  EXPECT_NE(ok.out.find("ok: 3 robots"), std::string::npos);

  json doc = fixture();
  doc["task"]["nominalPath"][0] = json::array({1.0});
  std::ofstream(file("bad.json")) << doc.dump();
  EXPECT_EQ(run_cli("validate --scenario " + file("bad.json")).code, 2);
  EXPECT_EQ(run_cli("validate --scenario " + file("missing.json")).code, 2);
}

TEST_F(Cli, Fmin) {
  const Result r = run_cli("fmin --scenario " + testing::data_path("three_arms.json") + " --dmin 0.3");
  EXPECT_EQ(r.code, 0);
  EXPECT_NEAR(std::stod(r.out), 66.6, 1e-9);
  EXPECT_EQ(run_cli("fmin --scenario " + testing::data_path("three_arms.json") + " --dmin 0").code, 1);
}

TEST_F(Cli, SimulateWritesTrace) {
  const Result r = run_cli("simulate --scenario " + testing::data_path("three_arms.json") +
                           " --duration 0.02 --out " + file("trace.csv"));
  ASSERT_EQ(r.code, 0);
  std::ifstream in(file("trace.csv"));
  const TraceTable table = read_trace(in);
  EXPECT_EQ(table.rows.size(), 21u);
  EXPECT_EQ(table.columns.front(), "t");

  const Result p = run_cli("plotdata --trace " + file("trace.csv") + " --fields t,F");
  EXPECT_EQ(p.code, 0);
  EXPECT_EQ(std::count(p.out.begin(), p.out.end(), '\n'), 22);
  EXPECT_EQ(run_cli("plotdata --trace " + file("trace.csv") + " --fields nope").code, 1);
}

TEST_F(Cli, SimulateJsonl) {
  const Result r = run_cli("simulate --scenario " + testing::data_path("three_arms.json") +
                           " --duration 0.005 --format jsonl --out " + file("trace.jsonl"));
  ASSERT_EQ(r.code, 0);
  std::ifstream in(file("trace.jsonl"));
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    EXPECT_NO_THROW((void)json::parse(line));
    ++n;
  }
  EXPECT_EQ(n, 6);
}

}  // namespace
}  // namespace coopsafe

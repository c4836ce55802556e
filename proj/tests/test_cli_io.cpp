#include "dhym/cli_io.hpp"
#include "dhym/errors.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dhym;
using namespace dhym::io;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("dhym_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path config(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  RunResult run_cmd(const std::string& cmd, const fs::path& cfg) {
    Options o;
    o.command = cmd;
    o.config = cfg;
    std::ostringstream log;
    auto r = run(o, log);
    log_ = log.str();
    return r;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
  std::string log_;
};

}  // namespace

TEST(ExitCodes, PerErrorClass) {
  EXPECT_EQ(exit_code(ErrorKind::InvalidConfig), 2);
  EXPECT_EQ(exit_code(ErrorKind::SmallRadiusObstruction), 3);
  EXPECT_EQ(exit_code(ErrorKind::ContinuationStalled), 4);
  EXPECT_EQ(exit_code(ErrorKind::ConvexityLost), 4);
  EXPECT_EQ(exit_code(ErrorKind::InvariantViolation), 5);
}

TEST(Format, SeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(-2.0), "-2");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Config, RejectsUnknownKeys) {
  EXPECT_THROW(parse_config(R"({"f0":[0,1,0],"colour":1})", "."), Error);
  EXPECT_THROW(parse_config(R"({"f0":[0,1,0],"tolerances":{"residual":1e-10,"bogus":1}})", "."), Error);
  EXPECT_THROW(parse_config(R"({"f0":[0,1,0],"datum":{"kind":"fourier","file":"x"}})", "."), Error);
  EXPECT_THROW(parse_config(R"({"f0":[0,1]})", "."), Error);
  EXPECT_THROW(parse_config(R"({"f0":[0,1,0],"grid":100})", "."), Error);
  EXPECT_THROW(parse_config(R"({"f0":[0,1,0],"regime":"other"})", "."), Error);
  EXPECT_THROW(parse_config("{not json", "."), Error);
}

TEST(Config, DefaultsOverridesAndHash) {
  const auto a = parse_config(R"({"f0":[0.5,1,0.3],"datum":{"coefficients":[[1,0.1,0]]}})", "/tmp");
  EXPECT_EQ(a.regime, Regime::DHYM);
  EXPECT_EQ(a.grid, 256);
  EXPECT_EQ(a.output, fs::path("/tmp/out"));
  ASSERT_EQ(a.datum.modes.size(), 1u);
  Overrides o;
  o.grid = 64;
  o.tol = 1e-9;
  const auto b = parse_config(R"({"datum":{"coefficients":[[1,0.1,0]]},  "f0":[0.5,1,0.3]})", "/tmp", o);
  EXPECT_EQ(b.grid, 64);
  EXPECT_EQ(b.tol.residual, 1e-9);
  EXPECT_EQ(a.hash, b.hash);
  EXPECT_EQ(fnv1a(""), 14695981039346656037ull);
}

TEST_F(CliTest, CsvRoundTrip) {
  const Table t{{"a", "b"}, {{0.1, 1e-300, -3.25}, {1.0 / 3.0, 2.0, 1e20}}};
  write_csv(dir_ / "t.csv", t);
  const auto back = read_csv(dir_ / "t.csv");
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.columns, t.columns);
  EXPECT_EQ(slurp(dir_ / "t.csv").find('\r'), std::string::npos);
}

TEST_F(CliTest, SolveFlatDatum) {
  const auto cfg = config("flat.json", R"({"regime":"large_radius","f0":[0.5,1,0.3],"grid":64,"output":"o"})");
  const auto r = run_cmd("solve", cfg);
  ASSERT_EQ(r.status, 0) << log_;
  const auto t = read_csv(dir_ / "o" / "solution.csv");
  ASSERT_EQ(t.header, (std::vector<std::string>{"x", "phi", "phi_dd", "psi", "phiF", "residual"}));
  for (double v : t.columns[1]) EXPECT_EQ(v, 0.0);
  const auto m = nlohmann::json::parse(slurp(dir_ / "o" / "manifest.json"));
  EXPECT_EQ(m["config_hash"].get<std::string>().size(), 16u);
  EXPECT_TRUE(m["derived"].contains("c_A"));
}

TEST_F(CliTest, SmallRadiusObstruction) {
  const auto cfg = config("s.json", R"({"regime":"small_radius","f0":[0.5,1,0.3],"grid":64,
    "datum":{"coefficients":[[1,0.1,0]]},"output":"o"})");
  const auto r = run_cmd("solve", cfg);
  EXPECT_EQ(r.status, kExitObstruction);
  EXPECT_NE(r.message.find("det F0 > 0"), std::string::npos);
}

TEST_F(CliTest, InvalidConfigExitCode) {
  EXPECT_EQ(run_cmd("solve", config("bad.json", R"({"f0":[0,1,0],"extra":true})")).status, kExitInvalid);
  EXPECT_EQ(run_cmd("frobnicate", config("ok.json", R"({"f0":[0,1,0]})")).status, kExitInvalid);
}

TEST_F(CliTest, ExpandRecordsSlope) {
  const auto cfg = config("e.json", R"({"f0":[0,1,0],"output":"o",
    "expand":{"f0_matrix":[[1,0,0],[0,2,0],[0,0,3]],"t_large":[10,20,40,80]}})");
  ASSERT_EQ(run_cmd("expand", cfg).status, 0) << log_;
  const auto t = read_csv(dir_ / "o" / "expansion_large.csv");
  EXPECT_EQ(t.columns[0].size(), 4u);
  const auto m = nlohmann::json::parse(slurp(dir_ / "o" / "manifest.json"));
  const double slope = m["derived"]["large"]["slope"];
  EXPECT_GE(slope, -3.3);
  EXPECT_LE(slope, -2.7);
}

TEST_F(CliTest, ResidualRoundTrip) {
  const auto cfg = config("r.json", R"({"regime":"dhym","f0":[0,1,0],"grid":128,"output":"o",
    "datum":{"coefficients":[[1,0.1,0],[2,0,0.05]]},"residual":{"input":"o/solution.csv"}})");
  ASSERT_EQ(run_cmd("solve", cfg).status, 0) << log_;
  ASSERT_EQ(run_cmd("residual", cfg).status, 0) << log_;
  const auto m = nlohmann::json::parse(slurp(dir_ / "o" / "manifest.json"));
  EXPECT_LE(m["derived"]["roundtrip_difference"].get<double>(), 1e-12);
}

TEST_F(CliTest, DeterministicOutputs) {
  const auto a = config("a.json", R"({"regime":"dhym","f0":[0.5,1,0.3],"grid":128,"output":"a",
    "datum":{"coefficients":[[1,0.3,0],[3,0,0.05]]}})");
  const auto b = config("b.json", R"({"regime":"dhym","f0":[0.5,1,0.3],"grid":128,"output":"b",
    "datum":{"coefficients":[[1,0.3,0],[3,0,0.05]]}})");
  ASSERT_EQ(run_cmd("solve", a).status, 0);
  ASSERT_EQ(run_cmd("solve", b).status, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "solution.csv"), slurp(dir_ / "b" / "solution.csv"));
}

TEST_F(CliTest, LegendreAndPhaseCommands) {
  const auto cfg = config("l.json", R"({"f0":[0.5,1,0.3],"grid":128,"output":"o",
    "datum":{"coefficients":[[1,0.01,0]]}})");
  ASSERT_EQ(run_cmd("legendre", cfg).status, 0) << log_;
  auto m = nlohmann::json::parse(slurp(dir_ / "o" / "manifest.json"));
  EXPECT_LE(m["derived"]["duality_defect"].get<double>(), 1e-8);
  EXPECT_LE(m["derived"]["involution_error"].get<double>(), 1e-8);
  ASSERT_EQ(run_cmd("phase", cfg).status, 0) << log_;
  m = nlohmann::json::parse(slurp(dir_ / "o" / "manifest.json"));
  EXPECT_NEAR(m["derived"]["positivity_constant"].get<double>(), m["derived"]["positivity_identity"].get<double>(), 1e-12);
}

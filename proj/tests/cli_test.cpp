#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "geoframe_cli/cli.hpp"
#include "test_support.hpp"

namespace geoframe {
namespace {

namespace fs = std::filesystem;

const fs::path kData = GEOFRAME_TEST_DATA_DIR;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::map<std::string, std::string> keys(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

std::vector<std::string> key_order(const std::string& text) {
  std::vector<std::string> order;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) order.push_back(line.substr(0, line.find('=')));
  return order;
}

double num(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw std::runtime_error("missing key " + key);
  return std::stod(it->second);
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("geoframe_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

// Phase c at -2.2 rad as written on the command line; row 0 does not depend on its sign.
TEST_F(CliTest, GenWritesSamples) {
  const Result r = run({"gen", "--phases", "1.70:0,0.70:-2.1,1.40:-2.2", "--freq", "50", "--fs", "10000", "--dur",
                        "0.02", "--out", path("a.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const SampleSeries s = read_csv(fs::path(path("a.csv")));
  ASSERT_EQ(s.size(), 200u);
  EXPECT_NEAR(s.row(0)[0], 1.70, 0.005);
  EXPECT_NEAR(s.row(0)[1], -0.35, 0.005);
  EXPECT_NEAR(s.row(0)[2], -0.82, 0.005);
}

TEST_F(CliTest, GenZeroDurationWritesHeaderOnly) {
  const Result r = run({"gen", "--phases", "1:0,1:2,1:4", "--dur", "0", "--out", path("z.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path("z.csv"));
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_EQ(text.str(), "t,v1,v2,v3\n");
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"gen"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"gen", "--phases", "1:0,abc"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"gen", "--phases", "1:0,1:1", "--fs", "-5"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"gen", "--phases", "1:0,1:1", "--bogus"}).code, cli::kExitUsage);
  const std::string lab = (kData / "lab_pair.csv").string();
  EXPECT_EQ(run({"identify", "--in", lab, "--t1", "0"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"identify", "--in", lab, "--t1", "0", "--t2", "7"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"identify", "--in", lab, "--method", "sideways"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"--help"}).code, cli::kExitOk);
}

TEST_F(CliTest, NothingWrittenOnUsageError) {
  EXPECT_EQ(run({"gen", "--phases", "1:0,garbage", "--out", path("never.csv")}).code, cli::kExitUsage);
  EXPECT_FALSE(fs::exists(path("never.csv")));
}

TEST_F(CliTest, IoErrors) {
  EXPECT_EQ(run({"identify", "--in", path("missing.csv")}).code, cli::kExitIo);
  std::ofstream(path("bad.csv")) << "t,v1,v2,v3\n0,1,2\n";
  const Result r = run({"identify", "--in", path("bad.csv")});
  EXPECT_EQ(r.code, cli::kExitIo);
  EXPECT_NE(r.err.find("line 2"), std::string::npos);
  EXPECT_EQ(run({"gen", "--phases", "1:0,1:1", "--out", "/nonexistent/dir/x.csv"}).code, cli::kExitIo);
}

TEST_F(CliTest, IdentifyLabReplay) {
  const Result r = run({"identify", "--in", (kData / "lab_replay.csv").string(), "--t1", "0", "--t2", "16"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto kv = keys(r.out);
  EXPECT_NEAR(num(kv, "theta_rad"), 2.1863, 5e-4);
  EXPECT_NEAR(num(kv, "R_0"), 0.4597, 5e-4);
  EXPECT_NEAR(num(kv, "R_13"), 0.6280, 5e-4);
  EXPECT_NEAR(num(kv, "R_23"), 0.6280, 5e-4);
  EXPECT_NEAR(num(kv, "t2") - num(kv, "t1"), 1.6e-3, 1e-12);
  EXPECT_EQ(kv.at("kind"), "none");
}

TEST_F(CliTest, IdentifyLabPairDefaultRows) {
  const Result r = run({"identify", "--in", (kData / "lab_pair.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(num(keys(r.out), "theta_rad"), 2.1863, 5e-4);
}

TEST_F(CliTest, IdentifySameRowTwiceIsCollinear) {
  const Result r = run({"identify", "--in", (kData / "lab_pair.csv").string(), "--t1", "1", "--t2", "1"});
  EXPECT_EQ(r.code, cli::kExitDegenerate);
  EXPECT_EQ(keys(r.out).at("kind"), "Collinear");
}

TEST_F(CliTest, IdentifyThreePhaseExample) {
  // f = 50 Hz at 1 kHz: row 5 is t = T/4.
  ASSERT_EQ(run({"gen", "--phases", "1.70:0,0.70:-2.1,1.40:2.2", "--fs", "1000", "--dur", "0.02", "--out",
                 path("a.csv")})
                .code,
            0);
  const Result r = run({"identify", "--in", path("a.csv"), "--t1", "0", "--t2", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto kv = keys(r.out);
  for (const auto& c : testing::printed::kThreeB) EXPECT_NEAR(num(kv, "B_" + blade_label(c.mask, 3)), c.value, 0.005);
  for (const auto& c : testing::printed::kThreeR) EXPECT_NEAR(num(kv, "R_" + blade_label(c.mask, 3)), c.value, 0.005);
  for (const auto& c : testing::printed::kThreeL) EXPECT_NEAR(num(kv, "L_" + blade_label(c.mask, 3)), c.value, 0.005);
  EXPECT_NEAR(num(kv, "theta_deg"), 64.18, 0.05);
  EXPECT_NEAR(num(kv, "cos_theta"), 0.435, 0.005);
  EXPECT_EQ(kv.at("method"), "Direct3D");
}

TEST_F(CliTest, IdentifyKeyNamesMatchGolden) {
  ASSERT_EQ(run({"gen", "--phases", "1.70:0,0.70:-2.1,1.40:2.2", "--fs", "1000", "--dur", "0.02", "--out",
                 path("a.csv")})
                .code,
            0);
  std::ifstream golden(kData / "identify_keys.golden");
  std::vector<std::string> expect;
  for (std::string line; std::getline(golden, line);) expect.push_back(line);
  EXPECT_EQ(key_order(run({"identify", "--in", path("a.csv"), "--t1", "0", "--t2", "5"}).out), expect);

  ASSERT_EQ(run({"gen", "--phases", "1:0,1.7:0.3,0.5:2,0.5:-1,0.5:1,1:3", "--fs", "1000", "--dur", "0.02", "--out",
                 path("six.csv")})
                .code,
            0);
  std::ifstream golden6(kData / "identify_keys_6.golden");
  expect.clear();
  for (std::string line; std::getline(golden6, line);) expect.push_back(line);
  EXPECT_EQ(key_order(run({"identify", "--in", path("six.csv"), "--t1", "0", "--t2", "5"}).out), expect);
}

TEST_F(CliTest, TransformFrozenFrameResidualVanishes) {
  ASSERT_EQ(run({"gen", "--phases", "1.70:0,0.70:-2.1,1.40:2.2", "--dur", "0.04", "--out", path("a.csv")}).code, 0);
  const Result r = run({"transform", "--in", path("a.csv"), "--out", path("t.csv"), "--frozen-frame"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path("t.csv"));
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "t,p,s,res1");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line); ++rows) {
    const double res = std::stod(line.substr(line.rfind(',') + 1));
    EXPECT_LE(std::abs(res), 1e-9);
  }
  EXPECT_EQ(rows, 400u);
}

TEST_F(CliTest, TransformSixPhase) {
  ASSERT_EQ(run({"gen", "--phases", "1:0,1.7:0.3,0.5:2,0.5:-1,0.5:1,1:3", "--dur", "0.02", "--out", path("six.csv")})
                .code,
            0);
  ASSERT_EQ(run({"transform", "--in", path("six.csv"), "--out", path("t.csv")}).code, 0);
  std::ifstream in(path("t.csv"));
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "t,p,s,res1,res2,res3,res4");
  double p_peak = 0.0;
  for (std::string line; std::getline(in, line);) {
    std::vector<double> f;
    std::stringstream ss(line);
    for (std::string x; std::getline(ss, x, ',');) f.push_back(std::stod(x));
    ASSERT_EQ(f.size(), 7u);
    p_peak = std::max(p_peak, std::abs(f[1]));
    for (std::size_t k = 3; k < 7; ++k) EXPECT_LE(std::abs(f[k]), 1e-9);
  }
  EXPECT_GT(p_peak, 0.1);
}

TEST_F(CliTest, TransformKappaMode) {
  ASSERT_EQ(run({"gen", "--phases", "1.70:0,0.70:-2.1,1.40:2.2", "--dur", "0.02", "--out", path("a.csv")}).code, 0);
  ASSERT_EQ(run({"transform", "--in", path("a.csv"), "--out", path("t.csv"), "--kappa", "8"}).code, 0);
  std::ifstream in(path("t.csv"));
  std::string line;
  std::getline(in, line);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_LE(std::abs(std::stod(line.substr(line.rfind(',') + 1))), 1e-9);
  }
  EXPECT_EQ(rows, 200u - 8u);
  EXPECT_EQ(run({"transform", "--in", path("a.csv"), "--frozen-frame", "--kappa", "8"}).code, cli::kExitUsage);
}

TEST_F(CliTest, TransformZeroSequenceIsDegenerate) {
  ASSERT_EQ(run({"gen", "--phases", "1:0.5,1:0.5,1:0.5", "--dur", "0.02", "--out", path("z.csv")}).code, 0);
  const Result r = run({"transform", "--in", path("z.csv"), "--out", path("t.csv")});
  EXPECT_EQ(r.code, cli::kExitDegenerate);
  EXPECT_EQ(keys(r.out).at("kind"), "Collinear");
  const Result k = run({"transform", "--in", path("z.csv"), "--out", path("t.csv"), "--kappa", "8"});
  EXPECT_EQ(k.code, cli::kExitDegenerate);
  EXPECT_EQ(keys(k.out).at("kind"), "Collinear");
}

TEST_F(CliTest, RoundTripGenTransform) {
  ASSERT_EQ(run({"gen", "--phases", "2:0.1,0:0,1.2:3.1,0.4:-1", "--dur", "0.04", "--out", path("g.csv")}).code, 0);
  ASSERT_EQ(run({"transform", "--in", path("g.csv"), "--out", path("t.csv")}).code, 0);
  std::ifstream in(path("t.csv"));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::vector<double> f;
    for (std::string x; std::getline(ss, x, ',');) f.push_back(std::stod(x));
    EXPECT_LE(std::abs(f[3]), 1e-9);
    EXPECT_LE(std::abs(f[4]), 1e-9);
  }
}

TEST_F(CliTest, AnalyzeBalanced) {
  ASSERT_EQ(run({"gen", "--phases", "1:0,1:-2.0943951023931957,1:2.0943951023931957", "--dur", "0.02", "--out",
                 path("b.csv")})
                .code,
            0);
  const Result r = run({"analyze", "--in", path("b.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto kv = keys(r.out);
  EXPECT_NEAR(num(kv, "theta_rad"), 0.9553, 5e-5);
  EXPECT_LE(num(kv, "planarity_residual"), 1e-12);
}

TEST_F(CliTest, CompareClarkeBalanced) {
  ASSERT_EQ(run({"gen", "--phases", "1:0,1:-2.0943951023931957,1:2.0943951023931957", "--dur", "0.02", "--out",
                 path("b.csv")})
                .code,
            0);
  const Result r = run({"compare-clarke", "--in", path("b.csv"), "--out", path("c.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto kv = keys(r.out);
  EXPECT_LE(num(kv, "rms_residual"), 1e-12);
  EXPECT_LE(num(kv, "rms_zero"), 1e-12);
  std::ifstream in(path("c.csv"));
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "t,p,s,res1,alpha,beta,zero");
  for (std::string line; std::getline(in, line);) {
    std::stringstream ss(line);
    std::vector<double> f;
    for (std::string x; std::getline(ss, x, ',');) f.push_back(std::stod(x));
    EXPECT_LE(std::abs(f[3]), 1e-12);
    EXPECT_LE(std::abs(f[6]), 1e-12);
  }
}

TEST_F(CliTest, CompareClarkeNeedsThreePhases) {
  ASSERT_EQ(run({"gen", "--phases", "1:0,1:1,1:2,1:3", "--dur", "0.01", "--out", path("f.csv")}).code, 0);
  EXPECT_EQ(run({"compare-clarke", "--in", path("f.csv")}).code, cli::kExitUsage);
}

TEST_F(CliTest, SimulateScenarioConfig) {
  const Result r = run({"simulate", "--config", (kData / "unbalance_step.cfg").string(), "--out", path("trace.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto kv = keys(r.out);
  EXPECT_LE(num(kv, "residual_max"), 1e-9);
  EXPECT_GE(num(kv, "v0_rms"), 1e3 * num(kv, "residual_rms"));
  EXPECT_TRUE(fs::exists(path("trace.csv")));

  EXPECT_EQ(run({"simulate", "--config", path("missing.cfg")}).code, cli::kExitIo);
  std::ofstream(path("bad.cfg")) << "nonsense=1\n";
  EXPECT_EQ(run({"simulate", "--config", path("bad.cfg")}).code, cli::kExitUsage);
  EXPECT_EQ(run({"simulate", "--frame", "dq"}).code, cli::kExitUsage);
}

// Exit codes as seen by a shell.
int shell(const std::string& args) {
  const std::string cmd = std::string(GEOFRAME_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST_F(CliTest, ProcessExitCodes) {
  EXPECT_EQ(shell("gen --phases 1:0,1:1,1:2 --dur 0.001 --out " + path("p.csv")), 0);
  EXPECT_EQ(shell("gen"), 2);
  EXPECT_EQ(shell("identify --in " + (kData / "lab_pair.csv").string() + " --t1 0 --t2 0"), 3);
  EXPECT_EQ(shell("identify --in " + path("nothing.csv")), 4);
}

}  // namespace
}  // namespace geoframe

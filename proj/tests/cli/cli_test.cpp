#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fpplab/cli.hpp"

namespace fpplab {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("fpplab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  std::string config(const std::string& name, const std::string& text) {
    const fs::path p = root_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  int call(std::vector<std::string> args) {
    args.insert(args.begin(), "fpplab");
    out_.str("");
    err_.str("");
    return run(args, out_, err_);
  }

  fs::path root_;
  std::ostringstream out_;
  std::ostringstream err_;
};

const char* kExperiment =
    "experiment = heavy_edges\nn = 4,8\nreplicas = 6\nM = 1\nseed = 5\n"
    "dist.family = exponential\ndist.rate = 1\n";

const char* kField = "d = 2\nL = 12\nseed = 3\ndist.family = uniform\ndist.a = 0\ndist.b = 1\n";

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(call({}), kExitConfig);
  EXPECT_EQ(call({"teleport"}), kExitConfig);
  EXPECT_EQ(call({"experiment", "--bogus"}), kExitConfig);
  EXPECT_EQ(call({"experiment", "--config", (root_ / "missing.cfg").string()}), kExitConfig);
  EXPECT_NE(err_.str().find("\"exit_code\":2"), std::string::npos);
  EXPECT_EQ(call({"--help"}), kExitOk);
  EXPECT_NE(out_.str().find("experiment"), std::string::npos);
}

TEST_F(CliTest, InvalidConfigWritesErrorRecord) {
  const std::string cfg = config("bad.cfg", std::string(kExperiment) + "colour = blue\n");
  const fs::path out = root_ / "bad";
  EXPECT_EQ(call({"experiment", "--config", cfg, "--out", out.string()}), kExitConfig);
  const auto j = nlohmann::json::parse(slurp(out / "error.json"));
  EXPECT_EQ(j["error"], "ConfigInvalid");
  EXPECT_EQ(j["exit_code"], 2);
}

TEST_F(CliTest, RuntimeFailureExitsOne) {
  const std::string cfg = config("far.cfg", std::string(kField) + "u = 0,0\nv = 40,0\n");
  EXPECT_EQ(call({"geodesic", "--config", cfg, "--out", (root_ / "far").string(), "--quiet"}), kExitRuntime);
  EXPECT_NE(err_.str().find("OutOfBox"), std::string::npos);
}

TEST_F(CliTest, ExperimentIsDeterministicAndRecordsSeedOverride) {
  const std::string cfg = config("exp.cfg", kExperiment);
  const fs::path a = root_ / "a";
  const fs::path b = root_ / "b";
  const fs::path c = root_ / "c";
  ASSERT_EQ(call({"experiment", "--config", cfg, "--out", a.string(), "--seed", "42", "--quiet"}), kExitOk);
  EXPECT_TRUE(out_.str().empty());
  ASSERT_EQ(call({"experiment", "--config", cfg, "--out", b.string(), "--seed", "42", "--threads", "4"}), kExitOk);
  for (const char* f : {"heavy_edges.csv", "heavy_edges_details.csv", "heavy_edges_metrics.csv",
                        "heavy_edges_meta.json", "heavy_edges.cfg", "config.echo.cfg"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  EXPECT_EQ(slurp(a / "heavy_edges.csv").substr(0, 37), "experiment,n,replicas,estimate,stderr");
  const auto run_record = nlohmann::json::parse(slurp(a / "run.json"));
  EXPECT_EQ(run_record["seed"], "42");
  EXPECT_EQ(run_record["seed_override"], true);
  EXPECT_TRUE(run_record.contains("timestamp"));

  // Re-running from the echoed config reproduces the results.
  ASSERT_EQ(call({"experiment", "--config", (a / "config.echo.cfg").string(), "--out", c.string()}), kExitOk);
  EXPECT_EQ(slurp(a / "heavy_edges_details.csv"), slurp(c / "heavy_edges_details.csv"));

  ASSERT_EQ(call({"experiment", "--config", cfg, "--out", c.string(), "--quiet"}), kExitOk);
  EXPECT_NE(slurp(a / "heavy_edges_details.csv"), slurp(c / "heavy_edges_details.csv"));
}

TEST_F(CliTest, FieldSubcommands) {
  const fs::path out = root_ / "field";
  const std::string sample = config("sample.cfg", kField);
  ASSERT_EQ(call({"sample", "--config", sample, "--out", out.string(), "--quiet"}), kExitOk);
  const std::string csv = slurp(out / "field.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x1,x2,axis,weight");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 2 * 12 * 11);

  const std::string geo = config("geo.cfg", std::string(kField) + "u = -3,0\nv = 4,2\n");
  ASSERT_EQ(call({"geodesic", "--config", geo, "--out", out.string(), "--quiet"}), kExitOk);
  EXPECT_TRUE(nlohmann::json::parse(slurp(out / "geodesic.json")).contains("time"));

  const std::string res = config("res.cfg", std::string(kField) + "u = -3,0\nv = 4,2\nM = 0.01\n");
  ASSERT_EQ(call({"restricted", "--config", res, "--out", out.string(), "--quiet"}), kExitOk);
  const auto r = nlohmann::json::parse(slurp(out / "restricted.json"));
  EXPECT_EQ(r["finite"], false);
  EXPECT_EQ(r["time"], "inf");

  const std::string black = config("black.cfg", std::string(kField) + "N = 2\nM = 1\ndelta = 0.5\n");
  ASSERT_EQ(call({"blackcube", "--config", black, "--out", out.string(), "--quiet"}), kExitOk);
  EXPECT_EQ(slurp(out / "blackcubes.csv").substr(0, 12), "l1,l2,black\n");
  const std::string one = config("one.cfg", std::string(kField) + "N = 2\ncube = 0,0\n");
  ASSERT_EQ(call({"blackcube", "--config", one, "--out", out.string(), "--quiet"}), kExitOk);
  EXPECT_TRUE(nlohmann::json::parse(slurp(out / "blackcube.json")).contains("black"));
}

TEST_F(CliTest, ShortcutAndGame) {
  const fs::path out = root_ / "sg";
  const std::string sc = config("sc.cfg",
                                "box.lo = -30,-30\nbox.hi = 60,30\nseed = 2\ndist.family = atoms\n"
                                "dist.atoms = 0:0.0001\ndist.continuous_weight = 0.9999\n"
                                "dist.continuous.family = uniform\ndist.continuous.a = 9\ndist.continuous.b = 10.5\n"
                                "M = 10\nr = 0\ndelta = 9\nu = 0,0\nv = 40,0\npath = restricted\n");
  ASSERT_EQ(call({"shortcut", "--config", sc, "--out", out.string(), "--quiet"}), kExitOk) << err_.str();
  EXPECT_EQ(slurp(out / "shortcuts.csv").substr(0, 11), "start,end,r");

  const std::string game = config("game.cfg", "d = 2\nL = 40\nseed = 4\ndist.family = uniform\ndist.a = 0\n"
                                              "dist.b = 1\nM = 1\nhorizon = 15\nx_lambda = 0,0\n");
  ASSERT_EQ(call({"game", "--config", game, "--out", out.string()}), kExitOk) << err_.str();
  const auto j = nlohmann::json::parse(slurp(out / "game.json"));
  ASSERT_EQ(j["plan_found"], true);
  EXPECT_EQ(j["certificate"]["ok"], true);
  ASSERT_EQ(j["games"].size(), 4u);
  for (const auto& g : j["games"]) {
    EXPECT_NE(g["capture_phase"], "tail");
    EXPECT_FALSE(g["events"].empty());
  }

  const std::string unbounded = config("unb.cfg", "d = 2\nL = 20\ndist.family = exponential\ndist.rate = 1\n"
                                                  "M = 1\nhorizon = 5\nx_lambda = 0,0\nx_sigma = 2,0\n");
  EXPECT_EQ(call({"game", "--config", unbounded, "--out", out.string(), "--quiet"}), kExitRuntime);
  EXPECT_NE(err_.str().find("UnboundedWeights"), std::string::npos);
}

}  // namespace
}  // namespace fpplab

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = FPP_CLI_PATH;
const std::string kConfigs = FPP_CONFIG_DIR;

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("fpp_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Cli, GeodesicWritesCsvDeterministically) {
  const auto dir = scratch("geodesic");
  const std::string spec = "--spec " + kConfigs + "/two_point.json";
  ASSERT_EQ(run("geodesic " + spec + " --target 10,10 --seed 7 --out " + (dir / "a.csv").string() + " --path-csv " +
                (dir / "path.csv").string()),
            0);
  ASSERT_EQ(run("geodesic " + spec + " --target 10,10 --seed 7 --out " + (dir / "b.csv").string()), 0);
  const auto a = slurp(dir / "a.csv");
  EXPECT_EQ(a, slurp(dir / "b.csv"));
  EXPECT_NE(a.find("target,norm,t,t_dir,hops"), std::string::npos);
  EXPECT_NE(a.find("config_hash="), std::string::npos);
  EXPECT_NE(slurp(dir / "path.csv").find("step,x1,x2"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  const std::string spec = "--spec " + kConfigs + "/two_point.json";
  EXPECT_EQ(run("geodesic " + spec + " --target -1,0"), 2);
  EXPECT_EQ(run("geodesic " + spec + " --target 1,x"), 2);
  EXPECT_EQ(run("gap " + spec + " --trials 0 --out " + scratch("zero").string()), 2);
  EXPECT_EQ(run("tail " + spec + " --trials 0 --out " + scratch("zero2").string()), 2);
  EXPECT_EQ(run("nosuchcommand"), 2);
  EXPECT_EQ(run("geodesic --spec /nonexistent.json --target 1,1"), 2);
}

TEST(Cli, VerifyExitCodes) {
  const std::string spec = "--spec " + kConfigs + "/two_point.json --oracle-envs 10 --chain-trials 20";
  EXPECT_EQ(run("verify " + spec), 0);
  EXPECT_EQ(run("verify " + spec + " --corrupt-shift"), 1);
  const auto dir = scratch("verify");
  EXPECT_EQ(run("verify " + spec + " --pattern-length 1 --pattern-a 1 --pattern-b 2 --out " + (dir / "v.json").string()), 0);
  EXPECT_NE(slurp(dir / "v.json").find("\"max_safe_delta\": 0.0"), std::string::npos);
}

TEST(Cli, ExperimentsWriteSelfDescribingFiles) {
  const std::string spec = "--spec " + kConfigs + "/two_point.json";
  const auto a = scratch("exp_a"), b = scratch("exp_b");
  for (const auto& out : {a, b}) {
    ASSERT_EQ(run("gap " + spec + " --scales 6,10 --trials 10 --out " + out.string()), 0);
    ASSERT_EQ(run("tail " + spec + " --norms 8,16 --trials 10 --out " + out.string()), 0);
    ASSERT_EQ(run("constants " + spec + " --scales 6,12 --trials 10 --out " + out.string()), 0);
  }
  for (const char* name : {"gap_trials.jsonl", "gap_summary.csv", "gap_assertions.json", "tail_trials.jsonl",
                           "tail_summary.csv", "tail_fit.csv", "constants_summary.csv", "constants_trials.jsonl"}) {
    const auto text = slurp(a / name);
    ASSERT_FALSE(text.empty()) << name;
    EXPECT_EQ(text, slurp(b / name)) << name;
    EXPECT_NE(text.find("config_hash"), std::string::npos) << name;
    EXPECT_NE(text.find("0.1.0"), std::string::npos) << name;
  }
  EXPECT_NE(slurp(a / "tail_fit.csv").find("alpha2_hat"), std::string::npos);
}

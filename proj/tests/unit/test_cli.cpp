#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "fracell/cli.hpp"

using namespace fracell;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "fracell");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("fracell_cli_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST(Cli, ReportsAreByteIdenticalAcrossRunsAndDirectories) {
  const auto a = scratch("a"), b = scratch("b");
  ASSERT_EQ(run({"solve", "--nodes=33", "--s=0.25,0.75", "--out=" + a.string()}), 0);
  ASSERT_EQ(run({"solve", "--nodes=33", "--s=0.25,0.75", "--out", b.string()}), 0);
  for (const char* f : {"report.json", "eigenvalues.csv", "solution_0.csv", "solution_1.csv", "grid.json"}) {
    ASSERT_TRUE(std::filesystem::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  const Json j = Json::parse(slurp(a / "report.json"));
  EXPECT_EQ(j["command"], "solve");
  EXPECT_EQ(j["config_hash"].get<std::string>().size(), 16u);
  EXPECT_EQ(j["versions"].size(), 7u);
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_FALSE(j.contains("timestamp"));
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}

TEST(Cli, ConfigFileAndOverrideAgreeWithRunCommand) {
  const auto dir = scratch("cfg");
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "run.cfg");
    f << "# half-line check\nhalfline_rhs = indicator\ns = 0.75\n";
  }
  ASSERT_EQ(run({"halfline", "--config", (dir / "run.cfg").string(), "--points=12", "--out=" + dir.string()}), 0);
  const RunConfig c = RunConfig::parse(Command::Halfline, "halfline_rhs = indicator\ns = 0.75\n", {{"points", "12"}});
  const RunReport r = run_command(c, false);
  EXPECT_EQ(r.json.dump(2) + "\n", slurp(dir / "report.json"));
  EXPECT_TRUE(r.pass());
  std::filesystem::remove_all(dir);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"solve", "--bogus=1", "--out=" + scratch("x").string()}), 2);
  EXPECT_EQ(run({"frobnicate"}), 2);
  EXPECT_EQ(run({"solve", "--config", "/nonexistent/fracell.cfg"}), 2);
  EXPECT_EQ(run({"solve", "stray"}), 2);
  // A deliberately impossible tolerance turns into an assertion failure.
  EXPECT_EQ(run({"probe", "--probe=gate", "--s=0.25", "--nodes=257", "--tolerance=1e-9",
                 "--out=" + scratch("fail").string()}),
            1);
  std::filesystem::remove_all(scratch("fail"));
}

TEST(Cli, EveryCommandRunsAtSmallSize) {
  const std::vector<RunConfig> configs = {
      RunConfig::parse(Command::Solve, "bc = neumann\nnodes = 17\n"),
      RunConfig::parse(Command::Solve, "operation = apply\ncoefficient = sine\nnodes = 17\n"),
      RunConfig::parse(Command::Kernel, "kernel = wt\nnodes = 17\n"),
      RunConfig::parse(Command::Kernel, "kernel = poisson\nbc = neumann\nnodes = 17\n"),
      RunConfig::parse(Command::Extension, "nodes = 33\nlayers = 32\nrhs = eigen1\n"),
      RunConfig::parse(Command::Probe, "probe = harnack\nnodes = 33\nlevels = 2\n"),
      RunConfig::parse(Command::Probe, "probe = trace\nnodes = 17\nlayers = 16\nlevels = 2\nsamples = 2\n"),
      RunConfig::parse(Command::Converge, "study = bilinear\nnodes = 65\nlevels = 2\n"),
  };
  for (const auto& c : configs) {
    const RunReport r = run_command(c, false);
    EXPECT_FALSE(r.assertions.empty()) << c.canonical();
    EXPECT_TRUE(r.pass()) << r.json.dump(2);
  }
}

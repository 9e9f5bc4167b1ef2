#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("ptomo_cli_") + info->name() + "_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Runs the CLI with stdout and stderr captured; returns the exit status.
  int run(const std::string& args) {
    const std::string cmd = std::string(PTOMO_CLI_PATH) + " " + args + " > " + (dir_ / "stdout.txt").string() +
                            " 2> " + (dir_ / "stderr.txt").string();
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  }

  std::string stdout_text() const { return slurp(path("stdout.txt")); }
  std::string stderr_text() const { return slurp(path("stderr.txt")); }

  fs::path dir_;
};

const char* kSweep = "simulate --theta 0.01 --n-grid 100,1000 --reps 3 --boot 10 --seed 11";

TEST_F(CliTest, SimulateIsByteIdenticalAcrossRunsAndWorkers) {
  ASSERT_EQ(run(std::string(kSweep) + " --workers 1 --out " + path("a.csv")), 0) << stderr_text();
  ASSERT_EQ(run(std::string(kSweep) + " --workers 3 --out " + path("b.csv")), 0) << stderr_text();
  const std::string a = slurp(path("a.csv"));
  EXPECT_EQ(a, slurp(path("b.csv")));

  std::istringstream lines(a);
  std::string first, header;
  std::getline(lines, first);
  std::getline(lines, header);
  EXPECT_EQ(first.rfind("# ptomo config_hash=", 0), 0u) << first;
  EXPECT_NE(first.find("seed=11"), std::string::npos);
  EXPECT_EQ(header, "N,trial,infidelity,boot_low,boot_q25,boot_median,boot_q75,boot_high");
  int rows = 0;
  for (std::string l; std::getline(lines, l);) ++rows;
  EXPECT_EQ(rows, 6);

  const auto meta = nlohmann::json::parse(slurp(path("a.csv.meta.json")));
  EXPECT_EQ(meta.at("seed").get<std::uint64_t>(), 11u);
  EXPECT_NE(first.find(meta.at("config_hash").get<std::string>()), std::string::npos);
  EXPECT_TRUE(meta.contains("created_at"));
}

TEST_F(CliTest, SimulateWritesPlot) {
  ASSERT_EQ(run(std::string(kSweep) + " --out " + path("a.csv") + " --plot " + path("a.svg")), 0) << stderr_text();
  const std::string svg = slurp(path("a.svg"));
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("3/N"), std::string::npos);
  EXPECT_NE(svg.find("config_hash"), std::string::npos);
}

TEST_F(CliTest, BootstrapIsDeterministic) {
  const std::string args = "bootstrap --theta 0.01 --n-grid 1000 --reps 2 --seed 4 --out ";
  ASSERT_EQ(run(args + path("a.csv")), 0) << stderr_text();
  ASSERT_EQ(run(args + path("b.csv")), 0) << stderr_text();
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
}

TEST_F(CliTest, MissingSeedIsConfigError) {
  EXPECT_EQ(run("simulate --theta 0.01 --out " + path("a.csv")), 2);
  EXPECT_FALSE(fs::exists(path("a.csv")));
  EXPECT_EQ(run("bootstrap --theta 0.01"), 2);
}

TEST_F(CliTest, InvalidValuesAreConfigErrors) {
  EXPECT_EQ(run("design --norm nuclear"), 2);
  EXPECT_EQ(run("simulate --theta 0.01 --seed 1 --lambda 1.5"), 2);
  EXPECT_EQ(run("simulate --theta 0.01 --seed 1 --n-grid 1000,100"), 2);
  EXPECT_EQ(run("simulate --theta 0.01 --seed 1 --subset 4,5,6,9"), 2);
  EXPECT_EQ(run("simulate --theta 0.01 --seed 1 --device " + path("missing.txt")), 2);
  EXPECT_EQ(run("simulate --theta 0.01 --seed 1 --out " + path("no/such/dir/a.csv")), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("fit --in " + path("missing.csv")), 2);
}

TEST_F(CliTest, RuntimeFailureLeavesNoPartialOutput) {
  // The raw device is not complete enough for sampling, so every trial fails.
  EXPECT_EQ(run("simulate --raw-device --theta 0.01 --seed 1 --n-grid 100 --out " + path("a.csv") + " --plot " +
                path("a.svg")),
            1);
  EXPECT_FALSE(fs::exists(path("a.csv")));
  EXPECT_FALSE(fs::exists(path("a.csv.meta.json")));
  EXPECT_FALSE(fs::exists(path("a.svg")));
  for (const auto& e : fs::directory_iterator(dir_)) {
    const std::string name = e.path().filename().string();
    EXPECT_TRUE(name == "stdout.txt" || name == "stderr.txt") << name;
  }
}

TEST_F(CliTest, DesignRanksFamilies) {
  ASSERT_EQ(run("design --out " + path("design.csv")), 0) << stderr_text();
  std::istringstream lines(slurp(path("design.csv")));
  std::string l;
  int rows = 0;
  std::string winner_line;
  while (std::getline(lines, l)) {
    if (l.empty() || l[0] == '#') continue;
    if (l.rfind("subset", 0) == 0) continue;
    if (rows == 0) winner_line = l;
    ++rows;
  }
  EXPECT_EQ(rows, 35);
  EXPECT_EQ(winner_line.rfind("4567,", 0), 0u) << winner_line;
}

TEST_F(CliTest, FisherReport) {
  ASSERT_EQ(run("fisher --out " + path("fisher.json")), 0) << stderr_text();
  const auto j = nlohmann::json::parse(slurp(path("fisher.json")));
  EXPECT_FALSE(j.empty());
  EXPECT_NE(stdout_text().find("0.627"), std::string::npos);
}

TEST_F(CliTest, FitAndReportConsumeSweepTable) {
  ASSERT_EQ(run("simulate --theta 0.01 --n-grid 100,1000,10000 --reps 5 --seed 2 --out " + path("a.csv")), 0);
  ASSERT_EQ(run("fit --in " + path("a.csv") + " --out " + path("fit.json")), 0) << stderr_text();
  const auto meta = nlohmann::json::parse(slurp(path("fit.json")));
  EXPECT_EQ(meta.at("seed").get<std::uint64_t>(), 2u);
  const auto& fit = meta.at("fit");
  EXPECT_GT(fit.at("coefficient").get<double>(), 0.0);
  EXPECT_LT(fit.at("exponent").get<double>(), -0.5);
  ASSERT_EQ(run("report --in " + path("a.csv") + " --out " + path("r.csv") + " --plot " + path("r.svg")), 0)
      << stderr_text();
  EXPECT_TRUE(fs::exists(path("r.csv")));
  EXPECT_TRUE(fs::exists(path("r.svg")));
}

}  // namespace

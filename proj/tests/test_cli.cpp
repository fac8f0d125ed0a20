#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

const std::string kBin = POVKIT_BIN;
const std::string kData = POVKIT_DATA;

struct Result {
  int code;
  std::string out;
};

Result povkit(const std::string& args, const fs::path& dir) {
  const auto log = dir / "stdout.txt";
  const std::string cmd = "\"" + kBin + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("povkit_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string data(const std::string& name) const { return "\"" + kData + "/" + name + "\""; }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, HelpListsExitCodes) {
  const auto r = povkit("--help", dir_);
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("24 DegenerateColumn"), std::string::npos);
  EXPECT_NE(r.out.find("POVKIT_SEED"), std::string::npos);
}

TEST_F(Cli, UsageErrorIsOne) {
  EXPECT_EQ(povkit("regress --dep d_headcount", dir_).code, 1);
  EXPECT_EQ(povkit("no-such-command", dir_).code, 1);
}

TEST_F(Cli, IngestThenRegress) {
  const auto merged = dir_ / "merged";
  auto r = povkit("ingest --fas " + data("fas.csv") + " --povcal " + data("povcal.csv") + " --weo " + data("weo.csv") +
                      " --findex " + data("findex.csv") + " --population " + data("population.csv") +
                      " --income_class " + data("income_class.csv") + " --out-dir \"" + merged.string() + "\"",
                  dir_);
  ASSERT_EQ(r.code, 0) << r.out;
  ASSERT_TRUE(fs::exists(merged / "merged.csv"));

  const auto reg = dir_ / "reg";
  r = povkit("regress --panel \"" + (merged / "merged.csv").string() +
                 "\" --dep d_headcount --x d_gini,gdp_growth,d_fii --interact d_gini:d_fii --layout table3 --out-dir \"" +
                 reg.string() + "\"",
             dir_);
  ASSERT_EQ(r.code, 0) << r.out;
  const auto text = slurp(reg / "regression.txt");
  EXPECT_NE(text.find("Observations"), std::string::npos);
  EXPECT_NE(text.find("Country fixed effects"), std::string::npos);
  EXPECT_TRUE(fs::exists(reg / "regression.csv"));
  EXPECT_TRUE(fs::exists(reg / "marginal_effects.csv"));
}

TEST_F(Cli, DecomposeIdenticalSamplesIsZero) {
  const auto r = povkit("decompose --initial " + data("sample_initial.csv") + " --final " + data("sample_initial.csv"), dir_);
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("headcount,1.9,0,0,0,0"), std::string::npos) << r.out;
}

TEST_F(Cli, ConstantIndicatorIsDegenerateColumn) {
  std::ofstream f(dir_ / "fas.csv");
  f << "iso3,country_name,year,branches_per_100k,atms_per_100k,branches_per_1000km2,atms_per_1000km2,accounts_per_1000\n";
  for (int i = 0; i < 6; ++i)
    f << (i < 3 ? "AAA,A," : "BBB,B,") << 2010 + i % 3 << "," << 1 + i << ",5," << 2 * i + 1 << "," << i * i + 1 << ","
      << 10 + i << "\n";
  f.close();
  const auto r = povkit("index build --fas \"" + (dir_ / "fas.csv").string() + "\"", dir_);
  EXPECT_EQ(r.code, 24) << r.out;
  EXPECT_NE(r.out.find("DegenerateColumn"), std::string::npos);
}

TEST_F(Cli, NonpositiveLine) {
  const auto r = povkit("measures --sample " + data("sample_initial.csv") + " --line 0", dir_);
  EXPECT_EQ(r.code, 19);
}

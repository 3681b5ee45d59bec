#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "percospec/io/csv.hpp"

namespace fs = std::filesystem;
using percospec::io::parse_csv;
using percospec::io::read_csv;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("percospec-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) const {
    const std::string cmd = "cd '" + dir_.string() + "' && PERCOSPEC_CACHE_DIR='" + (dir_ / "cache").string() + "' '" +
                            PERCOSPEC_CLI + "' " + args + " > out.txt 2> err.txt";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  }

  std::string slurp(const std::string& name) const {
    std::ifstream in(dir_ / name, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

  fs::path dir_;
};

}  // namespace

TEST(Csv, QuotingRoundTrip) {
  const auto path = fs::temp_directory_path() / "percospec-csv-roundtrip.csv";
  {
    percospec::io::CsvWriter w(path, {"a", "b,c", "d"});
    w.row({"plain", "has \"quote\"", "line\nbreak"});
    w.row({"", "1.5", "x,y"});
  }
  const auto rows = read_csv(path);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0][1], "b,c");
  EXPECT_EQ(rows[1][1], "has \"quote\"");
  EXPECT_EQ(rows[1][2], "line\nbreak");
  EXPECT_EQ(rows[2][0], "");
  EXPECT_EQ(rows[2][2], "x,y");
  fs::remove(path);
  EXPECT_EQ(percospec::io::csv_field("a\"b"), "\"a\"\"b\"");
  EXPECT_THROW(parse_csv("\"open"), std::runtime_error);
}

TEST_F(Cli, UnknownSubcommandIsUsageError) {
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_NE(slurp("err.txt").find("Usage"), std::string::npos);
  EXPECT_EQ(run(""), 2);
}

TEST_F(Cli, ValidationErrors) {
  write("neg.json", R"({"replicas": -4})");
  EXPECT_EQ(run("arm-prob --config neg.json"), 2);
  write("unknown.json", R"({"radius": 3})");
  EXPECT_EQ(run("arm-prob --config unknown.json"), 2);
  write("broken.json", "{not json");
  EXPECT_EQ(run("arm-prob --config broken.json"), 2);
  EXPECT_EQ(run("arm-prob --config missing.json"), 2);
  EXPECT_EQ(run("sample --replicas 10"), 2);
  EXPECT_EQ(run("noise-curve --model potts"), 2);
  write("frozen.json", R"({"model": "boolean", "dynamics": "frozen"})");
  EXPECT_EQ(run("noise-curve --config frozen.json"), 2);
  write("rs.json", R"({"r": 4, "Rs": [2]})");
  EXPECT_EQ(run("arm-prob --config rs.json"), 2);
  EXPECT_FALSE(fs::exists(dir_ / "arm-prob.csv"));
}

TEST_F(Cli, ArmProbSchemaAndSidecar) {
  write("a4.json", R"({"r": 1, "Rs": [3, 5], "replicas": 200, "seed": 17})");
  ASSERT_EQ(run("arm-prob --config a4.json --out arm.csv"), 0) << slurp("err.txt");
  const auto rows = read_csv(dir_ / "arm.csv");
  ASSERT_EQ(rows.size(), 3u);
  const std::vector<std::string> want{"model", "r", "R", "h", "n", "estimate", "stderr", "seed", "config_hash"};
  EXPECT_EQ(rows[0], want);
  EXPECT_EQ(rows[1][0], "boolean");
  EXPECT_EQ(rows[1][7], "17");
  EXPECT_EQ(rows[1][8], rows[2][8]);
  const auto meta = slurp("arm.json");
  for (const char* key : {"\"seed\": 17", "\"config\"", "\"versions\"", "\"runtime_seconds\"", "\"config_hash\""}) {
    EXPECT_NE(meta.find(key), std::string::npos) << key;
  }
  EXPECT_TRUE(fs::exists(dir_ / "cache" / "alpha.tsv"));
}

TEST_F(Cli, RerunAndThreadsGiveIdenticalRows) {
  write("c.json", R"({"model": "voronoi", "Ls": [3], "replicas": 200})");
  ASSERT_EQ(run("crossing-prob --config c.json --out one.csv --threads 1"), 0);
  ASSERT_EQ(run("crossing-prob --config c.json --out two.csv --threads 3"), 0);
  ASSERT_EQ(run("crossing-prob --config c.json --out three.csv --threads 1"), 0);
  EXPECT_EQ(slurp("one.csv"), slurp("two.csv"));
  EXPECT_EQ(slurp("one.csv"), slurp("three.csv"));
  write("n.json", R"({"L": 4, "ts": [0, 0.1], "replicas": 64, "alpha_replicas": 200})");
  ASSERT_EQ(run("noise-curve --config n.json --out n1.csv --threads 1"), 0);
  ASSERT_EQ(run("noise-curve --config n.json --out n2.csv --threads 2"), 0);
  EXPECT_EQ(slurp("n1.csv"), slurp("n2.csv"));
}

TEST_F(Cli, OverridesChangeHash) {
  ASSERT_EQ(run("sample --L 2 --out a.csv"), 0);
  ASSERT_EQ(run("sample --L 2 --seed 5 --out b.csv"), 0);
  const auto a = read_csv(dir_ / "a.csv"), b = read_csv(dir_ / "b.csv");
  ASSERT_GT(a.size(), 1u);
  ASSERT_GT(b.size(), 1u);
  EXPECT_NE(a[1].back(), b[1].back());
  EXPECT_EQ(b[1][b[1].size() - 2], "5");
}

TEST_F(Cli, CheckModeFailureExitsThree) {
  // 64 replicas cannot reach 5% relative error
  EXPECT_EQ(run("spectral-intensity --L 3 --replicas 64 --out si.csv --check"), 3);
  EXPECT_EQ(run("spectral-intensity --L 3 --replicas 64 --out si.csv"), 0);
  EXPECT_NE(slurp("si.json").find("\"all_checks_passed\": false"), std::string::npos);
}

TEST_F(Cli, HoeffdingCheck) {
  EXPECT_EQ(run("hoeffding-check --n-points 10 --replicas 200"), 0) << slurp("err.txt");
  const auto rows = read_csv(dir_ / "hoeffding-check.csv");
  ASSERT_GT(rows.size(), 10u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][1].find("9 psi2") != std::string::npos) continue;
    EXPECT_EQ(rows[i][4], "true") << rows[i][0] << ": " << rows[i][1];
  }
}

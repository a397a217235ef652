#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(KCGOF_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("kcgof_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenerateThenTestIsDeterministic) {
  ASSERT_EQ(run("generate --problem hgm --n 120 --seed 4 --data " + path("s.csv") + " --model " + path("m.json")).code,
            0);
  for (const char* method : {"kcsd", "fscd", "fscd-opt", "mmd"}) {
    const std::string args = std::string("test --method ") + method + " --data " + path("s.csv") + " --model " +
                             path("m.json") + " --bootstrap 60 --J 2 --steps 20 --seed 9";
    const CliRun a = run(args);
    const CliRun b = run(args);
    ASSERT_EQ(a.code, 0) << a.out;
    EXPECT_EQ(a.out, b.out);
    const auto doc = nlohmann::json::parse(a.out);
    EXPECT_EQ(doc["reject"].get<bool>(), doc["statistic"].get<double>() > doc["threshold"].get<double>());
    EXPECT_EQ(doc["n_used"].get<int>(), std::string(method) == "fscd-opt" ? 84 : 120);
  }
}

TEST_F(Cli, ExperimentFilesAreByteIdentical) {
  const std::string base = "experiment --problem lgm --method kcsd --n-list 40,50 --trials 4 --bootstrap 40 --seed 3";
  ASSERT_EQ(run(base + " --out " + path("a")).code, 0);
  ASSERT_EQ(run(base + " --out " + path("b")).code, 0);
  EXPECT_EQ(slurp(path("a/report.json")), slurp(path("b/report.json")));
  EXPECT_EQ(slurp(path("a/rates.csv")), slurp(path("b/rates.csv")));
  EXPECT_EQ(slurp(path("a/rates.csv")).rfind("n,trials,rejections,rate\n40,4,", 0), 0u);
}

TEST_F(Cli, LandscapeIsByteIdentical) {
  const std::string base = "landscape --problem hgm1d --grid-min -3 --grid-max 3 --grid-points 13 --n 200 --seed 2";
  ASSERT_EQ(run(base + " --out " + path("a.csv")).code, 0);
  ASSERT_EQ(run(base + " --out " + path("b.csv")).code, 0);
  const std::string a = slurp(path("a.csv"));
  EXPECT_EQ(a, slurp(path("b.csv")));
  EXPECT_EQ(a.rfind("v,criterion\n-3,", 0), 0u);
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 14);
}

TEST_F(Cli, OperationalFailuresExitNonzero) {
  EXPECT_NE(run("test --method kcsd --data " + path("missing.csv") + " --model " + path("missing.json")).code, 0);
  EXPECT_NE(run("bogus").code, 0);
  EXPECT_NE(run("experiment --problem nope --out " + path("x")).code, 0);
  {
    std::ofstream(path("m.json")) << R"({"kind":"linear_gaussian","coeffs":[1,2],"noise_var":1})";
    std::ofstream(path("s.csv")) << "x1,y1\n1,2\n3,4\n5,6\n7,8\n";
  }
  const CliRun r = run("test --data " + path("s.csv") + " --model " + path("m.json"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.out.find("x2"), std::string::npos);
}

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_app.hpp"

using maxent::io::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = maxent::cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

class Cli : public ::testing::Test {
 protected:
  fs::path dir;

  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("maxent_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    put("prior.json", R"({"outcomes": ["0", "1"], "probs": [0.5, 0.5]})");
    put("features.json", R"({"names": ["x"], "matrix": [[0, 1]]})");
    put("eq.json", R"({"featureset": {"names": ["x"], "matrix": [[0, 1]]}, "kinds": ["eq"], "targets": [0.8]})");
    put("bad_target.json", R"({"featureset": {"names": ["x"], "matrix": [[0, 1]]}, "kinds": ["eq"], "targets": [1.5]})");
    put("tail.json", R"({"featureset": {"names": ["x"], "matrix": [[0, 1]]}, "kinds": ["ge"], "targets": [0.8]})");
    put("tail9.json", R"({"featureset": {"names": ["x"], "matrix": [[0, 1]]}, "kinds": ["ge"], "targets": [0.9]})");
    put("low.json", R"({"featureset": {"names": ["x"], "matrix": [[0, 1]]}, "kinds": ["le"], "targets": [0.5]})");
    put("counts.json", R"({"counts": [2, 8]})");
    put("edge_counts.json", R"({"counts": [0, 5]})");
    put("samples.txt", "1\n1\n0\n1\n1\n");
    put("data.json", R"({"outcomes": ["0", "1"], "probs": [0.2, 0.8]})");
    put("off_data.json", R"({"outcomes": ["0", "1"], "probs": [0.6, 0.4]})");
    put("model.json",
        R"({"prior": {"outcomes": ["0", "1"], "probs": [0.5, 0.5]}, "features": {"names": ["x"], "matrix": [[0, 1]]}, "lambda": [0.3]})");
  }
  void TearDown() override { fs::remove_all(dir); }

  void put(const std::string& name, const std::string& text) { std::ofstream(dir / name) << text; }
  std::string at(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_F(Cli, HelpAndBadArguments) {
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"project", "--no-such-flag"}).code, 2);
  EXPECT_EQ(run({"--threads", "0", "project", "--constraints", at("eq.json")}).code, 2);
}

TEST_F(Cli, ProjectConverges) {
  const auto r = run({"project", "--prior", at("prior.json"), "--constraints", at("eq.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["result"]["status"], "Converged");
  EXPECT_NEAR(j["result"]["lambda_star"][0].get<double>(), std::log(4.0), 1e-8);
  EXPECT_EQ(j["run"]["command"], "project");
  EXPECT_FALSE(j["run"].contains("threads"));
}

TEST_F(Cli, ProjectInfeasibleAndBadInput) {
  EXPECT_EQ(run({"project", "--constraints", at("bad_target.json")}).code, 3);
  EXPECT_EQ(run({"project", "--constraints", at("missing.json")}).code, 2);
  EXPECT_EQ(run({"project"}).code, 2);
  put("garbled.json", "{\"outcomes\": [\"0\", \"1\"], \"probs\": [0.5, 0.6]}");
  const auto r = run({"project", "--prior", at("garbled.json"), "--constraints", at("eq.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("garbled.json"), std::string::npos);
}

TEST_F(Cli, FitFromHistogramAndSamples) {
  const auto h = run({"fit", "--features", at("features.json"), "--empirical", at("counts.json")});
  ASSERT_EQ(h.code, 0) << h.err;
  const auto j = json::parse(h.out);
  EXPECT_LE(j["total_variation"].get<double>(), 1e-6);
  EXPECT_FALSE(j["boundary"].get<bool>());

  const auto s = run({"fit", "--prior", at("prior.json"), "--features", at("features.json"), "--samples", at("samples.txt")});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_NEAR(json::parse(s.out)["alpha"][0].get<double>(), 0.8, 1e-15);

  EXPECT_EQ(run({"fit", "--features", at("features.json")}).code, 2);
  EXPECT_EQ(run({"fit", "--features", at("features.json"), "--empirical", at("counts.json"), "--samples",
                 at("samples.txt")})
                .code,
            2);
}

TEST_F(Cli, FitOnBoundary) {
  const auto r = run({"fit", "--features", at("features.json"), "--empirical", at("edge_counts.json")});
  EXPECT_EQ(r.code, 4);
  EXPECT_TRUE(json::parse(r.out)["boundary"].get<bool>());
}

TEST_F(Cli, DiagnoseRandomSuite) {
  const auto r = run({"--seed", "5", "diagnose", "--random", "--instances", "6"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["failures"], 0);
  EXPECT_EQ(j["instances"].size(), 6u);
  EXPECT_NE(r.err.find("pythagorean"), std::string::npos);
}

TEST_F(Cli, DiagnoseGivenInstance) {
  const auto ok = run({"diagnose", "--prior", at("prior.json"), "--constraints", at("eq.json"), "--data",
                       at("data.json"), "--model", at("model.json"), "--variational", at("model.json")});
  ASSERT_EQ(ok.code, 0) << ok.err;
  EXPECT_EQ(json::parse(ok.out)["failures"], 0);

  // The identities only hold for data inside the constraint set.
  const auto bad = run({"diagnose", "--prior", at("prior.json"), "--constraints", at("eq.json"), "--data",
                        at("off_data.json"), "--model", at("model.json")});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("error"), std::string::npos);

  EXPECT_EQ(run({"diagnose", "--constraints", at("eq.json")}).code, 2);
}

TEST_F(Cli, SanovExactAndNested) {
  const auto r = run({"sanov", "--constraints", at("tail.json"), "--n", "10", "--nested", at("tail9.json"), "--curve",
                      "10,20", "--curve-output", at("curve.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["report"]["prob"].get<double>(), 56.0 / 1024.0, 1e-12);
  EXPECT_NEAR(j["nested"]["lhs"].get<double>(), std::log(11.0 / 56.0), 1e-10);
  EXPECT_EQ(j["curve"].size(), 2u);
  EXPECT_TRUE(fs::exists(dir / "curve.csv"));
  EXPECT_EQ(run({"sanov", "--constraints", at("bad_target.json"), "--n", "10"}).code, 3);
  EXPECT_EQ(run({"sanov", "--constraints", at("tail.json"), "--n", "10", "--nested", at("low.json")}).code, 2);
}

TEST_F(Cli, SanovMonteCarlo) {
  const auto r = run({"--seed", "3", "sanov", "--constraints", at("tail.json"), "--n", "10", "--monte-carlo",
                      "--trials", "20000"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rep = json::parse(r.out)["report"];
  EXPECT_EQ(rep["method"], "MonteCarlo");
  EXPECT_NEAR(rep["prob"].get<double>(), 56.0 / 1024.0, 0.01);
}

TEST_F(Cli, EntropyApproxCsv) {
  const auto r = run({"entropy-approx", "--alphabet-size", "20", "--n", "100..400", "--trials", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::size_t count = 0;
  while (std::getline(lines, line)) ++count;
  EXPECT_EQ(count, 1u + 3u * 3u);
  EXPECT_EQ(run({"entropy-approx", "--prior", "gaussian"}).code, 2);
  EXPECT_EQ(run({"entropy-approx", "--n", "10,x"}).code, 2);
}

TEST_F(Cli, ConfigFileDefaultsAndFlagPrecedence) {
  put("config.json", R"({"seed": 9, "constraints": ")" + at("eq.json") + R"(", "solver": {"max_iter": 77}})");
  const auto a = run({"--config", at("config.json"), "project"});
  ASSERT_EQ(a.code, 0) << a.err;
  auto j = json::parse(a.out);
  EXPECT_EQ(j["run"]["seed"], 9);
  EXPECT_EQ(j["run"]["solver"]["max_iter"], 77);
  const auto b = run({"--config", at("config.json"), "--seed", "4", "project", "--max-iter", "12"});
  j = json::parse(b.out);
  EXPECT_EQ(j["run"]["seed"], 4);
  EXPECT_EQ(j["run"]["solver"]["max_iter"], 12);
  put("bad_config.json", R"({"solver": {"tolerance": 1}})");
  EXPECT_EQ(run({"--config", at("bad_config.json"), "project", "--constraints", at("eq.json")}).code, 2);
}

TEST_F(Cli, OutputFileIsWrittenWhole) {
  const auto path = dir / "out.json";
  const auto r = run({"--output", path.string(), "project", "--constraints", at("eq.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_FALSE(fs::exists(dir / "out.json.tmp"));
  EXPECT_EQ(json::parse(slurp(path))["result"]["status"], "Converged");
  EXPECT_EQ(run({"--output", (dir / "no/such/dir/out.json").string(), "project", "--constraints", at("eq.json")}).code,
            2);
}

TEST_F(Cli, OutputsDoNotDependOnThreads) {
  const std::vector<std::vector<std::string>> commands{
      {"entropy-approx", "--alphabet-size", "30", "--n", "200,400", "--trials", "4"},
      {"project", "--constraints", at("eq.json")},
      {"fit", "--features", at("features.json"), "--empirical", at("counts.json")},
      {"diagnose", "--random", "--instances", "8"},
      {"sanov", "--constraints", at("tail.json"), "--n", "10", "--curve", "10,20"},
      {"sanov", "--constraints", at("tail.json"), "--n", "10", "--monte-carlo", "--trials", "50000"}};
  for (const auto& cmd : commands) {
    std::vector<std::string> one{"--seed", "21", "--threads", "1"}, eight{"--seed", "21", "--threads", "8"};
    one.insert(one.end(), cmd.begin(), cmd.end());
    eight.insert(eight.end(), cmd.begin(), cmd.end());
    const auto a = run(one), b = run(eight);
    EXPECT_EQ(a.code, b.code) << cmd[0];
    EXPECT_EQ(a.out, b.out) << cmd[0];
  }
}

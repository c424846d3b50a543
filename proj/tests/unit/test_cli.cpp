#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace caravan::cli {
namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

TEST(Cli, VerifyLambPasses) {
  const Outcome r = run({"verify", "--suite", "lamb", "--instances", "20", "--seed", "7", "--format", "json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const nlohmann::json j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["pass"].get<bool>());
}

TEST(Cli, MomentAtZeroIsOne) {
  const Outcome r = run({"moment", "--alpha", "1.5", "--t", "0", "--replicas", "50"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream in(r.out);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "alpha,t,mc_estimate,mc_se,quadrature");
  EXPECT_EQ(row.rfind("1.5,0,1,0,1", 0), 0u) << row;
}

TEST(Cli, ParkQuarterCsv) {
  const Outcome r = run({"park", "--law", "deterministic:1", "--eps", "0.25", "--seed", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("step,block_rank,block_start,block_length\n", 0), 0u);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  std::size_t max_step = 0;
  while (std::getline(in, line)) max_step = std::max<std::size_t>(max_step, std::stoul(line.substr(0, line.find(','))));
  EXPECT_EQ(max_step, 4u);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({"park", "--bogus", "1", "--seed", "1"}).code, kExitUsage);
  const Outcome r = run({"park", "--law", "deterministic:1"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("--seed is required"), std::string::npos);
  EXPECT_EQ(run({"park", "--law", "weibull:2", "--seed", "1"}).code, kExitUsage);
  EXPECT_EQ(run({}).code, kExitUsage);
}

TEST(Cli, ConfigFileFillsMissingFlags) {
  const auto path = std::filesystem::temp_directory_path() / "caravan_cli_config_test.json";
  {
    std::ofstream f(path);
    f << R"({"law": "deterministic:1", "eps": 0.5, "seed": 3})";
  }
  const Outcome a = run({"park", "--config", path.string()});
  const Outcome b = run({"park", "--law", "deterministic:1", "--eps", "0.5", "--seed", "3"});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  // command line wins over the file
  const Outcome c = run({"park", "--config", path.string(), "--eps", "0.25"});
  const Outcome d = run({"park", "--law", "deterministic:1", "--eps", "0.25", "--seed", "3"});
  EXPECT_EQ(c.out, d.out);
  std::filesystem::remove(path);
  EXPECT_EQ(run({"park", "--config", path.string()}).code, kExitUsage);
}

TEST(Cli, RepeatRunsAreByteIdentical) {
  const std::vector<std::string> args{"limit", "--law", "exponential:1", "--grid", "1024", "--replicas", "3",
                                      "--seed", "5", "--t", "0.5,1"};
  const Outcome a = run(args);
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, run(args).out);
}

TEST(Cli, HelpExitsCleanly) {
  EXPECT_EQ(run({"--help"}).code, kExitOk);
}

}  // namespace
}  // namespace caravan::cli

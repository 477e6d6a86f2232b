#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

const std::string kData = BNMF_TEST_DATA_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "bnmf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = bnmf::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(CliDetect, RepeatedRunsWriteIdenticalFiles) {
  const std::string dir = ::testing::TempDir();
  const std::string a = dir + "/toy_a.json", b = dir + "/toy_b.json";
  ASSERT_EQ(invoke({"detect", kData + "/toy.edges", "--seed", "7", "-o", a}).code, 0);
  ASSERT_EQ(invoke({"detect", kData + "/toy.edges", "--seed", "7", "-o", b}).code, 0);
  const std::string first = slurp(a);
  EXPECT_FALSE(first.empty());
  EXPECT_EQ(first, slurp(b));

  const json doc = json::parse(first);
  EXPECT_EQ(doc.at("meta").at("seed").get<int>(), 7);
  ASSERT_EQ(doc.at("nodes").size(), 9u);
  EXPECT_EQ(doc.at("nodes")[0].at("id").get<int>(), 10);
  for (const auto& node : doc.at("nodes")) {
    double total = 0.0;
    for (const auto& p : node.at("pi")) total += p.get<double>();
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(CliDetect, TwoCliquesWithRestarts) {
  const Outcome o = invoke({"detect", kData + "/two_cliques.edges", "--restarts", "20", "-o", "-"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json doc = json::parse(o.out);
  EXPECT_EQ(doc.at("k_effective").get<int>(), 2);
  EXPECT_NEAR(doc.at("modularity").get<double>(), 0.5, 1e-9);
}

TEST(CliDetect, MissingFileIsInputError) {
  const Outcome o = invoke({"detect", kData + "/nope.edges", "-o", "-"});
  EXPECT_EQ(o.code, bnmf::cli::kExitInput);
  EXPECT_NE(o.err.find("kind=io"), std::string::npos);
  EXPECT_TRUE(o.out.empty());
}

TEST(CliDetect, MalformedFileReportsLine) {
  const std::string path = ::testing::TempDir() + "/bad.edges";
  std::ofstream(path) << "0 1\n1 two\n";
  const Outcome o = invoke({"detect", path, "-o", "-"});
  EXPECT_EQ(o.code, bnmf::cli::kExitInput);
  EXPECT_NE(o.err.find("kind=parse"), std::string::npos);
  EXPECT_NE(o.err.find("line 2"), std::string::npos) << o.err;
}

TEST(CliDetect, OverflowIsNumericalError) {
  const std::string path = ::testing::TempDir() + "/huge.edges";
  std::ofstream(path) << "0 1 1e308\n1 2 1e308\n";
  const Outcome o = invoke({"detect", path, "-o", "-"});
  EXPECT_EQ(o.code, bnmf::cli::kExitNumerical);
  EXPECT_NE(o.err.find("kind=numerical"), std::string::npos);
  EXPECT_NE(o.err.find("seed="), std::string::npos);
}

TEST(CliBenchNg, SmallSweepIsDeterministic) {
  const std::vector<std::string> args{"bench", "ng", "--kout", "0,2,4", "--realizations", "5",
                                      "--seed", "1", "--no-timing", "-o", "-"};
  const Outcome a = invoke(args);
  const Outcome b = invoke(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const json doc = json::parse(a.out);
  EXPECT_EQ(doc.at("aggregates").at("grid").size(), 3u);
  EXPECT_EQ(doc.at("runs").size(), 15u);
}

TEST(CliBenchNg, CsvHasOneRowPerRun) {
  const Outcome o = invoke({"bench", "ng", "--kout", "0", "--realizations", "2", "--n", "32",
                            "--c", "2", "--k-mean", "6", "--format", "csv", "-o", "-"});
  ASSERT_EQ(o.code, 0) << o.err;
  std::size_t lines = 0;
  for (char ch : o.out) lines += ch == '\n' ? 1 : 0;
  EXPECT_EQ(lines, 3u);
}

TEST(CliBenchNg, KoutAboveMeanDegreeRejected) {
  const Outcome o = invoke({"bench", "ng", "--kout", "99", "--realizations", "1", "-o", "-"});
  EXPECT_EQ(o.code, bnmf::cli::kExitInput);
  EXPECT_NE(o.err.find("kind=parameter"), std::string::npos);
}

TEST(CliBenchRestarts, ReportsNmiAgainstPartition) {
  const Outcome o = invoke({"bench", "restarts", kData + "/two_cliques_bridge.edges", "--partition",
                            kData + "/bridge.part", "--runs", "5", "--no-timing", "-o", "-"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json doc = json::parse(o.out);
  EXPECT_EQ(doc.at("runs").size(), 5u);
  EXPECT_TRUE(doc.at("aggregates").contains("nmi_mean"));
}

TEST(CliMetrics, NmiOfPartitionWithItself) {
  const Outcome o = invoke({"metrics", "nmi", kData + "/bridge.part", kData + "/bridge.part"});
  EXPECT_EQ(o.code, 0);
  EXPECT_EQ(o.out, "1.000000\n");
}

TEST(CliMetrics, ModularityOfBridgedCliques) {
  const Outcome o =
      invoke({"metrics", "modularity", kData + "/two_cliques_bridge.edges", kData + "/bridge.part"});
  EXPECT_EQ(o.code, 0);
  EXPECT_EQ(o.out, "0.357143\n");
}

TEST(CliMetrics, MissingPartitionFile) {
  const Outcome o = invoke({"metrics", "nmi", kData + "/bridge.part", kData + "/missing.part"});
  EXPECT_EQ(o.code, bnmf::cli::kExitInput);
}

TEST(Cli, UnknownFlagIsInputError) {
  EXPECT_EQ(invoke({"detect", "--bogus"}).code, bnmf::cli::kExitInput);
}

}  // namespace

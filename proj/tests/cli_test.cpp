#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "fixtures.hpp"
#include "fmit/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome fmitRun(std::vector<std::string> args, const std::string& input = {}) {
  std::istringstream in(input);
  std::ostringstream out;
  std::ostringstream err;
  Outcome o;
  o.code = fmit::cli::run(args, in, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    ::unsetenv("FMIT_THRESHOLD");
    dir_ = fs::temp_directory_path() / ("fmit_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override {
    ::unsetenv("FMIT_THRESHOLD");
    fs::remove_all(dir_);
  }

  std::string tmp(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& content) const {
    std::ofstream(tmp(name), std::ios::binary) << content;
    return tmp(name);
  }

  const std::string R = fixtures::samplePath("integration_R.xml");
  const std::string C = fixtures::samplePath("integration_C.xml");
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, CompareJsonMatchesLibrary) {
  const auto o = fmitRun({"compare", R, C, "--json"});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto j = fmit::Json::parse(o.out);
  const auto r = fmit::computeCee(fixtures::loadSample("integration_R.xml"), fixtures::loadSample("integration_C.xml"));
  EXPECT_EQ(j["cee"].get<double>(), fmit::round4(r.cee));
  EXPECT_EQ(j["mode"], "semi-automatic");
  ASSERT_EQ(j["conflicts"].size(), 2u);
  EXPECT_EQ(j["conflicts"][0]["kind"], "relationship_kind");
  EXPECT_EQ(j["conflicts"][1]["kind"], "structural");
}

TEST_F(Cli, CompareTextAndReportFile) {
  const std::string report = tmp("r.txt");
  const auto o = fmitRun({"compare", R, C, "--report", report});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("FMI – Cálculo de Equivalência Global: "), std::string::npos);
  const std::string saved = fixtures::readFile(report);
  const auto untilTimestamp = [](const std::string& s) { return s.substr(0, s.find("FMI – Gerado em")); };
  EXPECT_EQ(untilTimestamp(saved), untilTimestamp(o.out));
  EXPECT_NE(saved.find("FMI – Gerado em"), std::string::npos);
}

TEST_F(Cli, ThresholdFlagChangesMode) {
  auto o = fmitRun({"compare", R, C, "--json", "--threshold", "0.3"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(fmit::Json::parse(o.out)["mode"], "automatic");
  EXPECT_EQ(fmitRun({"compare", R, C, "--threshold", "0"}).code, 2);
  EXPECT_EQ(fmitRun({"compare", R, C, "--threshold", "1.5"}).code, 2);
  EXPECT_EQ(fmitRun({"compare", R, C, "--tau", "-1"}).code, 2);
}

TEST_F(Cli, EnvironmentThreshold) {
  ::setenv("FMIT_THRESHOLD", "0.3", 1);
  EXPECT_EQ(fmit::Json::parse(fmitRun({"compare", R, C, "--json"}).out)["mode"], "automatic");
  // The flag wins over the environment.
  EXPECT_EQ(fmit::Json::parse(fmitRun({"compare", R, C, "--json", "--threshold", "0.95"}).out)["mode"],
            "semi-automatic");
  ::setenv("FMIT_THRESHOLD", "abc", 1);
  auto o = fmitRun({"compare", R, C});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("FMIT_THRESHOLD"), std::string::npos);
  ::setenv("FMIT_THRESHOLD", "0", 1);
  EXPECT_EQ(fmitRun({"compare", R, C}).code, 2);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(fmitRun({}).code, 2);
  EXPECT_EQ(fmitRun({"frobnicate"}).code, 2);
  EXPECT_EQ(fmitRun({"compare", R}).code, 2);
  EXPECT_EQ(fmitRun({"merge", R, C, "--mode", "sideways"}).code, 2);
  EXPECT_EQ(fmitRun({"merge", R, C, "--mode", "auto", "--decisions", "x"}).code, 2);
  EXPECT_EQ(fmitRun({"--help"}).code, 0);
}

TEST_F(Cli, MissingOrInvalidInputFails) {
  auto o = fmitRun({"compare", tmp("nope.xml"), C});
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find("cannot read"), std::string::npos);
  const std::string bad = write("bad.xml", "<featureModel><struct>");
  o = fmitRun({"compare", bad, C});
  EXPECT_EQ(o.code, 1);
  EXPECT_EQ(fmitRun({"validate", bad}).code, 1);
  EXPECT_EQ(fmitRun({"validate", R}).code, 0);
}

TEST_F(Cli, MergeAutoWritesFourStrategies) {
  const auto o = fmitRun({"merge", R, C, "--mode", "auto", "--out", tmp("integration")});
  ASSERT_EQ(o.code, 0) << o.err;
  for (const char* s : {"additional", "formal", "partial", "complementary"}) {
    const std::string path = tmp(std::string("integration_") + s + ".xml");
    ASSERT_TRUE(fs::exists(path)) << path;
    EXPECT_EQ(fixtures::readFile(path), fixtures::readFile(std::string(FMIT_GOLDEN_DIR) + "/integration_" + s + ".xml"));
  }
  EXPECT_NE(o.out.find("FMI – Estratégia Formal-Intersecção: [MF, B, D]"), std::string::npos);
}

TEST_F(Cli, MergeSingleStrategyToStdout) {
  const auto o = fmitRun({"merge", R, C, "--mode", "auto", "--strategy", "formal"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.out, fixtures::readFile(std::string(FMIT_GOLDEN_DIR) + "/integration_formal.xml"));
  EXPECT_EQ(fmitRun({"merge", R, C, "--mode", "auto", "--strategy", "null"}).code, 1);
}

TEST_F(Cli, MergeSemiWithDecisionsFile) {
  const std::string decisions = write("d.txt", "# relationship kind of B\n1 keep_other\n");
  const std::string out = tmp("merged.xml");
  const auto o = fmitRun({"merge", R, C, "--mode", "semi", "--decisions", decisions, "--out", out});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto merged = fmit::parseXml(fixtures::readFile(out), "merged");
  ASSERT_TRUE(merged.ok());
  const auto& m = *merged.model;
  EXPECT_EQ(m.at(*m.findByName("B")).kind, fmit::RelationshipKind::Optional);
  EXPECT_NE(o.out.find("FMI – Modelo de Feature Pretendido: "), std::string::npos);
  EXPECT_NE(o.out.find("FMI – Grau de Equivalência: "), std::string::npos);
  EXPECT_NE(o.out.find("#1 relationship_kind B: mandatory | optional -> keep_other"), std::string::npos);
}

TEST_F(Cli, MergeSemiRejectsIncompleteOrBadDecisions) {
  auto o = fmitRun({"merge", R, C, "--mode", "semi", "--decisions", write("empty.txt", "\n")});
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find("no decision for conflict #1"), std::string::npos);
  o = fmitRun({"merge", R, C, "--mode", "semi", "--decisions", write("s.txt", "1 keep_base\n2 keep_base\n")});
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find("structural"), std::string::npos);
  o = fmitRun({"merge", R, C, "--mode", "semi", "--decisions", write("g.txt", "1 maybe\n")});
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find("g.txt:1"), std::string::npos);
}

TEST_F(Cli, InteractivePromptRepeatsOnInvalidAnswer) {
  const auto o = fmitRun({"merge", R, C, "--mode", "semi"}, "x\n\nb\n");
  ASSERT_EQ(o.code, 0) << o.err;
  const std::string ask = "Keep the base value (b) or the other value (o)? ";
  std::size_t asks = 0;
  for (auto p = o.out.find(ask); p != std::string::npos; p = o.out.find(ask, p + 1)) ++asks;
  EXPECT_EQ(asks, 3u);
  std::size_t invalid = 0;
  for (auto p = o.out.find("Invalid choice, answer b or o."); p != std::string::npos;
       p = o.out.find("Invalid choice", p + 1))
    ++invalid;
  EXPECT_EQ(invalid, 2u);
  EXPECT_NE(o.out.find("<featureModel>"), std::string::npos);
  EXPECT_NE(o.out.find("-> keep_base"), std::string::npos);
}

TEST_F(Cli, InteractiveInputEndingEarlyFails) {
  const auto o = fmitRun({"merge", R, C, "--mode", "semi"}, "");
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find("input ended"), std::string::npos);
}

TEST_F(Cli, MergeDefaultsToRecommendedMode) {
  const std::string m = fixtures::samplePath("scenarios/scenario1_R.xml");
  const auto o = fmitRun({"merge", m, m, "--out", tmp("same")});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("recommended mode: auto"), std::string::npos);
  EXPECT_TRUE(fs::exists(tmp("same_additional.xml")));
}

TEST_F(Cli, Enumerate) {
  const std::string small = write("s.xml", fmit::serializeXml(fixtures::syntacticBase()));
  auto o = fmitRun({"enumerate", small});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.out, "configurations: 2\n[Ligação]\n[Ligação, fone]\n");
  o = fmitRun({"enumerate", small, "--max", "1"});
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find("--max"), std::string::npos);
}

TEST_F(Cli, BenchListsEveryScenario) {
  const auto o = fmitRun({"bench", "--scenarios", fixtures::samplePath("scenarios")});
  ASSERT_EQ(o.code, 0) << o.err;
  std::istringstream lines(o.out);
  std::string line;
  std::vector<std::string> got;
  while (std::getline(lines, line)) got.push_back(line.substr(0, line.find(':')));
  EXPECT_EQ(got, (std::vector<std::string>{"scenario1", "scenario2", "scenario3", "scenario4", "scenario5",
                                           "scenario6"}));
}

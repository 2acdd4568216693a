#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "cli_runner.hpp"

using namespace flagtrail;
using namespace flagtrail::testing;
namespace fs = std::filesystem;

namespace {

const fs::path kData = FLAGTRAIL_DATA_DIR;
const std::string kCli = FLAGTRAIL_CLI;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("flagtrail-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) + "-" +
           std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  CommandResult cli(const std::string& args) const { return run_command(shell_quoted(kCli) + " " + args); }

  std::string game_args() const {
    return "--config " + shell_quoted(kData / "demo_game.yaml") + " --secrets " + shell_quoted(kData / "demo_secrets.yaml");
  }

  // Small cohort so the suite stays fast.
  fs::path write_spec(int honest, int pairs, int seed = 5) const {
    auto text = slurp(kData / "demo_cohort.yaml");
    auto set = [&](const std::string& key, int value) {
      const auto at = text.find(key + ":");
      const auto end = text.find('\n', at);
      text.replace(at, end - at, key + ": " + std::to_string(value));
    };
    set("seed", seed);
    set("honest", honest);
    set("colluding_pairs", pairs);
    set("non_downloaders", 2);
    const auto path = dir / "cohort.yaml";
    std::ofstream(path) << text;
    return path;
  }

  fs::path dir;
};

}  // namespace

TEST_F(CliTest, ValidatePublishedDefinition) {
  auto r = cli("validate --config " + shell_quoted(kData / "demo_game.yaml"));
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("ok"), std::string::npos);
  r = cli("validate " + game_args());
  EXPECT_EQ(r.exit_code, 0) << r.output;
}

TEST_F(CliTest, ValidateReportsViolations) {
  auto text = slurp(kData / "demo_game.yaml");
  const auto at = text.find("points: 5");
  text.replace(at, 9, "points: 500");
  std::ofstream(dir / "bad.yaml") << text;
  const auto r = cli("validate --config " + shell_quoted(dir / "bad.yaml"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.output.find("c01"), std::string::npos) << r.output;
}

TEST_F(CliTest, MissingConfigFails) {
  const auto r = cli("validate --config " + shell_quoted(dir / "absent.yaml"));
  EXPECT_NE(r.exit_code, 0);
}

TEST_F(CliTest, SynthThenAnalyzeFindsPlantedIncidents) {
  const auto spec = write_spec(40, 3);
  auto r = cli("synth --spec " + shell_quoted(spec) + " " + game_args() + " --out " + shell_quoted(dir / "synth"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  ASSERT_TRUE(fs::exists(dir / "synth" / "events.jsonl"));
  r = cli("analyze --log " + shell_quoted(dir / "synth" / "events.jsonl") + " " + game_args() + " --marks " +
          shell_quoted(kData / "demo_marks.csv") + " --permutations 500 --out " + shell_quoted(dir / "out"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  for (const char* f : {"incidents.json", "hint_latency.json", "metrics.json", "correlations.json",
                        "vicinity_pairs.csv", "chain_deltas.csv", "hint_latency.csv"}) {
    EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
  }
  auto expected = decode_incident_keys(slurp(dir / "synth" / "ground_truth.jsonl"));
  std::sort(expected.begin(), expected.end());
  EXPECT_FALSE(expected.empty());
  EXPECT_EQ(incident_keys_from_report(slurp(dir / "out" / "incidents.json")), expected);
}

TEST_F(CliTest, AnalyzeIsByteIdenticalOnRerun) {
  const auto spec = write_spec(30, 2);
  ASSERT_EQ(cli("synth --spec " + shell_quoted(spec) + " " + game_args() + " --out " + shell_quoted(dir / "synth")).exit_code, 0);
  const auto events = slurp(dir / "synth" / "events.jsonl");
  ASSERT_EQ(cli("synth --spec " + shell_quoted(spec) + " " + game_args() + " --out " + shell_quoted(dir / "synth2")).exit_code, 0);
  EXPECT_EQ(slurp(dir / "synth2" / "events.jsonl"), events);

  const auto analyze = [&](const std::string& out) {
    return cli("analyze --log " + shell_quoted(dir / "synth" / "events.jsonl") + " " + game_args() + " --marks " +
               shell_quoted(kData / "demo_marks.csv") + " --permutations 300 --out " + shell_quoted(dir / out));
  };
  ASSERT_EQ(analyze("a").exit_code, 0);
  ASSERT_EQ(analyze("b").exit_code, 0);
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    ++files;
    EXPECT_EQ(slurp(entry.path()), slurp(dir / "b" / entry.path().filename())) << entry.path().filename();
  }
  EXPECT_EQ(files, 7u);
}

TEST_F(CliTest, SingleReportSelection) {
  std::ofstream(dir / "empty.jsonl");
  const auto r = cli("analyze --log " + shell_quoted(dir / "empty.jsonl") + " " + game_args() +
                     " --reports hint-latency --out " + shell_quoted(dir / "out"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir / "out")) names.push_back(entry.path().filename().string());
  EXPECT_EQ(names, std::vector<std::string>{"hint_latency.json"});
}

TEST_F(CliTest, EmptyLogGivesValidReports) {
  std::ofstream(dir / "empty.jsonl");
  auto r = cli("analyze --log " + shell_quoted(dir / "empty.jsonl") + " " + game_args() + " --out " + shell_quoted(dir / "out"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  for (const auto& entry : fs::directory_iterator(dir / "out")) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_FALSE(nlohmann::json::parse(slurp(entry.path()), nullptr, false).is_discarded()) << entry.path();
  }
  EXPECT_EQ(nlohmann::json::parse(slurp(dir / "out" / "incidents.json"))["incident_count"], 0);

  r = cli("analyze --log " + shell_quoted(dir / "empty.jsonl") + " " + game_args() + " --format text --out " +
          shell_quoted(dir / "text"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_TRUE(fs::exists(dir / "text" / "incidents.txt"));
}

TEST_F(CliTest, MalformedLogNamesFileAndLine) {
  const auto spec = write_spec(5, 0);
  ASSERT_EQ(cli("synth --spec " + shell_quoted(spec) + " " + game_args() + " --out " + shell_quoted(dir / "synth")).exit_code, 0);
  std::istringstream in(slurp(dir / "synth" / "events.jsonl"));
  std::ofstream bad(dir / "bad.jsonl");
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) bad << (n == 3 ? line.substr(0, line.size() / 2) : line) << "\n";
  bad.close();
  const auto r = cli("analyze --log " + shell_quoted(dir / "bad.jsonl") + " " + game_args() + " --out " + shell_quoted(dir / "out"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.output.find((dir / "bad.jsonl").string() + ":3:"), std::string::npos) << r.output;
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST_F(CliTest, UnknownReportIsRejected) {
  std::ofstream(dir / "empty.jsonl");
  const auto r = cli("analyze --log " + shell_quoted(dir / "empty.jsonl") + " " + game_args() + " --reports nope --out " +
                     shell_quoted(dir / "out"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.output.find("nope"), std::string::npos);
}

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "relaylab/lab/output.hpp"
#include "relaylab/lab/plots.hpp"
#include "relaylab/lab/runner.hpp"
#include "relaylab/lab/scenario.hpp"
#include "relaylab/lab/sweep.hpp"

namespace relaylab::lab {
namespace {

namespace fs = std::filesystem;

fs::path scenario_dir() {
  const char* env = std::getenv("RELAYLAB_SCENARIOS");
  return env ? fs::path(env) : fs::path("scenarios");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string shipped_text() { return slurp(scenario_dir() / "warm_jam_replay.scn"); }

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  if (at == std::string::npos) throw std::runtime_error("fixture text not found: " + from);
  return text.replace(at, from.size(), to);
}

// Shortened attack so a full run fits in a unit test.
Scenario short_run() {
  auto s = parse_scenario(scenario_dir() / "warm_jam_replay.scn");
  s.horizon = 9.0;
  s.script.phases = {{adversary::PhaseKind::Idle, 0.0, 4.0},
                     {adversary::PhaseKind::JamAll, 4.0, 2.0},
                     {adversary::PhaseKind::ReplayL1_JamOthers, 6.0, 3.0}};
  s.monitor.baseline_end = 3.0;
  s.validate();
  return s;
}

std::string error_of(const std::string& text) {
  try {
    parse_scenario_text(text, "case.scn");
  } catch (const ScenarioError& e) {
    return e.what();
  }
  return {};
}

TEST(Scenario, ShippedFilesParse) {
  std::size_t count = 0;
  for (const auto& entry : fs::directory_iterator(scenario_dir())) {
    if (entry.path().extension() != ".scn") continue;
    const auto s = parse_scenario(entry.path());
    EXPECT_FALSE(s.name.empty()) << entry.path();
    EXPECT_EQ(s.name, entry.path().stem().string());
    ++count;
  }
  EXPECT_GE(count, 5u);
}

TEST(Scenario, ShippedValuesAreRead) {
  const auto s = parse_scenario_text(shipped_text());
  EXPECT_EQ(s.seed, 7u);
  EXPECT_EQ(s.horizon, 75.0);
  EXPECT_EQ(s.scene.satellites.size(), 8u);
  EXPECT_EQ(s.link.bandwidth, 49e6);
  EXPECT_EQ(s.link.mode, wire::LinkMode::ReliableStream);
  EXPECT_EQ(s.script.phases.size(), 3u);
  EXPECT_EQ(s.script.phases[2].kind, adversary::PhaseKind::ReplayL1_JamOthers);
  EXPECT_EQ(s.assist, AssistSource::Victim);
  EXPECT_EQ(s.stream.quantization_bits, 16);
}

TEST(Scenario, SerializeRoundTrips) {
  for (const auto& entry : fs::directory_iterator(scenario_dir())) {
    if (entry.path().extension() != ".scn") continue;
    const auto s = parse_scenario(entry.path());
    const auto once = serialize_scenario(s);
    const auto again = serialize_scenario(parse_scenario_text(once, "resolved"));
    EXPECT_EQ(once, again) << entry.path();
  }
}

TEST(Scenario, ThreeSatellitesIsAnError) {
  auto text = shipped_text();
  for (const char* prn : {"prn: 3,", "prn: 7,", "prn: 11,", "prn: 14,", "prn: 19,"}) {
    const auto at = text.find(std::string("    - {") + prn);
    ASSERT_NE(at, std::string::npos);
    text.erase(at, text.find('\n', at) - at + 1);
  }
  const auto msg = error_of(text);
  EXPECT_NE(msg.find("case.scn:"), std::string::npos) << msg;
  EXPECT_NE(msg.find("at least 4"), std::string::npos) << msg;
}

TEST(Scenario, OverlappingPhasesRejected) {
  const auto msg = error_of(replace(shipped_text(), "start: 45, duration: 30", "start: 40, duration: 35"));
  EXPECT_NE(msg.find("script"), std::string::npos) << msg;
}

TEST(Scenario, UnknownKeyReportsLine) {
  const auto text = replace(shipped_text(), "link: {bandwidth: 49e6,", "link: {bandwith: 49e6,");
  std::size_t line = 1;
  for (std::size_t i = 0; i < text.find("bandwith"); ++i) line += text[i] == '\n';
  const auto msg = error_of(text);
  EXPECT_NE(msg.find("case.scn:" + std::to_string(line) + ":"), std::string::npos) << msg;
  EXPECT_NE(msg.find("bandwith"), std::string::npos) << msg;
}

TEST(Scenario, OtherDiagnostics) {
  EXPECT_NE(error_of(replace(shipped_text(), "horizon: 75", "horizon: 60")).find("horizon"), std::string::npos);
  EXPECT_NE(error_of(replace(shipped_text(), "mode: reliable", "mode: carrier-pigeon")).find("link mode"),
            std::string::npos);
  EXPECT_NE(error_of(replace(shipped_text(), "baseline_end: 10", "baseline_end: 20")).find("baseline"),
            std::string::npos);
  EXPECT_NE(error_of("- just\n- a list\n").find("mapping"), std::string::npos);
  EXPECT_NE(error_of("horizon: [unclosed\n").find("case.scn:"), std::string::npos);
  EXPECT_THROW(parse_scenario("/nonexistent/file.scn"), ScenarioError);
}

TEST(Sweep, ParameterPaths) {
  const auto base = parse_scenario_text(shipped_text());
  EXPECT_EQ(with_parameter(base, "link.bandwidth", "11e6").link.bandwidth, 11e6);
  EXPECT_EQ(with_parameter(base, "script.2.duration", "20").script.phases[2].duration, 20.0);
  EXPECT_EQ(with_parameter(base, "seed", "99").seed, 99u);
  EXPECT_NO_THROW(check_parameter_path(base, "forwarder.jitter_buffer"));
  EXPECT_THROW(check_parameter_path(base, "link.bandwith"), ScenarioError);
  EXPECT_THROW(check_parameter_path(base, "script.9.duration"), ScenarioError);
  EXPECT_THROW(check_parameter_path(base, "link"), ScenarioError);
  EXPECT_THROW(with_parameter(base, "link.bandwidth", "-1"), ScenarioError);
}

TEST(Sweep, EmptyValueListRunsNothing) {
  const auto base = parse_scenario_text(shipped_text());
  std::size_t calls = 0;
  const auto rows = sweep(base, "link.bandwidth", {}, {}, [&](const SweepRow&, const RunResult&) { ++calls; });
  EXPECT_TRUE(rows.empty());
  EXPECT_EQ(calls, 0u);
  std::ostringstream csv;
  write_sweep_csv(csv, "link.bandwidth", rows);
  const auto text = csv.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
}

class ShortRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    result_ = new RunResult(run_scenario(short_run()));
    root_ = fs::temp_directory_path() / "relaylab_test_lab";
    fs::remove_all(root_);
  }
  static void TearDownTestSuite() {
    delete result_;
    fs::remove_all(root_);
  }
  static RunResult* result_;
  static fs::path root_;
};

RunResult* ShortRun::result_ = nullptr;
fs::path ShortRun::root_;

TEST_F(ShortRun, AccountingBalances) {
  const auto& r = result_->report;
  EXPECT_EQ(r.frames_captured, r.frames_delivered + r.frames_lost_to_stall + r.frames_dropped_by_link);
  EXPECT_EQ(r.samples_captured, r.samples_delivered + r.samples_lost);
  EXPECT_GT(r.fixes, 0);
  ASSERT_TRUE(r.time_to_first_fix.has_value());
  EXPECT_LT(*r.time_to_first_fix, 4.0);
  EXPECT_FALSE(result_->snapshots.empty());
  ASSERT_TRUE(result_->baseline.has_value());
}

TEST_F(ShortRun, RunDirectoryIsDeterministic) {
  write_run_directory(*result_, root_ / "a", false);
  write_run_directory(*result_, root_ / "b", false);
  for (const auto& entry : fs::directory_iterator(root_ / "a")) {
    EXPECT_EQ(slurp(entry.path()), slurp(root_ / "b" / entry.path().filename())) << entry.path();
  }
  EXPECT_TRUE(fs::exists(root_ / "a" / "manifest.json"));
  EXPECT_TRUE(fs::exists(root_ / "a" / "report.json"));
  EXPECT_EQ(slurp(root_ / "a" / "manifest.json").find("\"created\""), std::string::npos);
}

TEST_F(ShortRun, PlotsAreDeterministic) {
  write_run_directory(*result_, root_ / "p", false);
  const auto first = render_plots(root_ / "p");
  const auto bytes = slurp(root_ / "p" / "plots.json");
  const auto svg = slurp(root_ / "p" / "pvt_error.svg");
  const auto again = render_plots(root_ / "p");
  EXPECT_EQ(first.files, again.files);
  EXPECT_EQ(bytes, slurp(root_ / "p" / "plots.json"));
  EXPECT_EQ(svg, slurp(root_ / "p" / "pvt_error.svg"));
  for (const auto& f : first.files) EXPECT_TRUE(fs::exists(root_ / "p" / f)) << f;
  bool has_clean = false;
  for (const auto& w : first.windows) has_clean |= w.name == "clean";
  EXPECT_TRUE(has_clean);
}

TEST_F(ShortRun, MissingArtifactNamesTheFile) {
  write_run_directory(*result_, root_ / "m", false);
  fs::remove(root_ / "m" / "alarms.csv");
  try {
    render_plots(root_ / "m");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("alarms.csv"), std::string::npos) << e.what();
  }
  EXPECT_THROW(render_plots(root_ / "nowhere"), FormatError);
}

TEST(Runner, CandidateBandsCoverTheStream) {
  const auto s = parse_scenario_text(shipped_text());
  const auto bands = replay_candidate_bands(s);
  ASSERT_FALSE(bands.empty());
  EXPECT_DOUBLE_EQ(bands.front().lo, -s.stream.sample_rate / 2);
  EXPECT_DOUBLE_EQ(bands.front().hi, s.stream.sample_rate / 2);
  for (const auto& b : bands) {
    EXPECT_LT(b.lo, b.hi);
    EXPECT_LE(b.hi - b.lo, s.monitor.sample_rate);
  }
}

}  // namespace
}  // namespace relaylab::lab

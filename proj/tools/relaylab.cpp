// relaylab: run, sweep, plot and validate relay-attack scenarios.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "relaylab/lab/output.hpp"
#include "relaylab/lab/plots.hpp"
#include "relaylab/lab/runner.hpp"
#include "relaylab/lab/scenario.hpp"
#include "relaylab/lab/sweep.hpp"

namespace fs = std::filesystem;
using namespace relaylab;

namespace {

constexpr int kConfigError = 2;
constexpr int kIoError = 3;

// --out wins, then RELAYLAB_OUT, then runs/<name>.
fs::path output_dir(const std::string& flag, const std::string& fallback_name) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("RELAYLAB_OUT"); env && *env) return env;
  return fs::path("runs") / fallback_name;
}

std::string run_name(const lab::Scenario& s, const fs::path& file) {
  return fmt::format("{}-seed{}", s.name.empty() ? file.stem().string() : s.name, s.seed);
}

void print_report(const lab::RunReport& r) {
  auto show = [](const std::optional<double>& v, const char* unit) {
    return v ? fmt::format("{:.1f} {}", *v, unit) : std::string("none");
  };
  std::cout << fmt::format("first fix:        {}\n", show(r.time_to_first_fix, "s"));
  std::cout << fmt::format("capture:          {}\n", show(r.time_to_capture, "s"));
  std::cout << fmt::format("error vs victim:  {}\n", show(r.final_position_error_vs_victim_truth, "m"));
  std::cout << fmt::format("error vs sampler: {}\n", show(r.final_position_error_vs_sampler_truth, "m"));
  std::cout << fmt::format("stall:            {:.2f} s\n", r.stall_seconds);
  std::cout << fmt::format("alarms:           {}\n", r.alarms.size());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GNSS record-and-replay relay lab"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_flag;
  std::optional<std::uint64_t> seed;
  double live_pace = 1.0;
  bool no_plots = false;
  auto* run = app.add_subcommand("run", "Run one scenario and write its run directory");
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out_flag, "Run directory (default $RELAYLAB_OUT or runs/<name>-seed<N>)");
  run->add_option("--live-pace", live_pace, "Live mode: wall seconds per scenario second");
  run->add_flag("--no-plots", no_plots, "Skip rendering plots");

  std::string param;
  std::vector<std::string> values;
  auto* sw = app.add_subcommand("sweep", "Run a scenario once per parameter value");
  sw->add_option("scenario", scenario_path, "Scenario file")->required();
  sw->add_option("--param", param, "Dotted path into the scenario, e.g. link.bandwidth")->required();
  sw->add_option("--values", values, "Comma-separated values")->delimiter(',');
  sw->add_option("--out", out_flag, "Sweep directory");

  std::string plot_dir;
  auto* plot = app.add_subcommand("plot", "Render plots from a run directory");
  plot->add_option("run_dir", plot_dir, "Run directory")->required();

  auto* validate = app.add_subcommand("validate", "Parse and validate a scenario");
  validate->add_option("scenario", scenario_path, "Scenario file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      const auto s = lab::parse_scenario(scenario_path);
      std::cout << lab::serialize_scenario(s);
      return 0;
    }
    if (*plot) {
      const auto summary = lab::render_plots(plot_dir);
      for (const auto& f : summary.files) std::cout << (fs::path(plot_dir) / f).string() << "\n";
      return 0;
    }

    auto s = lab::parse_scenario(scenario_path);
    if (seed) s.seed = *seed;
    lab::RunOptions options;
    options.live_pace = live_pace;

    if (*run) {
      const auto dir = output_dir(out_flag, run_name(s, scenario_path));
      const auto result = lab::run_scenario(s, options);
      lab::write_run_directory(result, dir);
      if (!no_plots && s.monitor.enabled) lab::render_plots(dir);
      print_report(result.report);
      std::cout << "run directory: " << dir.string() << "\n";
      return 0;
    }

    const auto dir = output_dir(out_flag, run_name(s, scenario_path) + "-sweep");
    fs::create_directories(dir);
    std::size_t i = 0;
    const auto rows = lab::sweep(s, param, values, options, [&](const lab::SweepRow& row, const lab::RunResult& r) {
      lab::write_run_directory(r, dir / fmt::format("{:03d}", i++));
      std::cout << fmt::format("{}={}: {}\n", param, row.value, row.report.captured() ? "captured" : "not captured");
    });
    std::ofstream table(dir / "sweep.csv");
    lab::write_sweep_csv(table, param, rows);
    if (!table) throw FormatError(fmt::format("{}: write failed", (dir / "sweep.csv").string()));
    std::cout << "sweep table: " << (dir / "sweep.csv").string() << "\n";
    return 0;
  } catch (const lab::ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  }
}

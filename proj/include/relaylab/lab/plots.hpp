#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace relaylab::lab {

/// Spectrogram columns grouped by what the attacker was doing.
struct PlotWindow {
  std::string name;                 // clean, replay or jam
  std::vector<std::size_t> columns;
  double mean_delta_db = 0.0;       // mean over bins of (window mean - clean mean)
  std::size_t alarm_columns = 0;    // columns that carry an alarm overlay
};

struct PlotSummary {
  std::vector<PlotWindow> windows;
  std::vector<std::string> files;   // written, relative to the run directory
};

/// Reads spectrogram.txt/json, alarms.csv, pvt.csv and truth.json from a run
/// directory and writes heatmap_<window>.ppm for each non-empty window,
/// pvt_error.svg and plots.json. Output bytes depend only on the artifacts.
/// Missing or malformed artifacts raise FormatError naming the file.
PlotSummary render_plots(const std::filesystem::path& run_dir);

}  // namespace relaylab::lab

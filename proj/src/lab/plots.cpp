#include "relaylab/lab/plots.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "relaylab/errors.hpp"

namespace relaylab::lab {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::size_t kMaxRows = 256;
constexpr std::size_t kColumnWidth = 8;
constexpr std::size_t kOverlayRows = 6;

std::ifstream open_artifact(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(fmt::format("{}: missing run artifact", path.string()));
  return in;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double number(const std::string& s, const fs::path& file) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw FormatError(fmt::format("{}: bad number '{}'", file.string(), s));
  }
}

json read_json(const fs::path& path) {
  auto in = open_artifact(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::vector<std::vector<double>> read_matrix(const fs::path& path, std::size_t rows, std::size_t cols) {
  auto in = open_artifact(path);
  std::vector<std::vector<double>> m;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<double> row;
    for (const auto& f : split(line, ' ')) row.push_back(number(f, path));
    if (row.size() != cols) throw FormatError(fmt::format("{}: row {} has {} columns, expected {}", path.string(), m.size() + 1, row.size(), cols));
    m.push_back(std::move(row));
  }
  if (m.size() != rows) throw FormatError(fmt::format("{}: {} rows, expected {}", path.string(), m.size(), rows));
  return m;
}

std::string window_of(const std::string& phase) {
  if (phase == "JamAll" || phase == "RejamPulse") return "jam";
  if (phase == "ReplayL1_JamOthers" || phase == "ReplayOnly") return "replay";
  return "clean";
}

std::array<std::uint8_t, 3> colour(double v) {
  // Dark blue through teal and green to yellow.
  static constexpr std::array<std::array<double, 3>, 5> kStops = {
      {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  v = std::clamp(v, 0.0, 1.0) * (kStops.size() - 1);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(v), kStops.size() - 2);
  const double f = v - static_cast<double>(i);
  std::array<std::uint8_t, 3> c{};
  for (std::size_t k = 0; k < 3; ++k) {
    c[k] = static_cast<std::uint8_t>(std::lround(kStops[i][k] + f * (kStops[i + 1][k] - kStops[i][k])));
  }
  return c;
}

struct Alarm {
  double t;
  std::string kind;
};

std::vector<Alarm> read_alarms(const fs::path& path) {
  auto in = open_artifact(path);
  std::string line;
  std::getline(in, line);
  if (line != "t,kind,score") throw FormatError(fmt::format("{}: unexpected header", path.string()));
  std::vector<Alarm> out;
  while (std::getline(in, line)) {
    const auto f = split(line, ',');
    if (f.size() != 3) throw FormatError(fmt::format("{}: malformed row '{}'", path.string(), line));
    out.push_back({number(f[0], path), f[1]});
  }
  return out;
}

void write_heatmap(const fs::path& path, const std::vector<std::vector<double>>& rows,
                   const std::vector<std::size_t>& cols, const std::vector<int>& overlay, double lo, double hi) {
  const std::size_t width = cols.size() * kColumnWidth;
  const std::size_t height = rows.size();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(fmt::format("{}: cannot write", path.string()));
  out << fmt::format("P6\n{} {}\n255\n", width, height);
  for (std::size_t y = 0; y < height; ++y) {
    // Highest frequency on top.
    const auto& row = rows[height - 1 - y];
    for (std::size_t c = 0; c < cols.size(); ++c) {
      std::array<std::uint8_t, 3> px = colour((row[cols[c]] - lo) / std::max(hi - lo, 1e-9));
      if (y < kOverlayRows && overlay[c] == 1) px = {230, 30, 30};
      if (y < kOverlayRows && overlay[c] == 2) px = {255, 160, 0};
      for (std::size_t k = 0; k < kColumnWidth; ++k) out.write(reinterpret_cast<const char*>(px.data()), 3);
    }
  }
}

void write_error_plot(const fs::path& run_dir, const fs::path& path) {
  const auto truth = read_json(run_dir / "truth.json");
  const auto victim = truth.at("victim").at("ecef").get<std::vector<double>>();
  const auto sampler = truth.at("sampler").at("ecef").get<std::vector<double>>();
  const auto pvt_path = run_dir / "pvt.csv";
  auto in = open_artifact(pvt_path);
  std::string line;
  std::getline(in, line);
  std::vector<std::array<double, 3>> pts;  // t, km to victim, km to sampler
  double t_max = 1.0;
  while (std::getline(in, line)) {
    const auto f = split(line, ',');
    if (f.size() < 5) throw FormatError(fmt::format("{}: malformed row '{}'", pvt_path.string(), line));
    const double t = number(f[0], pvt_path);
    t_max = std::max(t_max, t);
    if (f[1] != "1") continue;
    const std::array<double, 3> p{number(f[2], pvt_path), number(f[3], pvt_path), number(f[4], pvt_path)};
    auto dist = [&](const std::vector<double>& q) {
      return std::hypot(p[0] - q[0], p[1] - q[1], p[2] - q[2]) / 1000.0;
    };
    pts.push_back({t, dist(victim), dist(sampler)});
  }
  double e_max = 1.0;
  for (const auto& p : pts) e_max = std::max({e_max, p[1], p[2]});

  constexpr double kW = 640, kH = 360, kX0 = 60, kY0 = 20, kPw = 560, kPh = 300;
  auto px = [&](double t) { return kX0 + kPw * t / t_max; };
  auto py = [&](double e) { return kY0 + kPh * (1.0 - e / e_max); };
  std::ofstream out(path);
  if (!out) throw FormatError(fmt::format("{}: cannot write", path.string()));
  out << fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\">\n", kW, kH);
  out << fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", kX0, kY0,
                     kPw, kPh);
  out << fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\">time (s), 0 to {:.0f}</text>\n", kX0, kH - 12, t_max);
  out << fmt::format("<text x=\"4\" y=\"{}\" font-size=\"12\">km, 0 to {:.1f}</text>\n", kY0 - 6, e_max);
  const std::array<const char*, 2> colours{"#1f77b4", "#d62728"};
  const std::array<const char*, 2> labels{"error vs victim", "error vs sampler"};
  for (std::size_t k = 0; k < 2; ++k) {
    out << fmt::format("<polyline fill=\"none\" stroke=\"{}\" points=\"", colours[k]);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      out << fmt::format("{}{:.1f},{:.1f}", i ? " " : "", px(pts[i][0]), py(pts[i][k + 1]));
    }
    out << "\"/>\n";
    out << fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{}\">{}</text>\n", kX0 + 10,
                       kY0 + 16 * (k + 1), colours[k], labels[k]);
  }
  out << "</svg>\n";
}

}  // namespace

PlotSummary render_plots(const fs::path& run_dir) {
  if (!fs::is_directory(run_dir)) throw FormatError(fmt::format("{}: not a run directory", run_dir.string()));
  const auto meta = read_json(run_dir / "spectrogram.json");
  std::vector<double> times;
  std::vector<std::string> phases;
  std::size_t nfft = 0;
  try {
    times = meta.at("times").get<std::vector<double>>();
    phases = meta.at("phases").get<std::vector<std::string>>();
    nfft = times.empty() ? 0 : meta.at("nfft").get<std::size_t>();
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("{}: {}", (run_dir / "spectrogram.json").string(), e.what()));
  }
  const auto matrix = read_matrix(run_dir / "spectrogram.txt", nfft, times.size());
  const auto alarms = read_alarms(run_dir / "alarms.csv");

  // Alarm overlay per column: 1 jamming, 2 replay spike (jamming wins).
  std::vector<int> overlay(times.size(), 0);
  for (const auto& a : alarms) {
    for (std::size_t c = 0; c < times.size(); ++c) {
      if (std::abs(times[c] - a.t) > 5e-4) continue;
      if (a.kind == "JammingSuspected") overlay[c] = 1;
      if (a.kind == "ReplaySpikeSuspected" && overlay[c] == 0) overlay[c] = 2;
    }
  }

  // Average groups of adjacent bins down to at most kMaxRows rows.
  const std::size_t group = std::max<std::size_t>(1, nfft / kMaxRows);
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r + group <= nfft; r += group) {
    std::vector<double> row(times.size(), 0.0);
    for (std::size_t k = r; k < r + group; ++k) {
      for (std::size_t c = 0; c < times.size(); ++c) row[c] += matrix[k][c] / static_cast<double>(group);
    }
    rows.push_back(std::move(row));
  }
  double lo = 0.0;
  double hi = 0.0;
  if (!rows.empty() && !times.empty()) {
    lo = hi = rows[0][0];
    for (const auto& row : rows) {
      for (const double v : row) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }

  auto bin_means = [&](const std::vector<std::size_t>& cols) {
    std::vector<double> m(nfft, 0.0);
    for (std::size_t k = 0; k < nfft; ++k) {
      for (const auto c : cols) m[k] += matrix[k][c] / static_cast<double>(cols.size());
    }
    return m;
  };

  PlotSummary summary;
  for (const char* name : {"clean", "replay", "jam"}) {
    PlotWindow w;
    w.name = name;
    for (std::size_t c = 0; c < phases.size(); ++c) {
      if (window_of(phases[c]) == name) w.columns.push_back(c);
    }
    summary.windows.push_back(std::move(w));
  }
  const auto& clean = summary.windows[0];
  const auto clean_mean = clean.columns.empty() ? std::vector<double>{} : bin_means(clean.columns);
  for (auto& w : summary.windows) {
    for (const auto c : w.columns) w.alarm_columns += overlay[c] != 0 ? 1 : 0;
    if (w.columns.empty()) continue;
    if (!clean_mean.empty()) {
      const auto m = bin_means(w.columns);
      double acc = 0.0;
      for (std::size_t k = 0; k < nfft; ++k) acc += m[k] - clean_mean[k];
      w.mean_delta_db = acc / static_cast<double>(nfft);
    }
    std::vector<int> ov;
    for (const auto c : w.columns) ov.push_back(overlay[c]);
    const std::string file = fmt::format("heatmap_{}.ppm", w.name);
    write_heatmap(run_dir / file, rows, w.columns, ov, lo, hi);
    summary.files.push_back(file);
  }

  write_error_plot(run_dir, run_dir / "pvt_error.svg");
  summary.files.emplace_back("pvt_error.svg");

  json windows = json::array();
  for (const auto& w : summary.windows) {
    windows.push_back({{"name", w.name},
                       {"columns", w.columns.size()},
                       {"mean_delta_db", std::round(w.mean_delta_db * 1000.0) / 1000.0},
                       {"alarm_columns", w.alarm_columns}});
  }
  const json sidecar = {{"windows", windows}, {"files", summary.files}, {"colour_range_db", {lo, hi}}};
  std::ofstream out(run_dir / "plots.json");
  if (!out) throw FormatError(fmt::format("{}: cannot write", (run_dir / "plots.json").string()));
  out << sidecar.dump(2) << "\n";
  summary.files.emplace_back("plots.json");
  return summary;
}

}  // namespace relaylab::lab

#include "relaylab/lab/output.hpp"

#include <chrono>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "relaylab/errors.hpp"
#include "relaylab/wire/frame.hpp"

namespace relaylab::lab {
namespace {

using nlohmann::json;

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json ecef(const scene::EcefPosition& p) { return json::array({p.x, p.y, p.z}); }

json geodetic(const scene::EcefPosition& p) {
  const auto g = scene::ecef_to_geodetic(p);
  constexpr double kRad = 180.0 / std::numbers::pi;
  return {{"lat_deg", g.lat_rad * kRad}, {"lon_deg", g.lon_rad * kRad}, {"height_m", g.height_m}};
}

json truth_json(const Scenario& s) {
  json sats = json::array();
  for (const auto& sat : s.scene.satellites) {
    sats.push_back({{"prn", sat.prn_id},
                    {"position_t0", ecef(sat.position_at(0.0))},
                    {"visible_from_victim", scene::is_visible(sat, s.scene.victim_location)},
                    {"visible_from_sampler", scene::is_visible(sat, s.scene.sampler_location)}});
  }
  return {{"victim", {{"ecef", ecef(s.scene.victim_location)}, {"geodetic", geodetic(s.scene.victim_location)}}},
          {"sampler", {{"ecef", ecef(s.scene.sampler_location)}, {"geodetic", geodetic(s.scene.sampler_location)}}},
          {"separation_m", (s.scene.victim_location - s.scene.sampler_location).norm()},
          {"satellites", sats}};
}

void write_transitions(std::ostream& os, const std::vector<receiver::StateTransition>& log) {
  os << "t,prn,band,from,to,lock_timer\n";
  for (const auto& r : log) {
    os << fmt::format("{:.6f},{},{},{},{},{:.3f}\n", r.t, r.prn_id, to_string(r.band), receiver::to_string(r.from),
                      receiver::to_string(r.to), r.lock_timer);
  }
}

void write_acquisitions(std::ostream& os, const std::vector<receiver::AcquisitionEvent>& log) {
  os << "t,band,prn,code_phase,doppler,metric\n";
  for (const auto& a : log) {
    os << fmt::format("{:.3f},{},{},{:.4f},{:.1f},{:.3f}\n", a.t, to_string(a.band), a.result.prn_id,
                      a.result.code_phase, a.result.doppler, a.result.peak_metric);
  }
}

void write_alarms(std::ostream& os, const std::vector<spectral::SpectralAlarm>& alarms) {
  os << "t,kind,score\n";
  for (const auto& a : alarms) os << fmt::format("{:.3f},{},{:.3f}\n", a.t, spectral::to_string(a.kind), a.score);
}

void write_monitor(std::ostream& os, const std::vector<MonitorSnapshot>& snaps) {
  os << "t,phase,baseline,jamming_score,replay_contrast\n";
  for (const auto& s : snaps) {
    os << fmt::format("{:.3f},{},{},{:.3f},{:.3f}\n", s.t, adversary::to_string(s.phase), int(s.baseline),
                      s.jamming_score, s.replay_contrast);
  }
}

template <typename F>
void write_file(const std::filesystem::path& path, F&& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(fmt::format("{}: cannot write", path.string()));
  body(out);
  if (!out) throw FormatError(fmt::format("{}: write failed", path.string()));
}

}  // namespace

void write_report_json(std::ostream& os, const RunReport& r) {
  json alarms = json::array();
  for (const auto& a : r.alarms) {
    alarms.push_back({{"t", a.t}, {"kind", spectral::to_string(a.kind)}, {"score", a.score}});
  }
  const json j = {
      {"scenario", r.scenario},
      {"seed", r.seed},
      {"horizon", r.horizon},
      {"captured", r.captured()},
      {"time_to_first_fix", opt(r.time_to_first_fix)},
      {"time_to_capture", opt(r.time_to_capture)},
      {"final_fix_time", opt(r.final_fix_time)},
      {"final_position_error_vs_victim_truth", opt(r.final_position_error_vs_victim_truth)},
      {"final_position_error_vs_sampler_truth", opt(r.final_position_error_vs_sampler_truth)},
      {"fixes", r.fixes},
      {"stall_seconds", r.stall_seconds},
      {"alarms", alarms},
      {"frames",
       {{"captured", r.frames_captured},
        {"delivered", r.frames_delivered},
        {"lost_to_stall", r.frames_lost_to_stall},
        {"dropped_by_link", r.frames_dropped_by_link},
        {"in_flight_at_horizon", r.frames_in_flight}}},
      {"samples",
       {{"captured", r.samples_captured}, {"delivered", r.samples_delivered}, {"lost", r.samples_lost}}},
      {"replay_gap_seconds", r.replay_gap_seconds},
      {"longest_replay_gap", r.longest_replay_gap},
  };
  os << j.dump(2) << "\n";
}

void write_spectrogram(std::ostream& matrix, std::ostream& sidecar, const RunResult& result) {
  const auto& snaps = result.snapshots;
  json times = json::array();
  json phases = json::array();
  for (const auto& s : snaps) {
    times.push_back(s.t);
    phases.push_back(adversary::to_string(s.phase));
  }
  json meta = {{"rows", "frequency"},
               {"columns", "time"},
               {"units", "dB re 1/Hz"},
               {"window", "hann"},
               {"times", times},
               {"phases", phases},
               {"snapshot_s", result.scenario.monitor.snapshot_s},
               {"baseline_end", result.scenario.monitor.baseline_end}};
  if (!snaps.empty()) {
    const auto& ps = snaps.front().spectrum;
    meta["nfft"] = ps.nfft;
    meta["sample_rate"] = ps.sample_rate;
    meta["freq_first_hz"] = ps.freqs.front();
    meta["freq_step_hz"] = ps.bin_width();
    for (std::size_t k = 0; k < ps.nfft; ++k) {
      for (std::size_t c = 0; c < snaps.size(); ++c) {
        matrix << (c ? " " : "") << fmt::format("{:.2f}", snaps[c].spectrum.power_db[k]);
      }
      matrix << "\n";
    }
  }
  sidecar << meta.dump(2) << "\n";
}

void write_run_directory(const RunResult& result, const std::filesystem::path& dir, bool stamp_time) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw FormatError(fmt::format("{}: cannot create ({})", dir.string(), ec.message()));

  const auto& s = result.scenario;
  std::vector<std::string> files;
  auto emit = [&](const std::string& name, auto&& body) {
    write_file(dir / name, body);
    files.push_back(name);
  };

  emit("scenario.resolved.scn", [&](std::ostream& o) { o << serialize_scenario(s); });
  emit("report.json", [&](std::ostream& o) { write_report_json(o, result.report); });
  emit("truth.json", [&](std::ostream& o) { o << truth_json(s).dump(2) << "\n"; });
  emit("pvt.csv", [&](std::ostream& o) { receiver::write_pvt_csv(o, result.pvt); });
  for (const Band b : s.receiver.bands) {
    const std::string name = b == Band::L1 ? "channels.csv" : "channels_l2.csv";
    emit(name, [&](std::ostream& o) { receiver::write_channel_csv(o, result.channel_log, b); });
  }
  emit("transitions.csv", [&](std::ostream& o) { write_transitions(o, result.transitions); });
  emit("acquisitions.csv", [&](std::ostream& o) { write_acquisitions(o, result.acquisitions); });
  emit("capture_log.csv", [&](std::ostream& o) { adversary::write_event_csv(o, result.capture_log); });
  emit("replay_log.csv", [&](std::ostream& o) { adversary::write_event_csv(o, result.replay_log); });
  emit("link_trace.csv", [&](std::ostream& o) { wire::write_link_trace_csv(o, result.link); });
  emit("alarms.csv", [&](std::ostream& o) { write_alarms(o, result.report.alarms); });
  if (s.monitor.enabled) {
    emit("monitor.csv", [&](std::ostream& o) { write_monitor(o, result.snapshots); });
    std::ostringstream matrix;
    std::ostringstream sidecar;
    write_spectrogram(matrix, sidecar, result);
    emit("spectrogram.txt", [&](std::ostream& o) { o << matrix.str(); });
    emit("spectrogram.json", [&](std::ostream& o) { o << sidecar.str(); });
  }

  json listing = json::array();
  for (const auto& name : files) {
    std::ifstream in(dir / name, std::ios::binary);
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    listing.push_back({{"name", name}, {"bytes", bytes.size()}, {"crc32", fmt::format("{:08x}", wire::crc32(bytes))}});
  }
  json manifest = {{"scenario", s.name}, {"seed", s.seed}, {"mode", to_string(s.mode)}, {"files", listing}};
  if (stamp_time) {
    const auto now = std::chrono::system_clock::now();
    manifest["created"] = fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(now)));
  }
  write_file(dir / "manifest.json", [&](std::ostream& o) { o << manifest.dump(2) << "\n"; });
}

}  // namespace relaylab::lab

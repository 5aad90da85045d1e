// Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails.
//
//   acceptance --scenarios <dir> --work <dir> [--readme <file>]

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "relaylab/errors.hpp"
#include "relaylab/lab/output.hpp"
#include "relaylab/lab/runner.hpp"
#include "relaylab/lab/scenario.hpp"
#include "relaylab/lab/sweep.hpp"
#include "relaylab/receiver/pvt.hpp"
#include "relaylab/scene/render.hpp"
#include "relaylab/signal/ca_code.hpp"
#include "relaylab/signal/random.hpp"
#include "relaylab/spectral/psd.hpp"
#include "relaylab/spectral/resample.hpp"
#include "relaylab/adversary/jammer.hpp"
#include "relaylab/wire/frame.hpp"
#include "relaylab/wire/rates.hpp"

namespace fs = std::filesystem;
using namespace relaylab;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double distance(const scene::EcefPosition& a, const scene::EcefPosition& b) { return (a - b).norm(); }

class Lab {
 public:
  Lab(fs::path scenarios, fs::path work) : scenarios_(std::move(scenarios)), work_(std::move(work)) {}

  const fs::path& scenario_dir() const { return scenarios_; }
  const fs::path& work() const { return work_; }

  lab::Scenario load(const std::string& name) const { return lab::parse_scenario(scenarios_ / (name + ".scn")); }

  /// First run of a shipped scenario; also written as run directory "a".
  const lab::RunResult& run(const std::string& name) {
    auto it = runs_.find(name);
    if (it == runs_.end()) {
      std::cerr << "running " << name << "\n";
      it = runs_.emplace(name, lab::run_scenario(load(name))).first;
      lab::write_run_directory(it->second, work_ / name / "a", false);
    }
    return it->second;
  }

 private:
  fs::path scenarios_;
  fs::path work_;
  std::map<std::string, lab::RunResult> runs_;
};

// ---------------------------------------------------------------------------

Verdict data_rate(const fs::path& readme) {
  wire::StreamConfig cfg;
  cfg.sample_rate = 1e6;
  cfg.quantization_bits = 16;
  const double rate = wire::required_data_rate(cfg);
  const bool documented = slurp(readme).find("31.88") != std::string::npos;
  return {rate == 32e6 && documented,
          fmt::format("required_data_rate(1 MHz, 16 bit) = {} b/s; README notes 31.88 Mb/s: {}", rate,
                      documented ? "yes" : "no")};
}

Verdict bandwidth_threshold(Lab& lab) {
  const auto base = lab.load("cold_start");
  const auto rows = lab::sweep(base, "link.bandwidth", {"11e6", "49e6"});
  const auto& slow = rows[0].report;
  const auto& fast = rows[1].report;
  const double offered = wire::framed_data_rate(base.stream);
  const bool ok = !slow.captured() && slow.stall_seconds > 0.1 * slow.horizon && fast.captured();
  return {ok, fmt::format("offered {:.2f} Mb/s; 11 Mb/s: captured={} stall={:.2f} s of {:.0f} s; 49 Mb/s: captured={}",
                          offered / 1e6, slow.captured(), slow.stall_seconds, slow.horizon, fast.captured())};
}

Verdict cold_start(Lab& lab) {
  const auto s = lab.load("cold_start");
  const auto& r = lab.run("cold_start");
  const auto last = std::find_if(r.pvt.rbegin(), r.pvt.rend(), [](const auto& p) { return p.solution.fix; });
  if (last == r.pvt.rend()) return {false, "no fix"};
  const double to_sampler = distance(last->solution.position, s.scene.sampler_location);
  const double to_victim = distance(last->solution.position, s.scene.victim_location);
  return {to_sampler < 150.0 && to_victim >= 1000e3,
          fmt::format("final fix at t={:.1f} s: {:.1f} m from sampler, {:.1f} km from victim", last->t, to_sampler,
                      to_victim / 1e3)};
}

double phase_start(const lab::Scenario& s, adversary::PhaseKind kind, double after = 0.0) {
  for (const auto& p : s.script.phases) {
    if (p.kind == kind && p.start >= after) return p.start;
  }
  throw std::runtime_error(fmt::format("scenario {} has no such phase", s.name));
}

using ChannelKey = std::pair<int, Band>;

Verdict warm_start(Lab& lab) {
  using receiver::ChannelState;
  std::vector<std::string> notes;
  bool ok = true;

  // Jam, then replay.
  {
    const auto s = lab.load("warm_jam_replay");
    const auto& r = lab.run("warm_jam_replay");
    const double jam = phase_start(s, adversary::PhaseKind::JamAll);
    const double replay = phase_start(s, adversary::PhaseKind::ReplayL1_JamOthers);
    const double timeout = s.receiver.loss_timeout_s;

    std::optional<double> victim_fix;
    for (const auto& p : r.pvt) {
      if (p.t < jam && p.solution.fix && distance(p.solution.position, s.scene.victim_location) < 150.0) {
        victim_fix = p.t;
        break;
      }
    }
    std::set<ChannelKey> tracking;
    std::map<ChannelKey, double> lost;
    for (const auto& tr : r.transitions) {
      const ChannelKey key{tr.prn_id, tr.band};
      if (tr.t < jam) {
        if (tr.to == ChannelState::Tracking) tracking.insert(key);
        if (tr.to == ChannelState::Lost) tracking.erase(key);
      } else if (tr.to == ChannelState::Lost && !lost.count(key)) {
        lost[key] = tr.t;
      }
    }
    double last_loss = 0.0;
    bool all_lost = !tracking.empty();
    for (const auto& key : tracking) {
      const auto it = lost.find(key);
      if (it == lost.end() || it->second > jam + timeout + 2.0) {
        all_lost = false;
      } else {
        last_loss = std::max(last_loss, it->second);
      }
    }
    const auto capture = r.report.time_to_capture;
    const bool ordered = victim_fix && all_lost && capture && *capture >= replay && *victim_fix < last_loss &&
                         last_loss < *capture;
    ok &= ordered;
    notes.push_back(fmt::format(
        "victim fix at {} s; {} tracking channels lost by {:.2f} s (limit {:.2f}); capture at {} s (replay from {} s)",
        victim_fix ? fmt::format("{:.1f}", *victim_fix) : "never", tracking.size(), last_loss, jam + timeout + 2.0,
        capture ? fmt::format("{:.1f}", *capture) : "never", replay));
  }

  // Brief second jamming.
  {
    const auto s = lab.load("warm_rejam");
    const auto& r = lab.run("warm_rejam");
    const auto pulse = std::find_if(s.script.phases.begin(), s.script.phases.end(),
                                    [](const auto& p) { return p.kind == adversary::PhaseKind::RejamPulse; });
    const double pulse_start = pulse->start;
    const double pulse_end = pulse->start + pulse->duration;
    const double deadline = pulse_end + s.receiver.reacquisition_period_s;
    std::set<ChannelKey> dropped;
    std::map<ChannelKey, double> back;
    for (const auto& tr : r.transitions) {
      const ChannelKey key{tr.prn_id, tr.band};
      if (tr.t >= pulse_start && tr.t < pulse_end && tr.to == ChannelState::Lost) dropped.insert(key);
      if (tr.t >= pulse_end && tr.to == ChannelState::Tracking && !back.count(key)) back[key] = tr.t;
    }
    double latest = 0.0;
    bool all_back = !dropped.empty();
    for (const auto& key : dropped) {
      const auto it = back.find(key);
      if (it == back.end() || it->second > deadline) {
        all_back = false;
      } else {
        latest = std::max(latest, it->second);
      }
    }
    ok &= all_back && r.report.captured();
    notes.push_back(fmt::format("rejam pulse ends {:.1f} s: {} channels dropped, all tracking again by {:.2f} s (limit {:.2f})",
                                pulse_end, dropped.size(), latest, deadline));
  }
  return {ok, fmt::format("{}; {}", notes[0], notes[1])};
}

// Independent forward model: rho = |sat - x| + c * b.
Verdict pvt_oracle() {
  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto direction = [&] {
    const double x = gauss(rng), y = gauss(rng), z = gauss(rng);
    const double n = std::sqrt(x * x + y * y + z * z);
    return scene::EcefPosition{x / n, y / n, z / n};
  };
  auto range = [](const scene::EcefPosition& a, const scene::EcefPosition& b) {
    return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
  };

  double worst_pos = 0.0, worst_bias = 0.0, worst_shift = 0.0;
  int solved = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto up = direction();
    const auto rx = up * 6.371e6;
    const double bias = (unit(rng) - 0.5) * 2e-3;
    std::vector<receiver::PvtMeasurement> ms;
    while (ms.size() < 6) {
      const auto d = direction();
      if (dot(d, up) < 0.3) continue;  // keep satellites well above the horizon
      const auto sat = rx + d * 2.02e7;
      ms.push_back({int(ms.size()) + 1, Band::L1, sat, range(sat, rx) + kSpeedOfLight * bias});
    }
    const auto sol = receiver::solve_pvt(ms);
    if (!sol.fix) continue;
    ++solved;
    worst_pos = std::max(worst_pos, range(sol.position, rx));
    worst_bias = std::max(worst_bias, std::abs(sol.clock_bias - bias));

    const double common = 1e-3 * unit(rng);
    auto shifted = ms;
    for (auto& m : shifted) m.pseudorange += kSpeedOfLight * common;
    const auto sol2 = receiver::solve_pvt(shifted);
    worst_shift = std::max({worst_shift, range(sol2.position, sol.position) / 1e-3,
                            std::abs(sol2.clock_bias - sol.clock_bias - common) / 1e-12});
  }
  const bool ok = solved == 100 && worst_pos < 1e-3 && worst_bias < 1e-12 && worst_shift < 1.0;
  return {ok, fmt::format("{}/100 solved; max position error {:.2e} m, max bias error {:.2e} s; common delay "
                          "absorbed within {:.2f} of tolerance",
                          solved, worst_pos, worst_bias, worst_shift)};
}

// G1 = 1 + x^3 + x^10, G2 = 1 + x^2 + x^3 + x^6 + x^8 + x^9 + x^10, PRN i uses
// G2 delayed by the listed number of chips.
std::array<std::int8_t, kCodeLength> reference_code(int prn) {
  static constexpr std::array<int, 32> kG2Delay = {5,   6,   7,   8,   17,  18,  139, 140, 141, 251, 252,
                                                   254, 255, 256, 257, 258, 469, 470, 471, 472, 473, 474,
                                                   509, 512, 513, 514, 515, 516, 859, 860, 861, 862};
  std::array<int, 10> g1, g2;
  g1.fill(1);
  g2.fill(1);
  std::array<int, kCodeLength> s1{}, s2{};
  for (int i = 0; i < kCodeLength; ++i) {
    s1[i] = g1[9];
    s2[i] = g2[9];
    const int f1 = g1[2] ^ g1[9];
    const int f2 = g2[1] ^ g2[2] ^ g2[5] ^ g2[7] ^ g2[8] ^ g2[9];
    std::rotate(g1.rbegin(), g1.rbegin() + 1, g1.rend());
    std::rotate(g2.rbegin(), g2.rbegin() + 1, g2.rend());
    g1[0] = f1;
    g2[0] = f2;
  }
  std::array<std::int8_t, kCodeLength> out{};
  const int delay = kG2Delay[prn - 1];
  for (int i = 0; i < kCodeLength; ++i) {
    const int bit = s1[i] ^ s2[(i - delay + kCodeLength) % kCodeLength];
    out[i] = bit ? -1 : 1;
  }
  return out;
}

Verdict gold_codes() {
  int mismatched = 0;
  int bad_auto = 0;
  long bad_cross = 0;
  std::array<std::array<std::int8_t, kCodeLength>, 32> codes;
  for (int prn = 1; prn <= 32; ++prn) {
    codes[prn - 1] = signal::ca_code(prn).chips;
    if (codes[prn - 1] != reference_code(prn)) ++mismatched;
  }
  for (int a = 0; a < 32; ++a) {
    for (int b = a; b < 32; ++b) {
      for (int lag = 0; lag < kCodeLength; ++lag) {
        int sum = 0;
        for (int i = 0; i < kCodeLength; ++i) sum += codes[a][i] * codes[b][(i + lag) % kCodeLength];
        if (a == b) {
          const bool good = lag == 0 ? sum == kCodeLength : (sum == -65 || sum == -1 || sum == 63);
          bad_auto += !good;
        } else {
          bad_cross += !(sum == -65 || sum == -1 || sum == 63);
        }
      }
    }
  }
  return {mismatched == 0 && bad_auto == 0 && bad_cross == 0,
          fmt::format("{} codes differ from the G2-delay generator; {} bad autocorrelation lags; {} bad "
                      "cross-correlation values over 496 pairs x 1023 lags",
                      mismatched, bad_auto, bad_cross)};
}

Verdict wire_round_trip() {
  std::mt19937_64 rng(7);
  constexpr int kTrials = 10000;
  int round_trip_failures = 0;
  int undetected = 0;
  for (int trial = 0; trial < kTrials; ++trial) {
    signal::QuantizedBuffer q;
    q.bits = std::array{4, 8, 12, 16}[rng() % 4];
    q.sample_rate = 1024000;
    const std::size_t n = rng() % 600;
    const int lo = -(1 << (q.bits - 1));
    const int span = 1 << q.bits;
    for (std::size_t i = 0; i < 2 * n; ++i) q.words.push_back(static_cast<std::int16_t>(lo + int(rng() % span)));
    const std::uint64_t seq = rng();
    const auto bytes = wire::encode_frame(q, seq);
    const auto decoded = wire::decode_frame(bytes);
    const auto* frame = std::get_if<wire::SampleFrame>(&decoded);
    if (!frame || frame->sequence != seq || wire::frame_words(*frame).words != q.words) ++round_trip_failures;

    auto flipped = bytes;
    const std::size_t bit = rng() % (8 * flipped.size());
    flipped[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    if (std::holds_alternative<wire::SampleFrame>(wire::decode_frame(flipped))) ++undetected;
  }
  const double detected = 1.0 - double(undetected) / kTrials;
  return {round_trip_failures == 0 && detected >= 0.999,
          fmt::format("{} random frames: {} round-trip failures; single-bit corruption detected in {:.2f}%", kTrials,
                      round_trip_failures, 100.0 * detected)};
}

Verdict congestion_gap(Lab& lab) {
  using receiver::ChannelState;
  const auto s = lab.load("congestion");
  const auto& r = lab.run("congestion");
  if (s.link.congestion_episodes.empty()) return {false, "scenario has no congestion episode"};
  const auto& ep = s.link.congestion_episodes.front();
  const double expected = ep.duration - s.jitter_buffer;
  const double frame = s.stream.frame_duration();
  const double gap = r.report.longest_replay_gap;
  const bool gap_ok = ep.bandwidth_factor == 0.0 && std::abs(gap - expected) <= frame;

  std::set<ChannelKey> dropped;
  std::set<ChannelKey> resumed;
  for (const auto& tr : r.transitions) {
    const ChannelKey key{tr.prn_id, tr.band};
    if (tr.t >= ep.start && tr.t < ep.start + ep.duration + s.receiver.loss_timeout_s && tr.from == ChannelState::Tracking &&
        tr.to == ChannelState::Lost) {
      dropped.insert(key);
    }
    if (dropped.count(key) && tr.to == ChannelState::Tracking) resumed.insert(key);
  }
  const bool track_ok = !dropped.empty() && resumed == dropped;
  return {gap_ok && track_ok,
          fmt::format("episode {:.2f}+{:.2f} s, jitter buffer {:.2f} s: replay gap {:.4f} s (expected {:.2f} +/- {:.4f}); "
                      "{} channels dropped, {} resumed tracking",
                      ep.start, ep.duration, s.jitter_buffer, gap, expected, frame, dropped.size(), resumed.size())};
}

double parseval_ratio(const signal::IqBuffer& feed, std::uint32_t nfft) {
  const auto psd = spectral::welch_psd(feed, nfft, 0.5);
  return psd.total_power() / signal::mean_power(feed);
}

Verdict spectral_signatures(Lab& lab) {
  const auto s = lab.load("warm_jam_replay");
  const auto& r = lab.run("warm_jam_replay");
  std::map<double, spectral::AlarmKind> alarms;
  for (const auto& a : r.report.alarms) alarms[a.t] = a.kind;

  std::map<adversary::PhaseKind, std::array<int, 3>> table;  // none, replay spike, jamming
  int wrong = 0;
  for (const auto& snap : r.snapshots) {
    const auto it = alarms.find(snap.t);
    const int got = it == alarms.end() ? 0 : it->second == spectral::AlarmKind::ReplaySpikeSuspected ? 1 : 2;
    int want = 0;
    if (snap.phase == adversary::PhaseKind::ReplayL1_JamOthers) want = 1;
    if (snap.phase == adversary::PhaseKind::JamAll) want = 2;
    ++table[snap.phase][got];
    wrong += got != want;
  }
  const auto count = [&](adversary::PhaseKind k) { return table[k]; };
  const auto idle = count(adversary::PhaseKind::Idle);
  const auto jam = count(adversary::PhaseKind::JamAll);
  const auto rep = count(adversary::PhaseKind::ReplayL1_JamOthers);
  const bool mapping = wrong == 0 && idle[0] > 0 && jam[2] > 0 && rep[1] > 0;

  // Parseval on monitor-rate feeds built like the monitor's: noise, jam, replay.
  const double rate = s.monitor.sample_rate;
  const auto n = static_cast<std::size_t>(std::llround(s.monitor.snapshot_s * rate));
  const scene::RenderWindow window{20.0, double(n) / rate, rate};
  adversary::JammerConfig jammer = s.forwarder_node().jammer;
  jammer.noise_power *= rate / s.scene.noise_reference_rate;
  const auto jam_feed = adversary::jammer_generate(jammer, Band::L1, window.start_time, window.duration, rate, 3);
  const auto replay = spectral::upsample(
      signal::add_awgn(signal::IqBuffer(n / 4, s.stream.sample_rate, 20.0), 1.0, 4), int(rate / s.stream.sample_rate));
  double worst = 0.0;
  for (const auto* jam_ptr : {static_cast<const signal::IqBuffer*>(nullptr), &jam_feed}) {
    for (const auto* rep_ptr : {static_cast<const signal::IqBuffer*>(nullptr), &replay}) {
      const auto feed = scene::render_antenna_feed(s.scene, s.scene.victim_location, {1.0, 1.0, 1.0, Band::L1},
                                                   window, rep_ptr, jam_ptr, 5);
      worst = std::max(worst, std::abs(parseval_ratio(feed, s.monitor.nfft) - 1.0));
    }
  }
  return {mapping && worst < 0.05,
          fmt::format("snapshots [none/spike/jam]: Idle {}/{}/{}, JamAll {}/{}/{}, Replay {}/{}/{}; {} misclassified; "
                      "Parseval worst deviation {:.2f}%",
                      idle[0], idle[1], idle[2], jam[0], jam[1], jam[2], rep[0], rep[1], rep[2], wrong, 100.0 * worst)};
}

Verdict determinism(Lab& lab) {
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(lab.scenario_dir())) {
    if (entry.path().extension() == ".scn") names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  std::vector<std::string> differing;
  std::size_t files = 0;
  for (const auto& name : names) {
    lab.run(name);
    std::cerr << "running " << name << " again\n";
    const auto second = lab::run_scenario(lab.load(name));
    const auto a = lab.work() / name / "a";
    const auto b = lab.work() / name / "b";
    lab::write_run_directory(second, b, false);
    std::set<std::string> listing_a, listing_b;
    for (const auto& e : fs::directory_iterator(a)) listing_a.insert(e.path().filename().string());
    for (const auto& e : fs::directory_iterator(b)) listing_b.insert(e.path().filename().string());
    if (listing_a != listing_b) differing.push_back(name + "/<listing>");
    for (const auto& f : listing_a) {
      ++files;
      if (slurp(a / f) != slurp(b / f)) differing.push_back(name + "/" + f);
    }
  }
  std::string list;
  for (const auto& d : differing) list += " " + d;
  return {differing.empty() && !names.empty(),
          fmt::format("{} scenarios, {} files compared; differing:{}", names.size(), files, list.empty() ? " none" : list)};
}

}  // namespace

int main(int argc, char** argv) {
  fs::path scenarios = "scenarios";
  fs::path work = "acceptance_runs";
  fs::path readme;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string key = argv[i];
    if (key == "--scenarios") {
      scenarios = argv[i + 1];
    } else if (key == "--work") {
      work = argv[i + 1];
    } else if (key == "--readme") {
      readme = argv[i + 1];
    } else {
      std::cerr << "unknown option " << key << "\n";
      return 2;
    }
  }
  if (readme.empty()) readme = scenarios.parent_path() / "README.md";
  fs::remove_all(work);
  fs::create_directories(work);

  Lab lab(scenarios, work);
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"data-rate formula", [&] { return data_rate(readme); }},
      {"bandwidth threshold", [&] { return bandwidth_threshold(lab); }},
      {"cold start", [&] { return cold_start(lab); }},
      {"warm start", [&] { return warm_start(lab); }},
      {"PVT oracle equivalence", [] { return pvt_oracle(); }},
      {"Gold-code properties", [] { return gold_codes(); }},
      {"wire-format round trip", [] { return wire_round_trip(); }},
      {"congestion gap", [&] { return congestion_gap(lab); }},
      {"spectral signatures", [&] { return spectral_signatures(lab); }},
      {"determinism", [&] { return determinism(lab); }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, fmt::format("exception: {}", e.what())};
    }
    failures += !v.pass;
    std::cout << fmt::format("criterion {:2} {:<24} {}  {}", i + 1, criteria[i].first, v.pass ? "PASS" : "FAIL",
                             v.detail)
              << std::endl;
  }
  std::cout << fmt::format("{} of {} criteria passed", criteria.size() - failures, criteria.size()) << std::endl;
  return failures == 0 ? 0 : 1;
}

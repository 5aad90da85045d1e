#include "relaylab/lab/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <queue>
#include <thread>

#include <fmt/format.h>

#include "relaylab/adversary/forwarder.hpp"
#include "relaylab/adversary/jammer.hpp"
#include "relaylab/adversary/sampler.hpp"
#include "relaylab/scene/render.hpp"
#include "relaylab/signal/random.hpp"
#include "relaylab/spectral/resample.hpp"
#include "relaylab/wire/live_transport.hpp"

namespace relaylab::lab {
namespace {

using signal::derive_seed;

constexpr std::size_t kBlockSamples = 4096;

std::int64_t grid_ceil(double t, double fs) { return static_cast<std::int64_t>(std::ceil(t * fs - 1e-9)); }

struct Arrival {
  double t = 0.0;
  std::uint64_t sequence = 0;
  std::vector<std::uint8_t> bytes;
};

struct LaterFirst {
  bool operator()(const Arrival& a, const Arrival& b) const {
    return a.t > b.t || (a.t == b.t && a.sequence > b.sequence);
  }
};

using ArrivalQueue = std::priority_queue<Arrival, std::vector<Arrival>, LaterFirst>;

void record_offer(RunResult& out, const adversary::CapturedFrame& f, const wire::FrameDelivery& d) {
  out.capture_log.push_back({f.send_time, "frame_sent", fmt::format("seq={} bytes={}", f.sequence, f.bytes.size())});
  if (d.fate == wire::FrameFate::LostToStall) {
    out.capture_log.push_back({f.send_time, "capture_overrun", fmt::format("seq={}", f.sequence)});
  } else if (d.fate == wire::FrameFate::DroppedByLink) {
    out.capture_log.push_back({f.send_time, "link_drop", fmt::format("seq={}", f.sequence)});
  }
  out.link.frames.push_back(d);
}

/// Source of frames arriving at the forwarder.
class FrameFeed {
 public:
  virtual ~FrameFeed() = default;
  /// Queues every frame that arrives before `until` (and possibly later ones).
  virtual void advance(double until, ArrivalQueue& queue) = 0;
  virtual void finish() = 0;
};

class VirtualFeed final : public FrameFeed {
 public:
  VirtualFeed(const Scenario& s, RunResult& out)
      : sampler_(s.sampler_node(), s.scene, derive_seed(s.seed, "sampler")),
        link_(s.link, derive_seed(s.seed, "link")),
        out_(out) {}

  void advance(double until, ArrivalQueue& queue) override {
    while (sampler_.next_send_time() <= until) {
      auto f = sampler_.next();
      const auto d = link_.offer(f.send_time, f.bytes.size());
      record_offer(out_, f, d);
      if (d.fate == wire::FrameFate::Delivered) queue.push({d.arrival_time, f.sequence, std::move(f.bytes)});
    }
  }

  void finish() override {
    out_.link.stalls = link_.stalls();
    out_.link.peak_queue_bytes = link_.peak_queue_bytes();
  }

 private:
  adversary::SamplerStream sampler_;
  wire::LinkEmulator link_;
  RunResult& out_;
};

/// Frames cross a real loopback TCP connection. The sender paces capture and
/// link serialization against the wall clock; the receiver stamps arrivals
/// (plus the modelled latency and jitter) in scenario time.
class LiveFeed final : public FrameFeed {
 public:
  LiveFeed(const Scenario& s, RunResult& out, double pace)
      : scenario_(s), out_(out), pace_(pace), origin_(std::chrono::steady_clock::now()) {
    wire::TcpListener listener;
    auto client = wire::TcpStream::connect_loopback(listener.port());
    auto server = listener.accept();
    sender_ = std::thread([this, c = std::move(client)]() mutable { send_loop(c); });
    receiver_ = std::thread([this, sv = std::move(server)]() mutable { receive_loop(sv); });
  }

  ~LiveFeed() override {
    stop_ = true;
    if (sender_.joinable()) sender_.join();
    if (receiver_.joinable()) receiver_.join();
  }

  void advance(double until, ArrivalQueue& queue) override {
    std::this_thread::sleep_until(wall(until));
    std::lock_guard lock(mutex_);
    for (auto& a : inbox_) queue.push(std::move(a));
    inbox_.clear();
  }

  void finish() override {
    stop_ = true;
    if (sender_.joinable()) sender_.join();
    if (receiver_.joinable()) receiver_.join();
    std::lock_guard lock(mutex_);
    for (auto& [seq, rec] : sent_) {
      if (auto it = arrived_.find(seq); it != arrived_.end()) rec.delivery.arrival_time = it->second;
      record_offer(out_, rec.frame, rec.delivery);
    }
    out_.link.stalls = stalls_;
  }

 private:
  struct Sent {
    adversary::CapturedFrame frame;
    wire::FrameDelivery delivery;
  };

  std::chrono::steady_clock::time_point wall(double t) const {
    return origin_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                         std::chrono::duration<double>(t * pace_));
  }

  double now() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - origin_).count() / pace_;
  }

  void send_loop(wire::TcpStream& stream) {
    adversary::SamplerStream sampler(scenario_.sampler_node(), scenario_.scene,
                                     derive_seed(scenario_.seed, "sampler"));
    const auto& link = scenario_.link;
    double wire_free = 0.0;
    while (!stop_ && sampler.next_send_time() <= scenario_.horizon) {
      auto f = sampler.next();
      std::this_thread::sleep_until(wall(f.send_time));
      Sent rec{{}, {}};
      rec.delivery.send_time = f.send_time;
      rec.delivery.bytes = f.bytes.size();
      const double backlog_bits = wire_free > f.send_time ? link.served_bits(f.send_time, wire_free) : 0.0;
      rec.delivery.queue_depth = static_cast<std::uint64_t>(backlog_bits / 8.0);
      if (backlog_bits > 0.0 &&
          backlog_bits / 8.0 + static_cast<double>(f.bytes.size()) > static_cast<double>(link.send_buffer_limit)) {
        rec.delivery.fate = wire::FrameFate::LostToStall;
        std::lock_guard lock(mutex_);
        stalls_.push_back({f.send_time, f.send_time + scenario_.stream.frame_duration()});
      } else {
        wire_free = link.time_to_serve(std::max(f.send_time, wire_free), 8.0 * static_cast<double>(f.bytes.size()));
        std::this_thread::sleep_until(wall(std::min(wire_free, scenario_.horizon)));
        if (!stream.send_frame(f.bytes)) stop_ = true;
      }
      f.bytes.clear();
      rec.frame = std::move(f);
      std::lock_guard lock(mutex_);
      sent_.emplace(rec.frame.sequence, std::move(rec));
    }
    stream.shutdown_write();
  }

  void receive_loop(wire::TcpStream& stream) {
    signal::Rng rng(derive_seed(scenario_.seed, "live/jitter"));
    double last = 0.0;
    while (auto bytes = stream.receive_frame()) {
      const auto decoded = wire::decode_frame(*bytes);
      const auto* frame = std::get_if<wire::SampleFrame>(&decoded);
      const double jitter = std::abs(rng.gaussian()) * scenario_.link.jitter_stddev;
      const double t = std::max(last, now() + scenario_.link.base_latency + jitter);
      last = t;
      std::lock_guard lock(mutex_);
      const std::uint64_t seq = frame ? frame->sequence : 0;
      if (frame) arrived_[seq] = t;
      inbox_.push_back({t, seq, std::move(*bytes)});
    }
  }

  const Scenario& scenario_;
  RunResult& out_;
  double pace_;
  std::chrono::steady_clock::time_point origin_;
  std::atomic<bool> stop_{false};
  std::mutex mutex_;
  std::vector<Arrival> inbox_;
  std::map<std::uint64_t, Sent> sent_;
  std::map<std::uint64_t, double> arrived_;
  std::vector<wire::StallInterval> stalls_;
  std::thread sender_;
  std::thread receiver_;
};

struct PendingSnapshot {
  std::int64_t first = 0;  // stream grid index
  signal::IqBuffer replay;
  std::size_t filled = 0;
  std::uint64_t index = 0;
};

class Monitor {
 public:
  Monitor(const Scenario& s, const adversary::JammerConfig& jammer)
      : s_(s), fs_(s.stream.sample_rate), jammer_(jammer) {
    const double ref = s.scene.noise_reference_rate;
    jammer_.noise_power = jammer.noise_power * s.monitor.sample_rate / ref;
    snap_len_ = static_cast<std::size_t>(std::llround(s.monitor.snapshot_s * fs_));
    factor_ = static_cast<int>(std::llround(s.monitor.sample_rate / fs_));
  }

  /// Feeds gated replay samples for grid indices [g0, g0 + replay.size()).
  void feed(std::int64_t g0, std::span<const signal::Sample> replay, std::int64_t total) {
    const std::int64_t g1 = g0 + static_cast<std::int64_t>(replay.size());
    while (true) {
      if (!pending_) {
        const double t = static_cast<double>(next_) * s_.monitor.period_s;
        const std::int64_t first = grid_ceil(t, fs_);
        if (first + static_cast<std::int64_t>(snap_len_) > total || first >= g1) return;
        pending_ = PendingSnapshot{first, signal::IqBuffer(snap_len_, fs_, static_cast<double>(first) / fs_), 0, next_};
        ++next_;
      }
      auto& p = *pending_;
      const std::int64_t lo = std::max(g0, p.first + static_cast<std::int64_t>(p.filled));
      const std::int64_t hi = std::min(g1, p.first + static_cast<std::int64_t>(snap_len_));
      if (lo < hi) {
        std::copy(replay.begin() + (lo - g0), replay.begin() + (hi - g0),
                  p.replay.samples.begin() + (lo - p.first));
        p.filled = static_cast<std::size_t>(hi - p.first);
      }
      if (p.filled < snap_len_) return;
      finalize(p);
      pending_.reset();
    }
  }

  std::vector<MonitorSnapshot> take() { return std::move(snapshots_); }

 private:
  void finalize(const PendingSnapshot& p) {
    const auto up = spectral::upsample(p.replay, factor_);
    const scene::RenderWindow window{up.start_time, static_cast<double>(up.size()) / up.sample_rate, up.sample_rate};
    std::optional<signal::IqBuffer> jam;
    if (jammer_.covers(Band::L1)) {
      jam = adversary::jammer_generate(jammer_, Band::L1, window.start_time, window.duration, window.sample_rate,
                                       derive_seed(s_.seed, "monitor/jam", p.index));
    }
    const scene::AntennaFeedPlan plan{1.0, 1.0, 1.0, Band::L1};
    const auto feed = scene::render_antenna_feed(s_.scene, s_.scene.victim_location, plan, window, &up,
                                                 jam ? &*jam : nullptr,
                                                 derive_seed(s_.seed, "monitor/noise", p.index));
    MonitorSnapshot snap;
    snap.t = up.start_time;
    snap.phase = adversary::attack_sequencer(s_.script, snap.t).phase;
    snap.spectrum = spectral::welch_psd(feed, s_.monitor.nfft, 0.5);
    snap.baseline = snap.t + s_.monitor.snapshot_s <= s_.monitor.baseline_end;
    snapshots_.push_back(std::move(snap));
  }

  const Scenario& s_;
  double fs_;
  adversary::JammerConfig jammer_;
  std::size_t snap_len_ = 0;
  int factor_ = 1;
  std::uint64_t next_ = 0;
  std::optional<PendingSnapshot> pending_;
  std::vector<MonitorSnapshot> snapshots_;
};

void score_snapshots(const Scenario& s, RunResult& out) {
  std::vector<spectral::PowerSpectrum> clean;
  for (const auto& snap : out.snapshots) {
    if (snap.baseline) clean.push_back(snap.spectrum);
  }
  if (clean.empty()) return;
  out.baseline = spectral::average_spectra(clean);
  const auto bands = replay_candidate_bands(s);
  for (auto& snap : out.snapshots) {
    snap.jamming_score = spectral::jamming_score(*out.baseline, snap.spectrum);
    for (const auto& b : bands) {
      snap.replay_contrast = std::max(snap.replay_contrast, spectral::band_contrast(*out.baseline, snap.spectrum, b));
    }
    if (snap.baseline) continue;
    if (auto a = spectral::detect_jamming(*out.baseline, snap.spectrum, snap.t)) out.report.alarms.push_back(*a);
    if (auto a = spectral::detect_replay_spike(*out.baseline, snap.spectrum, bands, snap.t)) {
      out.report.alarms.push_back(*a);
    }
  }
}

double gap_of(const adversary::LogEvent& e) {
  const auto pos = e.detail.find("gap=");
  return pos == std::string::npos ? 0.0 : std::stod(e.detail.substr(pos + 4));
}

void account(const Scenario& s, RunResult& out) {
  auto& r = out.report;
  const auto n = static_cast<std::uint64_t>(s.stream.frame_samples);
  for (const auto& f : out.link.frames) {
    ++r.frames_captured;
    switch (f.fate) {
      case wire::FrameFate::Delivered:
        ++r.frames_delivered;
        if (!(f.arrival_time < s.horizon)) ++r.frames_in_flight;
        break;
      case wire::FrameFate::DroppedByLink: ++r.frames_dropped_by_link; break;
      case wire::FrameFate::LostToStall: ++r.frames_lost_to_stall; break;
    }
  }
  r.samples_captured = r.frames_captured * n;
  r.samples_delivered = r.frames_delivered * n;
  r.samples_lost = (r.frames_lost_to_stall + r.frames_dropped_by_link) * n;
  r.stall_seconds = out.link.stall_seconds(s.horizon);
  for (const auto& e : out.replay_log) {
    if (e.event != "underrun_end") continue;
    const double g = gap_of(e);
    r.replay_gap_seconds += g;
    r.longest_replay_gap = std::max(r.longest_replay_gap, g);
  }
}

}  // namespace

std::vector<spectral::FrequencyBand> replay_candidate_bands(const Scenario& s) {
  const double half = s.stream.sample_rate / 2.0;
  return {{-half, half}, {-half, 0.0}, {0.0, half}};
}

void summarize_fixes(const Scenario& s, const std::vector<receiver::PvtRecord>& pvt, RunReport& r) {
  int streak = 0;
  double streak_start = 0.0;
  const receiver::PvtSolution* last = nullptr;
  for (const auto& rec : pvt) {
    if (!rec.solution.fix) {
      streak = 0;
      continue;
    }
    ++r.fixes;
    last = &rec.solution;
    r.final_fix_time = rec.t;
    if (!r.time_to_first_fix) r.time_to_first_fix = rec.t;
    const double d = (rec.solution.position - s.scene.sampler_location).norm();
    if (d <= s.capture_radius) {
      if (streak++ == 0) streak_start = rec.t;
      if (streak >= kCaptureStreak && !r.time_to_capture) r.time_to_capture = streak_start;
    } else {
      streak = 0;
    }
  }
  if (last) {
    r.final_position_error_vs_victim_truth = (last->position - s.scene.victim_location).norm();
    r.final_position_error_vs_sampler_truth = (last->position - s.scene.sampler_location).norm();
  }
}

RunResult run_scenario(const Scenario& scenario, const RunOptions& options) {
  scenario.validate();
  RunResult out;
  out.scenario = scenario;
  const Scenario& s = out.scenario;
  out.report.scenario = s.name;
  out.report.seed = s.seed;
  out.report.horizon = s.horizon;

  const double fs = s.stream.sample_rate;
  const auto total = static_cast<std::int64_t>(std::llround(s.horizon * fs));

  std::unique_ptr<FrameFeed> feed;
  if (s.mode == RunMode::Live) {
    feed = std::make_unique<LiveFeed>(s, out, options.live_pace);
  } else {
    feed = std::make_unique<VirtualFeed>(s, out);
  }

  const auto fwd_node = s.forwarder_node();
  adversary::Forwarder forwarder(fwd_node, fs);
  receiver::Receiver rx(s.receiver, s.scene, fs, s.receiver_assist());

  auto jammer = fwd_node.jammer;
  jammer.noise_power = fwd_node.jammer.noise_power * fs / s.scene.noise_reference_rate;
  std::optional<Monitor> monitor;
  if (s.monitor.enabled) monitor.emplace(s, fwd_node.jammer);

  std::vector<std::pair<std::int64_t, std::int64_t>> replay_on;
  for (const auto& [a, b] : adversary::replay_intervals(s.script)) replay_on.emplace_back(grid_ceil(a, fs), grid_ceil(b, fs));

  adversary::EventLog phase_log;
  for (const auto& p : s.script.phases) {
    const auto c = adversary::outputs_for(p.kind);
    phase_log.push_back({p.start, "phase_change",
                         fmt::format("phase={} jam_l1={} jam_l2={} replay={}", to_string(p.kind), int(c.jam_l1),
                                     int(c.jam_l2), int(c.replay))});
  }

  ArrivalQueue queue;
  signal::IqBuffer replay;
  std::vector<signal::IqBuffer> blocks(s.receiver.bands.size());
  std::uint64_t block_no = 0;
  for (std::int64_t g0 = 0; g0 < total; g0 += static_cast<std::int64_t>(kBlockSamples), ++block_no) {
    const auto n = static_cast<std::size_t>(std::min<std::int64_t>(kBlockSamples, total - g0));
    const std::int64_t end = g0 + static_cast<std::int64_t>(n);
    const double t0 = static_cast<double>(g0) / fs;
    feed->advance(static_cast<double>(end) / fs, queue);

    replay = signal::IqBuffer(n, fs, t0);
    for (std::int64_t idx = g0; idx < end;) {
      while (!queue.empty() && grid_ceil(queue.top().t, fs) <= idx) {
        forwarder.receive(queue.top().t, queue.top().bytes);
        queue.pop();
      }
      std::int64_t stop = end;
      if (!queue.empty()) stop = std::min(stop, std::max(idx + 1, grid_ceil(queue.top().t, fs)));
      forwarder.play(idx, std::span(replay.samples).subspan(static_cast<std::size_t>(idx - g0),
                                                            static_cast<std::size_t>(stop - idx)));
      idx = stop;
    }
    // The forwarder runs throughout; the sequencer only gates its output.
    for (std::int64_t idx = g0; idx < end; ++idx) {
      const bool on = std::any_of(replay_on.begin(), replay_on.end(),
                                  [idx](const auto& iv) { return idx >= iv.first && idx < iv.second; });
      if (!on) replay.samples[static_cast<std::size_t>(idx - g0)] = {};
    }
    if (monitor) monitor->feed(g0, replay.samples, total);

    const scene::RenderWindow window{t0, static_cast<double>(n) / fs, fs};
    for (std::size_t i = 0; i < s.receiver.bands.size(); ++i) {
      const Band band = s.receiver.bands[i];
      std::optional<signal::IqBuffer> jam;
      if (jammer.covers(band) && !adversary::jam_intervals(s.script, band).empty()) {
        jam = adversary::jammer_generate(jammer, band, t0, window.duration, fs,
                                         derive_seed(s.seed, fmt::format("jam/{}", to_string(band)), block_no));
      }
      const scene::AntennaFeedPlan plan{1.0, band == Band::L1 ? 1.0 : 0.0, 1.0, band};
      blocks[i] = scene::render_antenna_feed(
          s.scene, s.scene.victim_location, plan, window, band == Band::L1 ? &replay : nullptr, jam ? &*jam : nullptr,
          derive_seed(s.seed, fmt::format("victim/noise/{}", to_string(band)), block_no));
    }
    rx.process(blocks);
  }
  feed->finish();

  out.pvt = rx.pvt_log();
  out.channel_log = rx.channel_log();
  out.transitions = rx.transitions();
  out.acquisitions = rx.acquisitions();
  out.replay_log = forwarder.take_log();
  out.replay_log.insert(out.replay_log.end(), phase_log.begin(), phase_log.end());
  std::stable_sort(out.replay_log.begin(), out.replay_log.end(),
                   [](const auto& a, const auto& b) { return a.t < b.t; });
  std::stable_sort(out.capture_log.begin(), out.capture_log.end(),
                   [](const auto& a, const auto& b) { return a.t < b.t; });

  if (monitor) out.snapshots = monitor->take();
  score_snapshots(s, out);
  summarize_fixes(s, out.pvt, out.report);
  account(s, out);
  return out;
}

}  // namespace relaylab::lab

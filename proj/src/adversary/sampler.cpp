#include "relaylab/adversary/sampler.hpp"

#include <cmath>

#include <fmt/format.h>

#include "relaylab/signal/quantize.hpp"
#include "relaylab/signal/random.hpp"

namespace relaylab::adversary {

SamplerStream::SamplerStream(SamplerNode node, const scene::Scene& scene, std::uint64_t seed, double start_time)
    : node_(std::move(node)),
      scene_(scene),
      seed_(seed),
      start_time_(start_time),
      true_rate_(node_.cfg.sample_rate * (1.0 + node_.clock_skew)) {
  node_.cfg.validate();
}

double SamplerStream::next_send_time() const {
  return start_time_ + static_cast<double>((sequence_ + 1) * node_.cfg.frame_samples) / true_rate_;
}

CapturedFrame SamplerStream::next() {
  const auto n = node_.cfg.frame_samples;
  const double offset = static_cast<double>(sequence_ * n);
  CapturedFrame f;
  f.sequence = sequence_;
  f.capture_start = start_time_ + offset / true_rate_;
  f.send_time = next_send_time();

  const scene::AntennaFeedPlan plan{1.0, 0.0, 0.0, node_.band};
  const scene::RenderWindow window{f.capture_start, static_cast<double>(n) / true_rate_, true_rate_};
  const auto feed = scene::render_antenna_feed(scene_, node_.location, plan, window, nullptr, nullptr,
                                               signal::derive_seed(seed_, "sampler/noise", sequence_));
  auto q = signal::quantize_iq(feed, node_.cfg.quantization_bits, node_.full_scale);
  // The header carries the sampler's own clock and nominal rate.
  q.sample_rate = node_.cfg.sample_rate;
  q.start_time = start_time_ + offset / node_.cfg.sample_rate;
  f.saturated = q.saturated;
  f.bytes = wire::encode_frame(q, sequence_);
  ++sequence_;
  return f;
}

SamplerRun sampler_run(const SamplerNode& node, const scene::Scene& scene, double window_start, double duration,
                       const wire::LinkModel& link, std::uint64_t seed) {
  SamplerRun run;
  SamplerStream stream(node, scene, seed, window_start);
  const auto count = static_cast<std::uint64_t>(
      std::ceil(duration * node.cfg.sample_rate / static_cast<double>(node.cfg.frame_samples) - 1e-9));
  wire::LinkEmulator emu(link, signal::derive_seed(seed, "link"));
  run.frames.reserve(count);
  run.schedule.frames.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    auto f = stream.next();
    const auto d = emu.offer(f.send_time, f.bytes.size());
    run.capture_log.push_back({f.send_time, "frame_sent", fmt::format("seq={} bytes={}", f.sequence, f.bytes.size())});
    if (d.fate == wire::FrameFate::LostToStall) {
      run.capture_log.push_back({f.send_time, "capture_overrun", fmt::format("seq={}", f.sequence)});
    } else if (d.fate == wire::FrameFate::DroppedByLink) {
      run.capture_log.push_back({f.send_time, "link_drop", fmt::format("seq={}", f.sequence)});
    }
    run.schedule.frames.push_back(d);
    run.frames.push_back(std::move(f));
  }
  run.schedule.stalls = emu.stalls();
  run.schedule.peak_queue_bytes = emu.peak_queue_bytes();
  return run;
}

}  // namespace relaylab::adversary

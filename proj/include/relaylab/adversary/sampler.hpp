#pragma once

#include <cstdint>
#include <vector>

#include "relaylab/adversary/event_log.hpp"
#include "relaylab/scene/render.hpp"
#include "relaylab/wire/frame.hpp"
#include "relaylab/wire/link.hpp"

namespace relaylab::adversary {

struct SamplerNode {
  wire::StreamConfig cfg;
  scene::EcefPosition location;
  double full_scale = 4.0;
  double clock_skew = 0.0;  // fractional oscillator error
  Band band = Band::L1;
};

struct CapturedFrame {
  std::uint64_t sequence = 0;
  double capture_start = 0.0;  // true time of the first sample
  double send_time = 0.0;      // capture end
  std::vector<std::uint8_t> bytes;
  std::size_t saturated = 0;
};

/// Frame-by-frame sampler: renders the legitimate feed at the sampler antenna,
/// quantizes it and frames it. Frame k covers capture time
/// [k * Tf, (k + 1) * Tf) with Tf = frame_samples / sample_rate (stretched by
/// the clock skew).
class SamplerStream {
 public:
  SamplerStream(SamplerNode node, const scene::Scene& scene, std::uint64_t seed, double start_time = 0.0);

  CapturedFrame next();
  double next_send_time() const;
  std::uint64_t frames_emitted() const { return sequence_; }

 private:
  SamplerNode node_;
  const scene::Scene& scene_;
  std::uint64_t seed_;
  double start_time_;
  double true_rate_;
  std::uint64_t sequence_ = 0;
};

struct SamplerRun {
  std::vector<CapturedFrame> frames;  // every captured frame, in order
  wire::DeliverySchedule schedule;    // fate of each frame on `link`
  EventLog capture_log;
};

/// Captures ceil(duration * rate / frame_samples) frames starting at
/// window_start and offers them to the link at real-time pacing.
SamplerRun sampler_run(const SamplerNode& node, const scene::Scene& scene, double window_start,
                       double duration, const wire::LinkModel& link, std::uint64_t seed);

}  // namespace relaylab::adversary

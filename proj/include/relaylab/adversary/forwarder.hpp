#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "relaylab/adversary/event_log.hpp"
#include "relaylab/adversary/jammer.hpp"
#include "relaylab/signal/iq_buffer.hpp"

namespace relaylab::adversary {

enum class UnderrunPolicy : std::uint8_t { EmitSilence };

struct ForwarderNode {
  double jitter_buffer_target = 0.25;  // s
  double replay_gain = 2.0;            // linear amplitude (+6 dB)
  UnderrunPolicy underrun = UnderrunPolicy::EmitSilence;
  JammerConfig jammer;
  double full_scale = 4.0;             // must match the sampler

  void validate() const;
};

struct ReplayStats {
  std::uint64_t frames_received = 0;
  std::uint64_t frames_corrupt = 0;
  std::uint64_t frames_late = 0;       // arrived after their slot was skipped
  std::uint64_t samples_received = 0;
  std::uint64_t samples_played = 0;
  std::uint64_t silence_samples = 0;   // after playout start
  double gap_seconds = 0.0;            // completed underruns
};

/// Receive side of the relay: decodes arriving frames into a jitter buffer
/// and plays them out on the sample grid of `sample_rate` (grid index g sits
/// at time g / sample_rate). Playout starts jitter_buffer_target after the
/// first arrival and continues in sequence order; when the next frame has
/// not arrived the output is silence until it does.
class Forwarder {
 public:
  Forwarder(ForwarderNode node, double sample_rate);

  /// Frames must be delivered in nondecreasing arrival time.
  void receive(double arrival_time, std::span<const std::uint8_t> bytes);

  /// Emits samples for grid indices [first, first + out.size()), scaled by
  /// replay_gain. Calls must be contiguous.
  void play(std::int64_t first, std::span<signal::Sample> out);

  const EventLog& log() const { return log_; }
  EventLog take_log();
  const ReplayStats& stats() const { return stats_; }
  std::optional<double> playout_start() const;
  bool in_underrun() const { return underrun_; }

 private:
  struct Buffered {
    std::int64_t ready_index;  // first grid index at which the frame is usable
    std::vector<signal::Sample> samples;
  };

  bool load_next(std::int64_t index);

  ForwarderNode node_;
  double rate_;
  std::map<std::uint64_t, Buffered> pending_;
  std::optional<std::int64_t> start_index_;
  std::optional<std::uint64_t> next_seq_;
  std::vector<signal::Sample> current_;
  std::size_t cursor_ = 0;
  bool underrun_ = false;
  std::int64_t underrun_from_ = 0;
  std::int64_t next_play_index_ = 0;
  bool played_any_ = false;
  EventLog log_;
  ReplayStats stats_;
};

struct ArrivedFrame {
  double arrival_time = 0.0;
  std::vector<std::uint8_t> bytes;
};

struct ReplayOutput {
  signal::IqBuffer feed;
  EventLog replay_log;
  ReplayStats stats;
};

/// Batch playout over [window_start, window_start + duration).
ReplayOutput forwarder_replay(const ForwarderNode& node, std::span<const ArrivedFrame> frames,
                              double sample_rate, double window_start, double duration);

}  // namespace relaylab::adversary

#include "relaylab/adversary/forwarder.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "relaylab/errors.hpp"
#include "relaylab/signal/quantize.hpp"
#include "relaylab/wire/frame.hpp"

namespace relaylab::adversary {
namespace {

std::int64_t grid_ceil(double t, double rate) { return static_cast<std::int64_t>(std::ceil(t * rate - 1e-6)); }

}  // namespace

void ForwarderNode::validate() const {
  if (!(jitter_buffer_target >= 0.0)) throw DomainError("ForwarderNode: jitter_buffer_target must be >= 0");
  if (!(replay_gain >= 0.0)) throw DomainError("ForwarderNode: replay_gain must be >= 0");
  if (!(full_scale > 0.0)) throw DomainError("ForwarderNode: full_scale must be positive");
  jammer.validate();
}

Forwarder::Forwarder(ForwarderNode node, double sample_rate) : node_(std::move(node)), rate_(sample_rate) {
  node_.validate();
  if (!(sample_rate > 0.0)) throw DomainError("Forwarder: sample rate must be positive");
}

void Forwarder::receive(double arrival_time, std::span<const std::uint8_t> bytes) {
  const auto decoded = wire::decode_frame(bytes);
  if (const auto* err = std::get_if<wire::FrameError>(&decoded)) {
    ++stats_.frames_corrupt;
    log_.push_back({arrival_time, "frame_discarded", std::string(wire::to_string(*err))});
    return;
  }
  const auto& frame = std::get<wire::SampleFrame>(decoded);
  if (static_cast<double>(frame.sample_rate) != rate_) {
    ++stats_.frames_corrupt;
    log_.push_back({arrival_time, "frame_discarded", fmt::format("rate={}", frame.sample_rate)});
    return;
  }
  ++stats_.frames_received;
  log_.push_back({arrival_time, "frame_recv", fmt::format("seq={}", frame.sequence)});
  if (next_seq_ && frame.sequence < *next_seq_) {
    ++stats_.frames_late;
    log_.push_back({arrival_time, "frame_late", fmt::format("seq={}", frame.sequence)});
    return;
  }
  auto iq = signal::dequantize_iq(wire::frame_words(frame), node_.full_scale);
  stats_.samples_received += iq.size();
  pending_[frame.sequence] = Buffered{grid_ceil(arrival_time, rate_), std::move(iq.samples)};
  if (!start_index_) {
    start_index_ = grid_ceil(arrival_time + node_.jitter_buffer_target, rate_);
    next_seq_ = frame.sequence;
    log_.push_back({static_cast<double>(*start_index_) / rate_, "playout_start", fmt::format("seq={}", frame.sequence)});
  }
}

bool Forwarder::load_next(std::int64_t index) {
  if (pending_.empty()) return false;
  auto it = pending_.begin();
  if (it->second.ready_index > index) return false;
  if (it->first != *next_seq_) {
    log_.push_back({static_cast<double>(index) / rate_, "frames_skipped",
                    fmt::format("from={} to={}", *next_seq_, it->first - 1)});
  }
  current_ = std::move(it->second.samples);
  cursor_ = 0;
  next_seq_ = it->first + 1;
  pending_.erase(it);
  return true;
}

void Forwarder::play(std::int64_t first, std::span<signal::Sample> out) {
  if (played_any_ && first != next_play_index_) throw DomainError("Forwarder::play: non-contiguous request");
  played_any_ = true;
  next_play_index_ = first + static_cast<std::int64_t>(out.size());
  const double gain = node_.replay_gain;

  std::size_t i = 0;
  while (i < out.size()) {
    const std::int64_t idx = first + static_cast<std::int64_t>(i);
    if (!start_index_ || idx < *start_index_) {
      const auto until = start_index_ ? std::min<std::int64_t>(*start_index_ - idx, static_cast<std::int64_t>(out.size() - i))
                                      : static_cast<std::int64_t>(out.size() - i);
      std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(i), until, signal::Sample{});
      i += static_cast<std::size_t>(until);
      continue;
    }
    if (cursor_ < current_.size() || load_next(idx)) {
      if (underrun_) {
        underrun_ = false;
        const double gap = static_cast<double>(idx - underrun_from_) / rate_;
        stats_.gap_seconds += gap;
        log_.push_back({static_cast<double>(idx) / rate_, "underrun_end", fmt::format("gap={:.6f}", gap)});
      }
      const std::size_t n = std::min(current_.size() - cursor_, out.size() - i);
      for (std::size_t k = 0; k < n; ++k) out[i + k] = current_[cursor_ + k] * gain;
      cursor_ += n;
      i += n;
      stats_.samples_played += n;
      continue;
    }
    if (!underrun_) {
      underrun_ = true;
      underrun_from_ = idx;
      log_.push_back({static_cast<double>(idx) / rate_, "underrun_start", fmt::format("seq={}", *next_seq_)});
    }
    std::size_t n = out.size() - i;
    if (!pending_.empty()) {
      n = std::min<std::size_t>(n, static_cast<std::size_t>(pending_.begin()->second.ready_index - idx));
    }
    std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(i), n, signal::Sample{});
    stats_.silence_samples += n;
    i += n;
  }
}

EventLog Forwarder::take_log() {
  EventLog out;
  out.swap(log_);
  return out;
}

std::optional<double> Forwarder::playout_start() const {
  if (!start_index_) return std::nullopt;
  return static_cast<double>(*start_index_) / rate_;
}

ReplayOutput forwarder_replay(const ForwarderNode& node, std::span<const ArrivedFrame> frames, double sample_rate,
                              double window_start, double duration) {
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].arrival_time < frames[i - 1].arrival_time) {
      throw DomainError("forwarder_replay: frames must be ordered by arrival time");
    }
  }
  Forwarder fwd(node, sample_rate);
  ReplayOutput out;
  out.feed = signal::IqBuffer(signal::sample_count(duration, sample_rate), sample_rate, window_start);
  const std::int64_t first = grid_ceil(window_start, sample_rate);
  out.feed.start_time = static_cast<double>(first) / sample_rate;

  // Interleave arrivals and playout so each frame is delivered before the
  // grid index at which it becomes usable.
  std::size_t next = 0;
  std::int64_t idx = first;
  const std::int64_t end = first + static_cast<std::int64_t>(out.feed.size());
  while (idx < end) {
    while (next < frames.size() && grid_ceil(frames[next].arrival_time, sample_rate) <= idx) {
      fwd.receive(frames[next].arrival_time, frames[next].bytes);
      ++next;
    }
    std::int64_t stop = end;
    if (next < frames.size()) stop = std::min(stop, std::max(idx + 1, grid_ceil(frames[next].arrival_time, sample_rate)));
    fwd.play(idx, std::span(out.feed.samples).subspan(static_cast<std::size_t>(idx - first),
                                                     static_cast<std::size_t>(stop - idx)));
    idx = stop;
  }
  out.replay_log = fwd.take_log();
  out.stats = fwd.stats();
  return out;
}

}  // namespace relaylab::adversary

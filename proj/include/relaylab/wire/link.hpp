#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "relaylab/signal/random.hpp"

namespace relaylab::wire {

enum class LinkMode : std::uint8_t { ReliableStream, LossyDatagram };

struct CongestionEpisode {
  double start = 0.0;
  double duration = 0.0;
  double bandwidth_factor = 1.0;  // [0, 1]
};

/// Emulated sampler-to-forwarder path, evaluated in virtual time.
struct LinkModel {
  double bandwidth = 50e6;  // bits/s; +inf for an ideal link
  double base_latency = 0.0;
  double jitter_stddev = 0.0;
  LinkMode mode = LinkMode::ReliableStream;
  double loss_prob = 0.0;   // LossyDatagram only
  std::vector<CongestionEpisode> congestion_episodes;  // sorted, non-overlapping
  std::uint64_t send_buffer_limit = 4u << 20;          // bytes

  void validate() const;

  /// Available service rate at time t (bandwidth * episode factor).
  double rate_at(double t) const;
  /// Bits the link can serve in [t0, t1].
  double served_bits(double t0, double t1) const;
  /// Earliest t >= t0 with served_bits(t0, t) >= bits (+inf if never).
  double time_to_serve(double t0, double bits) const;
};

/// Returns `link` with the episode appended (kept sorted). Throws DomainError
/// on duration <= 0, factor outside [0, 1], or overlap with an existing episode.
LinkModel apply_congestion_episode(LinkModel link, double start, double duration, double factor);

enum class FrameFate : std::uint8_t {
  Delivered,
  DroppedByLink,  // lossy loss or tail drop
  LostToStall,    // sender blocked; the capture overran while waiting
};

struct FrameDelivery {
  double send_time = 0.0;
  double arrival_time = std::numeric_limits<double>::infinity();
  FrameFate fate = FrameFate::Delivered;
  std::size_t bytes = 0;
  std::uint64_t queue_depth = 0;  // send-queue bytes right after the offer
};

struct StallInterval {
  double start = 0.0;
  double end = 0.0;
};

struct DeliverySchedule {
  std::vector<FrameDelivery> frames;
  std::vector<StallInterval> stalls;  // merged, time-ordered
  std::uint64_t peak_queue_bytes = 0;

  double stall_seconds(double horizon = std::numeric_limits<double>::infinity()) const;
  std::uint64_t delivered_bytes() const;
  std::uint64_t dropped_bytes() const;  // link drops + stall losses
};

struct OfferedFrame {
  double send_time = 0.0;
  std::size_t bytes = 0;
};

/// Incremental form of link_transmit: frames are offered one at a time in
/// nondecreasing send_time order.
///
/// ReliableStream: a FIFO fluid server of rate bandwidth * factor(t). A frame
/// that would push the unsent backlog above send_buffer_limit finds the
/// sender blocked: it is lost to the stall and the blocked interval (until the
/// backlog has drained enough to take it) is recorded. Arrivals are forced
/// nondecreasing (in-order byte stream).
///
/// LossyDatagram: independent loss with loss_prob, tail drop instead of
/// blocking, arrivals may reorder under jitter.
///
/// Jitter is half-normal, |N(0, jitter_stddev)|, added to base_latency.
class LinkEmulator {
 public:
  LinkEmulator(LinkModel link, std::uint64_t seed);

  FrameDelivery offer(double send_time, std::size_t bytes);

  const LinkModel& model() const { return link_; }
  const std::vector<StallInterval>& stalls() const { return stalls_; }
  std::uint64_t peak_queue_bytes() const { return peak_queue_; }
  /// Unsent bytes at time t (t must not precede the last offer).
  double backlog_bytes(double t);

 private:
  struct Pending {
    double start;   // service start
    double finish;  // service end
    std::size_t bytes;
  };

  void retire(double t);
  void add_stall(double start, double end);

  LinkModel link_;
  signal::Rng rng_;
  std::deque<Pending> pending_;
  double busy_until_ = 0.0;
  double last_send_ = -std::numeric_limits<double>::infinity();
  double last_arrival_ = -std::numeric_limits<double>::infinity();
  std::vector<StallInterval> stalls_;
  std::uint64_t peak_queue_ = 0;
};

/// Pure schedule computation over a whole offered sequence.
DeliverySchedule link_transmit(const LinkModel& link, std::span<const OfferedFrame> offered,
                               std::uint64_t seed);

/// CSV trace: send_time,arrival_time,stalled,queue_depth
void write_link_trace_csv(std::ostream& os, const DeliverySchedule& schedule);

}  // namespace relaylab::wire

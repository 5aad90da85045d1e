#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relaylab/receiver/acquisition.hpp"
#include "relaylab/receiver/config.hpp"
#include "relaylab/receiver/pseudorange.hpp"
#include "relaylab/receiver/pvt.hpp"
#include "relaylab/receiver/tracking.hpp"
#include "relaylab/scene/geometry.hpp"
#include "relaylab/signal/synthesis.hpp"

namespace relaylab::receiver {

struct PvtRecord {
  double t = 0.0;  // scenario time of the measurement epoch
  PvtSolution solution;
};

struct ChannelLogRow {
  double t = 0.0;
  int prn_id = 0;
  Band band = Band::L1;
  ChannelState state = ChannelState::Idle;
  double cn0 = 0.0;
  double code_phase = 0.0;
  double doppler = 0.0;
};

struct StateTransition {
  double t = 0.0;
  int prn_id = 0;
  Band band = Band::L1;
  ChannelState from = ChannelState::Idle;
  ChannelState to = ChannelState::Idle;
  double lock_timer = 0.0;  // at the transition
};

struct AcquisitionEvent {
  double t = 0.0;
  Band band = Band::L1;
  AcquisitionResult result;
};

/// Streaming software receiver. Feed it contiguous blocks (one per configured
/// band, same window) in time order; it runs acquisition searches every
/// reacquisition period for channels that are not tracking, tracks every
/// 1 ms code epoch, and solves PVT every pvt_interval from the channels that
/// are tracking with a resolved transmit time.
class Receiver {
 public:
  /// `scene` supplies satellite positions (the receiver's ephemeris) and the
  /// navigation bit sequences; it must outlive the receiver.
  Receiver(ReceiverConfig cfg, const scene::Scene& scene, double sample_rate, ReceiverAssist assist = {});
  ~Receiver();
  Receiver(Receiver&&) noexcept;
  Receiver& operator=(Receiver&&) noexcept;

  void process(std::span<const signal::IqBuffer> band_blocks);

  const ReceiverConfig& config() const { return cfg_; }
  const std::vector<PvtRecord>& pvt_log() const { return pvt_; }
  const std::vector<ChannelLogRow>& channel_log() const { return channel_log_; }
  const std::vector<StateTransition>& transitions() const { return transitions_; }
  const std::vector<AcquisitionEvent>& acquisitions() const { return acquisitions_; }
  std::vector<TrackingChannel> channels(Band band) const;

 private:
  struct BandState;

  void run_segment(std::int64_t cut);
  void run_acquisition(BandState& b, std::int64_t tick_index);
  void solve_at(std::int64_t index);
  void record_transition(const TrackingChannel& ch, ChannelState from, std::int64_t index);
  void log_channels(std::int64_t index);
  double time_of(std::int64_t index) const { return static_cast<double>(index) / fs_; }

  ReceiverConfig cfg_;
  const scene::Scene* scene_;
  double fs_;
  ReceiverAssist assist_;
  std::vector<std::unique_ptr<BandState>> bands_;
  std::int64_t processed_ = 0;
  bool started_ = false;
  std::int64_t next_acq_tick_ = 0;
  std::int64_t next_pvt_tick_ = 0;
  std::optional<PvtGuess> last_fix_;
  std::vector<PvtRecord> pvt_;
  std::vector<ChannelLogRow> channel_log_;
  std::vector<StateTransition> transitions_;
  std::vector<AcquisitionEvent> acquisitions_;
};

struct ReceiverRun {
  std::vector<PvtRecord> pvt;
  std::vector<ChannelLogRow> channel_log;
  std::vector<StateTransition> transitions;
};

/// Runs a receiver over a single-band feed split into frame-sized blocks.
ReceiverRun receiver_run(const signal::IqBuffer& feed, const ReceiverConfig& cfg, const scene::Scene& scene,
                         const ReceiverAssist& assist = {}, std::size_t block_samples = 4096);

void write_pvt_csv(std::ostream& os, const std::vector<PvtRecord>& log);
/// Rows for `band` only.
void write_channel_csv(std::ostream& os, const std::vector<ChannelLogRow>& log, Band band);

}  // namespace relaylab::receiver

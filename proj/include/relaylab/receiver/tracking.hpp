#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <deque>
#include <span>
#include <string_view>

#include "relaylab/receiver/config.hpp"
#include "relaylab/signal/iq_buffer.hpp"

namespace relaylab::receiver {

enum class ChannelState : std::uint8_t { Idle, Acquiring, Tracking, Lost };

std::string_view to_string(ChannelState s);

/// Samples with absolute grid indices [first_index, first_index + size).
struct FeedView {
  std::span<const signal::Sample> samples;
  std::int64_t first_index = 0;
  double sample_rate = 0.0;

  std::int64_t end_index() const { return first_index + static_cast<std::int64_t>(samples.size()); }
};

FeedView view_of(const signal::IqBuffer& buf);

/// One demodulated navigation bit (20 code epochs, prompt sum).
struct BitRecord {
  std::int64_t start_epoch = 0;  // epoch_count at the first epoch of the bit
  std::complex<double> value;
};

struct TrackingChannel {
  int prn_id = 1;
  Band band = Band::L1;
  ChannelState state = ChannelState::Idle;
  double code_phase = 0.0;  // chips, delay modulo one code period
  double doppler = 0.0;     // Hz
  double cn0_est = 0.0;     // dB-Hz
  double lock_timer = 0.0;  // s spent below the C/N0 floor while tracking
  double sample_rate = 0.0; // feed rate the loop state refers to

  // Code/carrier loop state. epoch_start is the (fractional) grid index of the
  // next local code epoch; the carrier phase refers to that instant.
  double epoch_start = 0.0;
  double carrier_phase = 0.0;
  bool verifying = false;       // acquired, still pulling in
  double tracked_time = 0.0;    // s since acquisition
  std::int64_t epoch_count = 0; // epochs integrated since acquisition
  double last_epoch_start = 0.0;
  double last_chips_per_sample = 0.0;
  std::complex<double> last_prompt;
  bool has_prompt = false;

  // Narrowband/wideband power ratio C/N0 estimator.
  static constexpr int kNwprBlock = 5;
  static constexpr int kNwprBlocks = 20;
  std::array<double, kNwprBlocks> nwpr_ratios{};
  int nwpr_count = 0;
  int nwpr_pos = 0;
  std::complex<double> block_sum;
  double block_wide = 0.0;
  int block_len = 0;

  // Bit synchronisation and transmit-time recovery.
  std::array<int, kCodePeriodsPerBit> flip_histogram{};
  int flip_total = 0;
  int bit_phase = -1;  // epoch_count modulo 20 at which bits start
  std::complex<double> bit_acc;
  int bit_len = 0;
  std::deque<BitRecord> bits;
  std::int64_t bits_total = 0;
  bool time_resolved = false;
  std::int64_t ref_epoch = 0;      // epoch_count of a bit start ...
  std::int64_t ref_bit_index = 0;  // ... and that bit's absolute index
  std::int64_t bits_checked = 0;
  std::uint32_t mismatch_history = 0;

  double chips_per_sample(double sample_rate) const;
  /// Transmit time (s) of the signal at grid index `sample_index`, from the
  /// last integrated epoch. Valid only when time_resolved.
  double transmit_time_at(double sample_index) const;
  /// Restarts the channel on an acquisition at grid index `epoch_start`.
  void start(double epoch_start_index, double doppler_hz, double rate);
  void reset_time();
};

/// Integrates every complete code epoch available in `feed`, updating the
/// DLL, FLL, C/N0 estimate, lock timer, bit synchronisation and state
/// (Acquiring -> Tracking after a confirmed pull-in, Tracking -> Lost once the
/// lock timer exceeds the loss timeout). Throws DomainError on a rate mismatch.
TrackingChannel track_update(TrackingChannel ch, const FeedView& feed, const ReceiverConfig& cfg);
TrackingChannel track_update(TrackingChannel ch, const signal::IqBuffer& segment, const ReceiverConfig& cfg);

/// In-place form used by the receiver loop.
void track_in_place(TrackingChannel& ch, const FeedView& feed, const ReceiverConfig& cfg);

}  // namespace relaylab::receiver

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "relaylab/constants.hpp"
#include "relaylab/signal/iq_buffer.hpp"

namespace relaylab::signal {

/// 50 b/s navigation data, indexed by transmit-time bit number
/// (bit k covers transmit time [k * 20 ms, (k + 1) * 20 ms)).
///
/// The default source is a seeded pseudorandom +/-1 stream. Because a bit's
/// value depends only on (seed, prn, k), a receiver that knows the seed can
/// recover absolute transmit time from a window of demodulated bits, which is
/// what a replayed signal carries along to the victim.
class NavBitSource {
 public:
  NavBitSource() = default;  // all bits +1

  static NavBitSource seeded(std::uint64_t seed);
  static NavBitSource explicit_bits(std::vector<std::int8_t> bits, std::int64_t first_index = 0);

  int bit(int prn, std::int64_t index) const;

  bool is_seeded() const { return kind_ == Kind::Seeded; }
  std::uint64_t seed() const { return seed_; }

 private:
  enum class Kind : std::uint8_t { Constant, Seeded, Explicit };
  Kind kind_ = Kind::Constant;
  std::uint64_t seed_ = 0;
  std::shared_ptr<const std::vector<std::int8_t>> bits_;
  std::int64_t first_index_ = 0;
};

struct SatelliteSignalSpec {
  int prn_id = 1;
  double amplitude = 1.0;          // linear, >= 0
  double code_phase_offset = 0.0;  // chips, [0, 1023): signal delay within one period
  std::int64_t whole_periods = 0;  // whole code periods of delay (aligns nav bits)
  double doppler_hz = 0.0;
  double carrier_phase = 0.0;      // rad
  double carrier_hz = kL1CarrierHz;  // scales code Doppler
  NavBitSource nav;

  /// Total signal delay in chips (whole periods + fractional offset).
  double total_delay_chips() const {
    return static_cast<double>(whole_periods) * kCodeLength + code_phase_offset;
  }
  void validate() const;
};

/// Splits a propagation delay (seconds) into whole code periods and a
/// [0, 1023) chip offset.
void set_delay(SatelliteSignalSpec& spec, double delay_s);

/// Noiseless sum of satellite signals. At absolute time t the signal of
/// satellite k is
///   A_k * c_k(u_k(t)) * d_k(u_k(t)) * exp(i (2 pi f_k t + phi_k)),
///   u_k(t) = start * Rc + (t - start) * Rc * (1 + f_k / f_carrier) - delay_k,
/// with u the unwrapped chip count (transmit time in chips).
/// Throws DomainError if sample_rate < 1.023 MHz or duration <= 0.
IqBuffer synthesize_baseband(std::span<const SatelliteSignalSpec> specs, double sample_rate,
                             double duration, double start_time);

/// Same, accumulating into an existing buffer (its rate/start/length define the window).
void synthesize_into(IqBuffer& out, std::span<const SatelliteSignalSpec> specs);

/// Adds complex AWGN with E|n|^2 = noise_variance (variance/2 per component).
IqBuffer add_awgn(IqBuffer buffer, double noise_variance, std::uint64_t seed);
void add_awgn_inplace(IqBuffer& buffer, double noise_variance, std::uint64_t seed);

}  // namespace relaylab::signal

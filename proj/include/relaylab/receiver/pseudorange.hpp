#pragma once

#include <span>
#include <vector>

#include "relaylab/receiver/tracking.hpp"
#include "relaylab/signal/synthesis.hpp"

namespace relaylab::receiver {

struct PseudorangeMeasurement {
  int prn_id = 0;
  Band band = Band::L1;
  double pseudorange = 0.0;    // m
  double transmit_time = 0.0;  // s
};

/// Matches the last `window_bits` demodulated bits (as bit-to-bit sign
/// changes, which removes the carrier phase ambiguity) against the known bit
/// sequence for transmit times in [local_time - search_window, local_time + 1 s].
/// On a unique match the channel's transmit time becomes resolved.
bool resolve_transmit_time(TrackingChannel& ch, const signal::NavBitSource& nav, double local_time,
                           double search_window, int window_bits = 32);

/// Checks bits demodulated since the last call against the resolved time.
/// Four mismatches within the last 16 bits drop the resolution (and the bit
/// synchronisation) so it is recovered afresh. Returns the resolution state.
bool check_transmit_time(TrackingChannel& ch, const signal::NavBitSource& nav);

/// Tracking, time-resolved channels contribute one pseudorange each:
/// rho = c * (local receive time - transmit time) at grid index epoch_index.
std::vector<PseudorangeMeasurement> extract_pseudoranges(std::span<const TrackingChannel> channels,
                                                         double epoch_index, double sample_rate,
                                                         double local_clock_offset = 0.0);

}  // namespace relaylab::receiver

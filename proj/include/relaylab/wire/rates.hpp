#pragma once

#include "relaylab/wire/frame.hpp"

namespace relaylab::wire {

/// Payload data rate in bits/s: sample_rate * quantization_bits * 2 (I and Q).
double required_data_rate(const StreamConfig& cfg);

/// Payload rate plus per-frame header overhead:
/// required * (1 + header_bytes / payload_bytes_per_frame).
double framed_data_rate(const StreamConfig& cfg);

/// Payload bytes carried by one full frame.
std::size_t payload_bytes_per_frame(const StreamConfig& cfg);

}  // namespace relaylab::wire

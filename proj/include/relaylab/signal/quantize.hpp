#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "relaylab/signal/iq_buffer.hpp"

namespace relaylab::signal {

/// Interleaved I/Q integer words at a fixed bit depth.
struct QuantizedBuffer {
  int bits = 16;                    // 4, 8, 12 or 16
  std::vector<std::int16_t> words;  // I0, Q0, I1, Q1, ...
  double sample_rate = 0.0;
  double start_time = 0.0;
  std::size_t saturated = 0;        // words clipped to the signed range

  std::size_t sample_count() const { return words.size() / 2; }
  /// Payload size in bits: sample_count * bits * 2.
  std::uint64_t payload_bits() const {
    return static_cast<std::uint64_t>(sample_count()) * static_cast<std::uint64_t>(bits) * 2;
  }
  void validate() const;
};

bool valid_bit_depth(int bits);

/// Largest representable magnitude, 2^(bits-1) - 1.
std::int32_t max_word(int bits);

/// round(x / full_scale * (2^(bits-1) - 1)), saturating. Throws DomainError on
/// unsupported bits or full_scale <= 0.
QuantizedBuffer quantize_iq(const IqBuffer& buffer, int bits, double full_scale);

/// Inverse affine map. Throws FormatError on an odd word count or words out of range.
IqBuffer dequantize_iq(const QuantizedBuffer& q, double full_scale);

/// Little-endian serialization, I then Q per sample, no padding. 4-bit words
/// pack two per byte, the first word in the low nibble; 12-bit words pack two
/// per three bytes, the first word in the low 12 bits.
std::vector<std::uint8_t> serialize_words(std::span<const std::int16_t> words, int bits);

/// Inverse of serialize_words for `word_count` words. Throws FormatError if
/// the byte count does not match.
std::vector<std::int16_t> deserialize_words(std::span<const std::uint8_t> bytes, int bits,
                                            std::size_t word_count);

/// Bytes needed for `word_count` words at `bits`.
std::size_t packed_size(std::size_t word_count, int bits);

}  // namespace relaylab::signal

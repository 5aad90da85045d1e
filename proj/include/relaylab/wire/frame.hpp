#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "relaylab/constants.hpp"
#include "relaylab/signal/quantize.hpp"

namespace relaylab::wire {

/// Sampler stream parameters.
struct StreamConfig {
  double sample_rate = kDefaultSampleRate;  // Hz, integral for the wire header
  int quantization_bits = 16;
  std::uint32_t frame_samples = 4096;

  double frame_duration() const { return frame_samples / sample_rate; }
  void validate() const;
};

inline constexpr std::array<std::uint8_t, 4> kFrameMagic = {'M', 'E', 'A', 'C'};
inline constexpr std::uint8_t kFrameVersion = 1;

// magic(4) version(1) sequence(8) start_time_ns(8) sample_rate(4) bits(1)
// sample_count(4) crc32(4), all little-endian.
inline constexpr std::size_t kHeaderBytes = 34;
inline constexpr std::size_t kCrcOffset = 30;

struct SampleFrame {
  std::uint8_t version = kFrameVersion;
  std::uint64_t sequence = 0;
  std::uint64_t start_time_ns = 0;
  std::uint32_t sample_rate = 0;
  std::uint8_t bits = 16;
  std::uint32_t sample_count = 0;
  std::vector<std::uint8_t> payload;
  std::uint32_t crc32 = 0;

  double start_time() const { return static_cast<double>(start_time_ns) * 1e-9; }
};

enum class FrameError : std::uint8_t { BadMagic, BadVersion, CrcMismatch, Truncated };

std::string_view to_string(FrameError e);

/// Serializes a quantized slice as one frame. The slice's start_time maps to
/// nanoseconds since the scenario epoch (must be >= 0).
std::vector<std::uint8_t> encode_frame(const signal::QuantizedBuffer& slice, std::uint64_t sequence);

/// Total encoded size of a frame carrying `samples` samples.
std::size_t frame_size(std::uint32_t samples, int bits);

std::variant<SampleFrame, FrameError> decode_frame(std::span<const std::uint8_t> bytes);

/// Unpacks a decoded frame back into quantized words.
signal::QuantizedBuffer frame_words(const SampleFrame& frame);

/// CRC-32 (IEEE 802.3, reflected, init/xorout 0xFFFFFFFF).
std::uint32_t crc32(std::span<const std::uint8_t> bytes, std::uint32_t seed = 0);

}  // namespace relaylab::wire

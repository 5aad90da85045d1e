#include "relaylab/wire/frame.hpp"

#include <zlib.h>

#include <cmath>
#include <limits>

#include "relaylab/errors.hpp"

namespace relaylab::wire {
namespace {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

template <typename T>
T get_le(std::span<const std::uint8_t> in, std::size_t off) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(in[off + i]) << (8 * i));
  return v;
}

}  // namespace

void StreamConfig::validate() const {
  if (!(sample_rate > 0.0) || sample_rate != std::floor(sample_rate) ||
      sample_rate > std::numeric_limits<std::uint32_t>::max()) {
    throw DomainError("StreamConfig: sample_rate must be a positive integral Hz value");
  }
  if (!signal::valid_bit_depth(quantization_bits)) {
    throw DomainError("StreamConfig: quantization_bits must be 4, 8, 12 or 16");
  }
  if (frame_samples == 0) throw DomainError("StreamConfig: frame_samples must be positive");
  if (quantization_bits == 4 && frame_samples % 2 != 0) {
    throw DomainError("StreamConfig: frame_samples must be even in 4-bit mode");
  }
}

std::string_view to_string(FrameError e) {
  switch (e) {
    case FrameError::BadMagic: return "BadMagic";
    case FrameError::BadVersion: return "BadVersion";
    case FrameError::CrcMismatch: return "CrcMismatch";
    case FrameError::Truncated: return "Truncated";
  }
  return "?";
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes, std::uint32_t seed) {
  // zlib treats a null buffer as a request for the initial value.
  if (bytes.empty()) return seed;
  return static_cast<std::uint32_t>(::crc32(seed, bytes.data(), static_cast<uInt>(bytes.size())));
}

std::size_t frame_size(std::uint32_t samples, int bits) {
  return kHeaderBytes + signal::packed_size(static_cast<std::size_t>(samples) * 2, bits);
}

std::vector<std::uint8_t> encode_frame(const signal::QuantizedBuffer& slice, std::uint64_t sequence) {
  slice.validate();
  if (slice.sample_count() > std::numeric_limits<std::uint32_t>::max()) {
    throw DomainError("encode_frame: too many samples for one frame");
  }
  if (!(slice.start_time >= 0.0)) throw DomainError("encode_frame: start_time before scenario epoch");

  const auto payload = signal::serialize_words(slice.words, slice.bits);
  std::vector<std::uint8_t> out(kFrameMagic.begin(), kFrameMagic.end());
  out.reserve(kHeaderBytes + payload.size());
  out.push_back(kFrameVersion);
  put_le<std::uint64_t>(out, sequence);
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(std::llround(slice.start_time * 1e9)));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(std::llround(slice.sample_rate)));
  out.push_back(static_cast<std::uint8_t>(slice.bits));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(slice.sample_count()));

  std::uint32_t crc = crc32(std::span(out).subspan(4, kCrcOffset - 4));
  crc = crc32(payload, crc);
  put_le<std::uint32_t>(out, crc);
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

std::variant<SampleFrame, FrameError> decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFrameMagic.size()) return FrameError::Truncated;
  for (std::size_t i = 0; i < kFrameMagic.size(); ++i) {
    if (bytes[i] != kFrameMagic[i]) return FrameError::BadMagic;
  }
  if (bytes.size() < kHeaderBytes) return FrameError::Truncated;
  SampleFrame f;
  f.version = bytes[4];
  if (f.version != kFrameVersion) return FrameError::BadVersion;
  f.sequence = get_le<std::uint64_t>(bytes, 5);
  f.start_time_ns = get_le<std::uint64_t>(bytes, 13);
  f.sample_rate = get_le<std::uint32_t>(bytes, 21);
  f.bits = bytes[25];
  f.sample_count = get_le<std::uint32_t>(bytes, 26);
  f.crc32 = get_le<std::uint32_t>(bytes, kCrcOffset);

  // A corrupted bits field must not be trusted for sizing; the CRC decides.
  const int bits = signal::valid_bit_depth(f.bits) ? f.bits : 16;
  const std::size_t payload_len = signal::packed_size(static_cast<std::size_t>(f.sample_count) * 2, bits);
  if (bytes.size() - kHeaderBytes < payload_len) return FrameError::Truncated;
  const auto payload = bytes.subspan(kHeaderBytes, payload_len);

  std::uint32_t crc = crc32(bytes.subspan(4, kCrcOffset - 4));
  crc = crc32(payload, crc);
  if (crc != f.crc32 || !signal::valid_bit_depth(f.bits)) return FrameError::CrcMismatch;
  f.payload.assign(payload.begin(), payload.end());
  return f;
}

signal::QuantizedBuffer frame_words(const SampleFrame& frame) {
  signal::QuantizedBuffer q;
  q.bits = frame.bits;
  q.sample_rate = frame.sample_rate;
  q.start_time = frame.start_time();
  q.words = signal::deserialize_words(frame.payload, frame.bits, static_cast<std::size_t>(frame.sample_count) * 2);
  return q;
}

}  // namespace relaylab::wire

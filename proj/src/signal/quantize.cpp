#include "relaylab/signal/quantize.hpp"

#include <cmath>
#include <string>

#include "relaylab/errors.hpp"

namespace relaylab::signal {

bool valid_bit_depth(int bits) { return bits == 4 || bits == 8 || bits == 12 || bits == 16; }

std::int32_t max_word(int bits) { return (std::int32_t{1} << (bits - 1)) - 1; }

void QuantizedBuffer::validate() const {
  if (!valid_bit_depth(bits)) throw FormatError("QuantizedBuffer: unsupported bit depth");
  if (words.size() % 2 != 0) throw FormatError("QuantizedBuffer: odd word count (I/Q unpaired)");
  const std::int32_t hi = max_word(bits);
  const std::int32_t lo = -hi - 1;
  for (const auto w : words) {
    if (w < lo || w > hi) throw FormatError("QuantizedBuffer: word outside signed range");
  }
}

QuantizedBuffer quantize_iq(const IqBuffer& buffer, int bits, double full_scale) {
  if (!valid_bit_depth(bits)) {
    throw DomainError("quantize_iq: bits must be 4, 8, 12 or 16 (got " + std::to_string(bits) + ")");
  }
  if (!(full_scale > 0.0)) throw DomainError("quantize_iq: full_scale must be positive");

  QuantizedBuffer q;
  q.bits = bits;
  q.sample_rate = buffer.sample_rate;
  q.start_time = buffer.start_time;
  q.words.resize(buffer.size() * 2);

  const double hi = max_word(bits);
  const double lo = -hi - 1.0;
  const double scale = hi / full_scale;
  auto convert = [&](double x) -> std::int16_t {
    double r = std::round(x * scale);
    if (r > hi) {
      r = hi;
      ++q.saturated;
    } else if (r < lo) {
      r = lo;
      ++q.saturated;
    }
    return static_cast<std::int16_t>(r);
  };
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    q.words[2 * i] = convert(buffer.samples[i].real());
    q.words[2 * i + 1] = convert(buffer.samples[i].imag());
  }
  return q;
}

IqBuffer dequantize_iq(const QuantizedBuffer& q, double full_scale) {
  q.validate();
  if (!(full_scale > 0.0)) throw DomainError("dequantize_iq: full_scale must be positive");
  IqBuffer out(q.sample_count(), q.sample_rate, q.start_time);
  const double step = full_scale / max_word(q.bits);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.samples[i] = {q.words[2 * i] * step, q.words[2 * i + 1] * step};
  }
  return out;
}

std::size_t packed_size(std::size_t word_count, int bits) {
  return (word_count * static_cast<std::size_t>(bits) + 7) / 8;
}

std::vector<std::uint8_t> serialize_words(std::span<const std::int16_t> words, int bits) {
  if (!valid_bit_depth(bits)) throw DomainError("serialize_words: unsupported bit depth");
  if (words.size() % 2 != 0) throw FormatError("serialize_words: odd word count");
  std::vector<std::uint8_t> out;
  out.reserve(packed_size(words.size(), bits));
  switch (bits) {
    case 16:
      for (const auto w : words) {
        const auto u = static_cast<std::uint16_t>(w);
        out.push_back(static_cast<std::uint8_t>(u & 0xFF));
        out.push_back(static_cast<std::uint8_t>(u >> 8));
      }
      break;
    case 8:
      for (const auto w : words) out.push_back(static_cast<std::uint8_t>(static_cast<std::int8_t>(w)));
      break;
    case 12:
      for (std::size_t i = 0; i < words.size(); i += 2) {
        const std::uint32_t a = static_cast<std::uint16_t>(words[i]) & 0xFFFu;
        const std::uint32_t b = static_cast<std::uint16_t>(words[i + 1]) & 0xFFFu;
        const std::uint32_t v = a | (b << 12);
        out.push_back(static_cast<std::uint8_t>(v & 0xFF));
        out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
        out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
      }
      break;
    case 4:
      for (std::size_t i = 0; i < words.size(); i += 2) {
        const std::uint32_t a = static_cast<std::uint16_t>(words[i]) & 0xFu;
        const std::uint32_t b = static_cast<std::uint16_t>(words[i + 1]) & 0xFu;
        out.push_back(static_cast<std::uint8_t>(a | (b << 4)));
      }
      break;
  }
  return out;
}

namespace {

std::int16_t sign_extend(std::uint32_t v, int bits) {
  const std::uint32_t sign = 1u << (bits - 1);
  const auto x = static_cast<std::int32_t>(v ^ sign) - static_cast<std::int32_t>(sign);
  return static_cast<std::int16_t>(x);
}

}  // namespace

std::vector<std::int16_t> deserialize_words(std::span<const std::uint8_t> bytes, int bits,
                                            std::size_t word_count) {
  if (!valid_bit_depth(bits)) throw FormatError("deserialize_words: unsupported bit depth");
  if (word_count % 2 != 0) throw FormatError("deserialize_words: odd word count");
  if (bytes.size() != packed_size(word_count, bits)) {
    throw FormatError("deserialize_words: payload length does not match word count");
  }
  std::vector<std::int16_t> out(word_count);
  switch (bits) {
    case 16:
      for (std::size_t i = 0; i < word_count; ++i) {
        const auto u = static_cast<std::uint16_t>(bytes[2 * i] | (bytes[2 * i + 1] << 8));
        out[i] = static_cast<std::int16_t>(u);
      }
      break;
    case 8:
      for (std::size_t i = 0; i < word_count; ++i) out[i] = static_cast<std::int8_t>(bytes[i]);
      break;
    case 12:
      for (std::size_t i = 0, j = 0; i < word_count; i += 2, j += 3) {
        const std::uint32_t v = bytes[j] | (bytes[j + 1] << 8) | (static_cast<std::uint32_t>(bytes[j + 2]) << 16);
        out[i] = sign_extend(v & 0xFFFu, 12);
        out[i + 1] = sign_extend((v >> 12) & 0xFFFu, 12);
      }
      break;
    case 4:
      for (std::size_t i = 0; i < word_count; i += 2) {
        const std::uint8_t b = bytes[i / 2];
        out[i] = sign_extend(b & 0xFu, 4);
        out[i + 1] = sign_extend((b >> 4) & 0xFu, 4);
      }
      break;
  }
  return out;
}

}  // namespace relaylab::signal

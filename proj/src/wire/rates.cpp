#include "relaylab/wire/rates.hpp"

namespace relaylab::wire {

double required_data_rate(const StreamConfig& cfg) {
  return cfg.sample_rate * cfg.quantization_bits * 2.0;
}

std::size_t payload_bytes_per_frame(const StreamConfig& cfg) {
  return signal::packed_size(static_cast<std::size_t>(cfg.frame_samples) * 2, cfg.quantization_bits);
}

double framed_data_rate(const StreamConfig& cfg) {
  const auto payload = static_cast<double>(payload_bytes_per_frame(cfg));
  return required_data_rate(cfg) * (1.0 + static_cast<double>(kHeaderBytes) / payload);
}

}  // namespace relaylab::wire

#include "relaylab/signal/iq_buffer.hpp"

#include <cmath>

#include "relaylab/errors.hpp"

namespace relaylab::signal {

IqBuffer::IqBuffer(std::size_t n, double rate, double start)
    : samples(n), sample_rate(rate), start_time(start) {}

void IqBuffer::validate() const {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw DomainError("IqBuffer: sample_rate must be positive");
  }
  for (const auto& s : samples) {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
      throw DomainError("IqBuffer: non-finite sample");
    }
  }
}

std::size_t sample_count(double duration, double sample_rate) {
  return static_cast<std::size_t>(std::llround(duration * sample_rate));
}

double mean_power(const IqBuffer& buf) {
  if (buf.samples.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& s : buf.samples) acc += std::norm(s);
  return acc / static_cast<double>(buf.samples.size());
}

void accumulate(IqBuffer& a, const IqBuffer& b, double gain) {
  if (a.sample_rate != b.sample_rate) throw DomainError("accumulate: sample-rate mismatch");
  if (a.size() != b.size()) throw DomainError("accumulate: length mismatch");
  if (std::abs(a.start_time - b.start_time) > 0.5 / a.sample_rate) {
    throw DomainError("accumulate: buffers not time-aligned");
  }
  if (gain == 0.0) return;
  for (std::size_t i = 0; i < a.size(); ++i) a.samples[i] += gain * b.samples[i];
}

}  // namespace relaylab::signal

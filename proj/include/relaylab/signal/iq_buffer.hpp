#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace relaylab::signal {

using Sample = std::complex<double>;

/// Timestamped block of complex baseband samples. start_time is on the
/// scenario clock; sample n sits at start_time + n / sample_rate.
struct IqBuffer {
  std::vector<Sample> samples;
  double sample_rate = 0.0;
  double start_time = 0.0;

  IqBuffer() = default;
  IqBuffer(std::size_t n, double rate, double start);

  std::size_t size() const { return samples.size(); }
  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
  double end_time() const { return start_time + duration(); }
  double time_of(std::size_t n) const { return start_time + static_cast<double>(n) / sample_rate; }

  /// Throws DomainError unless sample_rate > 0 and every sample is finite.
  void validate() const;
};

/// Number of samples in [0, duration) at the given rate (rounded to nearest).
std::size_t sample_count(double duration, double sample_rate);

/// Mean of |s|^2.
double mean_power(const IqBuffer& buf);

/// Sample-wise a += gain * b. Rates and start times must agree.
void accumulate(IqBuffer& a, const IqBuffer& b, double gain = 1.0);

}  // namespace relaylab::signal

#include "relaylab/spectral/resample.hpp"

#include <algorithm>

#include "relaylab/errors.hpp"
#include "relaylab/spectral/fft.hpp"

namespace relaylab::spectral {

signal::IqBuffer upsample(const signal::IqBuffer& in, int factor) {
  if (factor < 1) throw DomainError("upsample: factor must be >= 1");
  const std::size_t n = in.size();
  signal::IqBuffer out(n * static_cast<std::size_t>(factor), in.sample_rate * factor, in.start_time);
  if (n == 0) return out;

  FftPlan fwd(n, FftDirection::Forward);
  auto spec = fwd.buffer();
  std::copy(in.samples.begin(), in.samples.end(), spec.begin());
  fwd.execute();

  FftPlan inv(out.size(), FftDirection::Inverse);
  auto wide = inv.buffer();
  std::fill(wide.begin(), wide.end(), signal::Sample{});
  const std::size_t pos = (n + 1) / 2;  // bins 0..pos-1 are non-negative frequencies
  const std::size_t neg = n - pos;
  std::copy_n(spec.begin(), pos, wide.begin());
  std::copy_n(spec.begin() + static_cast<std::ptrdiff_t>(pos), neg, wide.end() - static_cast<std::ptrdiff_t>(neg));
  inv.execute();

  const double scale = 1.0 / static_cast<double>(n);
  std::transform(wide.begin(), wide.end(), out.samples.begin(), [scale](const signal::Sample& s) { return s * scale; });
  return out;
}

}  // namespace relaylab::spectral

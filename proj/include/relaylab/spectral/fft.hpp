#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace relaylab::spectral {

enum class FftDirection { Forward, Inverse };

/// Fixed-size complex FFT plan with its own aligned work buffer. Plans are
/// built with FFTW_ESTIMATE so results do not depend on timing measurements.
/// Not copyable; execute() is not reentrant on one instance.
class FftPlan {
 public:
  FftPlan(std::size_t n, FftDirection dir);
  ~FftPlan();
  FftPlan(FftPlan&& other) noexcept;
  FftPlan& operator=(FftPlan&& other) noexcept;
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t size() const { return n_; }

  /// Work buffer: fill, call execute(), read back (in place, unnormalized).
  std::span<std::complex<double>> buffer();
  void execute();

  /// Convenience: out = FFT(in). in and out may alias.
  void transform(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

 private:
  void release();

  std::size_t n_ = 0;
  std::complex<double>* buf_ = nullptr;
  void* plan_ = nullptr;
};

}  // namespace relaylab::spectral

#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace relaylab::signal {

/// Derives an independent sub-stream seed from a root seed, a stream label and
/// an index (block number, trial number, ...). Stable across platforms.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label, std::uint64_t index = 0);

/// splitmix64 finalizer; also used as a counter-based hash.
std::uint64_t mix64(std::uint64_t x);

/// Gaussian source with a fixed, platform-independent algorithm (Box-Muller
/// on 53-bit uniforms from mt19937_64). std::normal_distribution is not
/// specified bit-exactly across standard libraries, so it is not used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();  // [0, 1)
  double gaussian();  // N(0, 1)
  std::complex<double> complex_gaussian(double variance);  // E|z|^2 = variance

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace relaylab::signal

#pragma once

#include <map>
#include <span>
#include <vector>

#include "relaylab/receiver/config.hpp"
#include "relaylab/signal/iq_buffer.hpp"
#include "relaylab/spectral/fft.hpp"

namespace relaylab::receiver {

struct AcquisitionResult {
  int prn_id = 0;
  double code_phase = 0.0;   // chips, [0, 1023): signal delay modulo one code period
  double code_lag = 0.0;     // samples from the window start to the first code epoch
  double doppler = 0.0;      // Hz
  double peak_metric = 0.0;  // peak / mean off-peak in the peak's Doppler bin
  bool detected = false;
};

/// Parallel code-phase search. load() prepares the carrier-wiped spectra of
/// one window for every Doppler bin; search() then correlates them against a
/// PRN, so several PRNs share the forward transforms.
class Acquirer {
 public:
  Acquirer(const ReceiverConfig& cfg, double sample_rate);

  std::size_t samples_per_period() const { return n_; }
  std::size_t window_samples() const { return n_ * static_cast<std::size_t>(sums_ * coherent_); }

  /// `window` holds at least window_samples() samples starting at window_start (s).
  void load(std::span<const signal::Sample> window, double window_start);
  AcquisitionResult search(int prn_id);

  /// Peak metric for every (bin, lag) of the last search, row-major by bin.
  const std::vector<double>& last_surface() const { return surface_; }

 private:
  const std::vector<std::complex<double>>& code_spectrum(int prn_id);

  double fs_;
  double threshold_;
  std::size_t n_;
  int sums_;
  int coherent_ = 1;
  std::vector<double> dopplers_;
  std::vector<std::complex<double>> spectra_;  // [bin][sum][n]
  std::map<int, std::vector<std::complex<double>>> code_fft_;
  std::vector<double> surface_;
  double window_start_ = 0.0;
  bool loaded_ = false;
  spectral::FftPlan fwd_;
  spectral::FftPlan inv_;
};

/// Single-PRN acquisition over the start of `feed`. Throws DomainError if the
/// feed is shorter than coherent_ms * noncoherent_sums.
AcquisitionResult acquire(const signal::IqBuffer& feed, int prn_id, const ReceiverConfig& cfg);

}  // namespace relaylab::receiver

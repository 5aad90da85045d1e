#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "relaylab/signal/iq_buffer.hpp"

namespace relaylab::spectral {

/// Two-sided complex-baseband spectrum over [-fs/2, fs/2), bins in ascending
/// frequency. power_db is a density (dB re 1/Hz) scaled so that
/// sum(10^(power_db/10)) * bin_width equals the mean sample power.
struct PowerSpectrum {
  std::vector<double> freqs;     // Hz, bin centres
  std::vector<double> power_db;
  std::size_t nfft = 0;
  double sample_rate = 0.0;
  std::string window = "hann";
  std::size_t segments = 0;      // periodograms averaged

  double bin_width() const { return sample_rate / static_cast<double>(nfft); }
  /// Sum of PSD * bin width (linear).
  double total_power() const;
  std::size_t bin_of(double freq_hz) const;
};

std::vector<double> hann_window(std::size_t n);

/// Welch estimate: Hann-windowed periodograms of length nfft, advancing by
/// nfft * (1 - overlap_fraction), averaged. Throws DomainError if the feed is
/// shorter than nfft or the overlap is outside [0, 1).
PowerSpectrum welch_psd(const signal::IqBuffer& feed, std::size_t nfft = 4096,
                        double overlap_fraction = 0.5);

/// Averages spectra in the linear domain (all must share nfft and rate).
PowerSpectrum average_spectra(const std::vector<PowerSpectrum>& spectra);

struct Spectrogram {
  std::vector<double> times;            // column start times, s
  std::vector<PowerSpectrum> columns;   // column t covers [t, t + nfft / fs)
};

/// One Hann periodogram per column, columns advancing by `hop` samples.
Spectrogram spectrogram(const signal::IqBuffer& feed, std::size_t nfft, std::size_t hop);

}  // namespace relaylab::spectral

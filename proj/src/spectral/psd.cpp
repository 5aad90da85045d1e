#include "relaylab/spectral/psd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "relaylab/errors.hpp"
#include "relaylab/spectral/fft.hpp"

namespace relaylab::spectral {
namespace {

// Accumulates |FFT(x * w)|^2 of one segment, in natural FFT order.
void accumulate_periodogram(FftPlan& plan, const signal::Sample* x, const std::vector<double>& w,
                            std::vector<double>& acc) {
  auto buf = plan.buffer();
  for (std::size_t i = 0; i < w.size(); ++i) buf[i] = x[i] * w[i];
  plan.execute();
  for (std::size_t i = 0; i < w.size(); ++i) acc[i] += std::norm(buf[i]);
}

PowerSpectrum finish(std::vector<double>& acc, std::size_t segments, const std::vector<double>& w,
                     double fs) {
  const std::size_t n = w.size();
  double u = 0.0;
  for (const double v : w) u += v * v;
  const double scale = 1.0 / (static_cast<double>(segments) * fs * u);

  PowerSpectrum ps;
  ps.nfft = n;
  ps.sample_rate = fs;
  ps.segments = segments;
  ps.freqs.resize(n);
  ps.power_db.resize(n);
  const std::size_t half = n / 2;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = (k + n - half) % n;  // fftshift
    ps.freqs[k] = (static_cast<double>(k) - static_cast<double>(half)) * fs / static_cast<double>(n);
    ps.power_db[k] = 10.0 * std::log10(std::max(acc[src] * scale, 1e-300));
  }
  return ps;
}

}  // namespace

double PowerSpectrum::total_power() const {
  double s = 0.0;
  for (const double p : power_db) s += std::pow(10.0, p / 10.0);
  return s * bin_width();
}

std::size_t PowerSpectrum::bin_of(double freq_hz) const {
  const double k = std::round(freq_hz / bin_width()) + static_cast<double>(nfft / 2);
  return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(nfft - 1)));
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  }
  return w;
}

PowerSpectrum welch_psd(const signal::IqBuffer& feed, std::size_t nfft, double overlap_fraction) {
  if (nfft == 0 || feed.size() < nfft) throw DomainError("welch_psd: feed shorter than nfft");
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0)) {
    throw DomainError("welch_psd: overlap must lie in [0, 1)");
  }
  if (!(feed.sample_rate > 0.0)) throw DomainError("welch_psd: sample rate must be positive");
  const auto step = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(static_cast<double>(nfft) * (1.0 - overlap_fraction))));
  const auto w = hann_window(nfft);
  FftPlan plan(nfft, FftDirection::Forward);
  std::vector<double> acc(nfft, 0.0);
  std::size_t segments = 0;
  for (std::size_t off = 0; off + nfft <= feed.size(); off += step, ++segments) {
    accumulate_periodogram(plan, feed.samples.data() + off, w, acc);
  }
  return finish(acc, segments, w, feed.sample_rate);
}

PowerSpectrum average_spectra(const std::vector<PowerSpectrum>& spectra) {
  if (spectra.empty()) throw DomainError("average_spectra: no spectra");
  PowerSpectrum out = spectra.front();
  std::vector<double> lin(out.nfft, 0.0);
  std::size_t segments = 0;
  for (const auto& s : spectra) {
    if (s.nfft != out.nfft || s.sample_rate != out.sample_rate) {
      throw DomainError("average_spectra: shape mismatch");
    }
    for (std::size_t k = 0; k < s.nfft; ++k) lin[k] += std::pow(10.0, s.power_db[k] / 10.0);
    segments += s.segments;
  }
  for (std::size_t k = 0; k < out.nfft; ++k) {
    out.power_db[k] = 10.0 * std::log10(lin[k] / static_cast<double>(spectra.size()));
  }
  out.segments = segments;
  return out;
}

Spectrogram spectrogram(const signal::IqBuffer& feed, std::size_t nfft, std::size_t hop) {
  if (nfft == 0 || feed.size() < nfft) throw DomainError("spectrogram: feed shorter than nfft");
  if (hop == 0) throw DomainError("spectrogram: hop must be positive");
  const auto w = hann_window(nfft);
  FftPlan plan(nfft, FftDirection::Forward);
  Spectrogram sg;
  for (std::size_t off = 0; off + nfft <= feed.size(); off += hop) {
    std::vector<double> acc(nfft, 0.0);
    accumulate_periodogram(plan, feed.samples.data() + off, w, acc);
    sg.times.push_back(feed.time_of(off));
    sg.columns.push_back(finish(acc, 1, w, feed.sample_rate));
  }
  return sg;
}

}  // namespace relaylab::spectral

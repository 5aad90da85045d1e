#include "relaylab/receiver/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "relaylab/errors.hpp"
#include "relaylab/signal/ca_code.hpp"

namespace relaylab::receiver {
namespace {

std::size_t period_samples(double fs) {
  const double n = fs * kCodePeriod;
  if (std::abs(n - std::round(n)) > 1e-6 || n < kCodeLength) {
    throw DomainError("Acquirer: sample rate must be a multiple of 1 kHz and at least the chip rate");
  }
  return static_cast<std::size_t>(std::llround(n));
}

}  // namespace

void ReceiverConfig::validate() const {
  if (!(doppler_span_hz >= 0.0) || !(doppler_bin_hz > 0.0)) throw DomainError("ReceiverConfig: bad Doppler grid");
  if (coherent_ms < 1 || noncoherent_sums < 1) throw DomainError("ReceiverConfig: integration must be >= 1");
  if (!(loss_timeout_s > 0.0) || !(reacquisition_period_s > 0.0) || !(pvt_interval_s > 0.0)) {
    throw DomainError("ReceiverConfig: timers must be positive");
  }
  if (!(verify_time_s >= 0.0) || !(pull_in_s >= 0.0)) throw DomainError("ReceiverConfig: bad pull-in timing");
  if (bands.empty()) throw DomainError("ReceiverConfig: no bands");
  for (const int prn : search_prns) {
    if (prn < 1 || prn > 32) throw DomainError("ReceiverConfig: search PRN outside 1..32");
  }
}

Acquirer::Acquirer(const ReceiverConfig& cfg, double sample_rate)
    : fs_(sample_rate),
      threshold_(cfg.acquisition_threshold),
      n_(period_samples(sample_rate)),
      sums_(cfg.noncoherent_sums),
      fwd_(n_, spectral::FftDirection::Forward),
      inv_(n_, spectral::FftDirection::Inverse) {
  cfg.validate();
  const int half = static_cast<int>(std::floor(cfg.doppler_span_hz / cfg.doppler_bin_hz + 1e-9));
  for (int b = -half; b <= half; ++b) dopplers_.push_back(b * cfg.doppler_bin_hz);
  coherent_ = cfg.coherent_ms;
}

void Acquirer::load(std::span<const signal::Sample> window, double window_start) {
  const std::size_t periods = static_cast<std::size_t>(sums_ * coherent_);
  if (window.size() < n_ * periods) throw DomainError("Acquirer::load: window too short");
  window_start_ = window_start;
  spectra_.assign(dopplers_.size() * static_cast<std::size_t>(sums_) * n_, {});
  auto buf = fwd_.buffer();
  for (std::size_t b = 0; b < dopplers_.size(); ++b) {
    const double w = -2.0 * std::numbers::pi * dopplers_[b] / fs_;
    for (int s = 0; s < sums_; ++s) {
      auto* dst = spectra_.data() + (b * static_cast<std::size_t>(sums_) + static_cast<std::size_t>(s)) * n_;
      for (int c = 0; c < coherent_; ++c) {
        const std::size_t first = (static_cast<std::size_t>(s * coherent_ + c)) * n_;
        const auto step = std::polar(1.0, w);
        auto rot = std::polar(1.0, w * static_cast<double>(first));
        for (std::size_t i = 0; i < n_; ++i) {
          buf[i] = window[first + i] * rot;
          rot *= step;
        }
        fwd_.execute();
        for (std::size_t i = 0; i < n_; ++i) dst[i] += buf[i];
      }
    }
  }
  loaded_ = true;
}

const std::vector<std::complex<double>>& Acquirer::code_spectrum(int prn_id) {
  auto it = code_fft_.find(prn_id);
  if (it != code_fft_.end()) return it->second;
  const auto& chips = signal::ca_code(prn_id).chips;
  auto buf = fwd_.buffer();
  for (std::size_t i = 0; i < n_; ++i) {
    const auto chip = static_cast<std::size_t>(std::floor(static_cast<double>(i) * kChipRate / fs_));
    buf[i] = static_cast<double>(chips[std::min<std::size_t>(chip, kCodeLength - 1)]);
  }
  fwd_.execute();
  std::vector<std::complex<double>> conj_spec(n_);
  for (std::size_t i = 0; i < n_; ++i) conj_spec[i] = std::conj(buf[i]);
  return code_fft_.emplace(prn_id, std::move(conj_spec)).first->second;
}

AcquisitionResult Acquirer::search(int prn_id) {
  if (!loaded_) throw DomainError("Acquirer::search: no window loaded");
  const auto& code = code_spectrum(prn_id);
  const std::size_t bins = dopplers_.size();
  surface_.assign(bins * n_, 0.0);
  auto buf = inv_.buffer();
  for (std::size_t b = 0; b < bins; ++b) {
    double* row = surface_.data() + b * n_;
    for (int s = 0; s < sums_; ++s) {
      const auto* spec = spectra_.data() + (b * static_cast<std::size_t>(sums_) + static_cast<std::size_t>(s)) * n_;
      for (std::size_t i = 0; i < n_; ++i) buf[i] = spec[i] * code[i];
      inv_.execute();
      for (std::size_t i = 0; i < n_; ++i) row[i] += std::norm(buf[i]);
    }
  }

  const auto peak_it = std::max_element(surface_.begin(), surface_.end());
  const auto peak_idx = static_cast<std::size_t>(peak_it - surface_.begin());
  const std::size_t pb = peak_idx / n_;
  const std::size_t pl = peak_idx % n_;
  const double peak = *peak_it;
  const double* row = surface_.data() + pb * n_;

  double off = 0.0;
  std::size_t off_n = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t d = std::min((i + n_ - pl) % n_, (pl + n_ - i) % n_);
    if (d > 2) {
      off += row[i];
      ++off_n;
    }
  }
  const double mean_off = off_n ? off / static_cast<double>(off_n) : 0.0;

  AcquisitionResult r;
  r.prn_id = prn_id;
  r.peak_metric = mean_off > 0.0 ? peak / mean_off : 0.0;
  r.detected = peak > 0.0 && r.peak_metric >= threshold_;

  // Sub-sample lag from the triangular correlation envelope.
  const double am = std::sqrt(row[(pl + n_ - 1) % n_]);
  const double a0 = std::sqrt(peak);
  const double ap = std::sqrt(row[(pl + 1) % n_]);
  double frac = 0.0;
  const double denom = 2.0 * (a0 - std::min(am, ap));
  if (denom > 0.0) frac = std::clamp((ap - am) / denom, -0.5, 0.5);
  r.code_lag = std::fmod(static_cast<double>(pl) + frac + static_cast<double>(n_), static_cast<double>(n_));

  // Doppler by parabolic interpolation across neighbouring bins.
  r.doppler = dopplers_[pb];
  if (pb > 0 && pb + 1 < bins) {
    const double ym = surface_[(pb - 1) * n_ + pl];
    const double yp = surface_[(pb + 1) * n_ + pl];
    const double d = ym - 2.0 * peak + yp;
    if (d < 0.0) r.doppler += std::clamp(0.5 * (ym - yp) / d, -0.5, 0.5) * (dopplers_[1] - dopplers_[0]);
  }

  const double start_samples = window_start_ * fs_;
  const double epoch = std::fmod(start_samples + r.code_lag, static_cast<double>(n_));
  r.code_phase = std::fmod(epoch * kChipRate / fs_, static_cast<double>(kCodeLength));
  if (r.code_phase < 0.0) r.code_phase += kCodeLength;
  return r;
}

AcquisitionResult acquire(const signal::IqBuffer& feed, int prn_id, const ReceiverConfig& cfg) {
  Acquirer acq(cfg, feed.sample_rate);
  if (feed.size() < acq.window_samples()) {
    throw DomainError("acquire: feed shorter than the integration time");
  }
  acq.load(feed.samples, feed.start_time);
  return acq.search(prn_id);
}

}  // namespace relaylab::receiver

#include "relaylab/spectral/detectors.hpp"

#include <cmath>

#include "relaylab/errors.hpp"

namespace relaylab::spectral {
namespace {

void check_shapes(const PowerSpectrum& a, const PowerSpectrum& b) {
  if (a.nfft != b.nfft || a.power_db.size() != b.power_db.size() || a.sample_rate != b.sample_rate ||
      a.power_db.empty()) {
    throw DomainError("spectral detector: spectra have different shapes");
  }
}

}  // namespace

std::string_view to_string(AlarmKind k) {
  return k == AlarmKind::JammingSuspected ? "JammingSuspected" : "ReplaySpikeSuspected";
}

double jamming_score(const PowerSpectrum& baseline, const PowerSpectrum& current) {
  check_shapes(baseline, current);
  double s = 0.0;
  for (std::size_t k = 0; k < current.power_db.size(); ++k) {
    s += std::abs(current.power_db[k] - baseline.power_db[k]);
  }
  return s / static_cast<double>(current.power_db.size());
}

std::optional<SpectralAlarm> detect_jamming(const PowerSpectrum& baseline, const PowerSpectrum& current,
                                            double t) {
  const double score = jamming_score(baseline, current);
  if (score > kJammingThresholdDb) return SpectralAlarm{AlarmKind::JammingSuspected, t, score, 0.0, 0.0};
  return std::nullopt;
}

double band_contrast(const PowerSpectrum& baseline, const PowerSpectrum& current, FrequencyBand band) {
  check_shapes(baseline, current);
  const double half_span = current.sample_rate / 2.0;
  if (!(band.lo < band.hi) || band.lo < -half_span || band.hi > half_span) {
    throw DomainError("band_contrast: band outside the spectrum span");
  }
  double in_sum = 0.0, out_sum = 0.0;
  std::size_t in_n = 0, out_n = 0;
  for (std::size_t k = 0; k < current.freqs.size(); ++k) {
    const double d = current.power_db[k] - baseline.power_db[k];
    if (current.freqs[k] >= band.lo && current.freqs[k] < band.hi) {
      in_sum += d;
      ++in_n;
    } else {
      out_sum += d;
      ++out_n;
    }
  }
  if (in_n == 0) return 0.0;
  const double in_mean = in_sum / static_cast<double>(in_n);
  const double out_mean = out_n ? out_sum / static_cast<double>(out_n) : 0.0;
  return in_mean - out_mean;
}

std::optional<SpectralAlarm> detect_replay_spike(const PowerSpectrum& baseline, const PowerSpectrum& current,
                                                 std::span<const FrequencyBand> candidate_bands, double t) {
  check_shapes(baseline, current);
  std::optional<SpectralAlarm> best;
  for (const auto& band : candidate_bands) {
    const double c = band_contrast(baseline, current, band);
    if (!best || c > best->score) best = SpectralAlarm{AlarmKind::ReplaySpikeSuspected, t, c, band.lo, band.hi};
  }
  if (best && best->score > kReplaySpikeThresholdDb) return best;
  return std::nullopt;
}

}  // namespace relaylab::spectral

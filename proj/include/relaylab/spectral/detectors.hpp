#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "relaylab/spectral/psd.hpp"

namespace relaylab::spectral {

inline constexpr double kJammingThresholdDb = 3.0;
inline constexpr double kReplaySpikeThresholdDb = 2.0;

enum class AlarmKind : std::uint8_t { JammingSuspected, ReplaySpikeSuspected };

std::string_view to_string(AlarmKind k);

struct SpectralAlarm {
  AlarmKind kind = AlarmKind::JammingSuspected;
  double t = 0.0;
  double score = 0.0;  // dB
  double band_lo = 0.0;  // Hz, replay alarms: the sub-band that produced the score
  double band_hi = 0.0;
};

struct FrequencyBand {
  double lo = 0.0;
  double hi = 0.0;
};

/// Mean over bins of |current - baseline| (dB).
double jamming_score(const PowerSpectrum& baseline, const PowerSpectrum& current);

/// Alarm iff jamming_score > 3 dB. Throws DomainError on shape mismatch.
std::optional<SpectralAlarm> detect_jamming(const PowerSpectrum& baseline, const PowerSpectrum& current,
                                            double t = 0.0);

/// Contrast of (current - baseline) between the bins inside `band` and the
/// bins outside it: mean in-band difference minus mean out-of-band difference.
double band_contrast(const PowerSpectrum& baseline, const PowerSpectrum& current, FrequencyBand band);

/// Maximum band_contrast over the candidate sub-bands; alarm iff > 2 dB.
/// Throws DomainError on shape mismatch or a band outside the spectrum span.
std::optional<SpectralAlarm> detect_replay_spike(const PowerSpectrum& baseline, const PowerSpectrum& current,
                                                 std::span<const FrequencyBand> candidate_bands,
                                                 double t = 0.0);

}  // namespace relaylab::spectral

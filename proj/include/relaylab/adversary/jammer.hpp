#pragma once

#include <cstdint>
#include <vector>

#include "relaylab/constants.hpp"
#include "relaylab/signal/iq_buffer.hpp"

namespace relaylab::adversary {

struct JamInterval {
  Band band = Band::L1;
  double start = 0.0;
  double end = 0.0;
};

struct JammerConfig {
  std::vector<Band> bands{Band::L1, Band::L2};
  double noise_power = 1000.0;  // linear, total complex power while on
  std::vector<JamInterval> enabled_intervals;

  bool covers(Band band) const;
  bool active(Band band, double t) const;
  /// Throws DomainError on negative power, empty intervals, intervals for an
  /// unconfigured band or overlapping intervals within a band.
  void validate() const;
};

/// Complex Gaussian noise with E|n|^2 = noise_power inside the enabled
/// intervals of `band`, exactly zero outside. Throws DomainError if the band
/// is not configured.
signal::IqBuffer jammer_generate(const JammerConfig& cfg, Band band, double start_time, double duration,
                                 double sample_rate, std::uint64_t seed);

}  // namespace relaylab::adversary

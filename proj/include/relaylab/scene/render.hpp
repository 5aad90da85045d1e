#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "relaylab/scene/geometry.hpp"
#include "relaylab/signal/iq_buffer.hpp"
#include "relaylab/signal/synthesis.hpp"

namespace relaylab::scene {

/// Combiner gains for the three sources feeding one receiver input.
struct AntennaFeedPlan {
  double legit_gain = 1.0;
  double replay_gain = 0.0;
  double jam_gain = 0.0;
  Band band = Band::L1;

  void validate() const;
};

struct RenderWindow {
  double start_time = 0.0;
  double duration = 0.0;
  double sample_rate = kDefaultSampleRate;
};

/// Per-sample power of a satellite rendered from the scene (rate independent).
double satellite_amplitude(const Scene& scene, const SatelliteOrbitSpec& sat);

/// Noise variance per sample at `sample_rate` for a constant noise density.
double noise_variance_at(const Scene& scene, double sample_rate);

/// Navigation data source for a band (L2 carries an independent stream).
signal::NavBitSource nav_source(const Scene& scene, Band band);

/// Signal specs of every satellite visible from `location` on `band`,
/// evaluated at time t: delay = range / c (whole periods + chip offset),
/// Doppler from the orbit, amplitude from the satellite power.
std::vector<signal::SatelliteSignalSpec> satellite_signals(const Scene& scene,
                                                           const EcefPosition& location, Band band,
                                                           double t);

/// Composite feed at `location`:
///   legit_gain * sum(visible satellites) + replay_gain * replay + jam_gain * jam + AWGN.
/// The optional feeds must match the window's sample rate and cover it
/// exactly. noise_seed == nullopt renders a noiseless feed.
signal::IqBuffer render_antenna_feed(const Scene& scene, const EcefPosition& location,
                                     const AntennaFeedPlan& plan, const RenderWindow& window,
                                     const signal::IqBuffer* replay_feed,
                                     const signal::IqBuffer* jam_feed,
                                     std::optional<std::uint64_t> noise_seed);

}  // namespace relaylab::scene

#include "relaylab/scene/render.hpp"

#include <cmath>
#include <numbers>

#include "relaylab/errors.hpp"
#include "relaylab/signal/random.hpp"

namespace relaylab::scene {

void AntennaFeedPlan::validate() const {
  if (!(legit_gain >= 0.0) || !(replay_gain >= 0.0) || !(jam_gain >= 0.0)) {
    throw DomainError("AntennaFeedPlan: gains must be >= 0");
  }
}

double satellite_amplitude(const Scene& scene, const SatelliteOrbitSpec& sat) {
  return std::sqrt(scene.noise_floor * std::pow(10.0, sat.power_db / 10.0));
}

double noise_variance_at(const Scene& scene, double sample_rate) {
  return scene.noise_floor * sample_rate / scene.noise_reference_rate;
}

signal::NavBitSource nav_source(const Scene& scene, Band band) {
  if (band == Band::L1) return signal::NavBitSource::seeded(scene.nav_seed);
  return signal::NavBitSource::seeded(signal::derive_seed(scene.nav_seed, "nav/L2"));
}

std::vector<signal::SatelliteSignalSpec> satellite_signals(const Scene& scene,
                                                           const EcefPosition& location, Band band,
                                                           double t) {
  const auto nav = nav_source(scene, band);
  const double fc = carrier_hz(band);
  std::vector<signal::SatelliteSignalSpec> out;
  for (const auto* sat : visible_satellites(scene, location, band, t)) {
    signal::SatelliteSignalSpec spec;
    spec.prn_id = sat->prn_id;
    spec.amplitude = satellite_amplitude(scene, *sat);
    // Light time: the signal received at t left the satellite at t - tau.
    double range = geometric_range(sat->position_at(t), location);
    for (int i = 0; i < 3; ++i) range = geometric_range(sat->position_at(t - range / kSpeedOfLight), location);
    signal::set_delay(spec, true_pseudorange(range, 0.0, 0.0, 0.0) / kSpeedOfLight);
    spec.doppler_hz = doppler_of(*sat, location, fc, t - range / kSpeedOfLight);
    spec.carrier_hz = fc;
    // Synthesis rotates by doppler * t from t = 0; anchor the phase so that at t
    // it equals the propagation phase and stays continuous across windows.
    const double cycles = range * fc / kSpeedOfLight + spec.doppler_hz * t;
    spec.carrier_phase = -2.0 * std::numbers::pi * (cycles - std::floor(cycles));
    spec.nav = nav;
    out.push_back(std::move(spec));
  }
  return out;
}

namespace {

void check_feed(const signal::IqBuffer& feed, const signal::IqBuffer& out, const char* what) {
  if (feed.sample_rate != out.sample_rate) {
    throw DomainError(std::string("render_antenna_feed: ") + what + " sample-rate mismatch");
  }
  if (feed.size() != out.size() || std::abs(feed.start_time - out.start_time) > 0.5 / out.sample_rate) {
    throw DomainError(std::string("render_antenna_feed: ") + what + " does not cover the window");
  }
}

}  // namespace

signal::IqBuffer render_antenna_feed(const Scene& scene, const EcefPosition& location,
                                     const AntennaFeedPlan& plan, const RenderWindow& window,
                                     const signal::IqBuffer* replay_feed,
                                     const signal::IqBuffer* jam_feed,
                                     std::optional<std::uint64_t> noise_seed) {
  plan.validate();
  if (!(window.duration > 0.0)) throw DomainError("render_antenna_feed: window duration must be positive");
  if (!(window.sample_rate >= kChipRate)) throw DomainError("render_antenna_feed: sample rate below chip rate");

  signal::IqBuffer out(signal::sample_count(window.duration, window.sample_rate), window.sample_rate,
                       window.start_time);
  if (replay_feed) check_feed(*replay_feed, out, "replay feed");
  if (jam_feed) check_feed(*jam_feed, out, "jam feed");

  if (plan.legit_gain > 0.0) {
    auto specs = satellite_signals(scene, location, plan.band, window.start_time);
    for (auto& s : specs) s.amplitude *= plan.legit_gain;
    signal::synthesize_into(out, specs);
  }
  if (replay_feed && plan.replay_gain > 0.0) signal::accumulate(out, *replay_feed, plan.replay_gain);
  if (jam_feed && plan.jam_gain > 0.0) signal::accumulate(out, *jam_feed, plan.jam_gain);
  if (noise_seed) signal::add_awgn_inplace(out, noise_variance_at(scene, window.sample_rate), *noise_seed);
  return out;
}

}  // namespace relaylab::scene

#include "relaylab/adversary/jammer.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "relaylab/adversary/event_log.hpp"
#include "relaylab/errors.hpp"
#include "relaylab/signal/random.hpp"

namespace relaylab::adversary {

void write_event_csv(std::ostream& os, const EventLog& log) {
  os << "t,event,detail\n";
  for (const auto& e : log) os << fmt::format("{:.6f},{},{}\n", e.t, e.event, e.detail);
}

bool JammerConfig::covers(Band band) const {
  return std::find(bands.begin(), bands.end(), band) != bands.end();
}

bool JammerConfig::active(Band band, double t) const {
  for (const auto& iv : enabled_intervals) {
    if (iv.band == band && t >= iv.start && t < iv.end) return true;
  }
  return false;
}

void JammerConfig::validate() const {
  if (!(noise_power >= 0.0) || !std::isfinite(noise_power)) throw DomainError("JammerConfig: bad noise_power");
  for (std::size_t i = 0; i < enabled_intervals.size(); ++i) {
    const auto& a = enabled_intervals[i];
    if (!(a.end > a.start)) throw DomainError("JammerConfig: empty interval");
    if (!covers(a.band)) throw DomainError("JammerConfig: interval for an unconfigured band");
    for (std::size_t j = i + 1; j < enabled_intervals.size(); ++j) {
      const auto& b = enabled_intervals[j];
      if (a.band == b.band && a.start < b.end && b.start < a.end) {
        throw DomainError("JammerConfig: overlapping intervals within a band");
      }
    }
  }
}

signal::IqBuffer jammer_generate(const JammerConfig& cfg, Band band, double start_time, double duration,
                                 double sample_rate, std::uint64_t seed) {
  if (!cfg.covers(band)) {
    throw DomainError(fmt::format("jammer_generate: band {} not configured", to_string(band)));
  }
  cfg.validate();
  if (!(sample_rate > 0.0) || !(duration > 0.0)) throw DomainError("jammer_generate: bad window");
  signal::IqBuffer out(signal::sample_count(duration, sample_rate), sample_rate, start_time);
  if (cfg.noise_power == 0.0) return out;

  signal::Rng rng(seed);
  for (const auto& iv : cfg.enabled_intervals) {
    if (iv.band != band || iv.end <= start_time || iv.start >= out.end_time()) continue;
    const auto lo = static_cast<std::size_t>(std::max(0.0, std::ceil((iv.start - start_time) * sample_rate - 1e-9)));
    const auto hi = std::min(out.size(), static_cast<std::size_t>(
                                             std::max(0.0, std::ceil((iv.end - start_time) * sample_rate - 1e-9))));
    for (std::size_t n = lo; n < hi; ++n) out.samples[n] = rng.complex_gaussian(cfg.noise_power);
  }
  return out;
}

}  // namespace relaylab::adversary

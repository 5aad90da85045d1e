#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "relaylab/constants.hpp"

namespace relaylab::scene {

/// Earth-centred Earth-fixed position, metres.
struct EcefPosition {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const;
  EcefPosition operator+(const EcefPosition& o) const { return {x + o.x, y + o.y, z + o.z}; }
  EcefPosition operator-(const EcefPosition& o) const { return {x - o.x, y - o.y, z - o.z}; }
  EcefPosition operator*(double s) const { return {x * s, y * s, z * s}; }
  bool operator==(const EcefPosition&) const = default;

  /// Throws DomainError unless finite with magnitude < 1e8 m.
  void validate() const;
};

double dot(const EcefPosition& a, const EcefPosition& b);

struct Geodetic {
  double lat_rad = 0.0;
  double lon_rad = 0.0;
  double height_m = 0.0;
};

/// WGS-84 conversions.
EcefPosition geodetic_to_ecef(const Geodetic& g);
Geodetic ecef_to_geodetic(const EcefPosition& p);

/// Circular orbit: plane inclined by `inclination` about the x axis after the
/// node is rotated to `raan`; argument of latitude = phase + angular_rate * t.
struct CircularOrbit {
  double radius = 26'560'000.0;
  double inclination = 0.0;
  double raan = 0.0;
  double phase = 0.0;
  double angular_rate = 0.0;  // rad/s
};

struct SatelliteOrbitSpec {
  int prn_id = 1;
  std::variant<EcefPosition, CircularOrbit> motion;
  double power_db = -15.0;  // per-sample signal power relative to the noise floor
  bool on_l2 = true;

  EcefPosition position_at(double t) const;
  EcefPosition velocity_at(double t) const;
};

/// Immutable once constructed; the lab CLI builds it from the scenario file.
struct Scene {
  std::vector<SatelliteOrbitSpec> satellites;
  EcefPosition sampler_location;
  EcefPosition victim_location;
  double noise_floor = 1.0;                          // per-sample power at reference_rate
  double noise_reference_rate = kDefaultSampleRate;  // Hz
  std::uint64_t nav_seed = 1;
  static constexpr double speed_of_light = kSpeedOfLight;

  const SatelliteOrbitSpec* find(int prn_id) const;
  void validate() const;
};

inline constexpr double kElevationMaskDeg = 5.0;

double geometric_range(const EcefPosition& sat_pos, const EcefPosition& rx_pos);

/// rho = range + c * (rx_clock_bias - sat_clock_bias + extra_path_delay)
double true_pseudorange(double range, double rx_clock_bias, double sat_clock_bias,
                        double extra_path_delay);

/// f_d = (v . u) / c * carrier, u the unit vector from satellite to receiver
/// (static receiver), so approaching satellites give positive Doppler.
double doppler_of(const SatelliteOrbitSpec& sat, const EcefPosition& rx_pos, double carrier,
                  double t = 0.0);

/// Elevation of sat_pos above the WGS-84 local horizon at rx_pos, radians.
double elevation(const EcefPosition& sat_pos, const EcefPosition& rx_pos);

bool is_visible(const SatelliteOrbitSpec& sat, const EcefPosition& rx_pos, double t = 0.0);

/// Satellites visible from rx_pos at t that transmit on `band`.
std::vector<const SatelliteOrbitSpec*> visible_satellites(const Scene& scene,
                                                          const EcefPosition& rx_pos, Band band,
                                                          double t = 0.0);

}  // namespace relaylab::scene

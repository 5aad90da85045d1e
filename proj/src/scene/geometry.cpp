#include "relaylab/scene/geometry.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "relaylab/errors.hpp"

namespace relaylab::scene {
namespace {

constexpr double kWgs84A = 6378137.0;
constexpr double kWgs84F = 1.0 / 298.257223563;
constexpr double kWgs84E2 = kWgs84F * (2.0 - kWgs84F);

EcefPosition orbit_position(const CircularOrbit& o, double t) {
  const double u = o.phase + o.angular_rate * t;
  const double xp = o.radius * std::cos(u);
  const double yp = o.radius * std::sin(u);
  // inclination about x, then node rotation about z
  const double y1 = yp * std::cos(o.inclination);
  const double z1 = yp * std::sin(o.inclination);
  return {xp * std::cos(o.raan) - y1 * std::sin(o.raan), xp * std::sin(o.raan) + y1 * std::cos(o.raan), z1};
}

}  // namespace

double EcefPosition::norm() const { return std::sqrt(x * x + y * y + z * z); }

void EcefPosition::validate() const {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
    throw DomainError("EcefPosition: non-finite coordinate");
  }
  if (norm() >= 1e8) throw DomainError("EcefPosition: magnitude must be below 1e8 m");
}

double dot(const EcefPosition& a, const EcefPosition& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

EcefPosition geodetic_to_ecef(const Geodetic& g) {
  const double s = std::sin(g.lat_rad);
  const double n = kWgs84A / std::sqrt(1.0 - kWgs84E2 * s * s);
  return {(n + g.height_m) * std::cos(g.lat_rad) * std::cos(g.lon_rad),
          (n + g.height_m) * std::cos(g.lat_rad) * std::sin(g.lon_rad),
          (n * (1.0 - kWgs84E2) + g.height_m) * s};
}

Geodetic ecef_to_geodetic(const EcefPosition& p) {
  const double rho = std::hypot(p.x, p.y);
  Geodetic g;
  g.lon_rad = std::atan2(p.y, p.x);
  double lat = std::atan2(p.z, rho * (1.0 - kWgs84E2));
  double h = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double s = std::sin(lat);
    const double n = kWgs84A / std::sqrt(1.0 - kWgs84E2 * s * s);
    h = rho / std::cos(lat) - n;
    lat = std::atan2(p.z, rho * (1.0 - kWgs84E2 * n / (n + h)));
  }
  g.lat_rad = lat;
  g.height_m = h;
  return g;
}

EcefPosition SatelliteOrbitSpec::position_at(double t) const {
  if (const auto* p = std::get_if<EcefPosition>(&motion)) return *p;
  return orbit_position(std::get<CircularOrbit>(motion), t);
}

EcefPosition SatelliteOrbitSpec::velocity_at(double t) const {
  if (std::holds_alternative<EcefPosition>(motion)) return {};
  const auto& o = std::get<CircularOrbit>(motion);
  // d/dt of the rotated in-plane position
  CircularOrbit d = o;
  d.phase += std::numbers::pi / 2.0;
  return orbit_position(d, t) * o.angular_rate;
}

const SatelliteOrbitSpec* Scene::find(int prn_id) const {
  for (const auto& s : satellites) {
    if (s.prn_id == prn_id) return &s;
  }
  return nullptr;
}

void Scene::validate() const {
  sampler_location.validate();
  victim_location.validate();
  if (!(noise_floor > 0.0)) throw DomainError("Scene: noise_floor must be positive");
  if (!(noise_reference_rate > 0.0)) throw DomainError("Scene: noise reference rate must be positive");
  std::set<int> seen;
  for (const auto& s : satellites) {
    if (s.prn_id < 1 || s.prn_id > 32) throw DomainError("Scene: prn outside 1..32");
    if (!seen.insert(s.prn_id).second) {
      throw DomainError("Scene: duplicate prn " + std::to_string(s.prn_id));
    }
    const auto p = s.position_at(0.0);
    p.validate();
    if (p.norm() <= 2e7) throw DomainError("Scene: satellite " + std::to_string(s.prn_id) + " below 2e7 m radius");
  }
}

double geometric_range(const EcefPosition& sat_pos, const EcefPosition& rx_pos) {
  return (sat_pos - rx_pos).norm();
}

double true_pseudorange(double range, double rx_clock_bias, double sat_clock_bias,
                        double extra_path_delay) {
  return range + kSpeedOfLight * (rx_clock_bias - sat_clock_bias + extra_path_delay);
}

double doppler_of(const SatelliteOrbitSpec& sat, const EcefPosition& rx_pos, double carrier, double t) {
  const auto pos = sat.position_at(t);
  const auto los = rx_pos - pos;
  const double r = los.norm();
  if (r == 0.0) return 0.0;
  const auto u = los * (1.0 / r);
  return dot(sat.velocity_at(t), u) / kSpeedOfLight * carrier;
}

double elevation(const EcefPosition& sat_pos, const EcefPosition& rx_pos) {
  const auto g = ecef_to_geodetic(rx_pos);
  const EcefPosition up{std::cos(g.lat_rad) * std::cos(g.lon_rad), std::cos(g.lat_rad) * std::sin(g.lon_rad),
                        std::sin(g.lat_rad)};
  const auto los = sat_pos - rx_pos;
  return std::asin(dot(los, up) / los.norm());
}

bool is_visible(const SatelliteOrbitSpec& sat, const EcefPosition& rx_pos, double t) {
  return elevation(sat.position_at(t), rx_pos) > kElevationMaskDeg * std::numbers::pi / 180.0;
}

std::vector<const SatelliteOrbitSpec*> visible_satellites(const Scene& scene, const EcefPosition& rx_pos,
                                                          Band band, double t) {
  std::vector<const SatelliteOrbitSpec*> out;
  for (const auto& s : scene.satellites) {
    if (band == Band::L2 && !s.on_l2) continue;
    if (is_visible(s, rx_pos, t)) out.push_back(&s);
  }
  return out;
}

}  // namespace relaylab::scene

#!/usr/bin/env python3
"""Prints the site and satellite block shared by the shipped scenarios.

Satellites fly circular orbits at GPS radius and rate. At t = 0 each sits
above a sub-satellite point spread around the midpoint of the two sites, and
every one is checked to stay above 15 deg elevation at both antennas for the
first --span seconds.
"""

import argparse
import math

A = 6378137.0
F = 1 / 298.257223563
E2 = F * (2 - F)
RADIUS = 26_560_000.0
RATE = 2 * math.pi / 43_082.0  # half a sidereal day

SAMPLER = (59.4036, 17.9494, 30.0)   # Kista, Stockholm
VICTIM = (50.5558, 9.6808, 260.0)    # Fulda, Hesse

# (prn, bearing deg, great-circle offset deg, l2)
LAYOUT = [
    (3, 0, 0, True),
    (7, 20, 35, True),
    (11, 95, 40, True),
    (14, 160, 38, False),
    (19, 215, 42, True),
    (22, 280, 36, True),
    (26, 330, 25, True),
    (31, 60, 18, True),
]


def geodetic_to_ecef(lat, lon, h):
    lat, lon = math.radians(lat), math.radians(lon)
    n = A / math.sqrt(1 - E2 * math.sin(lat) ** 2)
    return ((n + h) * math.cos(lat) * math.cos(lon),
            (n + h) * math.cos(lat) * math.sin(lon),
            (n * (1 - E2) + h) * math.sin(lat))


def destination(lat, lon, bearing, dist):
    lat, lon, b, d = map(math.radians, (lat, lon, bearing, dist))
    lat2 = math.asin(math.sin(lat) * math.cos(d) + math.cos(lat) * math.sin(d) * math.cos(b))
    lon2 = lon + math.atan2(math.sin(b) * math.sin(d) * math.cos(lat),
                            math.cos(d) - math.sin(lat) * math.sin(lat2))
    return math.degrees(lat2), math.degrees(lon2)


def elevation(sat, site_lat, site_lon, site):
    lat, lon = math.radians(site_lat), math.radians(site_lon)
    up = (math.cos(lat) * math.cos(lon), math.cos(lat) * math.sin(lon), math.sin(lat))
    los = [s - r for s, r in zip(sat, site)]
    norm = math.sqrt(sum(v * v for v in los))
    return math.degrees(math.asin(sum(a * b for a, b in zip(los, up)) / norm))


def orbit_through(lat, lon, ascending):
    """Circular orbit whose t = 0 position is above (lat, lon)."""
    lat_r, lon_r = math.radians(lat), math.radians(lon)
    inc = math.radians(max(55.0, abs(lat) + 5.0))
    u = math.asin(math.sin(lat_r) / math.sin(inc))
    if not ascending:
        u = math.pi - u
    raan = lon_r - math.atan2(math.sin(u) * math.cos(inc), math.cos(u))
    return inc, raan % (2 * math.pi), u % (2 * math.pi)


def orbit_position(inc, raan, u0, t):
    u = u0 + RATE * t
    xp, yp = RADIUS * math.cos(u), RADIUS * math.sin(u)
    y1, z1 = yp * math.cos(inc), yp * math.sin(inc)
    return (xp * math.cos(raan) - y1 * math.sin(raan), xp * math.sin(raan) + y1 * math.cos(raan), z1)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--power-db", type=float, default=-15.0)
    ap.add_argument("--span", type=float, default=600.0)
    args = ap.parse_args()

    sampler = geodetic_to_ecef(*SAMPLER)
    victim = geodetic_to_ecef(*VICTIM)
    mid_lat, mid_lon = (SAMPLER[0] + VICTIM[0]) / 2, (SAMPLER[1] + VICTIM[1]) / 2
    sep = math.dist(sampler, victim)
    print(f"  # sampler-victim separation {sep / 1000:.1f} km")
    print(f"  sampler: {{lat: {SAMPLER[0]}, lon: {SAMPLER[1]}, height: {SAMPLER[2]}}}")
    print(f"  victim: {{lat: {VICTIM[0]}, lon: {VICTIM[1]}, height: {VICTIM[2]}}}")
    print("  satellites:")
    for i, (prn, bearing, dist, l2) in enumerate(LAYOUT):
        lat, lon = destination(mid_lat, mid_lon, bearing, dist)
        inc, raan, u0 = orbit_through(lat, lon, ascending=i % 2 == 0)
        el = []
        for t in (0.0, args.span):
            pos = orbit_position(inc, raan, u0, t)
            el.append((elevation(pos, SAMPLER[0], SAMPLER[1], sampler), elevation(pos, VICTIM[0], VICTIM[1], victim)))
            assert min(el[-1]) > 15.0, (prn, t, el[-1])
        print(f"    - {{prn: {prn}, orbit: {{inclination: {inc:.6f}, raan: {raan:.6f}, phase: {u0:.6f}, "
              f"angular_rate: {RATE:.7e}}}, power_db: {args.power_db}, l2: {'true' if l2 else 'false'}}}"
              f"  # el {el[0][0]:.0f} / {el[0][1]:.0f} deg")

if __name__ == "__main__":
    main()

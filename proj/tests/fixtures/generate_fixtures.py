#!/usr/bin/env python3
"""Regenerates the bundled test cases and synthetic weather.

Output is deterministic; the CSVs are committed so the C++ tests never need
Python. Run from any directory: python3 generate_fixtures.py
"""

import csv
import math
import shutil
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent
FIRST_HOUR = np.datetime64("2023-07-15T00")
HOURS = 24


def stamp(h):
    return str(FIRST_HOUR + np.timedelta64(h, "h")) + ":00:00Z"


def write(path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow(["" if v is None else v for v in r])


def fmt(x, digits=4):
    return f"{x:.{digits}f}".rstrip("0").rstrip(".")


def demand_profile(h):
    """Summer load shape: trough near 04:00, peak near 17:00."""
    return 0.78 + 0.3 * math.exp(-((h - 17) / 4.5) ** 2) - 0.05 * math.exp(-((h - 4) / 3.0) ** 2)


def solar_profile(h):
    return max(0.0, math.sin(math.pi * (h - 6) / 14.0)) if 6 <= h <= 20 else 0.0


def wind_profile(h):
    return 0.55 + 0.35 * math.cos(2 * math.pi * (h - 2) / 24.0)


def write_case(name, buses, branches, gens, loads):
    """buses: (id, lat, lon, kv); branches: (id, f, t, x, rating, kind[, length, diameter]);
    gens: (id, bus, fuel, pmin, [(mw, cost)...]); loads: {bus: base MW}."""
    d = ROOT / name
    if d.exists():
        shutil.rmtree(d)
    write(d / "bus.csv", ["id", "lat", "lon", "base_kv"], buses)
    rows = []
    for b in branches:
        b = list(b) + [None] * (8 - len(b))
        rows.append(b)
    write(d / "branch.csv", ["id", "from_bus", "to_bus", "reactance_pu", "rating_mva", "kind", "length_km",
                             "diameter_m"], rows)
    nseg = max(len(g[4]) for g in gens)
    header = ["id", "bus", "fuel", "p_min_mw", "p_max_mw"]
    for k in range(1, nseg + 1):
        header += [f"seg{k}_mw", f"seg{k}_cost"]
    rows = []
    for gid, bus, fuel, pmin, segs in gens:
        r = [gid, bus, fuel, pmin, fmt(sum(s[0] for s in segs))]
        for k in range(nseg):
            r += [fmt(segs[k][0]), fmt(segs[k][1])] if k < len(segs) else [None, None]
        rows.append(r)
    write(d / "gen.csv", header, rows)

    rows = []
    for h in range(HOURS):
        for bus in sorted(loads):
            rows.append([stamp(h), bus, fmt(loads[bus] * demand_profile(h))])
    write(d / "demand.csv", ["time", "bus_id", "mw"], rows)

    rows = []
    for h in range(HOURS):
        for gid, _, fuel, _, segs in gens:
            pmax = sum(s[0] for s in segs)
            if fuel == "solar":
                rows.append([stamp(h), gid, fmt(pmax * solar_profile(h))])
            elif fuel == "wind":
                rows.append([stamp(h), gid, fmt(pmax * wind_profile(h))])
    if rows:
        write(d / "availability.csv", ["time", "gen_id", "mw"], rows)


def three_bus():
    buses = [(1, 30.60, -97.90, 138), (2, 30.30, -97.50, 138), (3, 30.10, -97.95, 138)]
    branches = [(1, 1, 2, 0.1, 130, "line"), (2, 2, 3, 0.1, 130, "line"), (3, 1, 3, 0.1, 130, "line")]
    gens = [(1, 1, "coal", 0, [(150, 18), (150, 24)]),
            (2, 3, "natural_gas", 0, [(200, 45)])]
    loads = {2: 120, 3: 150}
    write_case("three_bus", buses, branches, gens, loads)


def five_bus():
    # PJM five-bus layout placed around Houston.
    buses = [(1, 29.95, -95.70, 230), (2, 29.75, -95.25, 230), (3, 29.55, -95.05, 230),
             (4, 29.45, -95.45, 230), (5, 29.70, -95.75, 230)]
    branches = [(1, 1, 2, 0.0281, 400, "line"), (2, 1, 4, 0.0304, 400, "line"),
                (3, 1, 5, 0.0064, 400, "line"), (4, 2, 3, 0.0108, 400, "line"),
                (5, 3, 4, 0.0297, 400, "line"), (6, 4, 5, 0.0297, 240, "line")]
    gens = [(1, 1, "coal", 0, [(40, 14)]), (2, 1, "coal", 0, [(170, 15)]),
            (3, 3, "natural_gas", 0, [(520, 30)]), (4, 4, "natural_gas", 0, [(200, 40)]),
            (5, 5, "coal", 0, [(300, 10), (300, 12)]), (6, 2, "solar", 0, [(120, 0)])]
    loads = {2: 300, 3: 300, 4: 400}
    write_case("five_bus", buses, branches, gens, loads)


IEEE30_BRANCHES = [
    (1, 2, 0.0575, 130), (1, 3, 0.1652, 130), (2, 4, 0.1737, 65), (3, 4, 0.0379, 130),
    (2, 5, 0.1983, 130), (2, 6, 0.1763, 65), (4, 6, 0.0414, 90), (5, 7, 0.1160, 70),
    (6, 7, 0.0820, 130), (6, 8, 0.0420, 32), (6, 9, 0.2080, 65), (6, 10, 0.5560, 32),
    (9, 11, 0.2080, 65), (9, 10, 0.1100, 65), (4, 12, 0.2560, 65), (12, 13, 0.1400, 65),
    (12, 14, 0.2559, 32), (12, 15, 0.1304, 32), (12, 16, 0.1987, 32), (14, 15, 0.1997, 16),
    (16, 17, 0.1923, 16), (15, 18, 0.2185, 16), (18, 19, 0.1292, 16), (19, 20, 0.0680, 32),
    (10, 20, 0.2090, 32), (10, 17, 0.0845, 32), (10, 21, 0.0749, 32), (10, 22, 0.1499, 32),
    (21, 22, 0.0236, 32), (15, 23, 0.2020, 16), (22, 24, 0.1790, 16), (23, 24, 0.2700, 16),
    (24, 25, 0.3292, 16), (25, 26, 0.3800, 16), (25, 27, 0.2087, 16), (28, 27, 0.3960, 65),
    (27, 29, 0.4153, 16), (27, 30, 0.6027, 16), (29, 30, 0.4533, 16), (8, 28, 0.2000, 32),
    (6, 28, 0.0599, 32),
]
IEEE30_TRANSFORMERS = {(6, 9), (6, 10), (9, 11), (9, 10), (4, 12), (12, 13), (28, 27)}
IEEE30_LOADS = {2: 21.7, 3: 2.4, 4: 7.6, 7: 22.8, 8: 30.0, 10: 5.8, 12: 11.2, 14: 6.2, 15: 8.2, 16: 3.5,
                17: 9.0, 18: 3.2, 19: 9.5, 20: 2.2, 21: 17.5, 23: 3.2, 24: 8.7, 26: 3.5, 29: 2.4, 30: 10.6}


def thirty_bus():
    rng = np.random.default_rng(30)
    # Buses spread over central/east Texas across the UTM 14/15 boundary at -96.
    buses = []
    for i in range(1, 31):
        col = (i - 1) % 6
        row = (i - 1) // 6
        lat = 29.6 + 0.32 * row + rng.uniform(-0.08, 0.08)
        lon = -97.4 + 0.55 * col + rng.uniform(-0.1, 0.1)
        kv = 345 if i <= 8 or i == 28 else 138
        buses.append((i, fmt(lat, 4), fmt(lon, 4), kv))
    branches = []
    for k, (f, t, x, rate) in enumerate(IEEE30_BRANCHES, start=1):
        kind = "transformer" if (f, t) in IEEE30_TRANSFORMERS else "line"
        branches.append((k, f, t, x, rate, kind))
    # A long tie whose length exceeds the dynamic-rating eligibility cutoff.
    branches[1] = (2, 1, 3, 0.1652, 130, "line", 140)
    # A parallel circuit with a measured conductor diameter.
    branches.append((42, 1, 2, 0.0575, 130, "line", None, 0.0281))
    gens = [(1, 1, "coal", 20, [(60, 16), (60, 19), (60, 23)]),
            (2, 2, "natural_gas", 0, [(40, 35), (40, 42)]),
            (3, 22, "wind", 0, [(50, 0)]),
            (4, 27, "natural_gas", 0, [(55, 48)]),
            (5, 23, "solar", 0, [(30, 0)]),
            (6, 13, "natural_gas", 0, [(40, 60)]),
            (7, 11, "coal", 0, [(45, 25)])]
    write_case("thirty_bus", buses, branches, gens, IEEE30_LOADS)


def weather():
    """Synthetic hourly weather on a 0.5 degree grid over the fixture footprint."""
    rng = np.random.default_rng(738)
    lats = np.arange(29.0, 32.01, 0.5)
    lons = np.arange(-98.5, -93.49, 0.5)
    base_dir = rng.uniform(0, 2 * math.pi, size=(len(lats), len(lons)))
    rows = []
    for h in range(HOURS):
        for i, lat in enumerate(lats):
            for j, lon in enumerate(lons):
                temp_c = 27 + 8 * math.sin(2 * math.pi * (h - 9) / 24) - 1.2 * (lat - 29) + rng.normal(0, 0.6)
                temp_c = min(temp_c, 38.5)
                speed = 0.4 + 3.2 * (1 + math.cos(2 * math.pi * (h - 3) / 24)) * (0.6 + 0.4 * rng.random())
                direction = base_dir[i, j] + 0.25 * h + rng.normal(0, 0.2)
                u = speed * math.cos(direction)
                v = speed * math.sin(direction)
                rows.append([stamp(h), fmt(lat, 2), fmt(lon, 2), fmt(temp_c + 273.15, 3), fmt(u, 3), fmt(v, 3)])
    write(ROOT / "weather.csv", ["time", "lat", "lon", "temp_k", "wind_u_ms", "wind_v_ms"], rows)


if __name__ == "__main__":
    three_bus()
    five_bus()
    thirty_bus()
    weather()

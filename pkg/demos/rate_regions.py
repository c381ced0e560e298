"""Ergodic rate-region boundaries for all schemes at the asymmetric preset.

Walks an 11-point weight grid, re-optimizes each scheme per fading draw,
and prints the averaged supporting points: the cooperative TD scheme
dominates resource partitioning, concurrent SIC, and the 2-band FD scheme,
sits on top of the 3-band FD scheme exactly, and stays below the outer bound.

Run:  python3 demos/rate_regions.py
"""

import numpy as np

from d2dcoop import NetworkConfig, SearchSpec, ergodic_boundary_points

cfg = NetworkConfig.from_mean_gains(4.0, 1.0, 16.0, gamma=2.4, p1=2.0, p2=2.0)
weights = [(1.0 - t, t) for t in np.linspace(0.0, 1.0, 11)]
spec = SearchSpec(resolution=3, depth=1, subsample=5_000)

print(f"mean gains: mu10=4 mu20=1 mu12=mu21=16, P1=P2=2")
for scheme in ("outer", "td", "fd3", "fd2", "sic", "rp"):
    pts = ergodic_boundary_points(cfg, scheme, weights, samples=4_000,
                                  rng=np.random.default_rng(1), spec=spec)
    xy = "  ".join(f"({p['r1']:.2f},{p['r2']:.2f})" for p in pts[::2])
    print(f"{scheme:>5}: {xy}")

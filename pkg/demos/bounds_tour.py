"""Counting bounds, the hemisphere probability and random projections.

Run: python3 demos/bounds_tour.py
"""

import numpy as np

from contrastive_vc import bounds

# crossover: first m with 2^m above the sign-pattern count
print("even p, crossover / (n d):")
for n, d in ((4, 1), (8, 2), (16, 4), (32, 2)):
    m = bounds.vc_upper_crossover(bounds.EVEN, n, d, 2)
    print(f"  n={n:2d} d={d}: m*={m:5d}  ratio {m / (n * d):.2f}")
print("tree metrics, n=3..6:", [bounds.vc_upper_crossover(bounds.TREE, n) for n in range(3, 7)])

# per-setting report: lower construction, upper crossover, sample counts
for setting, kw in (("lp", dict(d=3, p=2)), ("arbitrary", {}), ("class", {})):
    r = bounds.bound_report(setting, 12, **kw)
    print(f"{setting:9s} n=12: VC in [{r.vc_lower}, {r.vc_upper_crossover}], "
          f"m ~ {r.sample_upper['value']:.0f} at eps=0.1")

# hemisphere: random signs, hull misses the origin
rng = np.random.default_rng(0)
for dim, m in ((2, 4), (3, 6), (4, 8)):
    v = rng.standard_normal((m, dim))
    mc = bounds.hemisphere_monte_carlo(v, 50_000, seed=1)
    print(f"dim={dim} m={m}: empirical {mc.miss_probability:.4f} "
          f"+- {mc.half_width:.4f}, exact {float(bounds.hemisphere_bound(dim, m)):.4f}")

# JL: 50 points from R^100 down to ceil(15 ln 50 / beta^2)
pts = rng.standard_normal((50, 100))
for beta in (0.5, 0.3):
    rep = bounds.jl_check(pts, beta, seed=2)
    print(f"beta={beta}: d1={rep.d1}, ratios in [{rep.min_ratio:.3f}, {rep.max_ratio:.3f}]")

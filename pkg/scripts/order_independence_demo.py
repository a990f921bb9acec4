"""Closed-form earthquake against leaf-by-leaf composition in random orders."""

import numpy as np

from liouquake.earthquake import elementary_earthquake, iterated_earthquake, projective_distance
from liouquake.hyp_core import as_point
from liouquake.suite import REGRESSION_SUITE

rng = np.random.default_rng(2024)
points = [as_point(x) for x in np.tan(rng.uniform(-np.pi / 2, np.pi / 2, 500))]

for tau in (0.7, 0.3 + 0.4j):
    for name, cfg in sorted(REGRESSION_SUITE.items()):
        closed = elementary_earthquake(cfg.lamination, tau)
        worst = 0.0
        for _ in range(10):
            order = list(rng.permutation(len(cfg.lamination)))
            it = iterated_earthquake(cfg.lamination, tau, order)
            worst = max(worst, max(projective_distance(closed(p), it(p)) for p in points))
        print(f"tau={tau!s:<12} {name:<10} max deviation {worst:.1e}")

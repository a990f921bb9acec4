"""Closed-form derivatives against numerical oracles on every regression configuration.

Usage: python3 scripts/run_regression_suite.py [--tau 0.1+0.05i]
"""

import argparse
import time

from liouquake.deriv import (
    cauchy_derivative,
    d1_lamination,
    d1_quakebend,
    d2_lamination,
    earthquake_path,
    fd_derivative,
)
from liouquake.suite import REGRESSION_SUITE


def rel(a, b):
    return abs(complex(a) - complex(b)) / max(abs(complex(b)), 1e-300)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tau", type=lambda s: complex(s.replace("i", "j")), default=0.1 + 0.05j)
    args = ap.parse_args()

    print(f"{'config':<10} {'d1 rel':>10} {'d2 rel':>10} {'bend rel':>10} {'secs':>6}")
    for name, cfg in sorted(REGRESSION_SUITE.items()):
        start = time.perf_counter()
        path = earthquake_path(cfg.lamination, cfg.xi, 1e-13)
        e1 = rel(d1_lamination(cfg.lamination, cfg.xi, 1e-9), fd_derivative(path, 0.0, 1e-4, 1).value)
        e2 = rel(d2_lamination(cfg.lamination, cfg.xi, 1e-9), fd_derivative(path, 0.0, 1e-3, 2).value)
        cpath = earthquake_path(cfg.lamination, cfg.xi, 1e-12, method="quad")
        bend = d1_quakebend(cfg.lamination, args.tau, cfg.xi, 1e-10, method="quad")
        e3 = rel(bend, cauchy_derivative(cpath, args.tau, 0.05, 32, 1).value)
        print(f"{name:<10} {e1:10.2e} {e2:10.2e} {e3:10.2e} {time.perf_counter() - start:6.1f}")


if __name__ == "__main__":
    main()

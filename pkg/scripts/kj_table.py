"""Truncation table for the quake-bend derivative on the z -> 4z orbit lamination."""

import argparse

from liouquake.deriv import d1_quakebend, kj_stabilization
from liouquake.suite import orbit_configuration


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--leaves", type=int, default=25, help="orbit half-length")
    ap.add_argument("--tau", type=lambda s: complex(s.replace("i", "j")), default=0.1 + 0.05j)
    args = ap.parse_args()

    cfg = orbit_configuration(args.leaves)
    radii = [0.5 * 2 ** k for k in range(8)]
    full = d1_quakebend(cfg.lamination, args.tau, cfg.xi, 1e-9, "dyadic")
    print(f"full lamination ({len(cfg.lamination)} leaves): {full:.12g}")
    for row in kj_stabilization(cfg.lamination, cfg.xi, radii, args.tau, 1e-9):
        print(f"R={row.radius:6.1f}  leaves={row.leaves:3d}  value={row.value:.12g}  gap={abs(row.value - full):.1e}")


if __name__ == "__main__":
    main()

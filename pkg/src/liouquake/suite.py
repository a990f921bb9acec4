"""Fixed lamination / test-function configurations shared by tests, CLI and scripts."""

from __future__ import annotations

from dataclasses import dataclass

from .currents import Box, TestFunction, tent_test_function
from .hyp_core import MobiusMap, Geodesic
from .lamination import FiniteLamination, orbit_lamination


@dataclass(frozen=True)
class Configuration:
    name: str
    lamination: FiniteLamination
    xi: TestFunction
    note: str = ""


def _cfg(name, leaves, box, note=""):
    return Configuration(name, FiniteLamination.of(*leaves), tent_test_function(Box.of(*box)), note)


REGRESSION_SUITE = {
    c.name: c
    for c in (
        _cfg("single", [(0, "inf", 1.0)], (1, 3, -2, -0.5), "one leaf through i"),
        _cfg("fan", [(1, 2, 1.0), (0.9, 2.1, 0.7), (0.8, 2.2, 0.4)], (1.3, 1.7, -1, 0),
             "three nested leaves, every geodesic of the box crosses all of them"),
        _cfg("nested", [(0, "inf", 1.0), (1, 10, 0.5)], (2, 4, -3, -1),
             "(1,10) lies beyond (0,inf) as seen from the base"),
        _cfg("opposite", [(-5, -1, 1.0), (1, 5, 0.6)], (-4, -2, 2, 3),
             "base stratum between the two leaves"),
        _cfg("straddle", [(0, "inf", 1.0), (3, 5, 0.8)], (-1, 1, 2, 4),
             "a leaf endpoint inside a support arc"),
    )
}

#: the three configurations of the first-derivative acceptance check
D1_ACCEPTANCE = ("single", "fan", "nested")


def orbit_configuration(n: int = 25) -> Configuration:
    """Orbit of the leaf (1, 2) under z -> 4z, with a box crossing (1,2) and (16,32)."""
    gamma = MobiusMap(2.0, 0.0, 0.0, 0.5)
    mu = orbit_lamination(gamma, Geodesic.of(1, 2), 1.0, n)
    return Configuration("orbit", mu, tent_test_function(Box.of(1.2, 1.8, 17, 31)),
                         "51 unnested leaves accumulating at 0 and infinity")


#: support of the standard receding family used for the decay experiment
DECAY_BOX = (0, 2, -3, -1)

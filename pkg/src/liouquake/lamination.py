"""Finitely supported measured laminations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import CrossingLeaves, LeavesShareEndpoint, NonpositiveWeight, SharedEndpoint
from .hyp_core import (
    EQ_TOL,
    I_POINT,
    Geodesic,
    MobiusMap,
    PointH,
    as_point,
    geodesics_cross,
    mobius_to_standard,
    point_geodesic_distance,
)


class Leaf(NamedTuple):
    geodesic: Geodesic
    weight: float


def orient_base_left(g: Geodesic, ref: PointH = I_POINT) -> Geodesic:
    """Orient g so that ``ref`` lies on its left; a leaf through ref is kept."""
    w = mobius_to_standard(g).act(ref.z)
    if abs(w.real) <= 1e-12 * abs(w):
        return g
    return g if w.real < 0 else g.reverse()


@dataclass(frozen=True)
class FiniteLamination:
    """Weighted leaves, each stored with the base stratum on its left.

    Construction normalizes orientations only; call :func:`validate` to check
    disjointness and weights.
    """

    leaves: tuple = ()

    def __post_init__(self):
        norm = []
        for item in self.leaves:
            g, w = item
            if not isinstance(g, Geodesic):
                g = Geodesic.of(*g)
            if not g.is_real:
                raise ValueError("lamination leaves must have real endpoints")
            norm.append(Leaf(orient_base_left(g), float(w)))
        object.__setattr__(self, "leaves", tuple(norm))

    @classmethod
    def of(cls, *items) -> "FiniteLamination":
        """``FiniteLamination.of((p, q, w), ...)``."""
        return cls(tuple((Geodesic.of(p, q), w) for p, q, w in items))

    def __len__(self):
        return len(self.leaves)

    def __iter__(self):
        return iter(self.leaves)

    @property
    def geodesics(self):
        return [leaf.geodesic for leaf in self.leaves]

    @property
    def weights(self):
        return np.array([leaf.weight for leaf in self.leaves], dtype=float)

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum()) if self.leaves else 0.0

    def scaled(self, c: float) -> "FiniteLamination":
        return FiniteLamination(tuple((g, c * w) for g, w in self.leaves))

    def union(self, other: "FiniteLamination") -> "FiniteLamination":
        return FiniteLamination(self.leaves + other.leaves)

    def subset(self, indices: Iterable[int]) -> "FiniteLamination":
        return FiniteLamination(tuple(self.leaves[i] for i in indices))

    def permuted(self, order: Sequence[int]) -> "FiniteLamination":
        return self.subset(order)


@dataclass
class ValidationReport:
    crossing: list = field(default_factory=list)
    shared: list = field(default_factory=list)
    nonpositive: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.crossing or self.shared or self.nonpositive)

    def raise_if_failed(self) -> None:
        if self.crossing:
            raise CrossingLeaves(f"crossing leaf pairs {self.crossing}", self.crossing)
        if self.shared:
            raise LeavesShareEndpoint(f"leaf pairs sharing an endpoint {self.shared}", self.shared)
        if self.nonpositive:
            raise NonpositiveWeight(f"leaves with nonpositive weight {self.nonpositive}", self.nonpositive)


def validate(mu: FiniteLamination, raise_on_error: bool = True) -> ValidationReport:
    report = ValidationReport()
    for i, (_, w) in enumerate(mu.leaves):
        if not (w > 0 and math.isfinite(w)):
            report.nonpositive.append(i)
    gs = mu.geodesics
    for i in range(len(gs)):
        for k in range(i + 1, len(gs)):
            try:
                if geodesics_cross(gs[i], gs[k]):
                    report.crossing.append((i, k))
            except SharedEndpoint:
                report.shared.append((i, k))
    if raise_on_error:
        report.raise_if_failed()
    return report


# ---------------------------------------------------------------------------
# Thurston norm


@dataclass(frozen=True)
class ThurstonEstimate:
    """Sampled lower bound for the Thurston norm.

    ``arc`` is the best unit arc found (two interior points), ``crossed`` the
    indices of the leaves it crosses and ``source`` how it was generated.
    """

    value: float
    arc: tuple
    crossed: tuple
    source: str
    arcs_tried: int

    def __float__(self):
        return self.value


def _unit_arc_at(center: complex, angle: float, length: float = 1.0):
    """Endpoints of the geodesic segment of given length centred at ``center``."""
    x, y = center.real, center.imag
    r = math.tanh(length / 4)
    ends = []
    for sgn in (1.0, -1.0):
        w = sgn * r * complex(math.cos(angle), math.sin(angle))
        ends.append(complex(x, 0) + y * (1j * (1 + w) / (1 - w)))
    return ends[0], ends[1]


class _LeafSides:
    """Vectorized side tests of interior points against every leaf."""

    def __init__(self, mu: FiniteLamination):
        ms = [mobius_to_standard(g) for g in mu.geodesics]
        self.mats = np.array([m.matrix for m in ms], dtype=float).reshape(-1, 2, 2)
        self.weights = mu.weights

    def signs(self, z: complex) -> np.ndarray:
        a, b, c, d = (self.mats[:, i, j] for i in (0, 1) for j in (0, 1))
        w = (a * z + b) / (c * z + d)
        return np.sign(w.real)

    def crossed(self, z1: complex, z2: complex) -> np.ndarray:
        return self.signs(z1) * self.signs(z2) < 0


def _perpendicular_arcs(mu: FiniteLamination):
    half = 0.5
    for idx, g in enumerate(mu.geodesics):
        m = mobius_to_standard(g)
        r = abs(m.act(1j))
        inv = m.inverse()
        pts = [inv.act(r * complex(s * math.tanh(half), 1 / math.cosh(half))) for s in (1, -1)]
        yield tuple(pts), f"perpendicular to leaf {idx}"


def _pair_arcs(mu: FiniteLamination):
    gs = mu.geodesics
    for i in range(len(gs)):
        m = mobius_to_standard(gs[i])
        inv = m.inverse()
        for k in range(len(gs)):
            if k == i:
                continue
            p = m(gs[k].p_minus)
            q = m(gs[k].p_plus)
            if p.v == 0 or q.v == 0:
                continue
            p, q = p.u / p.v, q.u / q.v
            if p * q <= 0 or p == q:
                continue
            dist = math.acosh(abs((q + p) / (q - p)))
            if dist >= 1.0:
                continue
            radius = math.sqrt(p * q)
            sgn = 1.0 if p > 0 else -1.0
            pts = []
            for s in (dist / 2 - 0.5, dist / 2 + 0.5):
                w = radius * complex(sgn * math.tanh(s), 1 / math.cosh(s))
                pts.append(inv.act(w))
            yield tuple(pts), f"common perpendicular of leaves {i} and {k}"


def _random_arcs(mu: FiniteLamination, count: int, seed: int):
    rng = np.random.default_rng(seed)
    gs = mu.geodesics
    for _ in range(count):
        k = int(rng.integers(len(gs)))
        m = mobius_to_standard(gs[k])
        r = abs(m.act(1j))
        s = rng.uniform(-3.0, 3.0)
        center = m.inverse().act(1j * r * math.exp(s))
        offset = rng.uniform(-1.0, 1.0)
        angle = rng.uniform(0, math.pi)
        c2 = _unit_arc_at(center, angle, 2 * abs(offset))[0] if offset else center
        yield _unit_arc_at(c2, angle), f"random arc near leaf {k}"


def thurston_norm_estimate(mu: FiniteLamination, samples: int = 256, seed: int = 0) -> ThurstonEstimate:
    """Best lamination mass crossing a sampled unit-length geodesic arc.

    Deterministic arcs (one perpendicular through each leaf and one along each
    short common perpendicular) are tried first, then ``samples`` random arcs
    from a seeded stream.  The random stream is a prefix sequence, so the
    estimate never decreases as ``samples`` grows.
    """
    if len(mu) == 0:
        return ThurstonEstimate(0.0, (), (), "empty lamination", 0)
    sides = _LeafSides(mu)
    best = None
    tried = 0

    def arcs():
        yield from _perpendicular_arcs(mu)
        yield from _pair_arcs(mu)
        yield from _random_arcs(mu, samples, seed)

    for (z1, z2), source in arcs():
        tried += 1
        hit = sides.crossed(z1, z2)
        mass = float(sides.weights[hit].sum())
        if best is None or mass > best[0] + 1e-15:
            best = (mass, (z1, z2), tuple(int(i) for i in np.flatnonzero(hit)), source)
    return ThurstonEstimate(best[0], best[1], best[2], best[3], tried)


# ---------------------------------------------------------------------------
# truncation, orbits, pushforward


def disk_radius_to_hyperbolic(r: float) -> float:
    """Hyperbolic radius of the Euclidean disk of radius r < 1 in the unit disk model."""
    if r >= 1.0:
        return math.inf
    return 2.0 * math.atanh(r)


def restrict_to_disk(mu: FiniteLamination, radius: float, ref: PointH = I_POINT) -> FiniteLamination:
    """Leaves within hyperbolic distance ``radius`` of ``ref``.

    The radius is perturbed upward by 1e-9, so a leaf sitting exactly on the
    threshold is kept.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    keep = []
    for leaf in mu.leaves:
        d = point_geodesic_distance(ref, leaf.geodesic)
        if d <= radius + 1e-9:
            keep.append(leaf)
    return FiniteLamination(tuple(keep))


def orbit_lamination(gamma: MobiusMap, seed: Geodesic, weight: float = 1.0, n: int = 1) -> FiniteLamination:
    """Leaves gamma^k(seed) for |k| <= n, all with the same weight."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    leaves = []
    for k in range(-n, n + 1):
        g_k = _power(gamma, k)
        leaves.append((Geodesic(g_k(seed.p_minus), g_k(seed.p_plus)), weight))
    mu = FiniteLamination(tuple(leaves))
    validate(mu)
    return mu


def _power(gamma: MobiusMap, k: int) -> MobiusMap:
    base = gamma if k >= 0 else gamma.inverse()
    out = np.eye(2)
    mat = base.matrix
    for _ in range(abs(k)):
        out = out @ mat
    return MobiusMap.from_matrix(out)


def pushforward(gamma: MobiusMap, mu: FiniteLamination) -> FiniteLamination:
    if gamma.flavor != "real":
        raise ValueError("pushforward needs a real Möbius map")
    return FiniteLamination(
        tuple((Geodesic(gamma(g.p_minus), gamma(g.p_plus)), w) for g, w in mu.leaves)
    )


# ---------------------------------------------------------------------------
# file format: one leaf per line, "p_minus p_plus weight", '#' comments


def parse_lamination(text: str) -> FiniteLamination:
    leaves = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 'p_minus p_plus weight', got {raw!r}")
        try:
            p, q = as_point(parts[0]), as_point(parts[1])
            w = float(parts[2])
        except (TypeError, ValueError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
        leaves.append((Geodesic(p, q), w))
    return FiniteLamination(tuple(leaves))


def read_lamination(path) -> FiniteLamination:
    return parse_lamination(Path(path).read_text())


def format_lamination(mu: FiniteLamination) -> str:
    def tok(p):
        return "inf" if p.is_infinite else repr(p.value)

    return "".join(f"{tok(g.p_minus)} {tok(g.p_plus)} {w!r}\n" for g, w in mu.leaves)


__all__ = [
    "Leaf",
    "FiniteLamination",
    "ValidationReport",
    "ThurstonEstimate",
    "validate",
    "orient_base_left",
    "thurston_norm_estimate",
    "disk_radius_to_hyperbolic",
    "restrict_to_disk",
    "orbit_lamination",
    "pushforward",
    "parse_lamination",
    "read_lamination",
    "format_lamination",
    "EQ_TOL",
]

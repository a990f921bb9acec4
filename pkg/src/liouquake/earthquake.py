"""Earthquake and quake-bend boundary maps of finite laminations.

A :class:`PiecewiseMobiusMap` stores the leaf endpoints in cyclic order
(cut at infinity) and one Möbius map per complementary arc.  Piece ``k`` acts
on the open arc from ``breakpoints[k]`` to ``breakpoints[k+1]`` (the last arc
wraps through infinity).  A breakpoint itself is evaluated with the piece of
the arc ending there, i.e. the arc clockwise of it.
"""

from __future__ import annotations

import bisect
import cmath
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .hyp_core import (
    EQ_TOL,
    BoundaryPoint,
    Geodesic,
    MobiusMap,
    as_point,
    det,
    mobius_to_standard,
    translation_along,
)
from .lamination import FiniteLamination, validate


@dataclass(frozen=True, eq=False)
class PiecewiseMobiusMap:
    breakpoints: tuple
    pieces: tuple
    lamination: Optional[FiniteLamination] = None
    tau: complex = 0j

    def __post_init__(self):
        if len(self.pieces) != max(len(self.breakpoints), 1):
            raise ValueError("need one piece per complementary arc")
        keys = [b.circle_key() for b in self.breakpoints]
        if keys != sorted(keys):
            raise ValueError("breakpoints must be in cyclic order starting after infinity")
        object.__setattr__(self, "_keys", keys)
        object.__setattr__(self, "_thetas", np.array([b.theta for b in self.breakpoints]))

    @classmethod
    def from_mobius(cls, m: MobiusMap) -> "PiecewiseMobiusMap":
        return cls((), (m,))

    @classmethod
    def identity(cls) -> "PiecewiseMobiusMap":
        return cls.from_mobius(MobiusMap.identity())

    @property
    def flavor(self) -> str:
        return "real" if all(p.flavor == "real" for p in self.pieces) else "complex"

    @property
    def breakpoint_thetas(self) -> np.ndarray:
        return self._thetas

    def piece_index(self, p) -> int:
        if not self.breakpoints:
            return 0
        k = bisect.bisect_left(self._keys, as_point(p).circle_key()) - 1
        return k % len(self.breakpoints)

    def piece_at(self, p) -> MobiusMap:
        return self.pieces[self.piece_index(p)]

    def __call__(self, p) -> BoundaryPoint:
        return evaluate(self, p)

    def piece_indices_theta(self, theta) -> np.ndarray:
        """Vectorized piece lookup for angle coordinates in (-pi, pi]."""
        theta = np.asarray(theta, dtype=float)
        if not self.breakpoints:
            return np.zeros(theta.shape, dtype=int)
        k = np.searchsorted(self._thetas, theta, side="left") - 1
        return np.mod(k, len(self.breakpoints))

    def piece_matrices(self) -> np.ndarray:
        dtype = float if self.flavor == "real" else complex
        return np.array([p.matrix for p in self.pieces], dtype=dtype)

    def apply_theta(self, theta):
        """Images of the boundary points at angles ``theta`` as projective arrays (U, V)."""
        theta = np.asarray(theta, dtype=float)
        mats = self.piece_matrices()[self.piece_indices_theta(np.where(theta <= -np.pi, np.pi, theta))]
        u, v = np.sin(theta / 2), np.cos(theta / 2)
        return mats[..., 0, 0] * u + mats[..., 0, 1] * v, mats[..., 1, 0] * u + mats[..., 1, 1] * v

    def post_compose(self, m: MobiusMap) -> "PiecewiseMobiusMap":
        return PiecewiseMobiusMap(self.breakpoints, tuple(m @ p for p in self.pieces), self.lamination, self.tau)

    def pre_compose(self, m: MobiusMap) -> "PiecewiseMobiusMap":
        """The map p -> self(m(p)) for an orientation-preserving real m."""
        if m.flavor != "real" or m.determinant < 0:
            raise ValueError("pre-composition needs an orientation-preserving real map")
        if not self.breakpoints:
            return PiecewiseMobiusMap((), (self.pieces[0] @ m,))
        inv = m.inverse()
        pairs = sorted(
            ((inv(b), piece @ m) for b, piece in zip(self.breakpoints, self.pieces)),
            key=lambda bp: bp[0].circle_key(),
        )
        return PiecewiseMobiusMap(tuple(b for b, _ in pairs), tuple(p for _, p in pairs))

    def conjugate(self, gamma: MobiusMap) -> "PiecewiseMobiusMap":
        """gamma o self o gamma^-1."""
        return self.pre_compose(gamma.inverse()).post_compose(gamma)

    def continuity_defect(self) -> float:
        """Largest projective disagreement of adjacent pieces at breakpoints."""
        worst = 0.0
        n = len(self.breakpoints)
        for k, b in enumerate(self.breakpoints):
            left, right = self.pieces[k - 1], self.pieces[k % n]
            worst = max(worst, abs(det(left(b), right(b))))
        return worst


def evaluate(f: PiecewiseMobiusMap, p) -> BoundaryPoint:
    return f.piece_at(p)(as_point(p))


def arc_sample(p: BoundaryPoint, q: BoundaryPoint) -> BoundaryPoint:
    """A point strictly inside the positively oriented arc from p to q."""
    m = mobius_to_standard(Geodesic(p, q))
    return m.inverse()(as_point(1.0))


def _sorted_breakpoints(mu: FiniteLamination):
    pts = [p for g in mu.geodesics for p in (g.p_minus, g.p_plus)]
    return sorted(pts, key=BoundaryPoint.circle_key)


def _arc_samples(bps):
    n = len(bps)
    return [arc_sample(bps[k], bps[(k + 1) % n]) for k in range(n)]


def _right_of(m: MobiusMap, p: BoundaryPoint) -> bool:
    q = m(p)
    return q.u * q.v > 0 and abs(q.u) > EQ_TOL and abs(q.v) > EQ_TOL


def simple_earthquake(g: Geodesic, length) -> PiecewiseMobiusMap:
    """Identity on the left of g, translation by ``length`` along g on the right."""
    if not g.is_real:
        raise ValueError("simple earthquakes need a real geodesic")
    bps = sorted([g.p_minus, g.p_plus], key=BoundaryPoint.circle_key)
    m = mobius_to_standard(g)
    t = translation_along(g, length)
    ident = MobiusMap.identity()
    pieces = tuple(t if _right_of(m, s) else ident for s in _arc_samples(bps))
    return PiecewiseMobiusMap(tuple(bps), pieces, FiniteLamination(((g, 1.0),)), complex(length))


def elementary_earthquake(mu: FiniteLamination, tau) -> PiecewiseMobiusMap:
    """Earthquake (real tau) or quake-bend (complex tau) along a finite lamination.

    On each complementary arc the piece is T_1 o ... o T_k, where g_1..g_k are
    the leaves separating the arc from the base stratum listed from the base
    outward and T_j translates along g_j by tau * w_j.
    """
    validate(mu)
    tau = complex(tau)
    if len(mu) == 0:
        return PiecewiseMobiusMap((), (MobiusMap.identity(),), mu, tau)
    gs = mu.geodesics
    stds = [mobius_to_standard(g) for g in gs]
    trans = [translation_along(g, tau * w) for g, w in mu.leaves]
    n = len(gs)
    depth_cache = {}

    bps = _sorted_breakpoints(mu)
    pieces = []
    for s in _arc_samples(bps):
        sep = [i for i in range(n) if _right_of(stds[i], s)]
        key = tuple(sep)
        if key not in depth_cache:
            # the leaf nearest the base has every other separating leaf on its right
            def depth(i):
                return sum(1 for j in sep if j != i and _leaf_right_of(stds[j], gs[i]))
            order = sorted(sep, key=depth)
            mat = np.eye(2, dtype=complex)
            for i in order:
                mat = mat @ trans[i].matrix
            depth_cache[key] = MobiusMap.from_matrix(mat)
        pieces.append(depth_cache[key])
    return PiecewiseMobiusMap(tuple(bps), tuple(pieces), mu, tau)


def _leaf_right_of(m_outer: MobiusMap, g: Geodesic) -> bool:
    """True when g lies (weakly) on the right of the leaf standardized by m_outer."""
    a, b = m_outer(g.p_minus), m_outer(g.p_plus)
    return a.u * a.v >= 0 and b.u * b.v >= 0


def iterated_earthquake(mu: FiniteLamination, tau, order: Optional[Sequence[int]] = None) -> PiecewiseMobiusMap:
    """Brute-force construction by successive simple earthquakes.

    Start from the identity and, for each leaf g in ``order``, compose on the
    right side of g with the translation along the current image of g.  This
    is the textbook iterated convention and serves as an oracle for
    :func:`elementary_earthquake`.
    """
    validate(mu)
    tau = complex(tau)
    if len(mu) == 0:
        return PiecewiseMobiusMap((), (MobiusMap.identity(),), mu, tau)
    order = range(len(mu)) if order is None else order
    bps = _sorted_breakpoints(mu)
    samples = _arc_samples(bps)
    current = [MobiusMap.identity() for _ in samples]
    probe = PiecewiseMobiusMap(tuple(bps), tuple(current))
    for i in order:
        g, w = mu.leaves[i]
        probe = PiecewiseMobiusMap(tuple(bps), tuple(current))
        image = Geodesic(probe(g.p_minus), probe(g.p_plus))
        t = translation_along(image, tau * w)
        m = mobius_to_standard(g)
        current = [t @ piece if _right_of(m, s) else piece for piece, s in zip(current, samples)]
    return PiecewiseMobiusMap(tuple(bps), tuple(current), mu, tau)


def normalize_012inf(f: PiecewiseMobiusMap) -> PiecewiseMobiusMap:
    """Post-compose f with the Möbius map sending f(0), f(1), f(inf) to 0, 1, inf."""
    n = MobiusMap.from_points(f(0.0), f(1.0), f(np.inf))
    return f.post_compose(n)


def projective_distance(p: BoundaryPoint, q: BoundaryPoint) -> float:
    """Chordal-type distance |det(p, q)| between normalized projective pairs."""
    return abs(det(p, q))


__all__ = [
    "PiecewiseMobiusMap",
    "evaluate",
    "arc_sample",
    "simple_earthquake",
    "elementary_earthquake",
    "iterated_earthquake",
    "normalize_012inf",
    "projective_distance",
]

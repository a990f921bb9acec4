"""Derivatives of the Liouville functional along earthquake and quake-bend paths.

Closed forms integrate geometric kernels against the Liouville measure (or
its pullback).  Oracles differentiate the functional itself, either by finite
differences along a real path or by the Cauchy integral along a complex one.

Kernel conventions.  For a leaf g and a geodesic h crossing it, ``h_rl``
denotes h oriented so that it crosses g from g's right to g's left.  The
first-derivative kernel is cos(g, h_rl); it does not depend on the
orientation of g or h.  The second-derivative kernel for leaves g_i, g_k is

    c_i c_k - 1/2 s_i s_k exp(-d_h),

with c = cos(g, h_rl), s = |sin(g, h_rl)| and d_h the distance along h between
the two crossing points.  It vanishes unless h crosses both leaves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import errors
from .currents import (
    Box,
    Kernel,
    TestFunction,
    functional_dyadic,
    quad_weighted,
)
from .earthquake import PiecewiseMobiusMap, elementary_earthquake, simple_earthquake
from .hyp_core import (
    I_POINT,
    Geodesic,
    as_point,
    mobius_to_standard,
    point_from_theta,
    point_geodesic_distance,
    wrap_angle,
)
from .lamination import FiniteLamination, restrict_to_disk, validate


# ---------------------------------------------------------------------------
# kernels


def _std_coords(m, theta):
    su, cu = np.sin(np.asarray(theta, float) / 2), np.cos(np.asarray(theta, float) / 2)
    return m.a * su + m.b * cu, m.c * su + m.d * cu


def _endpoint_thetas(g: Geodesic):
    return (g.p_minus.theta, g.p_plus.theta)


class CrossingCosKernel(Kernel):
    """h -> cos(g, h_rl), zero when h misses g."""

    def __init__(self, g: Geodesic):
        self.g = g
        self.m = mobius_to_standard(g)
        self.breakpoints = _endpoint_thetas(g)

    def parts(self, theta, phi):
        """(crossing mask, cos(g, h_rl), |sin(g, h_rl)|)."""
        u1, v1 = _std_coords(self.m, theta)
        u2, v2 = _std_coords(self.m, phi)
        s1, s2 = u1 * v1, u2 * v2
        cross = s1 * s2 < 0
        den = u1 * v2 - u2 * v1
        safe = np.where(cross, den, 1.0)
        cos = np.where(cross, -np.sign(s1) * (u1 * v2 + u2 * v1) / safe, 0.0)
        sin = np.where(cross, 2.0 * np.sqrt(np.abs(s1 * s2)) / np.abs(safe), 0.0)
        return cross, cos, sin

    def values(self, theta, phi):
        return self.parts(theta, phi)[1]


def _log_height_ratio(g1: Geodesic, g2: Geodesic, theta, phi):
    """log of (height of h cap g1) / (height of h cap g2) with h placed on (0, inf)."""
    hu, hv = np.sin(np.asarray(theta) / 2), np.cos(np.asarray(theta) / 2)
    ku, kv = np.sin(np.asarray(phi) / 2), np.cos(np.asarray(phi) / 2)

    def d(p, u, v):
        return p.u * v - p.v * u

    def log_abs_pq(g):
        return (np.log(np.abs(d(g.p_minus, hu, hv))) + np.log(np.abs(d(g.p_plus, hu, hv)))
                - np.log(np.abs(d(g.p_minus, ku, kv))) - np.log(np.abs(d(g.p_plus, ku, kv))))

    return 0.5 * (log_abs_pq(g1) - log_abs_pq(g2))


class SecondOrderKernel(Kernel):
    """The (i, k) second-derivative kernel described in the module docstring."""

    def __init__(self, g1: Geodesic, g2: Geodesic):
        self.k1, self.k2 = CrossingCosKernel(g1), CrossingCosKernel(g2)
        self.same = g1 == g2 or g1 == g2.reverse()
        self.breakpoints = self.k1.breakpoints + self.k2.breakpoints

    def values(self, theta, phi):
        x1, c1, s1 = self.k1.parts(theta, phi)
        x2, c2, s2 = self.k2.parts(theta, phi)
        both = x1 & x2
        if self.same:
            damp = 1.0
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                lr = _log_height_ratio(self.k1.g, self.k2.g, theta, phi)
            damp = np.where(both, np.exp(-np.abs(np.where(both, lr, 0.0))), 0.0)
        return np.where(both, c1 * c2 - 0.5 * s1 * s2 * damp, 0.0)


class QuakeBendKernel(Kernel):
    """h -> cosh of the complex distance between f(g) and f(h_rl).

    Crossing is decided on the real preimages; the kernel vanishes when h
    misses g.  At a real map f this is cos(f(g), f(h_rl)).
    """

    def __init__(self, f: PiecewiseMobiusMap, g: Geodesic):
        self.f, self.g = f, g
        self.base = CrossingCosKernel(g)
        self.gm, self.gp = f(g.p_minus), f(g.p_plus)
        self.breakpoints = self.base.breakpoints + tuple(f.breakpoint_thetas)

    def values(self, theta, phi):
        theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
        u1, v1 = _std_coords(self.base.m, theta)
        u2, v2 = _std_coords(self.base.m, phi)
        s1, s2 = u1 * v1, u2 * v2
        cross = s1 * s2 < 0
        right = np.where(s1 > 0, theta, phi)
        left = np.where(s1 > 0, phi, theta)
        ru, rv = self.f.apply_theta(right)
        lu, lv = self.f.apply_theta(left)
        gm, gp = self.gm, self.gp

        def d(pu, pv, qu, qv):
            return pu * qv - pv * qu

        # cr(f(l), f(g-), f(r), f(g+))
        num = d(lu, lv, ru, rv) * d(gm.u, gm.v, gp.u, gp.v)
        den = d(lu, lv, gp.u, gp.v) * d(gm.u, gm.v, ru, rv)
        den = np.where(cross, den, 1.0)
        num = np.where(cross, num, 1.0)
        return np.where(cross, 1.0 - 2.0 * den / num, 0.0)


def box_meets(g: Geodesic, box: Box) -> bool:
    """Whether some geodesic of the box can cross g."""
    for p in (g.p_minus, g.p_plus):
        if box.arc1.contains(p.theta) or box.arc2.contains(p.theta):
            return True
    m = mobius_to_standard(g)
    s1 = np.prod(_std_coords(m, box.arc1.start))
    s2 = np.prod(_std_coords(m, box.arc2.start))
    return bool(s1 * s2 < 0)


# ---------------------------------------------------------------------------
# closed forms


def d1_simple(g: Geodesic, omega: float, xi: TestFunction, tol: float = 1e-8) -> float:
    """First derivative at t = 0 of the functional along the simple earthquake E_g^{t omega}."""
    if not box_meets(g, xi.support):
        return 0.0
    return omega * quad_weighted(xi, CrossingCosKernel(g), tol).value


def d1_lamination(mu: FiniteLamination, xi: TestFunction, tol: float = 1e-8) -> float:
    validate(mu)
    total = mu.total_weight
    out = 0.0
    for g, w in mu.leaves:
        out += d1_simple(g, w, xi, tol * w / total)
    return out


def d1_quakebend(
    mu: FiniteLamination,
    tau,
    xi: TestFunction,
    tol: float = 1e-8,
    method: str = "dyadic",
):
    """Derivative in tau of the functional along the quake-bend path at tau.

    ``method="dyadic"`` uses the dyadic sums; ``method="quad"`` integrates the
    explicit integrand (kernel times the pullback density) by quadrature.
    """
    validate(mu)
    if len(mu) == 0:
        return 0.0
    f = elementary_earthquake(mu, tau)
    total = mu.total_weight
    out = 0j
    for g, w in mu.leaves:
        if not box_meets(g, xi.support):
            continue
        kern = QuakeBendKernel(f, g)
        leaf_tol = tol * w / total
        if method == "dyadic":
            val = functional_dyadic(f, xi, kern, tol=leaf_tol).value
        elif method == "quad":
            val = quad_weighted(xi, kern, leaf_tol, pullback=f).value
        else:
            raise ValueError(f"unknown method {method!r}")
        out += w * val
    return out.real if out.imag == 0 else out


def d2_simple(g: Geodesic, omega: float, xi: TestFunction, tol: float = 1e-8) -> float:
    if not box_meets(g, xi.support):
        return 0.0
    return omega ** 2 * quad_weighted(xi, SecondOrderKernel(g, g), tol).value


def d2_lamination(mu: FiniteLamination, xi: TestFunction, tol: float = 1e-8) -> float:
    """Second derivative at t = 0 along the earthquake path E^{t mu}.

    Sum over ordered pairs (i, k); the symmetric off-diagonal pairs are
    evaluated once and counted twice.
    """
    validate(mu)
    leaves = [(g, w) for g, w in mu.leaves if box_meets(g, xi.support)]
    if not leaves:
        return 0.0
    npairs = len(leaves) * (len(leaves) + 1) // 2
    out = 0.0
    for i, (gi, wi) in enumerate(leaves):
        for k in range(i, len(leaves)):
            gk, wk = leaves[k]
            mult = 1.0 if i == k else 2.0
            coeff = mult * wi * wk
            val = quad_weighted(xi, SecondOrderKernel(gi, gk), tol / (npairs * coeff)).value
            out += coeff * val
    return out


# ---------------------------------------------------------------------------
# functionals and oracles


def liouville_functional(f, xi: TestFunction, tol: float = 1e-12, method: str = "quad"):
    """The pullback Liouville functional of the boundary map f evaluated at xi."""
    if method == "quad":
        return quad_weighted(xi, 1.0, tol, pullback=f).value
    if method == "dyadic":
        return functional_dyadic(f, xi, 1.0, tol=tol).value
    raise ValueError(f"unknown method {method!r}")


def earthquake_path(mu: FiniteLamination, xi: TestFunction, tol: float = 1e-12, method: str = "quad"):
    """tau -> functional of the earthquake or quake-bend E^{tau mu}."""
    validate(mu)

    def path(tau):
        return liouville_functional(elementary_earthquake(mu, tau), xi, tol, method)

    return path


@dataclass
class FiniteDifference:
    value: complex
    raw: complex
    error_estimate: float
    step: float
    order: int


def fd_derivative(path: Callable, t0: float = 0.0, step: float = 1e-4, order: int = 1) -> FiniteDifference:
    """Central finite differences.

    Order 1: (f(t+h) - f(t-h)) / 2h with one Richardson step (h and h/2).
    Order 2: five-point second difference; the three-point value is ``raw``.
    """
    def f(t):
        try:
            return complex(path(t))
        except Exception as exc:  # any failure of the path is a stencil failure
            raise errors.StencilFailure(f"path evaluation failed at t={t}: {exc}") from exc

    h = step
    if order == 1:
        d_h = (f(t0 + h) - f(t0 - h)) / (2 * h)
        d_h2 = (f(t0 + h / 2) - f(t0 - h / 2)) / h
        val = (4 * d_h2 - d_h) / 3
        return FiniteDifference(_real(val), _real(d_h), abs(val - d_h2), h, 1)
    if order == 2:
        f0 = f(t0)
        f1, fm1 = f(t0 + h), f(t0 - h)
        f2, fm2 = f(t0 + 2 * h), f(t0 - 2 * h)
        five = (-f2 + 16 * f1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h)
        three = (f1 - 2 * f0 + fm1) / (h * h)
        return FiniteDifference(_real(five), _real(three), abs(five - three), h, 2)
    raise ValueError("order must be 1 or 2")


def _real(z: complex):
    return z.real if z.imag == 0 else z


@dataclass
class CauchyResult:
    value: complex
    radius: float
    points: int
    order: int
    error_estimate: float
    attempts: int = 1


def cauchy_derivative(
    path: Callable,
    tau0: complex = 0j,
    radius: float = 0.05,
    points: int = 32,
    order: int = 1,
    shrink: int = 3,
) -> CauchyResult:
    """k-th derivative by the trapezoid rule on the circle |tau - tau0| = radius.

    If the path fails anywhere on the circle the radius is halved, up to
    ``shrink`` times.  The error estimate compares with the rule on every
    other point.
    """
    k = order
    attempts = 0
    r = radius
    while True:
        attempts += 1
        angles = 2 * np.pi * np.arange(points) / points
        try:
            vals = np.array([complex(path(tau0 + r * np.exp(1j * a))) for a in angles])
        except errors.NumericalFailure as exc:
            if attempts > shrink:
                raise errors.PathEvaluationFailure(
                    f"path failed on circles down to radius {r}: {exc}") from exc
            r /= 2
            continue
        except Exception as exc:
            raise errors.PathEvaluationFailure(f"path evaluation failed: {exc}") from exc
        break
    phase = np.exp(-1j * k * angles)
    val = math.factorial(k) / (points * r ** k) * np.sum(vals * phase)
    half = math.factorial(k) / ((points // 2) * r ** k) * np.sum((vals * phase)[::2])
    return CauchyResult(complex(val), r, points, k, float(abs(val - half)), attempts)


@dataclass
class DerivativeReport:
    closed_form: complex
    oracle: complex
    abs_err: float
    rel_err: float
    metadata: dict = field(default_factory=dict)

    @classmethod
    def compare(cls, closed_form, oracle, **metadata) -> "DerivativeReport":
        diff = abs(complex(closed_form) - complex(oracle))
        scale = max(abs(complex(oracle)), 1e-300)
        return cls(closed_form, oracle, diff, diff / scale, metadata)


# ---------------------------------------------------------------------------
# decay and truncation diagnostics


@dataclass
class DecayFit:
    distances: np.ndarray
    magnitudes: np.ndarray
    fitted_slope: float
    fitted_intercept: float


def receding_geodesic(xi: TestFunction, distance: float, side: str = "first") -> Geodesic:
    """Geodesic at the given distance from i starting at the first corner of a support arc.

    Its other endpoint lies inside the arc direction, at angular separation
    s with tan(pi/4 - s/4) = tanh(distance/2).
    """
    arc = xi.support.arc1 if side == "first" else xi.support.arc2
    s = 2.0 * (math.pi / 2 - 2.0 * math.atan(math.tanh(distance / 2)))
    return Geodesic(point_from_theta(float(wrap_angle(arc.start))), point_from_theta(float(wrap_angle(arc.start + s))))


def receding_family(xi: TestFunction, count: int = 10, d_min: float = 1.0, d_max: float = 8.0):
    return [receding_geodesic(xi, d) for d in np.linspace(d_min, d_max, count)]


def decay_profile(xi: TestFunction, geodesics: Sequence[Geodesic], tol: float = 1e-7) -> DecayFit:
    """Fit log |integral of xi cos(g, .)| against the distance from i to g.

    ``tol`` is a relative quadrature tolerance.  Distances must increase
    strictly along the sequence.
    """
    if len(geodesics) < 2:
        raise ValueError("need at least two geodesics")
    dist = np.array([point_geodesic_distance(I_POINT, g) for g in geodesics])
    if np.any(np.diff(dist) <= 0):
        raise ValueError("distances from the reference point must increase strictly")
    mags = np.array([abs(quad_weighted(xi, CrossingCosKernel(g), 1e-300, rtol=tol).value)
                     for g in geodesics])
    good = mags > 0
    if not np.any(good):
        raise errors.AllZero("every integral vanished")
    if good.sum() < 2:
        raise errors.AllZero("fewer than two nonzero integrals")
    slope, intercept = np.polyfit(dist[good], np.log(mags[good]), 1)
    return DecayFit(dist, mags, float(slope), float(intercept))


@dataclass
class KJRow:
    radius: float
    leaves: int
    value: complex


def kj_stabilization(
    mu: FiniteLamination,
    xi: TestFunction,
    radii: Sequence[float],
    tau=0.0,
    tol: float = 1e-9,
    method: str = "dyadic",
):
    """Quake-bend derivative of the truncations of mu to growing disks about i."""
    radii = list(radii)
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must increase")
    rows = []
    cache = {}
    for r in radii:
        sub = restrict_to_disk(mu, r)
        key = len(sub)  # truncations are nested, so the leaf count identifies them
        if key not in cache:
            cache[key] = d1_quakebend(sub, tau, xi, tol, method) if len(sub) else 0.0
        rows.append(KJRow(r, len(sub), cache[key]))
    return rows


__all__ = [
    "CrossingCosKernel",
    "SecondOrderKernel",
    "QuakeBendKernel",
    "box_meets",
    "d1_simple",
    "d1_lamination",
    "d1_quakebend",
    "d2_simple",
    "d2_lamination",
    "liouville_functional",
    "earthquake_path",
    "FiniteDifference",
    "fd_derivative",
    "CauchyResult",
    "cauchy_derivative",
    "DerivativeReport",
    "DecayFit",
    "receding_geodesic",
    "receding_family",
    "decay_profile",
    "KJRow",
    "kj_stabilization",
]

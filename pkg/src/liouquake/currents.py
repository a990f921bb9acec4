"""Liouville measure on boxes of geodesics and pullback functionals.

Everything numerical works in the angle coordinate theta = 2*atan(x), where
the point at infinity is an ordinary angle (pi) and the Liouville density
dx dy / (x - y)^2 becomes dtheta dphi / (4 sin^2((theta - phi)/2)).  A box
through infinity therefore needs no special treatment.

Two routes evaluate a functional of a boundary map f:

* :func:`quad_weighted`: adaptive tensor Gauss-Legendre quadrature of
  xi * kernel * (pullback density of f).  The pullback density of a Möbius
  piece pair (P, Q) is det P det Q / (4 D^2) with D = det(P w(theta), Q w(phi)),
  w(theta) = (sin(theta/2), cos(theta/2)).
* :func:`functional_dyadic`: Riemann-type sums of xi * weight against the
  log cross-ratios of dyadic sub-boxes, extrapolated in the level n.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import BranchGuard, DegenerateConfiguration, SlowConvergence, ToleranceNotMet
from .hyp_core import (
    BoundaryPoint,
    Geodesic,
    MobiusMap,
    PointH,
    angle_metric,
    as_point,
    complex_log1p,
    cross_ratio,
    log_cross_ratio,
    point_from_theta,
    wrap_angle,
)

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# boxes


@dataclass(frozen=True)
class Arc:
    """Positively oriented arc of the circle: angles start .. start + length."""

    start: float
    length: float

    @property
    def end(self) -> float:
        return self.start + self.length

    def offset(self, theta):
        """Position of theta measured from the start of the arc, in [0, 2 pi)."""
        return np.mod(np.asarray(theta, dtype=float) - self.start, TWO_PI)

    def contains(self, theta) -> np.ndarray:
        return self.offset(theta) <= self.length

    def interior_cuts(self, angles: Sequence[float]) -> list:
        """Offsets of the given angles that fall strictly inside the arc."""
        margin = 1e-13 * self.length
        cuts = {float(t) for t in self.offset(np.asarray(list(angles), dtype=float)).ravel()
                if margin < t < self.length - margin} if len(angles) else set()
        return sorted(cuts)

    def pieces(self, angles: Sequence[float]) -> list:
        """Sub-arcs obtained by cutting at the angles inside the arc."""
        cuts = [0.0] + self.interior_cuts(angles) + [self.length]
        return [Arc(self.start + lo, hi - lo) for lo, hi in zip(cuts[:-1], cuts[1:])]


def _arc_between(p: BoundaryPoint, q: BoundaryPoint) -> Arc:
    t0, t1 = p.theta, q.theta
    length = (t1 - t0) % TWO_PI
    return Arc(t0, length)


@dataclass(frozen=True, eq=False)
class Box:
    """Geodesics with first endpoint in [a, b] and second endpoint in [c, d].

    Each arc runs in the positive direction of the circle from its first to its
    second endpoint.  The two closed arcs must be disjoint.
    """

    first: tuple
    second: tuple

    def __post_init__(self):
        first = tuple(as_point(p) for p in self.first)
        second = tuple(as_point(p) for p in self.second)
        if len(first) != 2 or len(second) != 2:
            raise ValueError("each side of a box is a pair of endpoints")
        if not all(p.is_real for p in first + second):
            raise ValueError("box corners must be real")
        object.__setattr__(self, "first", first)
        object.__setattr__(self, "second", second)
        a, b, c, d = self.corners
        for p, q in ((a, b), (c, d)):
            if p == q:
                raise DegenerateConfiguration("box side is a single point")
        arc1, arc2 = _arc_between(a, b), _arc_between(c, d)
        gap = (c.theta - a.theta) % TWO_PI
        if not (arc1.length < gap and gap + arc2.length < TWO_PI) or a == c or a == d or b == c or b == d:
            raise DegenerateConfiguration("box arcs overlap")
        object.__setattr__(self, "arc1", arc1)
        object.__setattr__(self, "arc2", arc2)

    @classmethod
    def of(cls, a, b, c, d) -> "Box":
        return cls((a, b), (c, d))

    @property
    def corners(self):
        return self.first[0], self.first[1], self.second[0], self.second[1]

    def swapped(self) -> "Box":
        return Box(self.second, self.first)

    def image(self, gamma: MobiusMap) -> "Box":
        """Image under an orientation-preserving real Möbius map."""
        a, b, c, d = (gamma(p) for p in self.corners)
        return Box((a, b), (c, d))

    def contains(self, h: Geodesic) -> bool:
        return bool(self.arc1.contains(h.p_minus.theta) and self.arc2.contains(h.p_plus.theta))

    def __repr__(self):
        a, b, c, d = (p.value for p in self.corners)
        return f"Box([{a}, {b}] x [{c}, {d}])"


def liouville_box(b: Box) -> float:
    """Liouville mass of a box: the log of the cross-ratio of its corners."""
    return log_cross_ratio(*b.corners)


def _on_negative_axis(z: complex) -> bool:
    return z.real <= 0 and abs(z.imag) <= 1e-15 * max(abs(z), 1e-300)


def pullback_box(f, b: Box) -> complex:
    """Mass of b for the pullback of the Liouville measure by the boundary map f."""
    imgs = [f(p) for p in b.corners]
    cr = complex(cross_ratio(*imgs))
    if _on_negative_axis(cr):
        raise BranchGuard(f"cross-ratio {cr} lies on the branch cut of the logarithm")
    val = complex(log_cross_ratio(*imgs))
    return val.real if val.imag == 0 else val


# ---------------------------------------------------------------------------
# test functions


def _hat(offset, length, lam):
    t = np.asarray(offset, dtype=float)
    p = 1.0 - np.abs(2.0 * t / length - 1.0)
    p = np.where(t <= length, np.clip(p, 0.0, 1.0), 0.0)
    return p if lam == 1.0 else p ** lam


@dataclass(frozen=True, eq=False)
class TestFunction:
    """Product of two hat profiles, linear in the angle coordinate.

    kind "tent" is Lipschitz (exponent 1); kind "bump" raises each hat to the
    power ``holder_exponent``.  The declared seminorm refers to the product
    angle distance at the reference point i (sum of the two endpoint angles).
    """

    __test__ = False

    support: Box
    holder_exponent: float = 1.0
    scale: complex = 1.0
    kind: str = "tent"

    def __post_init__(self):
        lam = float(self.holder_exponent)
        if not 0.0 < lam <= 1.0:
            raise ValueError("Hölder exponent must lie in (0, 1]")
        object.__setattr__(self, "holder_exponent", lam)

    @property
    def holder_seminorm(self) -> float:
        lam = self.holder_exponent
        lip = max(2.0 / self.support.arc1.length, 2.0 / self.support.arc2.length)
        return abs(self.scale) * 2.0 ** (1.0 - lam) * lip ** lam

    @property
    def kinks(self):
        """Angles where the profile is not smooth, per arc."""
        a1, a2 = self.support.arc1, self.support.arc2
        return (
            (a1.start, a1.start + a1.length / 2, a1.end),
            (a2.start, a2.start + a2.length / 2, a2.end),
        )

    def values(self, theta, phi):
        lam = self.holder_exponent
        a1, a2 = self.support.arc1, self.support.arc2
        out = _hat(a1.offset(theta), a1.length, lam) * _hat(a2.offset(phi), a2.length, lam)
        return self.scale * out if self.scale != 1.0 else out

    def evaluate(self, h: Geodesic):
        return complex(self.values(h.p_minus.theta, h.p_plus.theta)) if isinstance(self.scale, complex) \
            else float(self.values(h.p_minus.theta, h.p_plus.theta))

    __call__ = evaluate

    def scaled(self, c) -> "TestFunction":
        return TestFunction(self.support, self.holder_exponent, self.scale * c, self.kind)


def tent_test_function(support: Box) -> TestFunction:
    return TestFunction(support, 1.0, 1.0, "tent")


def bump_test_function(support: Box, lam: float) -> TestFunction:
    return TestFunction(support, lam, 1.0, "bump")


def product_angle_distance(h1: Geodesic, h2: Geodesic, z0: PointH = PointH(0.0, 1.0)) -> float:
    return angle_metric(z0, h1.p_minus, h2.p_minus) + angle_metric(z0, h1.p_plus, h2.p_plus)


# ---------------------------------------------------------------------------
# kernels


class Kernel:
    """Weight on oriented geodesics, vectorized over endpoint angles.

    Subclasses implement ``values(theta, phi)`` and may list ``breakpoints``,
    angles where the weight fails to be smooth; integrators cut there.
    """

    breakpoints: tuple = ()

    def values(self, theta, phi):
        raise NotImplementedError

    def __call__(self, h: Geodesic):
        return complex(self.values(np.array(h.p_minus.theta), np.array(h.p_plus.theta)))


class ConstantKernel(Kernel):
    def __init__(self, c=1.0):
        self.c = c

    def values(self, theta, phi):
        return np.full(np.broadcast(theta, phi).shape, self.c)


class FunctionKernel(Kernel):
    """Wrap a plain callable on Geodesic objects (slow, scalar evaluation)."""

    def __init__(self, fn: Callable, breakpoints: Sequence[float] = ()):
        self.fn = fn
        self.breakpoints = tuple(breakpoints)

    def values(self, theta, phi):
        theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
        out = np.empty(theta.shape, dtype=complex)
        for idx in np.ndindex(theta.shape):
            out[idx] = self.fn(Geodesic(point_from_theta(theta[idx]), point_from_theta(phi[idx])))
        return out


def as_kernel(k) -> Kernel:
    if isinstance(k, Kernel):
        return k
    if np.isscalar(k):
        return ConstantKernel(k)
    if callable(k):
        return FunctionKernel(k)
    raise TypeError(f"cannot use {k!r} as a kernel")


# ---------------------------------------------------------------------------
# densities


def liouville_density(theta, phi):
    s = np.sin((np.asarray(theta) - np.asarray(phi)) / 2)
    return 0.25 / (s * s)


def pullback_density(f, theta, phi):
    """Density of the pullback Liouville measure in angle coordinates."""
    if f is None:
        return liouville_density(theta, phi)
    mats = f.piece_matrices()
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    p = mats[f.piece_indices_theta(wrap_angle(theta))]
    q = mats[f.piece_indices_theta(wrap_angle(phi))]
    su, cu = np.sin(theta / 2), np.cos(theta / 2)
    sv, cv = np.sin(phi / 2), np.cos(phi / 2)
    a0 = p[..., 0, 0] * su + p[..., 0, 1] * cu
    a1 = p[..., 1, 0] * su + p[..., 1, 1] * cu
    b0 = q[..., 0, 0] * sv + q[..., 0, 1] * cv
    b1 = q[..., 1, 0] * sv + q[..., 1, 1] * cv
    dp = p[..., 0, 0] * p[..., 1, 1] - p[..., 0, 1] * p[..., 1, 0]
    dq = q[..., 0, 0] * q[..., 1, 1] - q[..., 0, 1] * q[..., 1, 0]
    dd = a0 * b1 - a1 * b0
    return dp * dq / (4.0 * dd * dd)


# ---------------------------------------------------------------------------
# adaptive quadrature


@dataclass
class QuadResult:
    value: complex
    error_estimate: float
    evaluations: int
    cells: int = 0

    def __post_init__(self):
        v = complex(self.value)
        self.value = v.real if v.imag == 0 else v


_RULES = {}


def _gauss(n):
    if n not in _RULES:
        x, w = np.polynomial.legendre.leggauss(n)
        _RULES[n] = ((x + 1) / 2, w / 2)
    return _RULES[n]


def _split_angles(xi, kernel, f):
    k1, k2 = xi.kinks
    extra = list(getattr(kernel, "breakpoints", ()))
    if f is not None:
        extra += list(f.breakpoint_thetas)
    return list(k1) + extra, list(k2) + extra


class _Integrand:
    def __init__(self, xi, kernel, f):
        self.xi, self.kernel, self.f = xi, kernel, f

    def __call__(self, theta, phi):
        wt, wp = wrap_angle(theta), wrap_angle(phi)
        val = self.xi.values(wt, wp)
        if not isinstance(self.kernel, ConstantKernel) or self.kernel.c != 1.0:
            val = val * self.kernel.values(wt, wp)
        return val * pullback_density(self.f, theta, phi)


def _eval_cells(fn, cells, n_lo, n_hi):
    """Low- and high-order tensor Gauss rules on a batch of rectangles."""
    out = []
    for n in (n_lo, n_hi):
        x, w = _gauss(n)
        t0, t1, p0, p1 = (cells[:, i][:, None, None] for i in range(4))
        th = t0 + (t1 - t0) * x[None, :, None]
        ph = p0 + (p1 - p0) * x[None, None, :]
        vals = fn(th, ph)
        ww = w[:, None] * w[None, :]
        area = ((t1 - t0) * (p1 - p0))[:, 0, 0]
        out.append(np.sum(vals * ww[None], axis=(1, 2)) * area)
    lo, hi = out
    return hi, np.abs(hi - lo), cells.shape[0] * (n_lo * n_lo + n_hi * n_hi)


def quad_weighted(
    xi: TestFunction,
    kernel=1.0,
    tol: float = 1e-8,
    *,
    rtol: float = 0.0,
    pullback=None,
    max_cells: int = 200_000,
    orders=(7, 14),
) -> QuadResult:
    """Integrate xi(h) kernel(h) against the (pullback) Liouville measure.

    The support box is cut at the kinks of xi, the breakpoints of the kernel
    and the breakpoints of the pullback map, then refined adaptively until the
    summed error estimate falls below max(tol, rtol * |value|).  Raises
    ToleranceNotMet, carrying the best result, if the cell budget runs out.
    """
    kernel = as_kernel(kernel)
    if isinstance(kernel, ConstantKernel) and kernel.c == 0:
        return QuadResult(0.0, 0.0, 0, 0)
    fn = _Integrand(xi, kernel, pullback)
    s1, s2 = _split_angles(xi, kernel, pullback)
    box = xi.support
    cells = np.array(
        [(a.start, a.end, c.start, c.end) for a in box.arc1.pieces(s1) for c in box.arc2.pieces(s2)],
        dtype=float,
    )
    n_lo, n_hi = orders
    vals, errs, nev = _eval_cells(fn, cells, n_lo, n_hi)
    while True:
        value = complex(np.sum(vals))
        total = float(np.sum(errs))
        target = max(tol, rtol * abs(value))
        if total <= target:
            break
        if cells.shape[0] >= max_cells:
            raise ToleranceNotMet(
                f"quadrature stopped at {cells.shape[0]} cells with error {total:.3g} > {target:.3g}",
                QuadResult(value, total, nev, cells.shape[0]),
            )
        # refine the smallest set of worst cells carrying the excess error
        order = np.argsort(-errs, kind="stable")
        csum = np.cumsum(errs[order])
        k = int(np.searchsorted(csum, total - 0.5 * target)) + 1
        k = min(max(k, 1), order.size, max(1, (max_cells - cells.shape[0]) // 3))
        pick = order[:k]
        keep = np.ones(cells.shape[0], dtype=bool)
        keep[pick] = False
        t0, t1, p0, p1 = cells[pick].T
        tm, pm = (t0 + t1) / 2, (p0 + p1) / 2
        kids = np.concatenate([
            np.stack([t0, tm, p0, pm], axis=1),
            np.stack([tm, t1, p0, pm], axis=1),
            np.stack([t0, tm, pm, p1], axis=1),
            np.stack([tm, t1, pm, p1], axis=1),
        ])
        kv, ke, kn = _eval_cells(fn, kids, n_lo, n_hi)
        nev += kn
        cells = np.concatenate([cells[keep], kids])
        vals = np.concatenate([vals[keep], kv])
        errs = np.concatenate([errs[keep], ke])
    return QuadResult(math.fsum(vals.real) + 1j * math.fsum(vals.imag), total, nev, cells.shape[0])


# ---------------------------------------------------------------------------
# dyadic partitions and sums


def _cuts_from_map(m: MobiusMap, total: float, n: int, p: BoundaryPoint, q: BoundaryPoint):
    """Angles m(exp(k total / 2^n)), k = 0..2^n, unwrapped along the arc p -> q."""
    k = np.exp(total * np.arange(2 ** n + 1) / 2 ** n)
    u, v = m.a * k + m.b, m.c * k + m.d
    theta = 2.0 * np.arctan2(u * np.sign(v + (v == 0)), np.abs(v))
    off = np.mod(theta - p.theta, TWO_PI)
    off[0] = 0.0
    off[-1] = (q.theta - p.theta) % TWO_PI
    return p.theta + np.maximum.accumulate(off)


def _mass_cuts(a, b, c, d, n):
    """Equal-mass cut angles of both sides of the box [a, b] x [c, d].

    x -> cr(a, x, c, d) is the Möbius map sending d, a, c to 0, 1, inf and
    x -> cr(a, b, c, x) the one sending b, c, a to 0, 1, inf, so each cut is
    an inverse image of exp(prescribed mass).
    """
    total = log_cross_ratio(a, b, c, d)
    first = _cuts_from_map(MobiusMap.from_points(d, a, c).inverse(), total, n, a, b)
    second = _cuts_from_map(MobiusMap.from_points(b, c, a).inverse(), total, n, c, d)
    return first, second


def dyadic_partition(b: Box, n: int):
    """Cut points a_0..a_{2^n} and c_0..c_{2^n} of equal strip mass."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    a, bb, c, d = b.corners
    ta, tc = _mass_cuts(a, bb, c, d, n)
    first = [a] + [point_from_theta(t) for t in ta[1:-1]] + [bb]
    second = [c] + [point_from_theta(t) for t in tc[1:-1]] + [d]
    return first, second


def _partition_thetas(arc1: Arc, arc2: Arc, n: int):
    a, b = point_from_theta(arc1.start), point_from_theta(arc1.end)
    c, d = point_from_theta(arc2.start), point_from_theta(arc2.end)
    ta, tc = _mass_cuts(a, b, c, d, n)
    # re-anchor to the unwrapped arc coordinates
    ta = arc1.start + (ta - ta[0])
    tc = arc2.start + (tc - tc[0])
    ta[-1], tc[-1] = arc1.end, arc2.end
    return ta, tc


@dataclass
class DyadicResult:
    """Extrapolated limit of the dyadic sums with convergence diagnostics."""

    value: complex
    error_estimate: float
    levels: list = field(default_factory=list)
    sums: list = field(default_factory=list)
    increments: list = field(default_factory=list)
    rejected_levels: list = field(default_factory=list)
    tail_bound: float = math.inf

    def __complex__(self):
        return complex(self.value)


def _sub_box_sum(f, xi, weight, arc1: Arc, arc2: Arc, n: int, nudge: float = 1e-11):
    """One sub-box contribution to I_n and the worst |arg| of its cell cross-ratios."""
    ta, tc = _partition_thetas(arc1, arc2, n)
    mats = f.piece_matrices() if f is not None else None
    if f is None:
        p = q = np.eye(2)
    else:
        p = mats[f.piece_indices_theta(wrap_angle(np.array(arc1.start + arc1.length / 2)))]
        q = mats[f.piece_indices_theta(wrap_angle(np.array(arc2.start + arc2.length / 2)))]
    su, cu = np.sin(ta / 2), np.cos(ta / 2)
    sv, cv = np.sin(tc / 2), np.cos(tc / 2)
    au, av = p[0, 0] * su + p[0, 1] * cu, p[1, 0] * su + p[1, 1] * cu
    cu_, cv_ = q[0, 0] * sv + q[0, 1] * cv, q[1, 0] * sv + q[1, 1] * cv
    detp = p[0, 0] * p[1, 1] - p[0, 1] * p[1, 0]
    detq = q[0, 0] * q[1, 1] - q[0, 1] * q[1, 0]
    d_ab = detp * np.sin((ta[:-1] - ta[1:]) / 2)
    d_cd = detq * np.sin((tc[:-1] - tc[1:]) / 2)
    cross = au[:, None] * cv_[None, :] - av[:, None] * cu_[None, :]
    x = (d_ab[:, None] * d_cd[None, :]) / (cross[:-1, 1:] * cross[1:, :-1])
    if np.iscomplexobj(x):
        logs = complex_log1p(x)
        worst = float(np.max(np.abs(np.angle(1 + x))))
    else:
        if np.any(x <= -1):
            worst = math.pi
            logs = complex_log1p(x.astype(complex))
        else:
            logs = np.log1p(x)
            worst = 0.0
    # evaluate the weight from inside the sub-box, where it is smooth
    ea, ec = ta[1:].copy(), tc[1:].copy()
    ea[-1] -= nudge * arc1.length
    ec[-1] -= nudge * arc2.length
    wa, wc = wrap_angle(ea), wrap_angle(ec)
    g = xi.values(wa[:, None], wc[None, :])
    if weight is not None:
        g = g * weight.values(wa[:, None], wc[None, :])
    with np.errstate(invalid="ignore"):  # 0 * inf on levels the branch guard rejects
        return np.sum(g * logs), worst


def _dyadic_setup(f, xi, weight):
    kernel = None if (np.isscalar(weight) and weight == 1.0) else as_kernel(weight)
    s1, s2 = _split_angles(xi, kernel or ConstantKernel(), f)
    box = xi.support
    subs = [(a, c) for a in box.arc1.pieces(s1) for c in box.arc2.pieces(s2)]
    return kernel, subs


def dyadic_sum(f, xi: TestFunction, weight=1.0, n: int = 4):
    """The level-n sum I_n (no extrapolation), with the worst cell |arg cr|."""
    kernel, subs = _dyadic_setup(f, xi, weight)
    total, worst = 0j, 0.0
    for a, c in subs:
        s, w = _sub_box_sum(f, xi, kernel, a, c, n)
        total += s
        worst = max(worst, w)
    return (total.real if total.imag == 0 else total), worst


def _romberg(sums):
    """Richardson table for an expansion in powers of 2^-n."""
    table = [list(sums)]
    for j in range(1, len(sums)):
        prev = table[-1]
        f = 2.0 ** j
        table.append([(f * prev[i + 1] - prev[i]) / (f - 1) for i in range(len(prev) - 1)])
    return table


def functional_dyadic(
    f,
    xi: TestFunction,
    weight=1.0,
    n0: int = 3,
    tol: float = 1e-8,
    *,
    max_level: int = 11,
    max_order: int = 3,
) -> DyadicResult:
    """Limit of I_n = sum xi(a_s, c_t) weight(a_s, c_t) log cr(f(sub-box corners)).

    The support is cut at the kinks of xi and at the breakpoints of f and of
    the weight, so every sub-box carries a smooth integrand; each sub-box is
    then partitioned dyadically by equal strip mass.  The sums are
    extrapolated by a Richardson table in 2^-n.  Levels where some cell
    cross-ratio has argument beyond pi/2 are discarded (refinement continues);
    BranchGuard is raised if that persists to ``max_level``.
    """
    kernel, subs = _dyadic_setup(f, xi, weight)
    if isinstance(kernel, ConstantKernel) and kernel.c == 0:
        return DyadicResult(0.0, 0.0)
    res = DyadicResult(math.nan, math.inf)
    accepted = []
    stalled = 0
    for n in range(n0, max_level + 1):
        total = 0j
        worst = 0.0
        for a, c in subs:
            s, w = _sub_box_sum(f, xi, kernel, a, c, n)
            total += s
            worst = max(worst, w)
        res.levels.append(n)
        res.sums.append(total)
        if worst > math.pi / 2:
            res.rejected_levels.append(n)
            accepted = []
            continue
        accepted.append(total)
        if len(accepted) >= 2:
            inc = accepted[-1] - accepted[-2]
            if res.increments and abs(inc) >= abs(res.increments[-1]):
                stalled += 1
            else:
                stalled = 0
            res.increments.append(inc)
            if stalled >= 4:
                raise SlowConvergence(f"dyadic increments stopped decreasing at level {n}")
        if len(accepted) >= 3:
            table = _romberg(accepted[-(max_order + 1):])
            best = table[-1][-1]
            prev = table[-2][-1]
            err = abs(best - prev)
            incs = [abs(x) for x in res.increments[-3:]]
            geometric = len(incs) == 3 and all(incs[i] >= 1.5 * incs[i + 1] for i in range(2))
            ratio = incs[-1] / incs[-2] if incs[-2] > 0 else 0.0
            res.tail_bound = incs[-1] * ratio / (1 - ratio) if ratio < 1 else math.inf
            res.value, res.error_estimate = best, err
            if err < tol and (geometric or incs[-1] < tol):
                break
    else:
        if res.rejected_levels and res.rejected_levels[-1] == max_level:
            raise BranchGuard(
                f"cell cross-ratios leave the right half-plane up to level {max_level}")
        if not res.error_estimate < tol:
            raise SlowConvergence(
                f"dyadic sums not converged at level {max_level} (estimate {res.error_estimate:.3g})")
    v = complex(res.value)
    res.value = v.real if v.imag == 0 else v
    return res


__all__ = [
    "Arc",
    "Box",
    "TestFunction",
    "QuadResult",
    "DyadicResult",
    "Kernel",
    "ConstantKernel",
    "FunctionKernel",
    "as_kernel",
    "liouville_box",
    "pullback_box",
    "tent_test_function",
    "bump_test_function",
    "product_angle_distance",
    "liouville_density",
    "pullback_density",
    "quad_weighted",
    "dyadic_partition",
    "functional_dyadic",
    "dyadic_sum",
]

"""Boundary points, Möbius maps, cross-ratios and angle kernels.

Boundary points are projective pairs (u, v) standing for u/v, so the point at
infinity is the honest pair (1, 0).  All cross-ratios are ratios of 2x2
determinants.  A handful of vectorized helpers working in the angle coordinate
theta = 2*atan(x) (infinity at theta = pi) are exported for the numerical
modules.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DegenerateConfiguration, NotCrossing, SharedEndpoint

EQ_TOL = 1e-14
REAL_TOL = 1e-15

Number = Union[int, float, complex]


def _clean(z):
    """Return a float when z has no imaginary part."""
    if isinstance(z, complex):
        if z.imag == 0.0:
            return z.real
        return z
    return float(z)


@dataclass(frozen=True, eq=False)
class BoundaryPoint:
    u: Number
    v: Number

    def __post_init__(self):
        u, v = complex(self.u), complex(self.v)
        scale = max(abs(u), abs(v))
        if scale == 0.0 or not math.isfinite(scale):
            raise DegenerateConfiguration(f"invalid projective pair ({self.u}, {self.v})")
        u, v = u / scale, v / scale
        # fix the projective sign so real points have v >= 0
        if v.imag == 0.0 and u.imag == 0.0 and (v.real < 0 or (v.real == 0 and u.real < 0)):
            u, v = -u, -v
        object.__setattr__(self, "u", _clean(u))
        object.__setattr__(self, "v", _clean(v))

    @classmethod
    def of(cls, x) -> "BoundaryPoint":
        return as_point(x)

    @property
    def is_infinite(self) -> bool:
        return self.v == 0

    @property
    def is_real(self) -> bool:
        return isinstance(self.u, float) and isinstance(self.v, float)

    @property
    def value(self):
        """u/v as a Python number, ``math.inf`` for the point at infinity."""
        if self.v == 0:
            return math.inf
        return _clean(complex(self.u) / complex(self.v)) if not self.is_real else self.u / self.v

    @property
    def theta(self) -> float:
        """Angle coordinate 2*atan(x) in (-pi, pi]; real points only."""
        if not self.is_real:
            raise ValueError("angle coordinate is defined for real points only")
        t = 2.0 * math.atan2(self.u, self.v)
        return math.pi if t <= -math.pi else t

    def circle_key(self):
        """Exact sort key for the cyclic order of the real line, cut at infinity."""
        if not self.is_real:
            raise ValueError("circle order is defined for real points only")
        u, v = self.u, self.v
        if v == 0:
            return (3, 0.0)
        if abs(u) > v:
            return (0, -v / u) if u < 0 else (2, -v / u)
        return (1, u / v)

    def __eq__(self, other):
        if not isinstance(other, BoundaryPoint):
            try:
                other = as_point(other)
            except (TypeError, ValueError):
                return NotImplemented
        return same_point(self, other)

    __hash__ = None

    def __repr__(self):
        val = self.value
        return "BoundaryPoint(inf)" if val == math.inf else f"BoundaryPoint({val!r})"


INF = BoundaryPoint(1.0, 0.0)


def as_point(x) -> BoundaryPoint:
    """Coerce numbers, ``inf`` and the string ``'inf'`` to a BoundaryPoint."""
    if isinstance(x, BoundaryPoint):
        return x
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "+inf", "-inf", "infinity", "∞"):
            return INF
        x = complex(s.replace("i", "j")) if ("i" in s or "j" in s) else float(s)
    if isinstance(x, (np.floating, np.integer)):
        x = float(x)
    if isinstance(x, np.complexfloating):
        x = complex(x)
    if isinstance(x, (int, float)):
        if math.isinf(x):
            return INF
        if math.isnan(x):
            raise DegenerateConfiguration("NaN is not a boundary point")
        return BoundaryPoint(float(x), 1.0)
    if isinstance(x, complex):
        if cmath.isinf(x) or cmath.isnan(x):
            raise DegenerateConfiguration(f"{x} is not a boundary point")
        return BoundaryPoint(x, 1.0)
    raise TypeError(f"cannot interpret {x!r} as a boundary point")


def det(p: BoundaryPoint, q: BoundaryPoint):
    return p.u * q.v - p.v * q.u


def same_point(p: BoundaryPoint, q: BoundaryPoint, tol: float = EQ_TOL) -> bool:
    """Cross-multiplication test u1 v2 = u2 v1 with a relative tolerance."""
    a, b = p.u * q.v, p.v * q.u
    return abs(a - b) <= tol * max(abs(a), abs(b))


def point_from_theta(theta: float) -> BoundaryPoint:
    return BoundaryPoint(math.sin(theta / 2), math.cos(theta / 2))


@dataclass(frozen=True, eq=False)
class Geodesic:
    """Oriented geodesic from ``p_minus`` to ``p_plus``."""

    p_minus: BoundaryPoint
    p_plus: BoundaryPoint

    def __post_init__(self):
        object.__setattr__(self, "p_minus", as_point(self.p_minus))
        object.__setattr__(self, "p_plus", as_point(self.p_plus))
        if self.p_minus == self.p_plus:
            raise DegenerateConfiguration("geodesic endpoints coincide")

    @classmethod
    def of(cls, a, b) -> "Geodesic":
        return cls(as_point(a), as_point(b))

    def reverse(self) -> "Geodesic":
        return Geodesic(self.p_plus, self.p_minus)

    @property
    def is_real(self) -> bool:
        return self.p_minus.is_real and self.p_plus.is_real

    def __eq__(self, other):
        if not isinstance(other, Geodesic):
            return NotImplemented
        return self.p_minus == other.p_minus and self.p_plus == other.p_plus

    __hash__ = None

    def __repr__(self):
        return f"Geodesic({self.p_minus.value!r}, {self.p_plus.value!r})"


@dataclass(frozen=True)
class PointH:
    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError(f"point {self.x}+{self.y}i is not in the upper half-plane")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def from_complex(cls, z: complex) -> "PointH":
        return cls(z.real, z.imag)


I_POINT = PointH(0.0, 1.0)


@dataclass(frozen=True, eq=False)
class MobiusMap:
    """Matrix (a b; c d) modulo scale.

    The constructor rescales to unit determinant.  A real matrix with negative
    determinant is kept real and scaled to determinant -1 (it reverses the
    orientation of the real line).
    """

    a: Number
    b: Number
    c: Number
    d: Number

    def __post_init__(self):
        a, b, c, d = (complex(x) for x in (self.a, self.b, self.c, self.d))
        dt = a * d - b * c
        if abs(dt) == 0.0 or not cmath.isfinite(dt):
            raise DegenerateConfiguration("singular Möbius matrix")
        real = all(x.imag == 0.0 for x in (a, b, c, d))
        if real:
            s = math.sqrt(abs(dt.real))
        else:
            s = cmath.sqrt(dt)
        for name, x in zip("abcd", (a, b, c, d)):
            object.__setattr__(self, name, _clean(x / s) if not real else (x / s).real)

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_matrix(cls, m) -> "MobiusMap":
        m = np.asarray(m)
        return cls(*(complex(x) for x in m.ravel()))

    @classmethod
    def from_points(cls, p, q, r) -> "MobiusMap":
        """The map sending p, q, r to 0, 1, infinity."""
        p, q, r = as_point(p), as_point(q), as_point(r)
        dqr, dqp = det(q, r), det(q, p)
        if same_point(p, r) or same_point(q, r) or same_point(q, p):
            raise DegenerateConfiguration("from_points needs three distinct points")
        # x -> det(x,p) det(q,r) / (det(x,r) det(q,p))
        k = dqr / dqp
        return cls(k * p.v, -k * p.u, r.v, -r.u)

    @property
    def flavor(self) -> str:
        return "real" if all(isinstance(x, float) for x in (self.a, self.b, self.c, self.d)) else "complex"

    @property
    def determinant(self):
        return self.a * self.d - self.b * self.c

    @property
    def matrix(self) -> np.ndarray:
        dtype = float if self.flavor == "real" else complex
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=dtype)

    def __matmul__(self, other: "MobiusMap") -> "MobiusMap":
        return MobiusMap.from_matrix(self.matrix @ other.matrix)

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def __call__(self, p) -> BoundaryPoint:
        return mobius_apply(self, as_point(p))

    def act(self, z: complex) -> complex:
        """Action on an interior point of the upper half-plane."""
        return (self.a * z + self.b) / (self.c * z + self.d)

    def close_to(self, other: "MobiusMap", tol: float = 1e-12) -> bool:
        """Projective equality: the matrices agree up to a scalar factor."""
        m1, m2 = self.matrix.ravel(), other.matrix.ravel()
        k = np.argmax(np.abs(m1))
        if abs(m2[k]) == 0:
            return False
        return bool(np.max(np.abs(m1 / m1[k] - m2 / m2[k])) <= tol)

    def __repr__(self):
        return f"MobiusMap({self.a!r}, {self.b!r}, {self.c!r}, {self.d!r})"


def mobius_apply(m: MobiusMap, p: BoundaryPoint) -> BoundaryPoint:
    return BoundaryPoint(m.a * p.u + m.b * p.v, m.c * p.u + m.d * p.v)


def cross_ratio(a, b, c, d):
    """((a-c)(b-d)) / ((a-d)(b-c)), evaluated projectively."""
    pts = [as_point(x) for x in (a, b, c, d)]
    for i in range(4):
        for j in range(i + 1, 4):
            if same_point(pts[i], pts[j]):
                raise DegenerateConfiguration("cross-ratio of coincident points")
    a, b, c, d = pts
    return _clean(complex(det(a, c) * det(b, d)) / complex(det(a, d) * det(b, c)))


def _diff(p: BoundaryPoint, q: BoundaryPoint):
    """det(p, q) divided by v_p v_q, with the convention that a factor v = 0 is dropped."""
    if p.is_infinite:
        return 1.0
    if q.is_infinite:
        return -1.0
    return p.value - q.value


def log_cross_ratio(a, b, c, d):
    """Principal logarithm of the cross-ratio, accurate when it is close to 1."""
    a, b, c, d = (as_point(x) for x in (a, b, c, d))
    cross_ratio(a, b, c, d)  # degeneracy check
    # each point occurs once above and once below, so the scalings of the
    # projective representatives cancel and plain differences suffice
    x = complex(_diff(a, b) * _diff(c, d)) / complex(_diff(a, d) * _diff(b, c))
    return _clean(complex_log1p(x))


def complex_log1p(x):
    """log(1 + x) on the principal branch, accurate for small x (scalar or array)."""
    if np.isscalar(x) and not isinstance(x, complex):
        return math.log1p(x) if x > -1 else cmath.log(1 + x)
    x = np.asarray(x, dtype=complex)
    re, im = x.real, x.imag
    with np.errstate(invalid="ignore", divide="ignore"):
        modulus = np.where((im == 0) & (re > -1), np.log1p(np.where(re > -1, re, 0.0)),
                           0.5 * np.log1p(2 * re + re * re + im * im))
    out = modulus + 1j * np.arctan2(im, 1 + re)
    return out if out.ndim else complex(out)


def mobius_to_standard(g: Geodesic) -> MobiusMap:
    """A map sending g.p_minus to 0 and g.p_plus to infinity.

    For real g the map preserves the upper half-plane, so the left side of g
    goes to the negative reals.
    """
    p, q = g.p_minus, g.p_plus
    a, b, c, d = p.v, -p.u, q.v, -q.u
    if g.is_real and det(p, q) < 0:
        a, b = -a, -b
    return MobiusMap(a, b, c, d)


def translation_along(g: Geodesic, length: Number) -> MobiusMap:
    """Translation by (possibly complex) ``length`` along the oriented axis g."""
    length = complex(length)
    if length == 0:
        return MobiusMap.identity()
    m = mobius_to_standard(g)
    e = cmath.exp(length / 2)
    diag = MobiusMap(_clean(e), 0.0, 0.0, _clean(1 / e))
    return m.inverse() @ diag @ m


def _standard_coords(g: Geodesic, h: Geodesic):
    """Endpoints of h after mapping g to (0, inf), as projective pairs."""
    if not (g.is_real and h.is_real):
        raise ValueError("real geodesics required")
    m = mobius_to_standard(g)
    return m(h.p_minus), m(h.p_plus)


def geodesics_cross(g: Geodesic, h: Geodesic) -> bool:
    x, y = _standard_coords(g, h)
    for p in (x, y):
        if abs(p.u) <= EQ_TOL or abs(p.v) <= EQ_TOL:
            raise SharedEndpoint("geodesics share an endpoint")
    return (x.u * x.v) * (y.u * y.v) < 0


def _crossing_xy(g: Geodesic, h: Geodesic):
    if not geodesics_cross(g, h):
        return None
    x, y = _standard_coords(g, h)
    return x.u / x.v, y.u / y.v


def cos_angle(g: Geodesic, h: Geodesic) -> float:
    """Cosine of the angle from g to h; zero when they do not cross."""
    xy = _crossing_xy(g, h)
    if xy is None:
        return 0.0
    x, y = xy
    return (-x - y) / (x - y)


def sin_angle(g: Geodesic, h: Geodesic) -> float:
    """Sine of the angle from g to h.

    Positive when h starts on the right of g and ends on its left.
    """
    xy = _crossing_xy(g, h)
    if xy is None:
        return 0.0
    x, y = xy
    s = 2.0 * math.sqrt(-x * y) / abs(x - y)
    return s if x > 0 else -s


def cosh_complex_distance(g: Geodesic, h: Geodesic):
    """cosh of the complex distance between g and h as lines in hyperbolic 3-space."""
    return _clean(1 - 2 / complex(cross_ratio(h.p_plus, g.p_minus, h.p_minus, g.p_plus)))


def point_distance(z: PointH, w: PointH) -> float:
    r = abs(z.z - w.z) / (2.0 * math.sqrt(z.y * w.y))
    return 2.0 * math.asinh(r)


def point_geodesic_distance(z: PointH, g: Geodesic) -> float:
    m = mobius_to_standard(g)
    w = m.act(z.z)
    return math.asinh(abs(w.real) / w.imag)


def geodesic_intersection(g: Geodesic, h: Geodesic) -> PointH:
    xy = _crossing_xy(g, h)
    if xy is None:
        raise NotCrossing("geodesics do not cross")
    x, y = xy
    w = 1j * math.sqrt(-x * y)
    return PointH.from_complex(mobius_to_standard(g).inverse().act(w))


def side_of(g: Geodesic, p) -> str:
    """'left', 'right' or 'on' for a real boundary point relative to real g."""
    q = mobius_to_standard(g)(as_point(p))
    if abs(q.u) <= EQ_TOL or abs(q.v) <= EQ_TOL:
        return "on"
    return "left" if q.u * q.v < 0 else "right"


def angle_metric(z0: PointH, p, q) -> float:
    """Angle at z0 between the geodesic rays toward p and q, in [0, pi]."""
    p, q = as_point(p), as_point(q)
    to_i = MobiusMap(1.0, -z0.x, 0.0, z0.y)
    t1, t2 = to_i(p).theta, to_i(q).theta
    diff = abs(t1 - t2) % (2 * math.pi)
    return min(diff, 2 * math.pi - diff)


# ---------------------------------------------------------------------------
# vectorized helpers in the angle coordinate


def theta_uv(theta):
    """Projective pair (sin(theta/2), cos(theta/2)) for an array of angles."""
    theta = np.asarray(theta, dtype=float)
    return np.sin(theta / 2), np.cos(theta / 2)


def uv_theta(u, v):
    """Angle coordinate of real projective pairs, values in (-pi, pi]."""
    t = 2.0 * np.arctan2(u * np.sign(v + (v == 0)), np.abs(v))
    return np.where(t <= -np.pi, np.pi, t)


def wrap_angle(t):
    """Reduce angles to (-pi, pi]."""
    r = np.mod(np.asarray(t, dtype=float) + np.pi, 2 * np.pi) - np.pi
    return np.where(r <= -np.pi, r + 2 * np.pi, r)

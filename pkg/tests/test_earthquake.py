import cmath
import math

import numpy as np
import pytest

from liouquake.errors import CrossingLeaves
from liouquake.hyp_core import INF, Geodesic, MobiusMap, as_point, det, translation_along
from liouquake.earthquake import (
    PiecewiseMobiusMap,
    elementary_earthquake,
    evaluate,
    iterated_earthquake,
    normalize_012inf,
    projective_distance,
    simple_earthquake,
)
from liouquake.lamination import FiniteLamination

AXIS = Geodesic.of(0, "inf")


def close(p, q, tol=1e-13):
    return projective_distance(as_point(p), as_point(q)) <= tol


class TestSimpleEarthquake:
    def test_dilation_on_the_right(self):
        e = simple_earthquake(AXIS, math.log(2))
        assert evaluate(e, 3).value == pytest.approx(6.0, rel=1e-15)
        assert evaluate(e, -1).value == -1.0
        assert evaluate(e, 0).value == 0.0
        assert e.flavor == "real"

    def test_zero_length(self):
        e = simple_earthquake(Geodesic.of(1, 3), 0.0)
        assert all(p.close_to(MobiusMap.identity(), 0.0) for p in e.pieces)

    def test_complex_length_leaves_the_real_line(self):
        e = simple_earthquake(AXIS, 1j * math.pi / 4)
        assert e.flavor == "complex"
        assert evaluate(e, 1).value == pytest.approx(cmath.exp(1j * math.pi / 4), abs=1e-15)

    def test_matches_elementary(self):
        e1 = simple_earthquake(AXIS, 0.4)
        e2 = elementary_earthquake(FiniteLamination.of((0, "inf", 1.0)), 0.4)
        for x in (-3.0, -0.1, 0.2, 5.0, 1e6):
            assert close(e1(x), e2(x))


class TestElementaryEarthquake:
    def test_unnested_pair(self):
        mu = FiniteLamination.of((1, 2, 0.5), (3, 4, 0.25))
        tau = 0.8
        e = elementary_earthquake(mu, tau)
        t12 = translation_along(mu.geodesics[0], tau * 0.5)
        t34 = translation_along(mu.geodesics[1], tau * 0.25)
        assert close(e(1.5), t12(1.5))
        assert close(e(3.5), t34(3.5))
        assert e(10).value == 10.0 and e(-7).value == -7.0
        for order in ([0, 1], [1, 0]):
            it = iterated_earthquake(mu, tau, order)
            for x in (1.5, 3.5, 10.0, -7.0):
                assert close(it(x), e(x))

    def test_nested_pair(self):
        a, b, tau = 0.7, 0.4, 0.3 + 0.1j
        mu = FiniteLamination.of((0, "inf", a), (1, 2, b))
        e = elementary_earthquake(mu, tau)
        g0, g1 = mu.geodesics
        expected = translation_along(g0, a * tau) @ translation_along(g1, b * tau)
        assert e.piece_at(1.5).close_to(expected, 1e-13)
        for order in ([0, 1], [1, 0]):
            it = iterated_earthquake(mu, tau, order)
            assert it.piece_at(1.5).close_to(expected, 1e-13)

    def test_base_piece_is_identity(self):
        mu = FiniteLamination.of((0, "inf", 1), (1, 10, 0.5), (-5, -1, 0.2))
        e = elementary_earthquake(mu, 0.6 + 0.2j)
        # i sits between -1 and 0 on the left of (0, inf) and outside the other two leaves
        assert e.piece_at(-0.5).close_to(MobiusMap.identity(), 0.0)

    def test_invalid_lamination(self):
        with pytest.raises(CrossingLeaves):
            elementary_earthquake(FiniteLamination.of((0, "inf", 1), (-1, 1, 1)), 0.1)

    def test_empty(self):
        e = elementary_earthquake(FiniteLamination(), 0.5)
        assert e(3).value == 3.0

    def test_continuity(self):
        mu = FiniteLamination.of((0, "inf", 1), (1, 10, 0.5), (2, 3, 0.8), (-5, -1, 0.6))
        for tau in (0.9, 0.2 + 0.7j):
            e = elementary_earthquake(mu, tau)
            assert e.continuity_defect() <= 1e-12
            for g in mu.geodesics:
                for p in (g.p_minus, g.p_plus):
                    if p.is_infinite:
                        continue
                    x = p.value
                    assert projective_distance(e(x - 1e-9), e(x + 1e-9)) <= 1e-7

    def test_real_monotone(self):
        mu = FiniteLamination.of((0, "inf", 1), (1, 10, 0.5), (2, 3, 0.8), (-5, -1, 0.6))
        e = elementary_earthquake(mu, 0.5)
        thetas = np.linspace(-math.pi + 1e-3, math.pi - 1e-3, 2001)
        u, v = e.apply_theta(thetas)
        images = np.unwrap(2 * np.arctan2(u, v))
        assert np.all(np.diff(images) > 0)


class TestPiecewiseMap:
    def test_breakpoints_must_be_sorted(self):
        with pytest.raises(ValueError):
            PiecewiseMobiusMap((as_point(2), as_point(1)), (MobiusMap.identity(),) * 2)

    def test_piece_count(self):
        with pytest.raises(ValueError):
            PiecewiseMobiusMap((as_point(1), as_point(2)), (MobiusMap.identity(),))

    def test_apply_theta_matches_evaluate(self):
        mu = FiniteLamination.of((0, "inf", 1), (1, 10, 0.5), (-5, -1, 0.6))
        e = elementary_earthquake(mu, 0.4 + 0.3j)
        xs = np.array([-7.0, -2.0, -0.5, 0.5, 2.0, 20.0])
        u, v = e.apply_theta(2 * np.arctan(xs))
        for x, uu, vv in zip(xs, u, v):
            img = e(x)
            assert abs(uu * img.v - vv * img.u) <= 1e-13 * max(abs(uu), abs(vv))

    def test_breakpoint_belongs_to_the_arc_ending_there(self):
        e = simple_earthquake(Geodesic.of(1, 3), 0.5)
        # both adjacent pieces agree at a breakpoint; evaluation uses the arc ending there
        assert e.piece_index(1.0) == e.piece_index(0.5)

    def test_conjugate(self):
        e = simple_earthquake(AXIS, 0.5)
        gamma = MobiusMap(1, 1, 0, 1)
        c = e.conjugate(gamma)
        for x in (-3.0, 0.5, 4.0):
            assert close(c(x), gamma(e(gamma.inverse()(x))))

    def test_pre_compose_needs_orientation_preserving(self):
        with pytest.raises(ValueError):
            simple_earthquake(AXIS, 0.5).pre_compose(MobiusMap(0, 1, 1, 0))


class TestNormalize:
    def test_already_normalized(self):
        n = normalize_012inf(PiecewiseMobiusMap.identity())
        assert n.pieces[0].close_to(MobiusMap.identity())

    def test_three_fixed_points(self):
        ell = 0.8
        n = normalize_012inf(simple_earthquake(AXIS, ell))
        assert close(n(0), 0) and close(n(1), 1) and close(n(INF), INF)
        # on the right of the axis the normalized map is the identity, on the left x -> x e^-ell
        assert n(-2).value == pytest.approx(-2 * math.exp(-ell), rel=1e-14)
        assert n(5).value == pytest.approx(5.0, rel=1e-14)

    def test_complex(self):
        mu = FiniteLamination.of((1, 2, 1.0), (-3, -1, 0.5))
        n = normalize_012inf(elementary_earthquake(mu, 0.2 + 0.3j))
        assert abs(det(n(0), as_point(0))) <= 1e-14
        assert abs(det(n(1), as_point(1))) <= 1e-14
        assert abs(det(n(INF), INF)) <= 1e-14

"""Poincare geometry: distances, Cayley bridge, automorphism group."""

import cmath
import math

import pytest
from hypothesis import given

from disklab.geometry import (
    AutFitError,
    DomainError,
    MobiusAut,
    Model,
    Point,
    aut_apply,
    aut_compose,
    aut_inverse,
    aut_sending_center_to,
    cayley,
    cayley_inverse,
    disk_aut_through_three_points,
    poincare_disk,
    poincare_halfplane,
)
from conftest import disk_points, halfplane_points, sample_disk


class TestPoints:
    def test_disk_rejects_boundary(self):
        with pytest.raises(DomainError):
            Point.disk(1.0)
        with pytest.raises(DomainError):
            Point.disk(0.6 + 0.8j)

    def test_halfplane_rejects_real_axis(self):
        with pytest.raises(DomainError):
            Point.halfplane(2.0)
        with pytest.raises(DomainError):
            Point.halfplane(1 - 1j)

    def test_nonfinite_rejected(self):
        with pytest.raises(DomainError):
            Point.disk(complex("nan"))


class TestDistances:
    def test_coincident(self):
        assert poincare_disk(Point.disk(0.3 + 0.1j), Point.disk(0.3 + 0.1j)) == 0.0
        assert poincare_halfplane(Point.halfplane(1j), Point.halfplane(1j)) == 0.0

    def test_half_log3(self):
        # arctanh(1/2) = ln(3)/2
        assert poincare_disk(Point.disk(0), Point.disk(0.5)) == pytest.approx(
            0.5 * math.log(3.0), abs=1e-15
        )

    def test_halfplane_half_log2(self):
        # |(2i-i)/(2i+i)| = 1/3, arctanh(1/3) = ln(2)/2
        assert poincare_halfplane(Point.halfplane(1j), Point.halfplane(2j)) == pytest.approx(
            0.5 * math.log(2.0), abs=1e-15
        )

    def test_origin_formula(self, rng):
        for _ in range(100):
            z = sample_disk(rng, 0.99)
            got = poincare_disk(Point.disk(0), Point.disk(z))
            assert got == pytest.approx(math.atanh(abs(z)), abs=1e-13)

    @given(disk_points(), disk_points())
    def test_symmetry_exact(self, z1, z2):
        a, b = Point.disk(z1), Point.disk(z2)
        assert poincare_disk(a, b) == poincare_disk(b, a)

    @given(halfplane_points(), halfplane_points())
    def test_halfplane_symmetry_exact(self, w1, w2):
        a, b = Point.halfplane(w1), Point.halfplane(w2)
        assert poincare_halfplane(a, b) == poincare_halfplane(b, a)

    @given(disk_points(), disk_points(), disk_points())
    def test_triangle_inequality(self, z1, z2, z3):
        a, b, c = Point.disk(z1), Point.disk(z2), Point.disk(z3)
        assert poincare_disk(a, c) <= poincare_disk(a, b) + poincare_disk(b, c) + 1e-12

    def test_indiscernibles(self, rng):
        for _ in range(200):
            z1, z2 = sample_disk(rng), sample_disk(rng)
            d = poincare_disk(Point.disk(z1), Point.disk(z2))
            if z1 == z2:
                assert d <= 1e-14
            else:
                assert d > 0.0

    def test_model_mismatch(self):
        with pytest.raises(DomainError):
            poincare_disk(Point.disk(0), Point.halfplane(1j))


class TestCayley:
    def test_center(self):
        assert cayley(Point.disk(0)).coordinate == 1j
        assert cayley_inverse(Point.halfplane(1j)).coordinate == 0

    def test_half(self):
        # i * 1.5 / 0.5 = 3i
        assert cayley(Point.disk(0.5)).coordinate == pytest.approx(3j, abs=1e-15)

    def test_one_plus_i(self):
        # (1+i-i)/(1+i+i) = 1/(1+2i) = 0.2 - 0.4i
        got = cayley_inverse(Point.halfplane(1 + 1j)).coordinate
        assert got == pytest.approx(0.2 - 0.4j, abs=1e-15)

    def test_roundtrip(self, rng):
        for _ in range(100):
            z = sample_disk(rng, 0.95)
            back = cayley_inverse(cayley(Point.disk(z))).coordinate
            assert abs(back - z) <= 1e-14

    def test_codomain(self, rng):
        for _ in range(1000):
            w = complex(rng.uniform(-10, 10), rng.uniform(0.01, 10))
            assert abs(cayley_inverse(Point.halfplane(w)).coordinate) < 1.0

    def test_isometry(self, rng):
        for _ in range(300):
            z1, z2 = sample_disk(rng, 0.95), sample_disk(rng, 0.95)
            a, b = Point.disk(z1), Point.disk(z2)
            assert abs(
                poincare_halfplane(cayley(a), cayley(b)) - poincare_disk(a, b)
            ) <= 1e-12


def random_aut(rng) -> MobiusAut:
    return MobiusAut.disk(rng.uniform(-math.pi, math.pi), sample_disk(rng))


class TestMobius:
    def test_identity(self):
        g = MobiusAut.identity(Model.DISK)
        p = Point.disk(0.3 - 0.2j)
        assert aut_apply(g, p).coordinate == p.coordinate

    def test_center_image(self):
        g = MobiusAut.disk(0.0, 0.3)
        assert aut_apply(g, Point.disk(0)).coordinate == pytest.approx(0.3, abs=1e-15)

    def test_halfplane_scale(self):
        s = math.sqrt(2.0)
        g = MobiusAut.halfplane(s, 0.0, 0.0, 1.0 / s)
        assert aut_apply(g, Point.halfplane(1j)).coordinate == pytest.approx(2j, abs=1e-14)

    def test_halfplane_rejects_orientation_flip(self):
        with pytest.raises(DomainError):
            MobiusAut.halfplane(1.0, 0.0, 0.0, -1.0)

    def test_inverse_identity(self):
        g = MobiusAut.identity(Model.DISK)
        gi = aut_inverse(g)
        assert gi.theta == 0.0 and gi.a == 0

    def test_inverse_pointwise(self, rng):
        for _ in range(100):
            g = random_aut(rng)
            p = Point.disk(sample_disk(rng))
            back = aut_apply(aut_inverse(g), aut_apply(g, p)).coordinate
            assert abs(back - p.coordinate) <= 1e-13

    def test_halfplane_inverse_matrix(self):
        g = MobiusAut.halfplane(2.0, 3.0, 0.0, 0.5)
        gi = aut_inverse(g)
        p = Point.halfplane(0.7 + 1.3j)
        back = aut_apply(gi, aut_apply(g, p)).coordinate
        assert abs(back - p.coordinate) <= 1e-13

    def test_rotation_composition(self):
        r1 = MobiusAut.disk(0.7, 0j)
        r2 = MobiusAut.disk(1.1, 0j)
        both = aut_compose(r1, r2)
        z = Point.disk(0.4 + 0.2j)
        expect = cmath.exp(1.8j) * z.coordinate
        assert abs(aut_apply(both, z).coordinate - expect) <= 1e-14

    def test_compose_with_inverse_is_identity(self, rng):
        for _ in range(100):
            g = random_aut(rng)
            gg = aut_compose(g, aut_inverse(g))
            p = Point.disk(sample_disk(rng))
            assert abs(aut_apply(gg, p).coordinate - p.coordinate) <= 1e-13

    def test_associativity_pointwise(self, rng):
        for _ in range(100):
            g, h, k = random_aut(rng), random_aut(rng), random_aut(rng)
            p = Point.disk(sample_disk(rng))
            lhs = aut_apply(aut_compose(aut_compose(g, h), k), p).coordinate
            rhs = aut_apply(aut_compose(g, aut_compose(h, k)), p).coordinate
            assert abs(lhs - rhs) <= 1e-12

    def test_isometry(self, rng):
        for _ in range(300):
            g = random_aut(rng)
            z1, z2 = Point.disk(sample_disk(rng)), Point.disk(sample_disk(rng))
            d_before = poincare_disk(z1, z2)
            d_after = poincare_disk(aut_apply(g, z1), aut_apply(g, z2))
            assert abs(d_after - d_before) <= 1e-12

    def test_stays_in_model(self, rng):
        for _ in range(200):
            g = random_aut(rng)
            p = Point.disk(sample_disk(rng, 0.99))
            assert abs(aut_apply(g, p).coordinate) < 1.0

    def test_sending_center_disk(self):
        g = aut_sending_center_to(Point.disk(0.5))
        assert aut_apply(g, Point.disk(0)).coordinate == pytest.approx(0.5, abs=1e-15)
        ident = aut_sending_center_to(Point.disk(0))
        assert aut_apply(ident, Point.disk(0.2j)).coordinate == pytest.approx(0.2j, abs=1e-15)

    def test_sending_center_halfplane(self):
        g = aut_sending_center_to(Point.halfplane(3 + 2j))
        assert aut_apply(g, Point.halfplane(1j)).coordinate == pytest.approx(3 + 2j, abs=1e-13)


class TestThreePointFit:
    def test_identity_fit(self):
        pts = tuple(Point.disk(c) for c in (0, 0.5, -0.5j))
        g = disk_aut_through_three_points(pts, pts)
        for p in pts:
            assert abs(aut_apply(g, p).coordinate - p.coordinate) <= 1e-12

    def test_rotation_recovery(self):
        rot = MobiusAut.disk(math.pi / 3.0, 0j)
        src = tuple(Point.disk(c) for c in (0, 0.5, -0.5))
        dst = tuple(aut_apply(rot, p) for p in src)
        g = disk_aut_through_three_points(src, dst)
        for z in (0.1 + 0.2j, -0.3j, 0.7):
            p = Point.disk(z)
            assert abs(
                aut_apply(g, p).coordinate - aut_apply(rot, p).coordinate
            ) <= 1e-12

    def test_generic_recovery(self, rng):
        for _ in range(50):
            g0 = random_aut(rng)
            src = tuple(Point.disk(sample_disk(rng, 0.7)) for _ in range(3))
            if len({p.coordinate for p in src}) < 3:
                continue
            dst = tuple(aut_apply(g0, p) for p in src)
            g = disk_aut_through_three_points(src, dst)
            probe = Point.disk(sample_disk(rng, 0.7))
            assert abs(
                aut_apply(g, probe).coordinate - aut_apply(g0, probe).coordinate
            ) <= 1e-10

    def test_squaring_images_rejected(self):
        # z -> z^2 contracts hyperbolic distances, so no automorphism fits
        src = tuple(Point.disk(c) for c in (0.2, 0.5, -0.4))
        dst = tuple(Point.disk(c * c) for c in (0.2, 0.5, -0.4))
        with pytest.raises(AutFitError) as err:
            disk_aut_through_three_points(src, dst)
        assert err.value.residual > 0

    def test_degenerate_rejected(self):
        src = tuple(Point.disk(c) for c in (0.2, 0.2, -0.4))
        dst = tuple(Point.disk(c) for c in (0.1, 0.3, -0.4))
        with pytest.raises(DomainError):
            disk_aut_through_three_points(src, dst)

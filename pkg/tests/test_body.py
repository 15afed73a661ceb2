"""Support-function families: jets, widths, validation, serialization."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brightlab.body import (
    Ball,
    Ellipsoid,
    Erosion,
    HarmonicPerturbation,
    Homothet,
    MinkowskiSum,
    RadialProfile,
    Revolution,
    Spheroid,
    SupportJet,
    body_from_dict,
    body_to_dict,
    finite_difference_jet,
    validate,
)
from brightlab.sampling import as_rng, haar_directions

E4 = Ellipsoid(np.diag([1.0, 1.69, 0.64, 1.21]))


def spheroid_profile(a: float, b: float) -> RadialProfile:
    d = b * b - a * a

    def g(t):
        return np.sqrt(a * a + d * t * t)

    def dg(t):
        return d * t / g(t)

    def ddg(t):
        return d / g(t) - (d * t) ** 2 / g(t) ** 3

    return RadialProfile(g, dg, ddg, label=f"spheroid a={a} b={b}")


def all_families():
    return [
        Ball(3, 1.0),
        Ball(5, 0.7),
        E4,
        Spheroid((0.0, 0.0, 1.0), 1.0, 1.4),
        HarmonicPerturbation(Ball(3, 1.0), (0.0, 0.0, 1.0), (0.3, -0.5), 0.1),
        MinkowskiSum((Ball(3, 0.5), Ellipsoid(np.diag([1.0, 2.0, 3.0])))),
        Homothet(E4, 0.7, (0.1, 0.0, -0.2, 0.0)),
        Erosion(Ball(3, 2.0), 0.5),
        Revolution((0.0, 0.0, 1.0), spheroid_profile(1.0, 1.4)),
    ]


class TestJetStructure:
    @pytest.mark.parametrize("body", all_families(), ids=lambda b: type(b).__name__)
    def test_euler_identities(self, body):
        rng = as_rng(0)
        for u in haar_directions(body.dim, 20, rng):
            jet = body.jet(u)
            assert jet.value == pytest.approx(body.support(u), rel=1e-12)
            # degree-1 homogeneity: <grad, u> = h and Hess u = 0
            assert float(jet.gradient @ u) == pytest.approx(jet.value, rel=1e-10)
            assert np.abs(jet.hessian @ u).max() < 1e-9 * max(1.0, jet.value)
            assert np.allclose(jet.hessian, jet.hessian.T)

    @pytest.mark.parametrize("body", all_families(), ids=lambda b: type(b).__name__)
    def test_jets_match_finite_differences(self, body):
        rng = as_rng(1)
        for u in haar_directions(body.dim, 10, rng):
            jet = body.jet(u)
            num = finite_difference_jet(body, u)
            scale = max(1.0, np.abs(jet.hessian).max())
            assert np.abs(jet.gradient - num.gradient).max() < 1e-8
            assert np.abs(jet.hessian - num.hessian).max() < 1e-6 * scale

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0.1, 10.0))
    def test_support_is_positively_homogeneous(self, seed, lam):
        rng = as_rng(seed)
        x = rng.standard_normal(4)
        if np.linalg.norm(x) < 1e-6:
            x = np.ones(4)
        assert E4.support(lam * x) == pytest.approx(lam * E4.support(x), rel=1e-12)


class TestBall:
    def test_closed_form_jet(self):
        ball = Ball(3, 2.0)
        u = np.array([0.0, 0.0, 1.0])
        jet = ball.jet(u)
        assert jet.value == 2.0
        assert np.allclose(jet.gradient, 2.0 * u)
        assert np.allclose(jet.hessian, 2.0 * (np.eye(3) - np.outer(u, u)))

    def test_width_is_diameter(self):
        assert Ball(4, 1.5).width(np.array([1.0, 0, 0, 0])) == pytest.approx(3.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            Ball(1, 1.0)
        with pytest.raises(ValueError):
            Ball(3, 0.0)


class TestEllipsoid:
    def test_support_along_axes(self):
        e = Ellipsoid(np.diag([4.0, 1.0]))
        assert e.support(np.array([1.0, 0.0])) == pytest.approx(2.0)
        assert e.support(np.array([0.0, 3.0])) == pytest.approx(3.0)

    def test_width(self):
        e = Ellipsoid(np.diag([4.0, 1.0]))
        u = np.array([1.0, 0.0])
        assert e.width(u) == pytest.approx(4.0)

    def test_rejects_non_spd(self):
        with pytest.raises(ValueError):
            Ellipsoid(np.diag([1.0, -1.0]))
        with pytest.raises(ValueError):
            Ellipsoid(np.array([[1.0, 2.0], [0.0, 1.0]]))


class TestSpheroid:
    def test_matches_general_revolution(self):
        sph = Spheroid((0.0, 0.0, 1.0), 1.0, 1.4)
        rev = Revolution((0.0, 0.0, 1.0), spheroid_profile(1.0, 1.4))
        rng = as_rng(2)
        for u in haar_directions(3, 25, rng):
            a = sph.jet(u)
            b = rev.jet(u)
            assert a.value == pytest.approx(b.value, rel=1e-10)
            assert np.abs(a.hessian - b.hessian).max() < 1e-8

    def test_axis_is_normalized(self):
        sph = Spheroid((0.0, 0.0, 2.0), 1.0, 1.4)
        assert np.allclose(sph.axis_vector, [0.0, 0.0, 1.0])

    def test_pole_and_equator_curvature(self):
        a, b = 1.0, 1.4
        sph = Spheroid((0.0, 0.0, 1.0), a, b)
        pole = sph.jet(np.array([0.0, 0.0, 1.0]))
        vals = np.linalg.eigvalsh(pole.hessian)
        # nullspace direction plus the (n-1)-fold pole radius a^2/b
        assert vals[0] == pytest.approx(0.0, abs=1e-12)
        assert np.allclose(vals[1:], a * a / b)
        equator = sph.jet(np.array([1.0, 0.0, 0.0]))
        vals = np.sort(np.linalg.eigvalsh(equator.hessian))
        assert vals[0] == pytest.approx(0.0, abs=1e-12)
        assert vals[1] == pytest.approx(a)
        assert vals[2] == pytest.approx(b * b / a)


class TestRevolution:
    def test_requires_explicit_numeric_opt_in(self):
        profile = RadialProfile(lambda t: np.sqrt(1 + t * t))
        with pytest.raises(ValueError):
            Revolution((0.0, 1.0), profile)
        body = Revolution((0.0, 1.0), profile, numeric_derivatives=True)
        jet = body.jet(np.array([0.0, 1.0]))
        assert jet.value == pytest.approx(np.sqrt(2.0))

    def test_numeric_derivatives_track_analytic(self):
        exact = Revolution((0.0, 0.0, 1.0), spheroid_profile(1.0, 0.8))
        numeric = Revolution(
            (0.0, 0.0, 1.0),
            RadialProfile(spheroid_profile(1.0, 0.8).g),
            numeric_derivatives=True,
        )
        for u in haar_directions(3, 10, as_rng(3)):
            a, b = exact.jet(u), numeric.jet(u)
            assert np.abs(a.hessian - b.hessian).max() < 1e-3


class TestHarmonicPerturbation:
    def test_odd_part_cancels_from_width(self):
        body = HarmonicPerturbation(Ball(3, 1.0), (0.0, 0.0, 1.0), (0.5, -0.3, 0.1), 0.1)
        for u in haar_directions(3, 50, as_rng(4)):
            assert body.width(u) == pytest.approx(2.0, abs=1e-12)

    def test_support_formula(self):
        body = HarmonicPerturbation(Ball(3, 1.0), (0.0, 0.0, 1.0), (1.0,), 0.25)
        u = np.array([0.0, 0.0, 1.0])
        assert body.support(u) == pytest.approx(1.25)
        assert body.support(-u) == pytest.approx(0.75)

    def test_axis_must_match_dim(self):
        with pytest.raises(ValueError):
            HarmonicPerturbation(Ball(3, 1.0), (1.0, 0.0), (1.0,), 0.1)

    def test_coefficient_count_capped(self):
        with pytest.raises(ValueError):
            HarmonicPerturbation(Ball(3, 1.0), (0, 0, 1.0), (1, 1, 1, 1, 1), 0.1)


class TestCompositions:
    def test_minkowski_jets_add(self):
        parts = (Ball(3, 0.5), Ellipsoid(np.diag([1.0, 2.0, 3.0])))
        total = MinkowskiSum(parts)
        u = haar_directions(3, 1, as_rng(5))[0]
        jet = total.jet(u)
        jets = [p.jet(u) for p in parts]
        assert jet.value == pytest.approx(sum(j.value for j in jets))
        assert np.allclose(jet.hessian, sum(j.hessian for j in jets))

    def test_homothet_scales_and_shifts(self):
        body = Homothet(Ball(2, 1.0), 0.5, (1.0, 0.0))
        u = np.array([1.0, 0.0])
        assert body.support(u) == pytest.approx(1.5)
        assert body.support(-u) == pytest.approx(-0.5)
        assert np.allclose(body.jet(u).hessian, 0.5 * Ball(2, 1.0).jet(u).hessian)

    def test_erosion_shrinks_radii(self):
        body = Erosion(Ball(3, 2.0), 0.5)
        u = np.array([0.0, 1.0, 0.0])
        vals = np.sort(np.linalg.eigvalsh(body.jet(u).hessian))
        assert np.allclose(vals[1:], 1.5)

    def test_erosion_must_not_exceed_inradius_to_stay_convex(self):
        body = Erosion(Ball(3, 1.0), 1.5)
        report = validate(body, samples=32, seed=0)
        assert not report.is_c2_plus


class TestValidate:
    def test_ball_is_certified(self):
        report = validate(Ball(3, 2.0), samples=64, seed=0)
        assert report.is_c2_plus
        assert report.min_radius == pytest.approx(2.0, rel=1e-9)
        assert report.max_radius == pytest.approx(2.0, rel=1e-9)

    def test_eroded_ellipse_flattens_along_long_axis(self):
        # h = sqrt(4 u1^2 + u2^2) - 0.5: at +-e1 the curvature radius hits
        # 1/4 * 4 - ... the eroded radius 2 - 1.5 = 0.5 stays positive, but
        # eroding by the full equatorial radius of curvature kills it.
        base = Ellipsoid(np.diag([4.0, 1.0]))
        u = np.array([1.0, 0.0])
        radius_at_e1 = np.linalg.eigvalsh(base.jet(u).hessian)[-1]
        body = Erosion(base, float(radius_at_e1))
        report = validate(body, samples=256, seed=1)
        assert report.min_radius == pytest.approx(0.0, abs=1e-2)
        assert abs(report.argmin_direction[0]) > 0.9

    def test_perturbed_ball_radii_window(self):
        body = HarmonicPerturbation(Ball(3, 1.0), (0.0, 0.0, 1.0), (0.3, -0.5), 0.1)
        report = validate(body, samples=200, seed=2)
        assert report.is_c2_plus
        assert 0.0 < report.min_radius and report.max_radius < 2.0


class TestSerialization:
    @pytest.mark.parametrize(
        "body",
        [b for b in all_families() if not isinstance(b, Revolution)],
        ids=lambda b: type(b).__name__,
    )
    def test_roundtrip(self, body):
        doc = body_to_dict(body)
        clone = body_from_dict(doc)
        rng = as_rng(6)
        for u in haar_directions(body.dim, 10, rng):
            assert clone.support(u) == pytest.approx(body.support(u), rel=1e-12)

    def test_revolution_refuses(self):
        with pytest.raises(ValueError):
            body_to_dict(Revolution((0.0, 1.0), spheroid_profile(1.0, 1.2)))

    def test_unknown_family_rejected(self):
        with pytest.raises(ValueError):
            body_from_dict({"family": "torus", "params": {}})
        with pytest.raises(ValueError):
            body_from_dict({"params": {}})
        with pytest.raises(ValueError):
            body_from_dict({"family": "ball", "params": {"dim": 3}})


class TestArgumentChecks:
    def test_directions_must_be_unit(self):
        with pytest.raises(ValueError):
            Ball(3, 1.0).jet(np.array([0.0, 0.0, 2.0]))

    def test_origin_rejected(self):
        with pytest.raises(ValueError):
            Ball(3, 1.0).support(np.zeros(3))

    def test_finite_difference_jet_is_symmetric(self):
        jet = finite_difference_jet(E4, np.array([1.0, 0.0, 0.0, 0.0]))
        assert np.allclose(jet.hessian, jet.hessian.T)
        assert isinstance(jet, SupportJet)

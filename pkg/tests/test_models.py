import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from orthoconv.errors import DomainViolation, InvalidArgument
from orthoconv.models import (
    HorocycleDisc, SampledCurve, cayley, curve_length, dist_disc, dist_halfplane,
    geodesic_model, horodisc_contains, hyperbolic_density, orthogonality_angle, sector_contains,
)
from conftest import random_disc, random_halfplane

hp_points = st.builds(
    lambda r, t: r * complex(math.cos(t), math.sin(t)),
    st.floats(1e-3, 1e3), st.floats(-1.5, 1.5))
disc_points = st.builds(
    lambda r, t: r * complex(math.cos(t), math.sin(t)),
    st.floats(0, 0.999), st.floats(-math.pi, math.pi))


class TestDistances:
    def test_halfplane_known_values(self):
        assert dist_halfplane(1, math.e) == pytest.approx(0.5, abs=1e-15)
        assert dist_halfplane(2 + 3j, 2 + 3j) == 0.0
        assert dist_halfplane(1, 1 + 1j) == pytest.approx(math.log((1 + math.sqrt(5)) / 2), rel=1e-14)
        assert dist_halfplane(1, 1 + 1j) == pytest.approx(0.481211825, abs=1e-9)

    def test_disc_known_values(self):
        assert dist_disc(0, 0) == 0.0
        assert dist_disc(0, 0.5) == pytest.approx(0.5 * math.log(3), rel=1e-14)
        assert dist_disc(0, 0.5) == pytest.approx(math.atanh(0.5), rel=1e-14)
        assert dist_disc(0.3, -0.3) == dist_disc(-0.3, 0.3)

    def test_rejects_outside(self):
        with pytest.raises(DomainViolation):
            dist_halfplane(-1, 2)
        with pytest.raises(DomainViolation):
            dist_halfplane(1e-13 + 1j, 2)
        with pytest.raises(DomainViolation):
            dist_disc(1.0, 0)

    @given(disc_points, disc_points)
    def test_disc_matches_cayley_transfer(self, z, w):
        d = dist_disc(z, w)
        assert d == pytest.approx(dist_halfplane(complex(cayley(z)), complex(cayley(w))),
                                  rel=1e-8, abs=1e-12)
        r = abs((z - w) / (1 - z.conjugate() * w))
        if r < 0.99:
            assert d == pytest.approx(math.atanh(r), rel=1e-10, abs=1e-14)

    def test_metric_axioms(self, rng):
        for sample, dist in ((random_halfplane, dist_halfplane), (random_disc, dist_disc)):
            a, b, c = (sample(rng, 10_000) for _ in range(3))
            for z, w, u in zip(a, b, c):
                d = dist(z, w)
                assert d == dist(w, z)
                assert d >= 0
                assert d <= dist(z, u) + dist(u, w) + 1e-12

    @given(hp_points, hp_points)
    def test_stable_form_matches_textbook(self, z, w):
        rho = abs((z - w) / (z + w.conjugate()))
        if rho < 0.999:
            expected = 0.5 * math.log((1 + rho) / (1 - rho))
            assert dist_halfplane(z, w) == pytest.approx(expected, rel=1e-9, abs=1e-14)


class TestDensity:
    def test_values(self):
        assert hyperbolic_density("disc", 0) == 1.0
        assert hyperbolic_density("disc", 0.5) == pytest.approx(4 / 3)
        assert hyperbolic_density("halfplane", 1) == 0.5

    def test_halfplane_density_is_derivative_of_distance(self):
        h = 1e-6
        slope = (dist_halfplane(1, 1 + h) - 0) / h
        assert slope == pytest.approx(hyperbolic_density("halfplane", 1), rel=1e-5)

    def test_rejects_boundary(self):
        with pytest.raises(DomainViolation):
            hyperbolic_density("disc", 1j)
        with pytest.raises(InvalidArgument):
            hyperbolic_density("sphere", 0)


class TestCurves:
    def test_validation(self):
        with pytest.raises(InvalidArgument):
            SampledCurve([0, 0], [1, 2])
        with pytest.raises(InvalidArgument):
            SampledCurve([0, 1], [1, 1])
        with pytest.raises(InvalidArgument):
            SampledCurve([0], [1])
        with pytest.raises(InvalidArgument):
            SampledCurve([1, 0], [1, 2])

    def test_radial_disc(self):
        c = SampledCurve([0, 1], [0, 0.5])
        assert curve_length(c, "disc") == pytest.approx(math.atanh(0.5), rel=1e-10)

    def test_ray_arc_length(self):
        c = SampledCurve.from_function(lambda r: r * np.exp(1j * np.pi / 3), np.linspace(1, math.e, 5))
        assert curve_length(c, "halfplane") == pytest.approx(1.0, rel=1e-10)

    def test_degenerate_interval(self):
        c = SampledCurve([0, 1], [1, 2])
        assert curve_length(c, "halfplane", interval=(0.5, 0.5)) == 0.0

    def test_additive_over_subdivision(self):
        c = SampledCurve.from_function(lambda t: 1 + 1j * t, np.linspace(0, 3, 4))
        whole = curve_length(c, "halfplane")
        parts = curve_length(c, "halfplane", (0, 1.3)) + curve_length(c, "halfplane", (1.3, 3))
        assert whole == pytest.approx(parts, rel=1e-10)
        assert whole == pytest.approx(1.5, rel=1e-10)  # ∫ dt/2

    def test_rejects_outside_samples(self):
        with pytest.raises(DomainViolation):
            curve_length(SampledCurve([0, 1], [1, -1]), "halfplane")

    def test_lemma_ray_length(self, rng):
        for _ in range(200):
            beta = rng.uniform(-1.5, 1.5)
            r0, r1 = np.sort(np.exp(rng.uniform(-3, 3, 2)))
            c = SampledCurve.from_function(lambda r: r * np.exp(1j * beta), np.geomspace(r0, r1, 4))
            expected = math.log(r1 / r0) / (2 * math.cos(beta))
            assert curve_length(c, "halfplane") == pytest.approx(expected, rel=1e-8)


class TestGeodesics:
    def test_halfplane_real_segment(self):
        g = geodesic_model("halfplane", 1, math.e)
        assert np.allclose(g.points.imag, 0, atol=1e-14)
        assert g.points[0] == pytest.approx(1)
        assert g.points[-1] == pytest.approx(math.e)

    def test_disc_radial(self):
        g = geodesic_model("disc", 0, 0.5)
        assert np.allclose(g.points.imag, 0, atol=1e-15)

    def test_arc_length_matches_distance(self):
        g = geodesic_model("halfplane", 2 + 1j, 2 - 1j)
        assert curve_length(g, "halfplane") == pytest.approx(dist_halfplane(2 + 1j, 2 - 1j), abs=1e-8)
        # the arc lies on a circle centred on the imaginary axis
        assert np.allclose(np.abs(g.points), abs(2 + 1j), rtol=1e-12)

    def test_rejects_equal_endpoints(self):
        with pytest.raises(InvalidArgument):
            geodesic_model("disc", 0.1, 0.1)

    def test_quadrature_consistency(self, rng):
        for domain, sample, dist in (("halfplane", random_halfplane, dist_halfplane),
                                     ("disc", random_disc, dist_disc)):
            zs, ws = sample(rng, 300), sample(rng, 300)
            for z, w in zip(zs, ws):
                g = geodesic_model(domain, z, w, samples=9)
                assert abs(curve_length(g, domain) - dist(z, w)) <= 1e-8 * max(1, dist(z, w))


class TestLemmaInequalities:
    def test_angle_penalty(self, rng):
        for _ in range(10_000):
            r0, r1 = np.exp(rng.uniform(-3, 3, 2))
            beta = rng.uniform(-1.5, 1.5)
            gap = dist_halfplane(r0, r1 * np.exp(1j * beta)) - dist_halfplane(r0, r1)
            assert gap >= 0.5 * math.log(1 / math.cos(beta)) - 1e-12

    def test_minimum_at_equal_modulus(self):
        rho0, alpha, beta = 3.0, 0.7, -0.4
        grid = np.geomspace(rho0 / 50, rho0 * 50, 401)
        vals = np.array([dist_halfplane(r * np.exp(1j * alpha), rho0 * np.exp(1j * beta)) for r in grid])
        i = int(np.argmin(vals))
        assert i == int(np.argmin(np.abs(np.log(grid / rho0))))
        assert np.all(np.diff(vals[:i + 1]) < 0) and np.all(np.diff(vals[i:]) > 0)

    def test_modulus_independence_and_monotone_angle(self):
        base = dist_halfplane(np.exp(0.3j), np.exp(-1.1j))
        for r in np.geomspace(1e-3, 1e3, 50):
            assert dist_halfplane(r * np.exp(0.3j), r * np.exp(-1.1j)) == pytest.approx(base, abs=1e-12)
        thetas = np.linspace(0, 1.5, 200)
        vals = [dist_halfplane(1, np.exp(1j * t)) for t in thetas]
        assert np.all(np.diff(vals) > 0)
        assert all(dist_halfplane(1, np.exp(1j * t)) == dist_halfplane(1, np.exp(-1j * t)) for t in thetas)

    def test_real_projection_shortens(self, rng):
        for _ in range(10_000):
            r0, r1 = np.exp(rng.uniform(-3, 3, 2))
            b0, b1 = rng.uniform(-1.5, 1.5, 2)
            assert (dist_halfplane(r0 * np.exp(1j * b0), r1 * np.exp(1j * b1))
                    >= dist_halfplane(r0, r1) - 1e-12)


class TestAngles:
    def test_examples(self):
        assert orthogonality_angle(1, 0.9) == 0.0
        assert orthogonality_angle(1, 1 - 0.1j) == pytest.approx(math.pi / 2)
        assert orthogonality_angle(1j, 0) == 0.0

    @given(st.floats(-math.pi, math.pi), st.floats(0.0, 0.999999))
    def test_radial_is_exactly_zero(self, phi, r):
        sigma = complex(math.cos(phi), math.sin(phi))
        assert orthogonality_angle(sigma, r * sigma) == 0.0

    def test_range(self, rng):
        for z in random_disc(rng, 500):
            a = orthogonality_angle(1, z)
            assert -math.pi < a <= math.pi


class TestHorodiscAndSector:
    def test_horodisc_examples(self):
        assert not horodisc_contains(HorocycleDisc(1, 1), 0)
        assert horodisc_contains(HorocycleDisc(1, 2), 0)
        assert horodisc_contains(HorocycleDisc(1, 0.5), 0.5)

    def test_horodisc_validation(self):
        with pytest.raises(InvalidArgument):
            HorocycleDisc(1, 0)
        with pytest.raises(DomainViolation):
            HorocycleDisc(0.5, 1)

    def test_sector_examples(self):
        assert sector_contains(math.pi / 4, 1)
        assert not sector_contains(math.pi / 4, 1j)
        assert not sector_contains(math.pi / 2, -1)
        assert not sector_contains(math.pi / 2, 0)

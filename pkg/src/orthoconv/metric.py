"""Hyperbolic geometry of catalog domains by pullback to the right half-plane.

Distances are evaluated on hub (half-plane) coordinates, which keeps full
precision for points far out toward a prime end; the disc route is kept as
:func:`pull_distance_via_disc` for cross-checking.
"""

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .atlas import Disc, PrimeEndRef, atlas_map, require_all_inside, require_inside
from .errors import DivergentDistance, InvalidArgument
from .models import (
    SampledCurve, _halfplane_geodesic_func, _k_halfplane, _mobius_ray, cayley_inverse,
    dist_disc, piece_lengths,
)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
RAY_T_MAX = 300.0
QG_TOL = 1e-7  # quadrature and rounding floor of the certifier


def density(spec, z):
    """Infinitesimal hyperbolic density of ``spec`` at z (vectorized)."""
    u = spec.to_hub(z)
    return 1.0 / (2.0 * np.real(u) * np.abs(spec.from_hub_derivative(u)))


def pull_distance(spec, z, w):
    z, w = require_inside(spec, z), require_inside(spec, w)
    if z == w:
        return 0.0
    return float(_k_halfplane(spec.to_hub(z), spec.to_hub(w)))


def pull_distance_via_disc(spec, z, w):
    f = atlas_map(Disc(), spec)
    z, w = require_inside(spec, z), require_inside(spec, w)
    return dist_disc(complex(f.inverse(z)), complex(f.inverse(w)))


def hub_distances(spec, z, w):
    """Vectorized distance without validation (inputs assumed interior)."""
    return _k_halfplane(spec.to_hub(z), spec.to_hub(w))


def length_in(spec, curve, rtol=1e-10):
    require_all_inside(spec, curve.points)
    return float(piece_lengths(curve, lambda p: density(spec, p), rtol).sum())


def geodesic_join(spec, z, w, samples=65):
    """Geodesic from z to w in ``spec``, parameterized by hyperbolic arc length."""
    z, w = require_inside(spec, z), require_inside(spec, w)
    if z == w:
        raise InvalidArgument("geodesic endpoints must differ")
    hub_func, length = _halfplane_geodesic_func(complex(spec.to_hub(z)), complex(spec.to_hub(w)))

    def func(s):
        return spec.from_hub(hub_func(s))

    return SampledCurve.from_function(func, np.linspace(0.0, length, samples))


@dataclass(frozen=True, eq=False)
class GeodesicRay:
    """Unit-speed geodesic ray from ``base`` toward the prime end ``end``.

    ``hub_param`` gives the ray in half-plane coordinates; ``param`` in the
    domain itself.
    """

    domain: object
    base: complex
    end: PrimeEndRef
    hub_param: Callable = field(repr=False)

    def param(self, t):
        return self.domain.from_hub(self.hub_param(t))

    def as_curve(self, t_max, samples=129):
        return SampledCurve.from_function(self.param, np.linspace(0.0, t_max, samples))


def geodesic_ray(spec, base, end):
    base = require_inside(spec, base)
    hub_end = spec.end_to_hub(end)
    u0 = complex(spec.to_hub(base))
    x0, y0 = u0.real, u0.imag
    if hub_end[0] == "infinity":
        def hub_param(t):
            return x0 * np.exp(2.0 * np.asarray(t, dtype=float)) + 1j * y0
    else:
        sigma = complex(cayley_inverse(1j * (hub_end[1] - y0) / x0))
        sigma /= abs(sigma)

        def hub_param(t):
            return x0 * _mobius_ray(sigma, t) + 1j * y0
    return GeodesicRay(spec, base, end, hub_param)


def _golden_section(f, a, b, tol):
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    # relative floor: the bracket cannot shrink below the float spacing at |b|
    while b - a > max(tol, 4 * np.finfo(float).eps * max(abs(a), abs(b))):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def nearest_on_ray(spec, z, ray, tol=1e-9):
    """(t*, distance) minimizing ``t -> k(z, ray(t))`` over ``t >= 0``.

    Distance to a point is convex along a geodesic, so the grid 0, 1, 2, 4, ...
    is expanded until the sampled distance increases, then golden-section
    search runs inside the last three grid points.
    """
    z = require_inside(spec, z)
    u = complex(spec.to_hub(z))

    def f(t):
        return float(_k_halfplane(u, ray.hub_param(t)))

    grid = [0.0, 1.0]
    vals = [f(0.0), f(1.0)]
    while vals[-1] <= vals[-2]:
        nxt = 2.0 * grid[-1]
        if nxt > RAY_T_MAX:
            raise DivergentDistance(
                "distance keeps decreasing along the ray", bracket=(grid[-2], grid[-1]))
        grid.append(nxt)
        vals.append(f(nxt))
    lo = grid[-3] if len(grid) >= 3 else 0.0
    hi = grid[-1]
    t, d = _golden_section(f, lo, hi, tol)
    if vals[0] <= d:
        return 0.0, vals[0]
    return t, d


def dist_to_ray(spec, z, ray, tol=1e-9):
    return nearest_on_ray(spec, z, ray, tol)[1]


@dataclass(frozen=True)
class HyperbolicSector:
    domain: object
    ray: GeodesicRay
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidArgument("sector radius must be positive")

    def contains(self, z):
        return dist_to_ray(self.domain, z, self.ray) < self.radius


@dataclass(frozen=True)
class QuasiGeodesicCertificate:
    A: float
    B: float
    max_defect: float
    witness: tuple
    grid: np.ndarray = field(repr=False)
    tol: float = QG_TOL

    @property
    def valid(self):
        return self.max_defect <= self.tol


def _certify_arrays(spec, curve, grid):
    if curve.func is not None and grid is not None and grid != len(curve):
        curve = SampledCurve.from_function(
            curve.func, np.linspace(curve.params[0], curve.params[-1], grid), curve.derivative)
    require_all_inside(spec, curve.points)
    pieces = piece_lengths(curve, lambda p: density(spec, p))
    cum = np.concatenate([[0.0], np.cumsum(pieces)])
    hub = spec.to_hub(curve.points)
    k = _k_halfplane(hub[:, None], hub[None, :])
    np.fill_diagonal(k, 0.0)
    ell = cum[None, :] - cum[:, None]
    return curve, ell, k


def qg_certify(curve, spec, A=1.0, B=0.0, grid=512, tol=QG_TOL):
    """Check ``length(s, t) <= A k(curve(s), curve(t)) + B`` over all grid pairs.

    A curve carrying its exact ``func`` is resampled on ``grid`` parameters;
    a purely sampled curve is checked on its own samples.
    """
    if A < 1 or B < 0:
        raise InvalidArgument("need A >= 1 and B >= 0")
    curve, ell, k = _certify_arrays(spec, curve, grid)
    defect = ell - A * k - B
    iu = np.triu_indices(len(curve), 1)
    flat = defect[iu]
    idx = int(np.argmax(flat))
    i, j = iu[0][idx], iu[1][idx]
    return QuasiGeodesicCertificate(
        float(A), float(B), float(flat[idx]),
        (float(curve.params[i]), float(curve.params[j])), curve.params, tol)


def minimal_additive_constant(curve, spec, A=1.0, grid=512):
    """Smallest B for which ``curve`` is an (A, B)-quasi-geodesic on the grid
    (before the certifier's tolerance is applied)."""
    cert = qg_certify(curve, spec, A, 0.0, grid)
    return max(cert.max_defect, 0.0)


def _dist_to_curve_hub(u, curve_hub, params, hub_func):
    d = _k_halfplane(u, curve_hub)
    i = int(np.argmin(d))
    if hub_func is None:
        return float(d[i])
    lo = params[max(i - 1, 0)]
    hi = params[min(i + 1, len(params) - 1)]
    _, best = _golden_section(lambda s: float(_k_halfplane(u, hub_func(s))), lo, hi, 1e-12)
    return min(best, float(d[i]))


def shadowing_gap(curve, ray, spec, ray_samples=None):
    """Empirical two-sided shadowing constants between ``curve`` and ``ray``.

    Returns (sup of curve-to-ray distance, sup of ray-to-curve distance), the
    second taken over the ray up to the furthest projection of the curve.
    """
    require_all_inside(spec, curve.points)
    projections = [nearest_on_ray(spec, p, ray) for p in curve.points]
    gap_curve = max(d for _, d in projections)
    horizon = max(t for t, _ in projections)
    n = ray_samples or len(curve)
    ts = np.linspace(0.0, horizon, n)
    ray_hub = ray.hub_param(ts)
    curve_hub = spec.to_hub(curve.points)
    hub_func = None
    if curve.func is not None:
        def hub_func(s):
            return spec.to_hub(curve.func(s))
    gap_ray = max(_dist_to_curve_hub(u, curve_hub, curve.params, hub_func) for u in ray_hub)
    return float(gap_curve), float(gap_ray)

"""Closed-form hyperbolic geometry of the unit disc and the right half-plane.

The metric is normalized to curvature -4: the density is ``1/(1-|z|^2)`` on
the disc and ``1/(2 Re z)`` on the half-plane, so that the half-plane distance
between 1 and x > 0 is ``log(x)/2``.

All kernels prefixed with an underscore accept numpy arrays and perform no
validation; the public functions validate their inputs.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainViolation, InvalidArgument
from .quadrature import integrate_pieces

BOUNDARY_TOL = 1e-12
DISC = "disc"
HALFPLANE = "halfplane"
_MODEL_ALIASES = {
    "disc": DISC, "D": DISC, "𝔻": DISC,
    "halfplane": HALFPLANE, "H": HALFPLANE, "ℍ": HALFPLANE,
}


def model_tag(domain):
    try:
        return _MODEL_ALIASES[domain]
    except (KeyError, TypeError):
        raise InvalidArgument(f"unknown model domain {domain!r}") from None


def _finite(z):
    z = complex(z)
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise DomainViolation(f"non-finite point {z!r}")
    return z


def as_disc_point(z):
    z = _finite(z)
    if abs(z) >= 1.0 - BOUNDARY_TOL:
        raise DomainViolation(f"{z!r} is not inside the unit disc")
    return z


def as_halfplane_point(z):
    z = _finite(z)
    if z.real <= BOUNDARY_TOL:
        raise DomainViolation(f"{z!r} is not inside the right half-plane")
    return z


def as_boundary_point(sigma):
    sigma = _finite(sigma)
    if abs(abs(sigma) - 1.0) > BOUNDARY_TOL:
        raise DomainViolation(f"{sigma!r} is not on the unit circle")
    return sigma


def as_model_point(domain, z):
    if model_tag(domain) == DISC:
        return as_disc_point(z)
    return as_halfplane_point(z)


# --- kernels -----------------------------------------------------------------

def _k_halfplane(z, w):
    # (1+rho)/(1-rho) = (|z+conj w| + |z-w|)^2 / (4 Re z Re w); no cancellation.
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    s = np.abs(z + np.conj(w))
    d = np.abs(z - w)
    return np.log((s + d) / (2.0 * np.sqrt(z.real) * np.sqrt(w.real)))


def _k_disc(z, w):
    # |1 - conj(z) w|^2 = (1-|z|^2)(1-|w|^2) + |z-w|^2: symmetric, all terms positive
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    d = np.abs(z - w)
    az, aw = np.abs(z), np.abs(w)
    q = ((1.0 - az) * (1.0 + az)) * ((1.0 - aw) * (1.0 + aw))
    return np.log((np.sqrt(q + d * d) + d) / np.sqrt(q))


def _density_disc(z):
    a = np.abs(z)
    return 1.0 / ((1.0 - a) * (1.0 + a))


def _density_halfplane(z):
    return 1.0 / (2.0 * np.real(z))


def cayley(z):
    """Disc to right half-plane, ``(1+z)/(1-z)``."""
    z = np.asarray(z, dtype=complex)
    return (1.0 + z) / (1.0 - z)


def cayley_inverse(w):
    w = np.asarray(w, dtype=complex)
    return (w - 1.0) / (w + 1.0)


def _mobius_ray(direction, s):
    """Point at half-plane distance ``s`` from 1 along the geodesic leaving 1
    in the disc direction ``direction`` (a unit complex number).

    Equals ``cayley(direction * tanh(s))`` but stays accurate when the point
    is exponentially close to the boundary.
    """
    s = np.asarray(s, dtype=float)
    e = np.exp(2.0 * s)
    a = 1.0 + direction
    b = 1.0 - direction
    den = np.abs(b * e + a) ** 2
    return (4.0 * e + 2j * direction.imag * (e * e - 1.0)) / den


# --- public operations --------------------------------------------------------

def dist_halfplane(z, w):
    """Hyperbolic distance in the right half-plane.

    Algebraically identical to ``0.5*log((1+r)/(1-r))`` with
    ``r = |(z-w)/(z+conj(w))|`` but evaluated without cancellation.
    """
    z, w = as_halfplane_point(z), as_halfplane_point(w)
    if z == w:
        return 0.0
    return float(_k_halfplane(z, w))


def dist_disc(z, w):
    z, w = as_disc_point(z), as_disc_point(w)
    if z == w:
        return 0.0
    return float(_k_disc(z, w))


def hyperbolic_density(domain, z):
    if model_tag(domain) == DISC:
        return float(_density_disc(as_disc_point(z)))
    return float(_density_halfplane(as_halfplane_point(z)))


def _density_fn(domain):
    return _density_disc if model_tag(domain) == DISC else _density_halfplane


@dataclass(frozen=True, eq=False)
class SampledCurve:
    """A piecewise-C1 curve known at increasing parameters.

    When ``func`` is given it is the exact curve and is used between samples;
    otherwise the samples are joined by straight segments. ``derivative`` is
    optional; without it velocities come from a five-point stencil on ``func``.
    """

    params: np.ndarray
    points: np.ndarray
    func: Optional[Callable] = None
    derivative: Optional[Callable] = None
    smoothness: str = field(default="piecewise-C1")

    def __post_init__(self):
        params = np.asarray(self.params, dtype=float)
        points = np.asarray(self.points, dtype=complex)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "points", points)
        if params.ndim != 1 or params.shape != points.shape:
            raise InvalidArgument("params and points must be 1-D of equal length")
        if len(params) < 2:
            raise InvalidArgument("a sampled curve needs at least two samples")
        if not np.all(np.diff(params) > 0):
            raise InvalidArgument("curve parameters must be strictly increasing")
        if np.any(points[1:] == points[:-1]):
            raise InvalidArgument("consecutive curve samples must be distinct")
        if not (np.all(np.isfinite(points.real)) and np.all(np.isfinite(points.imag))):
            raise InvalidArgument("curve samples must be finite")

    @classmethod
    def from_function(cls, func, params, derivative=None):
        params = np.asarray(params, dtype=float)
        return cls(params, np.asarray(func(params), dtype=complex), func, derivative)

    def __len__(self):
        return len(self.params)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.func is not None:
            return np.asarray(self.func(u), dtype=complex)
        k = np.clip(np.searchsorted(self.params, u, side="right") - 1, 0, len(self.params) - 2)
        t0, t1 = self.params[k], self.params[k + 1]
        p0, p1 = self.points[k], self.points[k + 1]
        return p0 + (u - t0) / (t1 - t0) * (p1 - p0)

    def velocity(self, u):
        u = np.asarray(u, dtype=float)
        if self.derivative is not None:
            return np.asarray(self.derivative(u), dtype=complex)
        if self.func is not None:
            span = self.params[-1] - self.params[0]
            h = 1e-3 * span / max(len(self.params) - 1, 1)
            f = self.func
            return (f(u - 2 * h) - 8 * f(u - h) + 8 * f(u + h) - f(u + 2 * h)) / (12 * h)
        k = np.clip(np.searchsorted(self.params, u, side="right") - 1, 0, len(self.params) - 2)
        return (self.points[k + 1] - self.points[k]) / (self.params[k + 1] - self.params[k])


def piece_lengths(curve, density, rtol=1e-10):
    """Hyperbolic length of each sample-to-sample piece of ``curve``."""

    def integrand(u):
        return density(curve(u)) * np.abs(curve.velocity(u))

    return integrate_pieces(integrand, curve.params, rtol=rtol)


def curve_length(curve, domain, interval=None, rtol=1e-10):
    """Hyperbolic length of a sampled curve in a model domain.

    ``interval`` restricts the integration to ``[s, t]``; a degenerate
    interval has length zero.
    """
    density = _density_fn(domain)
    for p in curve.points:
        as_model_point(domain, p)
    if interval is None:
        return float(piece_lengths(curve, density, rtol).sum())
    s, t = map(float, interval)
    if not curve.params[0] <= s <= t <= curve.params[-1]:
        raise InvalidArgument(f"interval {interval!r} outside the curve parameters")
    if s == t:
        return 0.0
    inner = curve.params[(curve.params > s) & (curve.params < t)]
    bp = np.concatenate([[s], inner, [t]])

    def integrand(u):
        return density(curve(u)) * np.abs(curve.velocity(u))

    return float(integrate_pieces(integrand, bp, rtol=rtol).sum())


def _halfplane_geodesic_func(z, w):
    """Unit-speed geodesic from z to w in the half-plane, and its length."""
    x0, y0 = z.real, z.imag
    w1 = (w - 1j * y0) / x0
    length = float(_k_halfplane(1.0, w1))
    zeta = complex(cayley_inverse(w1))
    direction = zeta / abs(zeta)

    def func(s):
        return x0 * _mobius_ray(direction, s) + 1j * y0

    return func, length


def _disc_geodesic_func(z, w):
    length = float(_k_disc(z, w))
    b = (w - z) / (1.0 - np.conj(z) * w)
    direction = b / abs(b)

    def func(s):
        r = np.tanh(np.asarray(s, dtype=float)) * direction
        return (r + z) / (1.0 + np.conj(z) * r)

    return func, length


def geodesic_model(domain, z, w, samples=65):
    """Geodesic segment from z to w, parameterized and sampled by arc length."""
    tag = model_tag(domain)
    z, w = as_model_point(tag, z), as_model_point(tag, w)
    if z == w:
        raise InvalidArgument("geodesic endpoints must differ")
    if samples < 2:
        raise InvalidArgument("need at least two samples")
    if tag == DISC:
        func, length = _disc_geodesic_func(z, w)
    else:
        func, length = _halfplane_geodesic_func(z, w)
    return SampledCurve.from_function(func, np.linspace(0.0, length, samples))


def orthogonality_angle(sigma, zeta):
    """``arg(1 - conj(sigma) * zeta)`` in (-pi, pi].

    A point collinear with sigma up to rounding of its own construction
    (``zeta = r * sigma``) gets angle exactly 0.
    """
    sigma = as_boundary_point(sigma)
    zeta = _finite(zeta)
    if zeta == sigma:
        raise InvalidArgument("zeta coincides with sigma")
    cross = sigma.real * zeta.imag - sigma.imag * zeta.real
    dot = sigma.real * zeta.real + sigma.imag * zeta.imag
    if dot > 0 and abs(cross) <= 4 * np.finfo(float).eps * abs(zeta) and abs(zeta) < 1:
        return 0.0
    v = 1.0 - sigma.conjugate() * zeta
    angle = float(np.angle(v))
    return np.pi if angle == -np.pi else angle


@dataclass(frozen=True)
class HorocycleDisc:
    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_boundary_point(self.center))
        if not self.radius > 0:
            raise InvalidArgument("horocycle radius must be positive")


def horodisc_contains(h, z):
    z = as_disc_point(z)
    return bool(abs(h.center - z) ** 2 < h.radius * (1.0 - abs(z) ** 2))


def sector_contains(beta, z):
    """Membership in ``V(beta) = {rho e^{i theta}: rho > 0, |theta| < beta}``."""
    if not 0 < beta < np.pi:
        raise InvalidArgument("beta must lie in (0, pi)")
    z = _finite(z)
    return bool(z != 0 and abs(np.angle(z)) < beta)

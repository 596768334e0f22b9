"""Orthogonal convergence of sequences in catalog domains.

Given a domain sandwiched between a horocycle of a larger domain U and U
itself, a sequence converges orthogonally (after pulling back to the disc) iff
its distance in U to a geodesic ray toward the horocycle's center tends to 0.
:func:`classify` applies that criterion and cross-checks it against the
angles ``arg(1 - conj(sigma) zeta_n)`` computed directly in the disc.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .atlas import (
    Disc, DomainSpec, KoebeSlit, PrimeEndRef, atlas_map, on_boundary, require_all_inside,
    sample_boundary, sample_interior, starlike_at_infinity,
)
from .errors import EstimationFailure, InvalidArgument, ScenarioConstructionFailed, ScenarioInvalid
from .horocycles import GeneralHorocycle, busemann_many, sample_horocycle
from .metric import dist_to_ray, geodesic_ray, hub_distances
from .models import orthogonality_angle

DEFAULT_TOL = 1e-2
DEFAULT_TAIL = 5
ESCAPE_MARGIN = 0.5  # required growth of the distance from base over the sequence


def geometric_times(n, t_max, t_min=1.0):
    if n < 2:
        return np.array([float(t_max)])
    return np.geomspace(t_min, t_max, n)


def make_sequence(kind, n, t_max=None, theta=0.0, offset=0j):
    """Divergent test sequences.

    ``t_k`` runs over 1..n, or over n geometric steps from 1 to ``t_max``.
    Kinds: ``real`` (offset + t), ``vertical`` (offset + i t),
    ``ray`` (offset + t e^{i theta}).
    """
    t = np.arange(1, n + 1, dtype=float) if t_max is None else geometric_times(n, t_max)
    if kind == "real":
        return offset + t + 0j
    if kind == "vertical":
        return offset + 1j * t
    if kind == "ray":
        return offset + t * np.exp(1j * theta)
    raise InvalidArgument(f"unknown sequence kind {kind!r}")


@dataclass(frozen=True, eq=False)
class SandwichScenario:
    """Data ``(inner, outer, center, radius, sequence)`` with the declared
    inclusion ``E_base^outer(center, radius) <= inner <= outer``."""

    inner: DomainSpec
    outer: DomainSpec
    center: PrimeEndRef
    radius: float
    sequence: np.ndarray
    base: complex
    witness: str = "declared"

    def __post_init__(self):
        seq = np.atleast_1d(np.asarray(self.sequence, dtype=complex))
        object.__setattr__(self, "sequence", seq)
        if len(seq) < 2:
            raise InvalidArgument("scenario needs at least two sequence points")
        if not self.radius > 0:
            raise InvalidArgument("radius must be positive")
        self.outer.check_end(self.center)
        require_all_inside(self.inner, seq)
        require_all_inside(self.outer, seq)
        require_all_inside(self.outer, [self.base])
        d = hub_distances(self.outer, self.base, seq[[0, -1]])
        if not d[-1] > d[0] + ESCAPE_MARGIN:
            raise InvalidArgument("sequence does not escape to the boundary of the domain")

    @property
    def horocycle(self):
        return GeneralHorocycle(self.outer, self.center, self.base, self.radius)


def falsify_inclusion(inner, outer, horocycle, samples=10_000, seed=0):
    """Search for a counterexample to ``horocycle <= inner <= outer``.

    Returns a description of the first counterexample, or None. Three probes:
    horocycle points outside ``inner``, boundary points of ``inner`` inside the
    horocycle, and points of ``inner`` outside ``outer``.
    """
    rng = np.random.default_rng(seed)
    pts = sample_horocycle(horocycle, samples, rng)
    bad = ~np.asarray(inner.contains(pts), dtype=bool)
    if bad.any():
        return f"horocycle point {complex(pts[bad][0])!r} lies outside the inner domain"
    edge = sample_boundary(inner, samples, rng)
    edge = edge[np.asarray(outer.contains(edge), dtype=bool)]
    if len(edge):
        with np.errstate(all="ignore"):
            b = busemann_many(outer, horocycle.base, horocycle.center, edge)
        hit = b < horocycle.threshold
        if hit.any():
            return f"inner boundary point {complex(edge[hit][0])!r} lies inside the horocycle"
    inside = sample_interior(inner, samples, rng)
    out = ~np.asarray(outer.contains(inside), dtype=bool)
    if out.any():
        return f"inner point {complex(inside[out][0])!r} lies outside the outer domain"
    return None


def fit_horocycle_radius(inner, outer, center, base, samples=10_000, seed=0, steps=40):
    """Largest radius in (0, 1] (up to bisection) surviving the falsifier."""

    def passes(r):
        h = GeneralHorocycle(outer, center, base, r)
        return falsify_inclusion(inner, outer, h, samples, seed) is None

    hi = 1.0
    if passes(hi):
        return hi
    lo = None
    for k in range(1, steps + 1):
        r = 2.0 ** -k
        if passes(r):
            lo = r
            break
        hi = r
    if lo is None:
        raise ScenarioConstructionFailed("no horocycle radius passed the inclusion falsifier")
    for _ in range(12):
        mid = math.sqrt(lo * hi)
        if passes(mid):
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class ConvergenceVerdict:
    kind: str  # "orthogonal" | "tangential" | "inconclusive"
    sigma: Optional[complex] = None
    sign: int = 0
    ray_distances: np.ndarray = field(default=None, repr=False)
    angles: np.ndarray = field(default=None, repr=False)
    tol: float = DEFAULT_TOL
    tail: int = DEFAULT_TAIL
    note: str = ""

    @property
    def is_orthogonal(self):
        return self.kind == "orthogonal"

    @property
    def tail_distance(self):
        return float(np.max(self.ray_distances[-self.tail:]))

    @property
    def tail_angle(self):
        if self.angles is None:
            return float("nan")
        return float(np.max(np.abs(self.angles[-self.tail:])))

    def label(self):
        if self.kind == "tangential":
            return "tangential+" if self.sign > 0 else "tangential-"
        return self.kind


def _aitken(a, b, c):
    den = (c - b) - (b - a)
    if den == 0:
        return c
    return c - (c - b) ** 2 / den


def estimate_sigma(inner, ray, decades=range(2, 7), stop=1e-6):
    """Limit of ``f^{-1}(ray)`` on the unit circle, f the Riemann map of ``inner``.

    Samples the ray where its half-plane image has modulus ~10^k, projects to
    the circle and Aitken-accelerates; converged when successive accelerated
    values differ by less than ``stop``.
    """
    f = atlas_map(Disc(), inner)
    u0 = abs(complex(ray.hub_param(0.0)))
    est = []
    for k in decades:
        t = 0.5 * math.log(max(10.0 ** k / u0, 1.0))
        z = complex(ray.param(t))
        if not inner.contains(z):
            continue
        zeta = complex(f.inverse(z))
        est.append(zeta / abs(zeta))
    if len(est) < 2:
        raise EstimationFailure("ray does not enter the inner domain")
    acc = list(est[:2]) + [_aitken(*est[i - 2:i + 1]) for i in range(2, len(est))]
    if abs(acc[-1] - acc[-2]) >= stop:
        raise EstimationFailure(f"sigma estimates still moving by {abs(acc[-1] - acc[-2]):.3g}")
    return acc[-1] / abs(acc[-1])


def direct_angles(spec, sigma, sequence):
    """``arg(1 - conj(sigma) f^{-1}(z_n))`` for the Riemann map f of ``spec``."""
    seq = require_all_inside(spec, sequence)
    if abs(sigma - 1.0) <= 1e-12:
        # 1 - cayley_inverse(u) = 2/(u+1), no cancellation near sigma
        return -np.angle(spec.to_hub(seq) + 1.0)
    f = atlas_map(Disc(), spec)
    return np.array([orthogonality_angle(sigma, complex(f.inverse(z))) for z in seq])


def verify_direct(spec, sigma, sequence, tail=DEFAULT_TAIL):
    """Max ``|arg(1 - conj(sigma) f^{-1}(z_n))|`` over the last ``tail`` points."""
    return float(np.max(np.abs(direct_angles(spec, sigma, sequence)[-tail:])))


def classify(s, tol=DEFAULT_TOL, tail=DEFAULT_TAIL, samples=10_000, seed=0):
    """Predict orthogonal convergence of ``s.sequence`` from the ray-distance
    criterion and confirm it with the direct angle test."""
    if tail < 1 or tail > len(s.sequence):
        raise InvalidArgument("tail must be between 1 and the sequence length")
    problem = falsify_inclusion(s.inner, s.outer, s.horocycle, samples, seed)
    if problem:
        raise ScenarioInvalid(f"inclusion witness falsified: {problem}")
    ray = geodesic_ray(s.outer, s.base, s.center)
    d = np.array([dist_to_ray(s.outer, z, ray) for z in s.sequence])
    try:
        sigma = estimate_sigma(s.inner, ray)
    except EstimationFailure as exc:
        return ConvergenceVerdict("inconclusive", None, 0, d, None, tol, tail, str(exc))
    angles = direct_angles(s.inner, sigma, s.sequence)
    tail_angles = angles[-tail:]
    criterion = bool(np.all(d[-tail:] < tol))
    direct = bool(np.max(np.abs(tail_angles)) <= 3 * tol)
    if criterion and direct:
        return ConvergenceVerdict("orthogonal", sigma, 0, d, angles, tol, tail)
    signs = np.sign(tail_angles)
    if np.all(np.abs(tail_angles) > math.pi / 2 - tol) and np.all(signs == signs[0]):
        return ConvergenceVerdict("tangential", sigma, int(signs[0]), d, angles, tol, tail)
    note = "criterion met but direct angles disagree" if criterion else ""
    return ConvergenceVerdict("inconclusive", sigma, 0, d, angles, tol, tail, note)


def betsakos_scenario(s0, s1, spec, sequence, base=None, semistrip=None,
                      samples=10_000, seed=0):
    """Sandwich a starlike-at-infinity domain with boundary in a vertical
    semistrip between a horocycle of the Koebe domain slit below
    ``s0 + i s1`` and that Koebe domain."""
    if not starlike_at_infinity(spec):
        raise ScenarioConstructionFailed(f"{spec.serialize()} is not starlike at infinity")
    strip = spec.semistrip()
    if strip is None:
        raise ScenarioConstructionFailed(
            f"the boundary of {spec.serialize()} is not contained in a vertical semistrip")
    if semistrip is not None:
        a, b, c = semistrip
        if not (a <= strip[0] and strip[1] <= b and strip[2] <= c):
            raise ScenarioConstructionFailed("declared semistrip does not contain the boundary")
    p = complex(s0, s1)
    if not on_boundary(spec, p):
        raise ScenarioConstructionFailed(f"{p!r} is not a boundary point of {spec.serialize()}")
    outer = KoebeSlit(p)
    center = PrimeEndRef.infinity("upward")
    base = p + 1j if base is None else complex(base)
    radius = fit_horocycle_radius(spec, outer, center, base, samples, seed)
    return SandwichScenario(spec, outer, center, radius, sequence, base,
                            witness=f"E_base^K(upward, R) in inner, inner in K, K slit below {p!r}")

"""Horocycles of catalog domains defined through Busemann limits."""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .atlas import DomainSpec, PrimeEndRef, prime_end_image, require_inside, sample_interior
from .errors import InvalidArgument
from .metric import geodesic_ray
from .models import _k_halfplane, as_boundary_point, as_disc_point

BAND = 1e-9


def busemann_disc(sigma, zeta, zeta0=0j):
    """``lim [k(zeta, w) - k(zeta0, w)]`` as ``w -> sigma`` in the unit disc."""
    sigma = as_boundary_point(sigma)
    zeta, zeta0 = as_disc_point(zeta), as_disc_point(zeta0)

    def poisson_log(p):
        return 0.5 * math.log(abs(sigma - p) ** 2 / ((1 - abs(p)) * (1 + abs(p))))

    return poisson_log(zeta) - poisson_log(zeta0)


def _hub_busemann(u, u0, hub_end):
    u = np.asarray(u, dtype=complex)
    if hub_end[0] == "infinity":
        return -0.5 * np.log(u.real / u0.real)
    iy = 1j * hub_end[1]
    # disc formula transported by the Cayley map; the (1 + y^2) factors cancel
    return 0.5 * (np.log(np.abs(u - iy) ** 2 / u.real) - np.log(abs(u0 - iy) ** 2 / u0.real))


def busemann(spec, z0, end, z):
    """Busemann value of z relative to base z0 at the prime end ``end``.

    Evaluated in closed form on the half-plane coordinates of ``spec``;
    this is the disc formula composed with the Cayley transform.
    """
    z0, z = require_inside(spec, z0), require_inside(spec, z)
    hub_end = spec.end_to_hub(end)
    return float(_hub_busemann(spec.to_hub(z), complex(spec.to_hub(z0)), hub_end))


def busemann_many(spec, z0, end, zs):
    hub_end = spec.end_to_hub(end)
    return _hub_busemann(spec.to_hub(zs), complex(spec.to_hub(z0)), hub_end)


def busemann_sequential(spec, z0, end, z, terms=12):
    """Debug route: ``k(z, w_n) - k(z0, w_n)`` along a ray to ``end``, Aitken-accelerated."""
    z0, z = require_inside(spec, z0), require_inside(spec, z)
    ray = geodesic_ray(spec, z0, end)
    u, u0 = complex(spec.to_hub(z)), complex(spec.to_hub(z0))
    w = ray.hub_param(np.arange(1, terms + 1, dtype=float))
    seq = _k_halfplane(u, w) - _k_halfplane(u0, w)
    a, b, c = seq[-3:]
    den = (c - b) - (b - a)
    if den == 0 or not np.isfinite(den):
        return float(c)
    return float(c - (c - b) ** 2 / den)


class Membership(enum.Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    BOUNDARY = "boundary-indeterminate"


@dataclass(frozen=True)
class GeneralHorocycle:
    domain: DomainSpec
    center: PrimeEndRef
    base: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidArgument("horocycle radius must be positive")
        object.__setattr__(self, "base", require_inside(self.domain, self.base))
        self.domain.check_end(self.center)

    @property
    def threshold(self):
        return 0.5 * math.log(self.radius)


def horocycle_contains(h, z):
    return busemann(h.domain, h.base, h.center, z) < h.threshold


def horocycle_membership(h, z, band=BAND):
    gap = busemann(h.domain, h.base, h.center, z) - h.threshold
    if abs(gap) <= band:
        return Membership.BOUNDARY
    return Membership.INSIDE if gap < 0 else Membership.OUTSIDE


def basepoint_shift(spec, z0, z1, end):
    """A with ``E_{z0}(end, R) = E_{z1}(end, A R)``."""
    return math.exp(2.0 * busemann(spec, z1, end, z0))


def sample_horocycle(h, n, rng):
    """Random points of ``h``, dense both near its boundary and near its center."""
    spec = h.domain
    hub_end = spec.end_to_hub(h.center)
    u0 = complex(spec.to_hub(h.base))
    if hub_end[0] == "infinity":
        v0 = u0
    else:
        v0 = 1.0 / (u0 - 1j * hub_end[1])
    # in coordinates where the center is at infinity the horocycle is {Re v > c}
    c = v0.real / h.radius
    re = c * (1.0 + np.exp(rng.uniform(-14.0, 8.0, n)))
    im = v0.imag + c * np.sinh(rng.uniform(-10.0, 10.0, n))
    v = re + 1j * im
    u = v if hub_end[0] == "infinity" else 1j * hub_end[1] + 1.0 / v
    return spec.from_hub(u)


def horocycle_invariance_check(cmap, h, samples=10_000, seed=0, band=BAND):
    """Count membership disagreements between ``h`` and its image under ``cmap``.

    Points whose Busemann value (on either side) lies within ``band`` of the
    threshold are not counted.
    """
    if h.domain != cmap.source:
        raise InvalidArgument("horocycle must live in the map's source domain")
    rng = np.random.default_rng(seed)
    zs = sample_interior(h.domain, samples, rng)
    zs = zs[np.asarray(h.domain.contains(zs), dtype=bool)]
    image = GeneralHorocycle(cmap.target, prime_end_image(cmap, h.center),
                             complex(cmap.forward(h.base)), h.radius)
    before = busemann_many(h.domain, h.base, h.center, zs) - h.threshold
    after = busemann_many(image.domain, image.base, image.center, cmap.forward(zs)) - image.threshold
    decided = (np.abs(before) > band) & (np.abs(after) > band)
    return int(np.count_nonzero((before < 0)[decided] != (after < 0)[decided]))

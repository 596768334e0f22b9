"""Explicit constants controlling sectors of the half-plane, with Monte Carlo checks.

``step1_bound(beta)`` bounds the distance between two points of equal modulus
``rho >= 2`` inside the sector ``V(beta)``, measured in ``H + 1``.
``step2_threshold(beta)`` is the abscissa beyond which geodesics of a domain
squeezed between ``H + 1`` and ``H`` joining real points stay in ``V(beta)``.
"""

import math

import numpy as np

from .atlas import RightHalfPlane, ShiftedHalfPlane
from .errors import InvalidArgument
from .metric import geodesic_join, hub_distances
from .models import _k_halfplane, sector_contains

_STEP1_FACTOR = math.sqrt((5.0 - 2.0 * math.sqrt(2.0)) / (3.0 - 2.0 * math.sqrt(2.0)))


def step1_angle(beta):
    """Half-angle of the arc ``{e^{i theta}: |theta| <= theta_max}`` used in the bound."""
    if not 0 < beta < math.pi / 4:
        raise InvalidArgument("beta must lie in (0, pi/4)")
    return math.asin(2.0 * math.sin(beta) / abs(2.0 * np.exp(1j * beta) - 1.0))


def step1_bound(beta):
    """K(beta); decreases to 0 with beta."""
    theta = step1_angle(beta)
    across = float(_k_halfplane(np.exp(1j * theta), np.exp(-1j * theta)))
    return 2.0 * across + 2.0 * _STEP1_FACTOR * math.log(abs(2.0 * np.exp(1j * beta) - 1.0))


def step1_monte_carlo(beta, n=1000, seed=0, rho_max=1e6):
    """Largest observed ``k_{H+1}(rho e^{i t0}, rho e^{i t1})`` and K(beta).

    ``rho`` is log-uniform on ``[2, rho_max]`` and the angles uniform on
    ``[-beta, beta]``.
    """
    bound = step1_bound(beta)
    rng = np.random.default_rng(seed)
    rho = np.exp(rng.uniform(math.log(2.0), math.log(rho_max), n))
    t0 = rng.uniform(-beta, beta, n)
    t1 = rng.uniform(-beta, beta, n)
    spec = ShiftedHalfPlane(1.0)
    d = hub_distances(spec, rho * np.exp(1j * t0), rho * np.exp(1j * t1))
    return float(np.max(d)), bound


def step2_threshold(beta):
    """``1 / sin(beta)^2``."""
    if not 0 < beta < math.pi / 2:
        raise InvalidArgument("beta must lie in (0, pi/2)")
    return 1.0 / math.sin(beta) ** 2


def step2_domains():
    """Closed-form domains between ``H + 1`` and ``H`` available in the catalog."""
    return [ShiftedHalfPlane(1.0), RightHalfPlane()]


def step2_sandwich(beta, pairs=100, seed=0, samples=33, domains=None):
    """Count geodesic samples escaping ``V(beta)`` for random ``alpha <= x0 < x1``."""
    alpha = step2_threshold(beta)
    rng = np.random.default_rng(seed)
    escapes = 0
    checked = 0
    for spec in domains or step2_domains():
        x = alpha * np.exp(rng.uniform(0.0, 8.0, (pairs, 2)))
        for x0, x1 in np.sort(x, axis=1):
            if x0 == x1:
                continue
            curve = geodesic_join(spec, complex(x0), complex(x1), samples)
            escapes += sum(not sector_contains(beta, p) for p in curve.points)
            checked += len(curve)
    return escapes, checked

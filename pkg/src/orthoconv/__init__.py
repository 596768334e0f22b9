"""Orthogonal convergence toward boundary points of planar domains.

Hyperbolic geometry of the disc and half-plane models, a catalog of simply
connected domains with closed-form Riemann maps, horocycles, a ray-distance
criterion for orthogonal convergence, and parabolic semigroups.
"""

from .atlas import (
    AffineImage, ConformalMap, Disc, DomainSpec, KoebeSlit, PrimeEndRef, RightHalfPlane,
    Sector, ShiftedHalfPlane, UpperHalfPlane, atlas_map, domain_contains, parse_domain,
    parse_end, prime_end_image, starlike_at_infinity,
)
from .errors import OrthoconvError
from .horocycles import (
    GeneralHorocycle, Membership, basepoint_shift, busemann, horocycle_contains,
    horocycle_membership,
)
from .metric import (
    dist_to_ray, geodesic_join, geodesic_ray, pull_distance, qg_certify, shadowing_gap,
)
from .models import (
    SampledCurve, curve_length, dist_disc, dist_halfplane, geodesic_model, hyperbolic_density,
    orthogonality_angle,
)
from .orthogonality import SandwichScenario, betsakos_scenario, classify, verify_direct
from .semigroups import KoenigsModel, corollary_runner, dw_point, evolve, slope_trace

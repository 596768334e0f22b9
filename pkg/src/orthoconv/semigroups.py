"""Parabolic semigroups of the disc through their Koenigs models.

A domain ``omega`` starlike at infinity (``omega + it`` inside ``omega`` for
t >= 0) with Riemann map ``h: D -> omega`` defines the semigroup
``phi_t = h^{-1}(h + it)``.
"""

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .atlas import (
    AffineImage, Disc, DomainSpec, KoebeSlit, PrimeEndRef, RightHalfPlane, Sector,
    UpperHalfPlane, atlas_map, prime_end_image, starlike_at_infinity,
)
from .errors import CorollaryViolation, EstimationFailure, InvalidArgument, ModelInconsistency
from .models import as_disc_point
from .orthogonality import (
    SandwichScenario, _aitken, classify, direct_angles, fit_horocycle_radius,
)

SLOPE_TOL = 0.05
SLOPE_TAIL = 5
DW_TIMES = 10.0 ** np.arange(2, 9)


@dataclass(frozen=True, eq=False)
class KoenigsModel:
    omega: DomainSpec
    h: object = field(default=None, repr=False)
    dw_estimate: Optional[complex] = None

    def __post_init__(self):
        if not starlike_at_infinity(self.omega):
            raise InvalidArgument(f"{self.omega.serialize()} is not starlike at infinity")
        if self.h is None:
            object.__setattr__(self, "h", atlas_map(Disc(), self.omega))

    def with_dw(self):
        """Copy carrying the estimated Denjoy-Wolff point."""
        return KoenigsModel(self.omega, self.h, dw_point(self))


def _image(model, z, t):
    w = complex(model.h.forward(as_disc_point(z)))
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise InvalidArgument("semigroup time must be nonnegative")
    target = w + 1j * t
    if not np.all(model.omega.contains(target)):
        raise ModelInconsistency(f"h(z) + it leaves {model.omega.serialize()}")
    return target


def evolve(model, z, t, strict=True):
    """``phi_t(z) = h^{-1}(h(z) + it)``; t may be an array.

    With ``strict`` a result rounded onto the unit circle is an error.
    """
    if np.ndim(t) == 0 and t == 0:
        return as_disc_point(z)
    out = np.asarray(model.h.inverse(_image(model, z, t)), dtype=complex)
    if strict and not np.all(np.abs(out) < 1.0):
        raise ModelInconsistency("trajectory left the unit disc")
    return complex(out) if out.ndim == 0 else out


def dw_point(model, times=DW_TIMES, stop=1e-8):
    """Denjoy-Wolff point as the limit of ``phi_t(0)``, projected to the circle.

    Successive projected estimates are Aitken-accelerated; the estimate is
    accepted once two accelerated values differ by less than ``stop``, and it
    must agree with the image of omega's point at infinity.
    """
    # far along, phi_t(0) may round onto the circle; only its direction is used
    pts = np.atleast_1d(evolve(model, 0.0, np.asarray(times, dtype=float), strict=False))
    est = pts / np.abs(pts)
    acc = [est[0], est[1]] + [_aitken(*est[i - 2:i + 1]) for i in range(2, len(est))]
    if abs(acc[-1] - acc[-2]) >= stop:
        raise EstimationFailure(
            f"Denjoy-Wolff estimates still moving by {abs(acc[-1] - acc[-2]):.3g}")
    tau = complex(acc[-1] / abs(acc[-1]))
    infinity = PrimeEndRef.infinity(model.omega.canonical_infinity)
    end = prime_end_image(atlas_map(model.omega, Disc()), infinity)
    if abs(end.point - tau) > 1e-6:
        raise ModelInconsistency(
            f"estimated tau {tau!r} disagrees with the image of infinity {end.point!r}")
    return end.point if abs(end.point - tau) < stop else tau


@dataclass(frozen=True, eq=False)
class SlopeTrace:
    times: np.ndarray
    points: np.ndarray
    angles: np.ndarray
    start: complex
    tau: complex
    kind: str  # "orthogonal" | "tangential" | "undetermined"
    sign: int = 0

    def label(self):
        if self.kind == "tangential":
            return "tangential+" if self.sign > 0 else "tangential-"
        return self.kind

    def tail_angle(self, tail=SLOPE_TAIL):
        return float(np.max(np.abs(self.angles[-tail:])))

    def rows(self):
        for t, p, a in zip(self.times, self.points, self.angles):
            yield float(t), float(p.real), float(p.imag), float(a)


def classify_angles(angles, tol=SLOPE_TOL, tail=SLOPE_TAIL):
    a = np.asarray(angles)[-tail:]
    if np.all(np.abs(a) < tol):
        return "orthogonal", 0
    signs = np.sign(a)
    if np.all(np.abs(a) > math.pi / 2 - tol) and np.all(signs == signs[0]):
        return "tangential", int(signs[0])
    return "undetermined", 0


def slope_trace(model, z, t_min=1.0, t_max=1e6, samples=40, tau=None,
                tol=SLOPE_TOL, tail=SLOPE_TAIL):
    """Angles ``arg(1 - conj(tau) phi_t(z))`` at log-spaced times."""
    if not 0 < t_min < t_max:
        raise InvalidArgument("need 0 < t_min < t_max")
    if samples < 8:
        raise InvalidArgument("slope traces need at least 8 samples")
    if not 1 <= tail <= samples:
        raise InvalidArgument("tail must be between 1 and the number of samples")
    z = as_disc_point(z)
    if tau is None:
        tau = model.dw_estimate if model.dw_estimate is not None else dw_point(model)
    times = np.geomspace(t_min, t_max, samples)
    points = evolve(model, z, times)
    angles = direct_angles(model.omega, tau, _image(model, z, times))
    kind, sign = classify_angles(angles, tol, tail)
    return SlopeTrace(times, points, angles, z, tau, kind, sign)


def write_trace_csv(trace, fh=None):
    """Write ``t, re_phi, im_phi, angle``; returns the text when ``fh`` is None."""
    out = fh if fh is not None else io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["t", "re_phi", "im_phi", "angle"])
    for row in trace.rows():
        w.writerow([format(v, ".17g") for v in row])
    return out.getvalue() if fh is None else None


# --- corollary runners ----------------------------------------------------------

def corollary_domains(case, a=0.0, beta=math.pi / 4, p=0j):
    """(omega, outer) for the three sandwich cases.

    1: ``UpperHalfPlane + ia`` inside the upper half-plane;
    2: ``i V(beta) + ia`` inside ``i V(beta)``;
    3: ``KoebeSlit(p)`` with itself as outer domain.
    """
    if a < 0:
        raise InvalidArgument("shift a must be nonnegative")
    if case == 1:
        outer = UpperHalfPlane()
    elif case == 2:
        outer = Sector(beta, 1j)
    elif case == 3:
        outer = KoebeSlit(complex(p))
        return outer, outer
    else:
        raise InvalidArgument(f"unknown corollary case {case!r}")
    omega = outer if a == 0 else AffineImage(outer, 1.0, 1j * a)
    return omega, outer


@dataclass(frozen=True, eq=False)
class CorollaryReport:
    case: int
    omega: DomainSpec
    outer: DomainSpec
    tau: complex
    traces: list
    verdicts: list

    @property
    def ok(self):
        return all(tr.kind == "orthogonal" for tr in self.traces) and all(
            v.is_orthogonal for v in self.verdicts)

    def summary(self):
        return {
            "case": self.case,
            "omega": self.omega.serialize(),
            "outer": self.outer.serialize(),
            "tau": [self.tau.real, self.tau.imag],
            "starts": [[tr.start.real, tr.start.imag] for tr in self.traces],
            "slope": [tr.label() for tr in self.traces],
            "tail_angle": [tr.tail_angle() for tr in self.traces],
            "criterion": [v.label() for v in self.verdicts],
            "tail_distance": [v.tail_distance for v in self.verdicts],
            "ok": self.ok,
        }


def corollary_runner(case, starts, a=0.0, beta=math.pi / 4, p=0j, t_min=1.0, t_max=1e6,
                     samples=40, tol=SLOPE_TOL, tail=SLOPE_TAIL, samples_mc=10_000, seed=0):
    """Run one sandwich case for every start and cross-check with :func:`classify`.

    Raises CorollaryViolation (carrying the report) when any start fails.
    """
    omega, outer = corollary_domains(case, a, beta, p)
    model = KoenigsModel(omega).with_dw()
    center = PrimeEndRef.infinity(outer.canonical_infinity)
    traces, verdicts = [], []
    for z in starts:
        tr = slope_trace(model, z, t_min, t_max, samples, tol=tol, tail=tail)
        traces.append(tr)
        base = complex(model.h.forward(tr.start))
        seq = _image(model, tr.start, tr.times)
        radius = fit_horocycle_radius(omega, outer, center, base, samples_mc, seed)
        scenario = SandwichScenario(omega, outer, center, radius, seq, base,
                                    witness=f"case {case} sandwich")
        verdicts.append(classify(scenario, samples=samples_mc, seed=seed))
    report = CorollaryReport(case, omega, outer, model.dw_estimate, traces, verdicts)
    if not report.ok:
        bad = [str(tr.start) for tr, v in zip(traces, verdicts)
               if tr.kind != "orthogonal" or not v.is_orthogonal]
        raise CorollaryViolation(f"non-orthogonal trajectories from {', '.join(bad)}", report)
    return report


def tangential_control(starts=(0j,), t_min=1.0, t_max=1e6, samples=40):
    """Traces of the positive-hyperbolic-step model ``h = Cayley`` on the right half-plane."""
    model = KoenigsModel(RightHalfPlane()).with_dw()
    return [slope_trace(model, z, t_min, t_max, samples) for z in starts]

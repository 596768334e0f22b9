"""Catalog of simply connected domains with closed-form Riemann maps.

Every domain knows its map from the right half-plane (the hub), the inverse,
and the derivative; maps between two catalog domains are always composed
through the hub. Prime ends are symbolic: a boundary point (with a side tag on
the two-sided Koebe slit) or an access to infinity.
"""

import math
import re
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError, DomainViolation, IllegalPrimeEnd, InvalidArgument, UnsupportedPair
from .models import cayley, cayley_inverse

END_TOL = 1e-9
MAX_AFFINE_DEPTH = 4


def fmt_real(x):
    """Shortest round-trip decimal; integral values print without a fraction."""
    x = float(x)
    if x == 0:
        return "0"
    if x.is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


# --- prime ends ----------------------------------------------------------------

@dataclass(frozen=True)
class PrimeEndRef:
    """``kind`` is ``"finite"`` (boundary ``point``, optional side ``tag``) or
    ``"infinity"`` (``tag`` names the access to infinity)."""

    kind: str
    point: Optional[complex] = None
    tag: Optional[str] = None

    @classmethod
    def finite(cls, point, side=None):
        return cls("finite", complex(point), side)

    @classmethod
    def infinity(cls, tag="infinity"):
        return cls("infinity", None, tag)

    @property
    def is_infinity(self):
        return self.kind == "infinity"

    def matches(self, other, tol=1e-9):
        if self.kind != other.kind:
            return False
        if self.is_infinity:
            return True
        same_side = self.tag == other.tag or self.tag is None or other.tag is None
        return same_side and abs(self.point - other.point) <= tol * (1 + abs(self.point))

    def serialize(self):
        if self.is_infinity:
            return self.tag
        p = self.point
        side = f",side:{self.tag}" if self.tag else ""
        return f"finite{{re:{fmt_real(p.real)},im:{fmt_real(p.imag)}{side}}}"


# hub ends: ("infinity",) or ("finite", y) meaning the boundary point iy
_HUB_INF = ("infinity",)


def _hub_finite(y):
    y = float(y)
    return ("finite", 0.0 if abs(y) < 1e-14 else y)


# --- domains ---------------------------------------------------------------------

class DomainSpec:
    """Base class of the catalog variants.

    ``from_hub`` maps the right half-plane onto the domain, ``to_hub`` inverts
    it. All evaluators accept numpy arrays.
    """

    infinity_tags = ("infinity",)

    def from_hub(self, u):
        raise NotImplementedError

    def from_hub_derivative(self, u):
        raise NotImplementedError

    def to_hub(self, z):
        raise NotImplementedError

    def contains(self, z):
        raise NotImplementedError

    def invariant_direction(self, d):
        """True iff ``self + s*d`` is inside ``self`` for every ``s >= 0``."""
        raise NotImplementedError

    def semistrip(self):
        """(a, b, c) with the boundary inside ``{a<Re<b, Im<c}``, or None."""
        return None

    # prime ends
    def end_to_hub(self, end):
        raise NotImplementedError

    def end_from_hub(self, hub_end):
        raise NotImplementedError

    @property
    def canonical_infinity(self):
        return self.infinity_tags[0] if self.infinity_tags else None

    def check_end(self, end):
        if end.is_infinity:
            if not self.infinity_tags or end.tag not in self.infinity_tags + ("infinity",):
                raise IllegalPrimeEnd(f"{end.serialize()} is not a prime end of {self.serialize()}")
            return
        self._check_finite_end(end)

    def _check_finite_end(self, end):
        raise NotImplementedError

    def to_hub_derivative(self, z):
        return 1.0 / self.from_hub_derivative(self.to_hub(z))

    def serialize(self):
        raise NotImplementedError

    def __str__(self):
        return self.serialize()


def _near(a, b):
    return abs(a - b) <= END_TOL * (1 + abs(a) + abs(b))


@dataclass(frozen=True)
class Disc(DomainSpec):
    infinity_tags = ()

    def from_hub(self, u):
        return cayley_inverse(u)

    def from_hub_derivative(self, u):
        u = np.asarray(u, dtype=complex)
        return 2.0 / (u + 1.0) ** 2

    def to_hub(self, z):
        return cayley(z)

    def contains(self, z):
        return np.abs(z) < 1.0

    def invariant_direction(self, d):
        return False

    def _check_finite_end(self, end):
        if not _near(abs(end.point), 1.0):
            raise IllegalPrimeEnd(f"{end.point!r} is not on the unit circle")

    def end_to_hub(self, end):
        self.check_end(end)
        sigma = end.point / abs(end.point)
        if _near(sigma, 1.0):
            return _HUB_INF
        # cayley(e^{i t}) = i cot(t/2)
        return _hub_finite(1.0 / math.tan(np.angle(sigma) / 2.0))

    def end_from_hub(self, hub_end):
        if hub_end == _HUB_INF:
            return PrimeEndRef.finite(1.0)
        sigma = complex(cayley_inverse(1j * hub_end[1]))
        return PrimeEndRef.finite(sigma / abs(sigma))

    def serialize(self):
        return "disc"


@dataclass(frozen=True)
class RightHalfPlane(DomainSpec):
    def from_hub(self, u):
        return np.asarray(u, dtype=complex)

    def from_hub_derivative(self, u):
        return np.ones_like(np.asarray(u, dtype=complex))

    def to_hub(self, z):
        return np.asarray(z, dtype=complex)

    def contains(self, z):
        return np.real(z) > 0

    def invariant_direction(self, d):
        return d.real >= -1e-15

    def _check_finite_end(self, end):
        if not _near(end.point.real, 0.0):
            raise IllegalPrimeEnd(f"{end.point!r} is not on the imaginary axis")

    def end_to_hub(self, end):
        self.check_end(end)
        return _HUB_INF if end.is_infinity else _hub_finite(end.point.imag)

    def end_from_hub(self, hub_end):
        if hub_end == _HUB_INF:
            return PrimeEndRef.infinity(self.canonical_infinity)
        return PrimeEndRef.finite(1j * hub_end[1])

    def serialize(self):
        return "halfplane"


@dataclass(frozen=True)
class UpperHalfPlane(DomainSpec):
    def from_hub(self, u):
        return 1j * np.asarray(u, dtype=complex)

    def from_hub_derivative(self, u):
        return 1j * np.ones_like(np.asarray(u, dtype=complex))

    def to_hub(self, z):
        return -1j * np.asarray(z, dtype=complex)

    def contains(self, z):
        return np.imag(z) > 0

    def invariant_direction(self, d):
        return d.imag >= -1e-15

    def _check_finite_end(self, end):
        if not _near(end.point.imag, 0.0):
            raise IllegalPrimeEnd(f"{end.point!r} is not on the real axis")

    def end_to_hub(self, end):
        self.check_end(end)
        return _HUB_INF if end.is_infinity else _hub_finite(-end.point.real)

    def end_from_hub(self, hub_end):
        if hub_end == _HUB_INF:
            return PrimeEndRef.infinity(self.canonical_infinity)
        return PrimeEndRef.finite(-hub_end[1])

    def serialize(self):
        return "upper_halfplane"


@dataclass(frozen=True)
class ShiftedHalfPlane(DomainSpec):
    """``{Re z > offset}``."""

    offset: float = 1.0

    def __post_init__(self):
        if not self.offset > 0:
            raise InvalidArgument("shifted half-plane offset must be positive")

    def from_hub(self, u):
        return np.asarray(u, dtype=complex) + self.offset

    def from_hub_derivative(self, u):
        return np.ones_like(np.asarray(u, dtype=complex))

    def to_hub(self, z):
        return np.asarray(z, dtype=complex) - self.offset

    def contains(self, z):
        return np.real(z) > self.offset

    def invariant_direction(self, d):
        return d.real >= -1e-15

    def _check_finite_end(self, end):
        if not _near(end.point.real, self.offset):
            raise IllegalPrimeEnd(f"{end.point!r} is not on Re z = {self.offset}")

    def end_to_hub(self, end):
        self.check_end(end)
        return _HUB_INF if end.is_infinity else _hub_finite(end.point.imag)

    def end_from_hub(self, hub_end):
        if hub_end == _HUB_INF:
            return PrimeEndRef.infinity(self.canonical_infinity)
        return PrimeEndRef.finite(self.offset + 1j * hub_end[1])

    def serialize(self):
        return f"shifted_halfplane{{a:{fmt_real(self.offset)}}}"


@dataclass(frozen=True)
class Sector(DomainSpec):
    """``rotation * V(half_angle)``, reached from the hub by ``u**(2*half_angle/pi)``."""

    half_angle: float = math.pi / 4
    rotation: complex = 1.0

    def __post_init__(self):
        if not 0 < self.half_angle <= math.pi / 2:
            raise InvalidArgument("sector half-angle must lie in (0, pi/2]")
        rot = complex(self.rotation)
        if abs(abs(rot) - 1.0) > 1e-12:
            raise InvalidArgument("sector rotation must be a unit complex number")
        object.__setattr__(self, "rotation", rot)

    @property
    def exponent(self):
        return 2.0 * self.half_angle / math.pi

    def from_hub(self, u):
        return self.rotation * np.power(np.asarray(u, dtype=complex), self.exponent)

    def from_hub_derivative(self, u):
        u = np.asarray(u, dtype=complex)
        k = self.exponent
        return self.rotation * k * np.power(u, k - 1.0)

    def to_hub(self, z):
        return np.power(np.asarray(z, dtype=complex) / self.rotation, 1.0 / self.exponent)

    def contains(self, z):
        w = np.asarray(z, dtype=complex) / self.rotation
        return (w != 0) & (np.abs(np.angle(w)) < self.half_angle)

    def invariant_direction(self, d):
        return abs(np.angle(d / self.rotation)) <= self.half_angle + 1e-15

    def _check_finite_end(self, end):
        w = end.point / self.rotation
        if abs(w) <= END_TOL:
            return
        if not _near(abs(np.angle(w)), self.half_angle):
            raise IllegalPrimeEnd(f"{end.point!r} is not on the sector boundary")

    def end_to_hub(self, end):
        self.check_end(end)
        if end.is_infinity:
            return _HUB_INF
        w = end.point / self.rotation
        if abs(w) <= END_TOL:
            return _hub_finite(0.0)
        return _hub_finite(math.copysign(abs(w) ** (1.0 / self.exponent), np.angle(w)))

    def end_from_hub(self, hub_end):
        if hub_end == _HUB_INF:
            return PrimeEndRef.infinity(self.canonical_infinity)
        y = hub_end[1]
        if y == 0:
            return PrimeEndRef.finite(0.0)
        p = self.rotation * abs(y) ** self.exponent * np.exp(1j * math.copysign(self.half_angle, y))
        return PrimeEndRef.finite(p)

    def serialize(self):
        r = self.rotation
        return (f"sector{{beta:{fmt_real(self.half_angle)},"
                f"rot_re:{fmt_real(r.real)},rot_im:{fmt_real(r.imag)}}}")


@dataclass(frozen=True)
class KoebeSlit(DomainSpec):
    """The plane minus the downward ray ``{tip - i s: s >= 0}``; hub map ``tip + i u^2``."""

    tip: complex = 0j
    infinity_tags = ("upward",)

    def __post_init__(self):
        object.__setattr__(self, "tip", complex(self.tip))

    def from_hub(self, u):
        u = np.asarray(u, dtype=complex)
        return self.tip + 1j * u * u

    def from_hub_derivative(self, u):
        return 2j * np.asarray(u, dtype=complex)

    def to_hub(self, z):
        return np.sqrt(-1j * (np.asarray(z, dtype=complex) - self.tip))

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        return ~((z.real == self.tip.real) & (z.imag <= self.tip.imag))

    def invariant_direction(self, d):
        return abs(np.angle(d) - math.pi / 2) <= 1e-12

    def semistrip(self):
        p = self.tip
        return (p.real - 1.0, p.real + 1.0, p.imag + 1.0)

    def _check_finite_end(self, end):
        p = end.point
        if not (_near(p.real, self.tip.real) and p.imag <= self.tip.imag + END_TOL):
            raise IllegalPrimeEnd(f"{p!r} is not on the slit")
        at_tip = _near(p, self.tip)
        if not at_tip and end.tag not in ("left", "right"):
            raise IllegalPrimeEnd("slit points need a side tag 'left' or 'right'")

    def end_to_hub(self, end):
        self.check_end(end)
        if end.is_infinity:
            return _HUB_INF
        if _near(end.point, self.tip):
            return _hub_finite(0.0)
        s = max(self.tip.imag - end.point.imag, 0.0)
        return _hub_finite(math.sqrt(s) if end.tag == "left" else -math.sqrt(s))

    def end_from_hub(self, hub_end):
        if hub_end == _HUB_INF:
            return PrimeEndRef.infinity(self.canonical_infinity)
        y = hub_end[1]
        if y == 0:
            return PrimeEndRef.finite(self.tip)
        return PrimeEndRef.finite(self.tip - 1j * y * y, "left" if y > 0 else "right")

    def serialize(self):
        return f"koebe_slit{{p_re:{fmt_real(self.tip.real)},p_im:{fmt_real(self.tip.imag)}}}"


@dataclass(frozen=True)
class AffineImage(DomainSpec):
    """``scale * base + translation``."""

    base: DomainSpec = RightHalfPlane()
    scale: complex = 1.0
    translation: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "scale", complex(self.scale))
        object.__setattr__(self, "translation", complex(self.translation))
        if self.scale == 0:
            raise InvalidArgument("affine scale must be nonzero")
        if self.depth > MAX_AFFINE_DEPTH:
            raise InvalidArgument(f"affine nesting deeper than {MAX_AFFINE_DEPTH}")

    @property
    def depth(self):
        return 1 + (self.base.depth if isinstance(self.base, AffineImage) else 0)

    @property
    def infinity_tags(self):
        return self.base.infinity_tags

    def _pull(self, z):
        return (np.asarray(z, dtype=complex) - self.translation) / self.scale

    def from_hub(self, u):
        return self.scale * self.base.from_hub(u) + self.translation

    def from_hub_derivative(self, u):
        return self.scale * self.base.from_hub_derivative(u)

    def to_hub(self, z):
        return self.base.to_hub(self._pull(z))

    def contains(self, z):
        return self.base.contains(self._pull(z))

    def invariant_direction(self, d):
        return self.base.invariant_direction(d / self.scale)

    def semistrip(self):
        inner = self.base.semistrip()
        if inner is None or abs(np.angle(self.scale)) > 1e-15:
            return None
        a, b, c = inner
        k, t = self.scale.real, self.translation
        return (k * a + t.real, k * b + t.real, k * c + t.imag)

    def _base_end(self, end):
        if end.is_infinity:
            return end
        return PrimeEndRef.finite(complex(self._pull(end.point)), end.tag)

    def check_end(self, end):
        self.base.check_end(self._base_end(end))

    def end_to_hub(self, end):
        return self.base.end_to_hub(self._base_end(end))

    def end_from_hub(self, hub_end):
        e = self.base.end_from_hub(hub_end)
        if e.is_infinity:
            return e
        return PrimeEndRef.finite(self.scale * e.point + self.translation, e.tag)

    def serialize(self):
        s, t = self.scale, self.translation
        return (f"affine{{base:{self.base.serialize()},scale_re:{fmt_real(s.real)},"
                f"scale_im:{fmt_real(s.imag)},t_re:{fmt_real(t.real)},t_im:{fmt_real(t.imag)}}}")


# --- conformal maps ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ConformalMap:
    source: DomainSpec
    target: DomainSpec
    forward: Callable
    inverse: Callable
    derivative: Callable


def atlas_map(source, target):
    """Biholomorphism ``source -> target`` routed through the right half-plane."""
    for spec in (source, target):
        if not isinstance(spec, DomainSpec):
            raise UnsupportedPair(f"{spec!r} is not a catalog domain")

    def forward(z):
        return target.from_hub(source.to_hub(z))

    def inverse(w):
        return source.from_hub(target.to_hub(w))

    def derivative(z):
        u = source.to_hub(z)
        return target.from_hub_derivative(u) / source.from_hub_derivative(u)

    return ConformalMap(source, target, forward, inverse, derivative)


def prime_end_image(cmap, end):
    return cmap.target.end_from_hub(cmap.source.end_to_hub(end))


def starlike_at_infinity(spec):
    """Whether ``spec + i t`` stays inside ``spec`` for all ``t >= 0``."""
    return bool(spec.invariant_direction(1j))


def domain_contains(spec, z):
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        return False
    return bool(spec.contains(z))


def require_inside(spec, z):
    z = complex(z)
    if not domain_contains(spec, z):
        raise DomainViolation(f"{z!r} is not inside {spec.serialize()}")
    return z


def require_all_inside(spec, zs):
    zs = np.asarray(zs, dtype=complex)
    ok = np.isfinite(zs.real) & np.isfinite(zs.imag) & spec.contains(zs)
    if not np.all(ok):
        bad = zs[~ok].ravel()[0]
        raise DomainViolation(f"{complex(bad)!r} is not inside {spec.serialize()}")
    return zs


def on_boundary(spec, p):
    """True iff p is outside ``spec`` but has interior points arbitrarily close."""
    p = complex(p)
    if domain_contains(spec, p):
        return False
    eps = 1e-9 * (1 + abs(p))
    probes = p + eps * np.exp(2j * np.pi * np.arange(16) / 16)
    return bool(np.any(spec.contains(probes)))


def sample_interior(spec, n, rng, spread=1.5, max_angle=1.45):
    """Random interior points: log-normal modulus and uniform angle in the hub."""
    r = np.exp(rng.normal(0.0, spread, n))
    theta = rng.uniform(-max_angle, max_angle, n)
    return spec.from_hub(r * np.exp(1j * theta))


# --- textual grammar ----------------------------------------------------------------

_NAME = re.compile(r"[a-z_]+")
_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|[+-]?(?:inf|pi)")

_FIELDS = {
    "disc": (),
    "halfplane": (),
    "right_halfplane": (),
    "upper_halfplane": (),
    "shifted_halfplane": ("a",),
    "sector": ("beta", "rot_re", "rot_im"),
    "koebe_slit": ("p_re", "p_im"),
    "affine": ("base", "scale_re", "scale_im", "t_re", "t_im"),
}
_DEFAULTS = {
    "shifted_halfplane": {"a": 1.0},
    "sector": {"rot_re": 1.0, "rot_im": 0.0},
    "koebe_slit": {"p_re": 0.0, "p_im": 0.0},
    "affine": {"scale_re": 1.0, "scale_im": 0.0, "t_re": 0.0, "t_im": 0.0},
}


def parse_number(text, column=1):
    text = text.strip()
    sign = -1.0 if text.startswith("-") else 1.0
    body = text.lstrip("+-")
    if body == "pi":
        return sign * math.pi
    m = re.fullmatch(r"pi/(\d+(?:\.\d*)?)", body)
    if m:
        return sign * math.pi / float(m.group(1))
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"bad number {text!r}", column=column) from None
    if not math.isfinite(value):
        raise ConfigError(f"non-finite number {text!r}", column=column)
    return value


class _Cursor:
    def __init__(self, text, offset):
        self.text = text
        self.pos = 0
        self.offset = offset

    def error(self, message):
        raise ConfigError(message, column=self.offset + self.pos + 1)

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def name(self):
        m = _NAME.match(self.text, self.pos)
        if not m:
            self.error("expected a name")
        self.pos = m.end()
        return m.group(0)

    def atom(self):
        start = self.pos
        depth = 0
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "{":
                depth += 1
            elif ch == "}":
                if depth == 0:
                    break
                depth -= 1
            elif ch == "," and depth == 0:
                break
            self.pos += 1
        return self.text[start:self.pos], start


def _parse_spec(cur, depth=0):
    name = cur.name()
    if name not in _FIELDS:
        cur.error(f"unknown domain variant {name!r}")
    values = dict(_DEFAULTS.get(name, {}))
    seen = set()
    if cur.peek() == "{":
        cur.expect("{")
        while cur.peek() != "}":
            start = cur.pos
            key = cur.name()
            if key not in _FIELDS[name] or key in seen:
                cur.pos = start
                cur.error(f"unknown or repeated key {key!r} for {name}")
            seen.add(key)
            cur.expect(":")
            if key == "base":
                if depth >= MAX_AFFINE_DEPTH:
                    cur.error("affine nesting too deep")
                values[key] = _parse_spec(cur, depth + 1)
            else:
                raw, start = cur.atom()
                values[key] = parse_number(raw, cur.offset + start + 1)
            if cur.peek() == ",":
                cur.pos += 1
        cur.expect("}")
    missing = [k for k in _FIELDS[name] if k not in values]
    if missing:
        cur.error(f"{name} is missing {', '.join(missing)}")
    try:
        return _build(name, values)
    except InvalidArgument as exc:
        cur.error(str(exc))


def _build(name, v):
    if name == "disc":
        return Disc()
    if name in ("halfplane", "right_halfplane"):
        return RightHalfPlane()
    if name == "upper_halfplane":
        return UpperHalfPlane()
    if name == "shifted_halfplane":
        return ShiftedHalfPlane(v["a"])
    if name == "sector":
        return Sector(v["beta"], complex(v["rot_re"], v["rot_im"]))
    if name == "koebe_slit":
        return KoebeSlit(complex(v["p_re"], v["p_im"]))
    return AffineImage(v["base"], complex(v["scale_re"], v["scale_im"]),
                       complex(v["t_re"], v["t_im"]))


def parse_domain(text, offset=0):
    """Parse the canonical textual form, e.g. ``koebe_slit{p_re:0,p_im:0}``."""
    cur = _Cursor(text.strip(), offset)
    spec = _parse_spec(cur)
    if cur.pos != len(cur.text):
        cur.error("trailing characters after domain")
    return spec


def parse_end(text, offset=0):
    """``infinity``/``upward`` or ``finite{re:..,im:..[,side:left|right]}``."""
    text = text.strip()
    if text in ("infinity", "upward"):
        return PrimeEndRef.infinity(text)
    m = re.fullmatch(r"finite\{re:([^,{}]+),im:([^,{}]+)(?:,side:(left|right))?\}", text)
    if not m:
        raise ConfigError(f"bad prime end {text!r}", column=offset + 1)
    return PrimeEndRef.finite(complex(parse_number(m.group(1)), parse_number(m.group(2))),
                              m.group(3))


def sample_boundary(spec, n, rng):
    """Random boundary points: images of the hub's imaginary axis."""
    y = np.sinh(rng.uniform(-12.0, 12.0, n))
    with np.errstate(all="ignore"):
        pts = spec.from_hub(1j * y)
    return pts[np.isfinite(pts.real) & np.isfinite(pts.imag)]

"""Scenario configuration: one scenario per line, ``command key=value ...``.

Values use the domain grammar of :mod:`orthoconv.atlas`, complex literals
``a+bi``, prime ends (``infinity``, ``upward``, ``finite{re:..,im:..}``) and
sequences such as ``vertical{n:50,t_max:1e6}``. Any value may be replaced by a
sweep: ``[v1;v2;...]``, ``linspace{start:..,stop:..,n:..}`` or
``logspace{start:..,stop:..,n:..}``. ``#`` starts a comment.
"""

import itertools
import math
import re
from dataclasses import dataclass, field

import numpy as np

from ..atlas import PrimeEndRef, fmt_real, parse_domain, parse_end, parse_number
from ..errors import ConfigError

MAX_CELLS = 10**6
MAX_SEED = 2**64 - 1
SEQ_KINDS = ("real", "vertical", "ray")
SEQ_FIELDS = ("n", "t_max", "theta", "offset_re", "offset_im")

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_IMAG = re.compile(rf"(?P<s>[+-]?)(?P<im>{_NUM})?i")
_CPLX = re.compile(rf"(?P<re>[+-]?{_NUM})(?:(?P<s>[+-])(?P<im>{_NUM})?i)?")


def parse_complex(text, column=1):
    """``a+bi``, ``a-bi``, ``a``, ``bi`` or ``i``."""
    m = _IMAG.fullmatch(text)
    if m:
        im = float(m.group("im") or 1.0)
        return complex(0.0, -im if m.group("s") == "-" else im)
    m = _CPLX.fullmatch(text)
    if not m:
        raise ConfigError(f"bad complex literal {text!r}", column=column)
    re_ = float(m.group("re"))
    if m.group("s") is None:
        return complex(re_, 0.0)
    im = float(m.group("im") or 1.0)
    return complex(re_, -im if m.group("s") == "-" else im)


def fmt_complex(z):
    z = complex(z)
    sign = "-" if math.copysign(1.0, z.imag) < 0 else "+"
    return f"{fmt_real(z.real)}{sign}{fmt_real(abs(z.imag))}i"


@dataclass(frozen=True)
class SeqSpec:
    kind: str
    n: int
    t_max: float = None
    theta: float = 0.0
    offset: complex = 0j

    def serialize(self):
        parts = [f"n:{self.n}"]
        if self.t_max is not None:
            parts.append(f"t_max:{fmt_real(self.t_max)}")
        if self.kind == "ray":
            parts.append(f"theta:{fmt_real(self.theta)}")
        if self.offset.real:
            parts.append(f"offset_re:{fmt_real(self.offset.real)}")
        if self.offset.imag:
            parts.append(f"offset_im:{fmt_real(self.offset.imag)}")
        return f"{self.kind}{{{','.join(parts)}}}"


def _braced_fields(text, column, allowed):
    m = re.fullmatch(r"([a-z_]+)\{(.*)\}", text)
    if not m:
        raise ConfigError(f"expected name{{key:value,...}}, got {text!r}", column=column)
    out = {}
    body = m.group(2)
    for item in filter(None, body.split(",")):
        key, sep, value = item.partition(":")
        if not sep or key not in allowed or key in out:
            raise ConfigError(f"unknown or repeated field {key!r}", column=column)
        out[key] = value
    return m.group(1), out


def parse_seq(text, column=1):
    if text in SEQ_KINDS:
        raise ConfigError(f"sequence {text!r} needs at least n", column=column)
    kind, f = _braced_fields(text, column, SEQ_FIELDS)
    if kind not in SEQ_KINDS:
        raise ConfigError(f"unknown sequence kind {kind!r}", column=column)
    if "n" not in f:
        raise ConfigError("sequence needs n", column=column)
    n = _parse_count(f["n"], column)
    if n < 2:
        raise ConfigError("sequence needs n >= 2", column=column)
    t_max = parse_number(f["t_max"], column) if "t_max" in f else None
    if t_max is not None and not t_max > 1:
        raise ConfigError("t_max must exceed 1", column=column)
    theta = parse_number(f.get("theta", "0"), column)
    offset = complex(parse_number(f.get("offset_re", "0"), column),
                     parse_number(f.get("offset_im", "0"), column))
    return SeqSpec(kind, n, t_max, theta, offset)


def _parse_count(text, column):
    if not re.fullmatch(r"\d+", text):
        raise ConfigError(f"expected a nonnegative integer, got {text!r}", column=column)
    return int(text)


# value types: name -> (parse(text, column), serialize(value))

def _positive(text, column):
    v = parse_number(text, column)
    if not v > 0:
        raise ConfigError(f"expected a positive number, got {text!r}", column=column)
    return v


def _count(text, column):
    v = _parse_count(text, column)
    if v < 1:
        raise ConfigError("expected a positive integer", column=column)
    return v


def _seed(text, column):
    v = _parse_count(text, column)
    if v > MAX_SEED:
        raise ConfigError("seed must fit in 64 bits", column=column)
    return v


def _complexes(text, column):
    if text.startswith("(") and text.endswith(")"):
        items = [s for s in text[1:-1].split(",") if s]
        if not items:
            raise ConfigError("empty point list", column=column)
        return tuple(parse_complex(s, column) for s in items)
    return parse_complex(text, column)


def _fmt_complexes(v):
    if isinstance(v, tuple):
        return "(" + ",".join(fmt_complex(z) for z in v) + ")"
    return fmt_complex(v)


def _domain_or_same(text, column):
    return "same" if text == "same" else parse_domain(text, column - 1)


def _radius(text, column):
    return "fit" if text == "fit" else _positive(text, column)


def _choice(*options):
    def parse(text, column):
        if text not in options:
            raise ConfigError(f"expected one of {', '.join(options)}, got {text!r}", column=column)
        return text
    return parse


TYPES = {
    "domain": (lambda t, c: parse_domain(t, c - 1), lambda v: v.serialize()),
    "domain_or_same": (_domain_or_same, lambda v: v if v == "same" else v.serialize()),
    "complex": (parse_complex, fmt_complex),
    "complexes": (_complexes, _fmt_complexes),
    "real": (parse_number, fmt_real),
    "positive": (_positive, fmt_real),
    "radius": (_radius, lambda v: v if v == "fit" else fmt_real(v)),
    "count": (_count, str),
    "seed": (_seed, str),
    "end": (lambda t, c: parse_end(t, c - 1), lambda v: v.serialize()),
    "seq": (parse_seq, lambda v: v.serialize()),
    "curve": (_choice("geodesic", "segment", "arc"), str),
    "expect_qgeo": (_choice("any", "valid", "invalid"), str),
    "expect_verdict": (_choice("any", "orthogonal", "not_orthogonal", "tangential"), str),
    "case": (_choice("1", "2", "3", "control"), str),
    "probe": (_choice("step1", "step1_mc", "step2", "step2_sandwich"), str),
}

REQUIRED = object()

SCHEMAS = {
    "dist": {"domain": ("domain", REQUIRED), "z": ("complex", REQUIRED),
             "w": ("complex", REQUIRED)},
    "geodesic": {"domain": ("domain", REQUIRED), "z": ("complex", REQUIRED),
                 "w": ("complex", REQUIRED), "samples": ("count", 65)},
    "horocycle": {"domain": ("domain", REQUIRED), "end": ("end", None), "base": ("complex", None),
                  "R": ("positive", REQUIRED), "z": ("complexes", REQUIRED)},
    "qgeo": {"domain": ("domain", REQUIRED), "curve": ("curve", "geodesic"),
             "z": ("complex", None), "w": ("complex", None), "center": ("complex", 0j),
             "radius": ("positive", None), "theta0": ("real", None), "theta1": ("real", None),
             "A": ("real", 1.0), "B": ("real", 0.0), "grid": ("count", 512),
             "expect": ("expect_qgeo", "any")},
    "classify": {"inner": ("domain", REQUIRED), "outer": ("domain_or_same", "same"),
                 "end": ("end", None), "R": ("radius", "fit"), "base": ("complex", None),
                 "seq": ("seq", REQUIRED), "tol": ("positive", 1e-2), "tail": ("count", 5),
                 "samples": ("count", 10_000), "expect": ("expect_verdict", "any")},
    "slope": {"omega": ("domain", REQUIRED), "z": ("complex", 0j), "t_min": ("positive", 1.0),
              "t_max": ("positive", 1e6), "samples": ("count", 40), "tol": ("positive", 0.05),
              "tail": ("count", 5)},
    "corollary": {"case": ("case", REQUIRED),
                  "starts": ("complexes", (0j, 0.3j, -0.5 + 0j, 0.4 + 0j, 0.3 + 0.3j)),
                  "a": ("real", 0.0), "beta": ("positive", math.pi / 4), "p": ("complex", 0j),
                  "t_min": ("positive", 1.0), "t_max": ("positive", 1e6),
                  "samples": ("count", 40), "mc": ("count", 10_000)},
    "probe": {"name": ("probe", REQUIRED), "beta": ("positive", REQUIRED),
              "n": ("count", 1000), "pairs": ("count", 100)},
}
MONTE_CARLO = {"classify", ("corollary", "1"), ("corollary", "2"), ("corollary", "3"),
               ("probe", "step1_mc"), ("probe", "step2_sandwich")}

for _schema in SCHEMAS.values():
    _schema["seed"] = ("seed", None)


@dataclass(frozen=True)
class Sweep:
    kind: str  # "list" | "linspace" | "logspace"
    items: tuple = ()
    start: float = 0.0
    stop: float = 0.0
    n: int = 0

    def __len__(self):
        return len(self.items) if self.kind == "list" else self.n

    def values(self):
        if self.kind == "list":
            return list(self.items)
        if self.kind == "linspace":
            return [float(v) for v in np.linspace(self.start, self.stop, self.n)]
        return [float(v) for v in np.geomspace(self.start, self.stop, self.n)]

    def serialize(self, fmt):
        if self.kind == "list":
            return "[" + ";".join(fmt(v) for v in self.items) + "]"
        return f"{self.kind}{{start:{fmt_real(self.start)},stop:{fmt_real(self.stop)},n:{self.n}}}"


def _parse_sweep(text, column, type_name):
    parse, _ = TYPES[type_name]
    if text.startswith("["):
        if not text.endswith("]"):
            raise ConfigError("unterminated sweep list", column=column)
        body = text[1:-1]
        items = tuple(parse(s, column) for s in _split(body, ";", column)) if body else ()
        return Sweep("list", items)
    kind, f = _braced_fields(text, column, ("start", "stop", "n"))
    if type_name not in ("real", "positive"):
        raise ConfigError(f"{kind} sweeps need a real-valued key", column=column)
    if set(f) != {"start", "stop", "n"}:
        raise ConfigError(f"{kind} needs start, stop and n", column=column)
    start, stop = parse_number(f["start"], column), parse_number(f["stop"], column)
    n = _parse_count(f["n"], column)
    if n > MAX_CELLS:
        raise ConfigError(f"sweep grid larger than {MAX_CELLS} cells", column=column)
    if kind == "logspace" and not (start > 0 and stop > 0):
        raise ConfigError("logspace needs positive endpoints", column=column)
    sweep = Sweep(kind, (), start, stop, n)
    for v in sweep.values():
        parse(fmt_real(v), column)  # range check every grid value
    return sweep


def _split(text, sep, column):
    """Split on ``sep`` outside brackets; yields raw pieces."""
    out, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in "{[(":
            depth += 1
        elif ch in "}])":
            depth -= 1
            if depth < 0:
                raise ConfigError(f"unbalanced {ch!r}", column=column + i)
        elif ch == sep and depth == 0:
            out.append(text[start:i])
            start = i + 1
    if depth != 0:
        raise ConfigError("unbalanced brackets", column=column + len(text))
    out.append(text[start:])
    return out


def _tokens(line, lineno):
    """(token, column) pairs split on whitespace outside brackets."""
    tokens, depth, start = [], 0, None
    for i, ch in enumerate(line + " "):
        if ch.isspace() and depth == 0:
            if start is not None:
                tokens.append((line[start:i], start + 1))
                start = None
            continue
        if start is None:
            start = i
        if ch in "{[(":
            depth += 1
        elif ch in "}])":
            depth -= 1
            if depth < 0:
                raise ConfigError(f"unbalanced {ch!r}", line=lineno, column=i + 1)
    if depth != 0:
        raise ConfigError("unbalanced brackets", line=lineno, column=len(line) + 1)
    return tokens


@dataclass(frozen=True)
class ScenarioConfig:
    command: str
    params: dict
    sweeps: dict = field(default_factory=dict)
    ignored: tuple = ()

    def get(self, key):
        if key in self.params:
            return self.params[key]
        default = SCHEMAS[self.command][key][1]
        return None if default is REQUIRED else default

    @property
    def seed(self):
        return self.params.get("seed")

    @property
    def is_sweep(self):
        return bool(self.sweeps)

    @property
    def monte_carlo(self):
        variant = self.params.get("name", self.params.get("case"))
        return self.command in MONTE_CARLO or (self.command, variant) in MONTE_CARLO

    def serialize(self):
        schema = SCHEMAS[self.command]
        parts = [self.command]
        for key in schema:
            fmt = TYPES[schema[key][0]][1]
            if key in self.sweeps:
                parts.append(f"{key}={self.sweeps[key].serialize(fmt)}")
            elif key in self.params:
                parts.append(f"{key}={fmt(self.params[key])}")
        return " ".join(parts)

    def with_seed(self, seed):
        return ScenarioConfig(self.command, {**self.params, "seed": seed}, self.sweeps, self.ignored)

    def grid_size(self):
        return math.prod(len(s) for s in self.sweeps.values()) if self.sweeps else 1

    def cells(self):
        """Concrete configs of a sweep, in row-major order of the swept keys."""
        if self.grid_size() > MAX_CELLS:
            raise ConfigError(f"sweep grid larger than {MAX_CELLS} cells")
        keys = list(self.sweeps)
        for combo in itertools.product(*(self.sweeps[k].values() for k in keys)):
            yield dict(zip(keys, combo)), ScenarioConfig(
                self.command, {**self.params, **dict(zip(keys, combo))})


def _parse_line(line, lineno, strict):
    tokens = _tokens(line, lineno)
    command, col = tokens[0]
    if command not in SCHEMAS:
        raise ConfigError(f"unknown command {command!r}", line=lineno, column=col)
    schema = SCHEMAS[command]
    params, sweeps, ignored = {}, {}, []
    for tok, col in tokens[1:]:
        key, sep, value = tok.partition("=")
        if not sep or not key:
            raise ConfigError(f"expected key=value, got {tok!r}", line=lineno, column=col)
        vcol = col + len(key) + 1
        if key not in schema:
            if strict:
                raise ConfigError(f"unknown key {key!r} for {command}", line=lineno, column=col)
            ignored.append(key)
            continue
        if key in params or key in sweeps:
            raise ConfigError(f"repeated key {key!r}", line=lineno, column=col)
        type_name = schema[key][0]
        try:
            if value.startswith("[") or value.startswith(("linspace{", "logspace{")):
                sweeps[key] = _parse_sweep(value, vcol, type_name)
            else:
                params[key] = TYPES[type_name][0](value, vcol)
        except ConfigError as exc:
            raise ConfigError(str(exc).rsplit(" (line", 1)[0], line=lineno,
                              column=exc.column if exc.column > 1 else vcol) from None
    missing = [k for k, (_, d) in schema.items()
               if d is REQUIRED and k not in params and k not in sweeps]
    if missing:
        raise ConfigError(f"{command} is missing {', '.join(missing)}",
                          line=lineno, column=len(line) + 1)
    if len(sweeps) > 2:
        raise ConfigError("at most two swept parameters", line=lineno, column=1)
    cfg = ScenarioConfig(command, params, sweeps, tuple(ignored))
    if cfg.grid_size() > MAX_CELLS:
        raise ConfigError(f"sweep grid larger than {MAX_CELLS} cells", line=lineno, column=1)
    return cfg


def parse_corpus(text, strict=True):
    """All scenarios of a config text, one per non-blank line."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if line.strip():
            indent = len(line) - len(line.lstrip())
            try:
                out.append(_parse_line(line.lstrip(), lineno, strict))
            except ConfigError as exc:
                if indent:
                    raise ConfigError(str(exc).rsplit(" (line", 1)[0], line=exc.line,
                                      column=exc.column + indent) from None
                raise
    return out


def parse_config(text, strict=True):
    """Exactly one scenario."""
    configs = parse_corpus(text, strict)
    if len(configs) != 1:
        raise ConfigError(f"expected one scenario, found {len(configs)}")
    return configs[0]


def normalize(text, strict=True):
    return "\n".join(c.serialize() for c in parse_corpus(text, strict))


def end_default(spec):
    return PrimeEndRef.infinity(spec.canonical_infinity)

"""Execute scenario configs and render their reports."""

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import metadata

import numpy as np

from ..errors import ConfigError, CorollaryViolation, OrthoconvError
from ..horocycles import GeneralHorocycle, busemann, horocycle_membership
from ..metric import geodesic_join, pull_distance, qg_certify
from ..models import SampledCurve
from ..orthogonality import SandwichScenario, classify, fit_horocycle_radius, make_sequence
from ..probes import step1_bound, step1_monte_carlo, step2_sandwich, step2_threshold
from ..semigroups import KoenigsModel, corollary_runner, slope_trace, tangential_control
from .config import end_default, fmt_complex, parse_config

EXIT_OK = 0
EXIT_PROPERTY = 1
EXIT_ERROR = 2


def library_version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def fmt_cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v) + 0.0, ".17g")  # no negative zero
    if isinstance(v, complex):
        return fmt_complex(v)
    return str(v)


@dataclass
class RunReport:
    command: str
    header: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    error: dict = None
    wall_time: float = 0.0
    version: str = field(default_factory=library_version)

    @property
    def exit_code(self):
        if self.error is not None:
            return EXIT_ERROR
        return EXIT_OK if all(self.flags.values()) else EXIT_PROPERTY

    def csv_text(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        w.writerows([fmt_cell(v) for v in row] for row in self.rows)
        return buf.getvalue()

    def to_json(self, timestamp=True):
        doc = {
            "command": self.command,
            "version": self.version,
            "summary": self.summary,
            "flags": self.flags,
            "error": self.error,
            "exit_code": self.exit_code,
            "rows": len(self.rows),
        }
        if timestamp:
            doc["wall_time"] = self.wall_time
            doc["timestamp"] = datetime.now(timezone.utc).isoformat()
        return json.dumps(doc, indent=2, sort_keys=True, default=_json_default)


def _json_default(v):
    if isinstance(v, complex):
        return fmt_complex(v)
    if isinstance(v, np.generic):
        return v.item()
    raise TypeError(f"cannot serialize {type(v).__name__}")


# --- command handlers: (config, seed) -> (header, rows, summary, flags) -------

def _dist(cfg, seed):
    z, w = cfg.get("z"), cfg.get("w")
    d = pull_distance(cfg.get("domain"), z, w)
    return ["z", "w", "distance"], [(z, w, d)], {"distance": d}, {}


def _geodesic(cfg, seed):
    curve = geodesic_join(cfg.get("domain"), cfg.get("z"), cfg.get("w"), cfg.get("samples"))
    rows = [(s, p.real, p.imag) for s, p in zip(curve.params, curve.points)]
    return ["s", "re", "im"], rows, {"length": float(curve.params[-1])}, {}


def _horocycle(cfg, seed):
    spec = cfg.get("domain")
    end = cfg.get("end") or end_default(spec)
    base = cfg.get("base")
    base = complex(spec.from_hub(1.0)) if base is None else base
    h = GeneralHorocycle(spec, end, base, cfg.get("R"))
    zs = cfg.get("z")
    zs = zs if isinstance(zs, tuple) else (zs,)
    rows = [(z, busemann(spec, h.base, end, z), h.threshold, horocycle_membership(h, z).value)
            for z in zs]
    return ["z", "busemann", "threshold", "membership"], rows, {"threshold": h.threshold}, {}


def _qgeo_curve(cfg):
    spec, kind, grid = cfg.get("domain"), cfg.get("curve"), cfg.get("grid")
    if kind == "arc":
        c, r = cfg.get("center"), cfg.get("radius")
        t0, t1 = cfg.get("theta0"), cfg.get("theta1")
        if r is None or t0 is None or t1 is None:
            raise ConfigError("arc curves need radius, theta0 and theta1")

        def func(t):
            return c + r * np.exp(1j * np.asarray(t, dtype=float))

        def derivative(t):
            return 1j * r * np.exp(1j * np.asarray(t, dtype=float))

        return SampledCurve.from_function(func, np.linspace(t0, t1, grid), derivative)
    z, w = cfg.get("z"), cfg.get("w")
    if z is None or w is None:
        raise ConfigError(f"{kind} curves need z and w")
    if kind == "geodesic":
        return geodesic_join(spec, z, w, grid)

    def seg(s):
        return z + np.asarray(s, dtype=float) * (w - z)

    return SampledCurve.from_function(seg, np.linspace(0.0, 1.0, grid), lambda s: (w - z) + 0 * s)


def _qgeo(cfg, seed):
    cert = qg_certify(_qgeo_curve(cfg), cfg.get("domain"), cfg.get("A"), cfg.get("B"), cfg.get("grid"))
    row = (cert.A, cert.B, cert.max_defect, cert.witness[0], cert.witness[1], cert.valid)
    flags = {}
    if cfg.get("expect") != "any":
        flags["expectation"] = cert.valid == (cfg.get("expect") == "valid")
    summary = {"valid": cert.valid, "max_defect": cert.max_defect}
    return ["A", "B", "max_defect", "s", "t", "valid"], [row], summary, flags


def _classify(cfg, seed):
    inner = cfg.get("inner")
    outer = inner if cfg.get("outer") == "same" else cfg.get("outer")
    end = cfg.get("end") or end_default(outer)
    base = cfg.get("base")
    base = complex(outer.from_hub(1.0)) if base is None else base
    sq = cfg.get("seq")
    seq = make_sequence(sq.kind, sq.n, sq.t_max, sq.theta, sq.offset)
    mc = cfg.get("samples")
    radius = cfg.get("R")
    if radius == "fit":
        radius = fit_horocycle_radius(inner, outer, end, base, mc, seed)
    scenario = SandwichScenario(inner, outer, end, radius, seq, base)
    v = classify(scenario, cfg.get("tol"), cfg.get("tail"), mc, seed)
    angles = v.angles if v.angles is not None else np.full(len(seq), np.nan)
    rows = [(i + 1, z.real, z.imag, d, a)
            for i, (z, d, a) in enumerate(zip(seq, v.ray_distances, angles))]
    summary = {"verdict": v.label(), "sigma": v.sigma, "radius": radius,
               "tail_distance": v.tail_distance, "tail_angle": v.tail_angle, "note": v.note}
    flags = {}
    expect = cfg.get("expect")
    if expect == "not_orthogonal":
        flags["expectation"] = not v.is_orthogonal
    elif expect == "tangential":
        flags["expectation"] = v.kind == "tangential"
    elif expect == "orthogonal":
        flags["expectation"] = v.is_orthogonal
    return ["n", "re", "im", "ray_distance", "angle"], rows, summary, flags


def _trace_rows(trace, prefix=()):
    return [prefix + row for row in trace.rows()]


def _slope(cfg, seed):
    model = KoenigsModel(cfg.get("omega")).with_dw()
    tr = slope_trace(model, cfg.get("z"), cfg.get("t_min"), cfg.get("t_max"), cfg.get("samples"),
                     tol=cfg.get("tol"), tail=cfg.get("tail"))
    summary = {"kind": tr.label(), "tau": tr.tau, "tail_angle": tr.tail_angle(cfg.get("tail"))}
    return ["t", "re_phi", "im_phi", "angle"], _trace_rows(tr), summary, {}


def _corollary(cfg, seed):
    header = ["start", "t", "re_phi", "im_phi", "angle"]
    starts = cfg.get("starts")
    starts = starts if isinstance(starts, tuple) else (starts,)
    times = dict(t_min=cfg.get("t_min"), t_max=cfg.get("t_max"), samples=cfg.get("samples"))
    if cfg.get("case") == "control":
        traces = tangential_control(starts, **times)
        rows = [r for tr in traces for r in _trace_rows(tr, (tr.start,))]
        summary = {"slope": [tr.label() for tr in traces],
                   "tail_angle": [tr.tail_angle() for tr in traces]}
        return header, rows, summary, {"tangential": all(tr.kind == "tangential" for tr in traces)}
    try:
        report = corollary_runner(int(cfg.get("case")), starts, a=cfg.get("a"),
                                  beta=cfg.get("beta"), p=cfg.get("p"), samples_mc=cfg.get("mc"),
                                  seed=seed, **times)
    except CorollaryViolation as exc:
        if exc.report is None:
            raise
        report = exc.report
    rows = [r for tr in report.traces for r in _trace_rows(tr, (tr.start,))]
    return header, rows, report.summary(), {"orthogonal": report.ok}


def _probe(cfg, seed):
    name, beta = cfg.get("name"), cfg.get("beta")
    if name == "step1":
        return ["beta", "K"], [(beta, step1_bound(beta))], {}, {}
    if name == "step2":
        return ["beta", "alpha"], [(beta, step2_threshold(beta))], {}, {}
    if name == "step1_mc":
        worst, bound = step1_monte_carlo(beta, cfg.get("n"), seed)
        holds = worst <= bound
        return (["beta", "max_distance", "K", "holds"], [(beta, worst, bound, holds)],
                {"max_distance": worst, "K": bound}, {"bound": holds})
    escapes, checked = step2_sandwich(beta, cfg.get("pairs"), seed)
    return (["beta", "alpha", "escapes", "checked"],
            [(beta, step2_threshold(beta), escapes, checked)],
            {"escapes": escapes}, {"contained": escapes == 0})


HANDLERS = {
    "dist": _dist, "geodesic": _geodesic, "horocycle": _horocycle, "qgeo": _qgeo,
    "classify": _classify, "slope": _slope, "corollary": _corollary, "probe": _probe,
}


def run(cfg, seed=None):
    """Run one concrete scenario; module errors become coded error reports."""
    if cfg.is_sweep:
        raise ConfigError("use sweep() for configs with swept parameters")
    seed = cfg.seed if cfg.seed is not None else seed
    report = RunReport(cfg.serialize())
    start = time.perf_counter()
    try:
        if cfg.monte_carlo and seed is None:
            raise ConfigError(f"{cfg.command} is a Monte Carlo command and needs a seed")
        report.header, report.rows, report.summary, report.flags = HANDLERS[cfg.command](cfg, seed)
    except OrthoconvError as exc:
        report.error = {"code": exc.code, "message": str(exc)}
    report.wall_time = time.perf_counter() - start
    return report


def _run_text(args):
    text, seed = args
    return run(parse_config(text), seed)


def cell_seed(seed, index):
    return None if seed is None else seed ^ index


def sweep(cfg, seed=None, workers=1):
    """Run every cell of a swept config; returns [(cell values, report)]."""
    seed = cfg.seed if cfg.seed is not None else seed
    cells = list(cfg.cells())
    jobs = [(c.serialize(), cell_seed(seed, i)) for i, (_, c) in enumerate(cells)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            reports = list(pool.map(_run_text, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        reports = [_run_text(j) for j in jobs]
    return [(values, r) for (values, _), r in zip(cells, reports)]


@dataclass
class SweepReport:
    command: str
    keys: list
    results: list
    wall_time: float = 0.0

    @property
    def exit_code(self):
        return max((r.exit_code for _, r in self.results), default=EXIT_OK)

    def csv_text(self):
        inner = next((r.header for _, r in self.results if r.error is None), [])
        # a swept key already echoed by the command is not repeated
        keys = [k for k in self.keys if k not in inner]
        header = keys + ["status"] + inner
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for values, r in self.results:
            prefix = [fmt_cell(values[k]) if not hasattr(values[k], "serialize")
                      else values[k].serialize() for k in keys]
            status = r.error["code"] if r.error else ("ok" if r.exit_code == EXIT_OK else "fail")
            if r.error or not r.rows:
                w.writerow(prefix + [status])
            for row in r.rows:
                w.writerow(prefix + [status] + [fmt_cell(v) for v in row])
        return buf.getvalue()

    def to_json(self, timestamp=True):
        doc = {
            "command": self.command,
            "version": library_version(),
            "cells": len(self.results),
            "exit_code": self.exit_code,
            "failures": [i for i, (_, r) in enumerate(self.results) if r.exit_code != EXIT_OK],
        }
        if timestamp:
            doc["wall_time"] = self.wall_time
            doc["timestamp"] = datetime.now(timezone.utc).isoformat()
        return json.dumps(doc, indent=2, sort_keys=True)


def execute(cfg, seed=None, workers=1):
    """Run a config, sweeping if it has grids; returns a report with ``csv_text``."""
    if not cfg.is_sweep:
        return run(cfg, seed)
    start = time.perf_counter()
    results = sweep(cfg, seed, workers)
    return SweepReport(cfg.serialize(), list(cfg.sweeps), results, time.perf_counter() - start)


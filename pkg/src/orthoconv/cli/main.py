"""``orthoconv`` command line entry point."""

import argparse
import logging
import sys
from pathlib import Path

from ..errors import ConfigError
from .config import MAX_SEED, parse_corpus
from .runner import EXIT_ERROR, execute

log = logging.getLogger("orthoconv")


def _seed(text):
    value = int(text, 0)
    if not 0 <= value <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser():
    p = argparse.ArgumentParser(
        prog="orthoconv",
        description="Run hyperbolic-geometry scenarios and emit CSV/JSON results.")
    p.add_argument("scenario", nargs="*", help="inline scenario, e.g. 'dist domain=halfplane z=1 w=2'")
    p.add_argument("--config", type=Path, help="scenario file, one scenario per line")
    p.add_argument("--seed", type=_seed, help="seed for Monte Carlo commands (overridden by seed=)")
    p.add_argument("--out", type=Path, help="directory for scenario_NNN.csv/.json")
    p.add_argument("--strict", action="store_true", help="unknown keys are fatal")
    p.add_argument("--workers", type=int, default=1, help="processes used by sweeps")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    text = " ".join(args.scenario)
    if args.config is not None:
        text = args.config.read_text(encoding="utf-8") + ("\n" + text if text else "")
    if not text.strip():
        log.error("no scenario given")
        return EXIT_ERROR
    try:
        configs = parse_corpus(text, strict=args.strict)
    except ConfigError as exc:
        log.error("%s: %s", exc.code, exc)
        return EXIT_ERROR
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
    status = 0
    for i, cfg in enumerate(configs):
        if cfg.ignored:
            log.warning("scenario %d: ignoring unknown keys %s", i, ", ".join(cfg.ignored))
        report = execute(cfg, args.seed, max(args.workers, 1))
        status = max(status, report.exit_code)
        if args.out is not None:
            stem = args.out / f"scenario_{i:03d}"
            stem.with_suffix(".csv").write_text(report.csv_text(), encoding="utf-8")
            stem.with_suffix(".json").write_text(report.to_json(), encoding="utf-8")
        else:
            if len(configs) > 1:
                sys.stdout.write(f"# {cfg.serialize()}\n")
            sys.stdout.write(report.csv_text())
        if report.exit_code:
            log.warning("scenario %d exited with status %d", i, report.exit_code)
            err = getattr(report, "error", None)
            if err:
                log.error("%s: %s", err["code"], err["message"])
    return status


if __name__ == "__main__":
    sys.exit(main())

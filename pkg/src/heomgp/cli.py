"""Command line entry point: ``heomgp [--preset NAME] [--config PATH] ...``.

Exit codes: 0 ok, 2 config error, 3 divergence, 4 degeneracy,
5 not converged, 6 partial sweep failure.
"""
from __future__ import annotations

import argparse
import logging
import sys

from . import __version__
from .config import FORMATS, MODES, PRESETS, build_config, check_writable
from .errors import ConfigError, HeomGpError
from .model import PERIOD_POLICIES
from .runs import run, write

log = logging.getLogger("heomgp")


def _depth(text: str):
    try:
        n1, n2 = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N1,N2, got {text!r}") from None
    return [n1, n2]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="heomgp",
        description="Driven qubit in a Lorentzian bath: HEOM dynamics and geometric phase.")
    ap.add_argument("--version", action="version", version=f"heomgp {__version__}")
    ap.add_argument("--config", help="flat TOML config, or a previous CSV/JSON output")
    ap.add_argument("--preset", choices=sorted(PRESETS))
    ap.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                    help="override one config key (repeatable)")
    ap.add_argument("--mode", choices=MODES)
    ap.add_argument("--out", help="output path, '-' for stdout")
    ap.add_argument("--format", choices=FORMATS)
    ap.add_argument("--workers", type=int)
    ap.add_argument("--period-policy", dest="period_policy", choices=PERIOD_POLICIES)
    ap.add_argument("--depth", type=_depth, metavar="N1,N2")
    ap.add_argument("--dt", type=float)
    ap.add_argument("-q", "--quiet", action="store_true", help="suppress progress on stderr")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="heomgp: %(message)s", stream=sys.stderr)
    try:
        cfg = build_config(args.preset, args.config, args.overrides, mode=args.mode,
                           out=args.out, format=args.format, workers=args.workers,
                           period_policy=args.period_policy, depth=args.depth, dt=args.dt)
        check_writable(cfg.out)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return exc.exit_code
    try:
        rec = run(cfg)
    except HeomGpError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code
    except ValueError as exc:
        log.error("config error: %s", exc)
        return ConfigError.exit_code
    write(rec)
    log.info("%s: %d rows, status %s, %.2f s", cfg.mode, len(rec.rows), rec.status, rec.wall_clock)
    return rec.exit_code


if __name__ == "__main__":
    sys.exit(main())

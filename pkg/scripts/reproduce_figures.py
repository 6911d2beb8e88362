"""Regenerate every preset as CSV under results/ (or a directory given as argv[1]).

Usage: python3 scripts/reproduce_figures.py [outdir] [--workers N]
"""
import argparse
import os
import sys
from pathlib import Path

from heomgp.cli import main

PRESETS = ("fig1", "fig1-unitary", "fig4", "fig8", "theta-scan", "fig7", "fig10")


def cli():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("outdir", nargs="?", default="results")
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    codes = {}
    for name in PRESETS:
        codes[name] = main(["--preset", name, "--out", str(out / f"{name}.csv"),
                            "--workers", str(args.workers)])
    for name, code in codes.items():
        print(f"{name:14s} exit {code}")
    return max(codes.values())


if __name__ == "__main__":
    sys.exit(cli())

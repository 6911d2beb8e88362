"""How the 2 pi branch choice of the open-path GP affects the heatmap verdict.

For every (Delta, omegaD) point of the weak-coupling 17x17 grid this computes
phi/phi_u at N = 4 and 8 under two branch conventions:

* endpoint: principal value of arg <v(0)|v(NT)> plus the accumulated connection
  (what the package reports)
* continuous: the same phase unwrapped along tau, shifted by 2 pi N so the
  unitary undriven case still gives N pi (1 + cos theta0)

It also reports the largest per-sample step of the unwrapped phase; the
unwrap is unambiguous while that stays well below pi. Usage: python3 scripts/branch_analysis.py [gamma0]
"""
import math
import sys

import numpy as np

from heomgp.gp import gp_accumulate, unitary_gp
from heomgp.integrate import evolve
from heomgp.model import ModelParams


def main(gamma0=0.01):
    axis = np.linspace(0, 8, 17)
    base = ModelParams(gamma0=gamma0, cycles=8)
    spc = base.samples_per_cycle
    regions = {k: {4: set(), 8: set()} for k in ("endpoint", "continuous")}
    max_step = 0.0
    for d in axis:
        for w in axis:
            p = base.replace(Delta=float(d), omegaD=float(w))
            res = gp_accumulate(evolve(p))
            v = res.phi_continuous
            for n in (4, 8):
                u = unitary_gp(p.theta0, n)
                k = n * spc
                endpoint = res.phi[k] / u
                cont = (v[k] + 2 * math.pi * n) / u
                for name, r in (("endpoint", endpoint), ("continuous", cont)):
                    if abs(r - 1) < 0.02:
                        regions[name][n].add((d, w))
            max_step = max(max_step, float(np.abs(np.diff(v)).max()))
    print(f"largest per-sample step of the unwrapped phase: {max_step:.3g} rad")
    for name, reg in regions.items():
        s4, s8 = reg[4], reg[8]
        print(f"{name:10s}: |N=4| = {len(s4)}, |N=8| = {len(s8)}, N8 subset of N4: {s8 <= s4}, "
              f"strict: {s8 < s4}, in N8 only: {len(s8 - s4)}")


if __name__ == "__main__":
    main(float(sys.argv[1]) if len(sys.argv) > 1 else 0.01)

"""Relative GP deviation at N=5 and N=15 versus coupling, undriven, theta0 = pi/4.

Locates the coupling at which the deviation reaches 2.5% (N=5) and 10% (N=15)
under both normalization conventions, by bisection on log(gamma0).
"""
import math

from scipy.optimize import brentq

from heomgp.gp import gp_accumulate, unitary_gp
from heomgp.integrate import evolve
from heomgp.model import ModelParams


def deviation(gamma0, n, coupling="matched"):
    p = ModelParams(gamma0=gamma0, cycles=n, coupling=coupling)
    res = gp_accumulate(evolve(p))
    u = unitary_gp(p.theta0, n)
    return abs(res.at_cycle(n) - u) / u


def main():
    print("gamma0   coupling  dev(N=5)   dev(N=15)")
    for coupling in ("matched", "literal"):
        for g in (0.01, 0.03, 0.1, 0.2, 0.3):
            print(f"{g:<8g} {coupling:8s}  {deviation(g, 5, coupling):.4%}   "
                  f"{deviation(g, 15, coupling):.4%}")
    for coupling in ("matched", "literal"):
        for n, target in ((5, 0.025), (15, 0.10)):
            g = math.exp(brentq(lambda x: deviation(math.exp(x), n, coupling) - target,
                                math.log(0.01), math.log(1.0), xtol=1e-3))
            print(f"{coupling}: deviation {target:.1%} at N={n} needs gamma0 = {g:.3f}")


if __name__ == "__main__":
    main()

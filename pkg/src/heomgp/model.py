"""Driven qubit + Lorentzian bath, in units where the bath width is 1.

Every energy is measured in units of the Lorentzian half-width and time
``tau`` in units of its inverse, so the bath memory time is 1 and the
relaxation time is ``1 / gamma0``.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import EXCITED

PERIOD_POLICIES = ("omega", "omega-plus-delta")
# "matched": bath correlation amplitude gamma0/2, identical to the pseudomode
# oracle. "literal": hierarchy prefactors exactly as printed, which doubles it.
COUPLING_CONVENTIONS = ("matched", "literal")


@dataclass(frozen=True)
class ModelParams:
    Omega: float = 20.0
    Delta: float = 0.0
    omegaD: float = 0.0
    gamma0: float = 0.01
    theta0: float = math.pi / 4
    cycles: int = 15
    depth: tuple[int, int] = (25, 25)
    dt: float | None = None
    samples_per_cycle: int = 256
    period_policy: str = "omega"
    coupling: str = "matched"

    def __post_init__(self):
        object.__setattr__(self, "depth", tuple(int(n) for n in self.depth))
        if not self.gamma0 >= 0:
            raise ValueError("gamma0 must be non-negative")
        if self.Delta < 0 or self.omegaD < 0:
            raise ValueError("Delta and omegaD must be non-negative")
        if not 0 <= self.theta0 <= math.pi:
            raise ValueError("theta0 must lie in [0, pi]")
        if self.cycles < 1 or self.samples_per_cycle < 1:
            raise ValueError("cycles and samples_per_cycle must be >= 1")
        if len(self.depth) != 2 or min(self.depth) < 1:
            raise ValueError("depth must be a pair of integers >= 1")
        if self.dt is not None and not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.period_policy not in PERIOD_POLICIES:
            raise ValueError(f"period_policy must be one of {PERIOD_POLICIES}")
        if self.coupling not in COUPLING_CONVENTIONS:
            raise ValueError(f"coupling must be one of {COUPLING_CONVENTIONS}")

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)

    @property
    def tau_c(self) -> float:
        return 1.0

    @property
    def tau_r(self) -> float:
        return math.inf if self.gamma0 == 0 else 1.0 / self.gamma0

    @property
    def markovian(self) -> bool:
        return self.gamma0 < 1

    @property
    def period(self) -> float:
        """Reference cycle length used for sampling and GP accumulation."""
        if self.period_policy == "omega":
            return 2 * math.pi / abs(self.Omega)
        return 2 * math.pi / abs(self.Omega + self.Delta)


def omega0(tau, p: ModelParams):
    return p.Omega + p.Delta * np.cos(p.omegaD * tau)


def hamiltonian(tau, p: ModelParams):
    return omega0(tau, p) * EXCITED


def spectral_density(omega, p: ModelParams):
    return p.gamma0 / (2 * np.pi) / ((omega - p.Omega) ** 2 + 1.0)


def correlation(t, p: ModelParams):
    """Zero-temperature bath correlation (gamma0/2) exp(-(1 + i Omega)|t|).

    Negative times return the complex conjugate, as for any stationary
    correlation function.
    """
    t = np.asarray(t, dtype=float)
    c = 0.5 * p.gamma0 * np.exp(-(1.0 + 1j * p.Omega) * np.abs(t))
    return np.where(t < 0, np.conj(c), c)[()]

"""Fixed-step classical Runge-Kutta propagation with uniform sampling."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import propagate, rhs_kernel
from .errors import Divergence
from .heom import (
    DIVERGENCE_LIMIT,
    coupling_prefactor,
    nu,
    HierarchyState,
    initial_state,
    relaxation_rates,
    rhs,
    stability_dt,
)
from .model import ModelParams


def rk4(f, y, t, dt):
    """One classical RK4 step of ``dy/dt = f(y, t)``."""
    k1 = f(y, t)
    k2 = f(y + 0.5 * dt * k1, t + 0.5 * dt)
    k3 = f(y + 0.5 * dt * k2, t + 0.5 * dt)
    k4 = f(y + dt * k3, t + dt)
    return y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def check_finite(y, tau, limit=DIVERGENCE_LIMIT):
    peak = np.max(np.abs(y))
    if not peak < limit:  # also catches NaN
        raise Divergence(f"state norm {peak:.3g} exceeded {limit:g} at tau={tau:.6g}")


def rk4_step(state: HierarchyState, tau: float, dt: float, p: ModelParams,
             rates=None) -> HierarchyState:
    if rates is None:
        rates = relaxation_rates(p, state.depth)
    new = rk4(lambda y, t: rhs(y, t, p, rates), state.ados, tau, dt)
    check_finite(new, tau + dt)
    return HierarchyState(new, tau + dt)


def default_dt(p: ModelParams) -> float:
    """Largest step allowed by the coherent, dissipative and ADO-stability scales."""
    scales = [0.1 / (abs(p.Omega) + p.Delta) if abs(p.Omega) + p.Delta > 0 else math.inf,
              stability_dt(p)]
    if p.gamma0 > 0:
        scales.append(0.02 / p.gamma0)
    return min(scales)


def sampling_grid(p: ModelParams, dt_max: float | None = None) -> tuple[float, int, int]:
    """Return ``(dt, steps_per_sample, n_samples)`` with dt dividing the stride."""
    stride = p.period / p.samples_per_cycle
    dt_max = dt_max or p.dt or default_dt(p)
    steps = max(1, math.ceil(stride / dt_max - 1e-9))
    return stride / steps, steps, p.cycles * p.samples_per_cycle + 1


@dataclass
class Trajectory:
    """Uniformly sampled record of the physical density matrix."""

    taus: np.ndarray
    rhos: np.ndarray
    drhos: np.ndarray
    params: ModelParams
    dt: float
    final_state: object = None
    meta: dict = field(default_factory=dict)

    @property
    def period(self) -> float:
        return self.params.period

    @property
    def cycles(self) -> np.ndarray:
        return self.taus / self.period

    @property
    def bloch(self) -> np.ndarray:
        from .observables import bloch

        return bloch(self.rhos)

    @property
    def R(self) -> np.ndarray:
        return np.linalg.norm(self.bloch, axis=-1)

    @property
    def rho11(self) -> np.ndarray:
        return self.rhos[:, 0, 0].real

    @property
    def rho12(self) -> np.ndarray:
        return self.rhos[:, 0, 1]

    def index_of_cycle(self, n: int) -> int:
        return int(n) * self.params.samples_per_cycle


def _kernel_args(p: ModelParams):
    nu1, nu2 = nu(p)
    return (float(p.Omega), float(p.Delta), float(p.omegaD), nu1, nu2,
            float(coupling_prefactor(p)), DIVERGENCE_LIMIT)


def evolve(p: ModelParams, state: HierarchyState | None = None,
           backend: str = "compiled") -> Trajectory:
    """Propagate the hierarchy for ``p.cycles`` periods and sample rho(0,0).

    ``backend="numpy"`` runs the reference :func:`heomgp.heom.rhs` instead of
    the compiled kernel; both follow the same arithmetic.
    """
    dt, steps, n_samples = sampling_grid(p)
    state = state or initial_state(p)
    rates = relaxation_rates(p, state.depth)
    f = lambda y, t: rhs(y, t, p, rates)  # noqa: E731
    args = _kernel_args(p)

    ados = np.ascontiguousarray(state.ados, dtype=complex)
    taus = np.empty(n_samples)
    rhos = np.empty((n_samples, 2, 2), dtype=complex)
    drhos = np.empty_like(rhos)
    for j in range(n_samples):
        tau = j * steps * dt
        if j:
            tau0 = (j - 1) * steps * dt
            if backend == "numpy":
                for i in range(steps):
                    ados = rk4(f, ados, tau0 + i * dt, dt)
                check_finite(ados, tau)
            else:
                ados, ok = propagate(ados, tau0, dt, steps, *args)
                if not ok:
                    check_finite(ados, tau)
        taus[j] = tau
        rhos[j] = ados[0, 0]
        drhos[j] = rhs_kernel(ados, tau, *args[:-1])[0, 0]
    final = HierarchyState(ados, taus[-1])
    return Trajectory(taus, rhos, drhos, p, dt, final)

"""Pseudomode reference solver.

At zero temperature a Lorentzian bath with correlation
``(gamma0/2) exp(-(1 + i Omega)|t|)`` is reproduced exactly by one bosonic
mode of frequency ``Omega``, coupled as ``g sigma_x (a + a^dag)`` with
``g^2 = gamma0/2`` and damped by a Lindblad term ``2 D[a]`` (amplitude decay
rate 1). The qubit-plus-mode master equation is solved densely with the same
RK4 scheme as the hierarchy, which makes it an independent check of the
hierarchy's normalization and signs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TruncationInsufficient
from .heom import pure_state
from .integrate import Trajectory, check_finite, rk4, sampling_grid
from .model import ModelParams, omega0

MODE_DECAY = 1.0  # amplitude decay; the Lindblad rate is twice this
TOP_FOCK_TOL = 1e-8
N_MAX_CAP = 64


@dataclass(frozen=True)
class PseudomodeParams:
    n_max: int = 8
    g: float | None = None  # defaults to sqrt(gamma0 / 2)
    cap: int = N_MAX_CAP
    auto_escalate: bool = True

    def coupling(self, p: ModelParams) -> float:
        return math.sqrt(p.gamma0 / 2) if self.g is None else self.g


def destroy(n: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1).astype(complex)


class PseudomodeModel:
    """Operators on the joint space, ordered qubit (x) mode."""

    def __init__(self, p: ModelParams, n: int, g: float):
        self.p, self.n, self.g = p, n, g
        a = destroy(n)
        iq, im = np.eye(2), np.eye(n)
        sx = np.array([[0, 1], [1, 0]], dtype=complex)
        excited = np.diag([1.0, 0.0]).astype(complex)
        self.a = np.kron(iq, a)
        self.excited = np.kron(excited, im)
        self.h_static = (p.Omega * self.a.conj().T @ self.a
                         + g * np.kron(sx, a + a.conj().T))
        self.kappa = 2 * MODE_DECAY
        self.nn = self.a.conj().T @ self.a

    def hamiltonian(self, tau):
        return omega0(tau, self.p) * self.excited + self.h_static

    def rhs(self, rho, tau):
        h = self.hamiltonian(tau)
        a = self.a
        drho = -1j * (h @ rho - rho @ h)
        drho += self.kappa * (a @ rho @ a.conj().T
                              - 0.5 * (self.nn @ rho + rho @ self.nn))
        return drho

    def initial(self):
        vac = np.zeros((self.n, self.n), dtype=complex)
        vac[0, 0] = 1
        return np.kron(pure_state(self.p.theta0), vac)

    def max_rate(self):
        return (abs(self.p.Omega) * self.n + abs(self.p.Omega) + self.p.Delta
                + 2 * self.g * math.sqrt(self.n) + self.kappa * self.n)


def qubit_reduce(rho, n):
    """Partial trace over the mode; works on stacks of joint matrices."""
    r = rho.reshape(rho.shape[:-2] + (2, n, 2, n))
    return np.einsum("...imjm->...ij", r)


def mode_reduce(rho, n):
    r = rho.reshape(rho.shape[:-2] + (2, n, 2, n))
    return np.einsum("...iaib->...ab", r)


def _run(p: ModelParams, n: int, g: float):
    model = PseudomodeModel(p, n, g)
    dt, steps, n_samples = sampling_grid(p, min(p.dt or math.inf, 0.5 / model.max_rate()))
    rho = model.initial()
    taus = np.empty(n_samples)
    rhos = np.empty((n_samples, 2, 2), dtype=complex)
    drhos = np.empty_like(rhos)
    top = 0.0
    drift = 0.0
    min_joint = 0.0
    for j in range(n_samples):
        tau = j * steps * dt
        if j:
            tau0 = (j - 1) * steps * dt
            for i in range(steps):
                rho = rk4(model.rhs, rho, tau0 + i * dt, dt)
            check_finite(rho, tau)
        taus[j] = tau
        rhos[j] = qubit_reduce(rho, n)
        drhos[j] = qubit_reduce(model.rhs(rho, tau), n)
        top = max(top, mode_reduce(rho, n)[-1, -1].real)
        drift = max(drift, abs(np.trace(rho) - 1))
    min_joint = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    meta = {"n_max": n, "g": g, "top_fock": top, "joint_trace_drift": drift,
            "final_joint_min_eig": min_joint}
    return Trajectory(taus, rhos, drhos, p, dt, rho, meta)


def pseudomode_evolve(p: ModelParams, pm: PseudomodeParams | None = None) -> Trajectory:
    """Qubit-reduced trajectory from the damped-pseudomode master equation.

    The Fock cutoff is doubled until the top level never holds more than
    ``1e-8`` population, up to ``pm.cap``.
    """
    pm = pm or PseudomodeParams()
    g = pm.coupling(p)
    n = pm.n_max
    while True:
        traj = _run(p, n, g)
        if traj.meta["top_fock"] < TOP_FOCK_TOL or not pm.auto_escalate:
            return traj
        if 2 * n > pm.cap:
            raise TruncationInsufficient(
                f"top Fock population {traj.meta['top_fock']:.2e} at n_max={n}; cap {pm.cap}"
            )
        n *= 2


def mode_correlation(taus, Omega: float, n: int = 4, dt: float = 1e-3) -> np.ndarray:
    """<a(t) a^dag(0)> of the damped mode in vacuum, by quantum regression.

    Only the mode is evolved (the qubit is decoupled), so the result should be
    ``exp(-i Omega t - t)``.
    """
    a = destroy(n)
    ad = a.conj().T
    nn = ad @ a
    h = Omega * nn
    kappa = 2 * MODE_DECAY

    def f(x, t):
        return -1j * (h @ x - x @ h) + kappa * (a @ x @ ad - 0.5 * (nn @ x + x @ nn))

    vac = np.zeros((n, n), dtype=complex)
    vac[0, 0] = 1
    x = ad @ vac
    out = np.empty(len(taus), dtype=complex)
    t = 0.0
    for k, target in enumerate(taus):
        steps = int(round((target - t) / dt))
        h_step = (target - t) / steps if steps else 0.0
        for _ in range(steps):
            x = rk4(f, x, t, h_step)
            t += h_step
        t = target
        out[k] = np.trace(a @ x)
    return out


def trace_distance(r1, r2) -> np.ndarray:
    """Half the trace norm of ``r1 - r2`` for stacks of Hermitian 2x2 matrices."""
    d = 0.5 * ((r1 - r2) + np.conj(np.swapaxes(r1 - r2, -1, -2)))
    return 0.5 * np.abs(np.linalg.eigvalsh(d)).sum(axis=-1)

"""Hierarchy equations of motion for a qubit coupled through sigma_x to a
single-exponential (Lorentzian, zero temperature) bath.

The auxiliary density operators (ADOs) live in one dense array of shape
``(N1 + 1, N2 + 1, 2, 2)``; entry ``[0, 0]`` is the physical reduced density
matrix. ADO ``(n1, n2)`` relaxes with rate ``n1 * nu1 + n2 * nu2`` where
``nu = (1 - i Omega, 1 + i Omega)``, couples upward through ``[sigma_x, .]``
and downward through ``n_k (gamma0/2) ([sigma_x, .] + (-1)^k {sigma_x, .})``.
The top layer simply drops its upward coupling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import eig_hermitian, hermitize
from .errors import NotConverged
from .model import ModelParams, omega0

DIVERGENCE_LIMIT = 1e6


@dataclass
class HierarchyState:
    ados: np.ndarray
    tau: float = 0.0

    @property
    def rho(self) -> np.ndarray:
        return self.ados[0, 0]

    @property
    def depth(self) -> tuple[int, int]:
        return self.ados.shape[0] - 1, self.ados.shape[1] - 1


def nu(p: ModelParams) -> tuple[complex, complex]:
    return 1 - 1j * p.Omega, 1 + 1j * p.Omega


def coupling_prefactor(p: ModelParams) -> float:
    """Coefficient multiplying the downward hierarchy coupling.

    With ``"matched"`` the bath correlation at zero lag equals ``gamma0/2``,
    the amplitude of the exponential correlation and of the pseudomode.
    The literal prefactor ``gamma0/2`` in front of the
    ``[sigma_x, .] +- {sigma_x, .}`` combination doubles that amplitude.
    """
    if p.coupling == "literal":
        return 0.5 * p.gamma0
    return 0.25 * p.gamma0


def pure_state(theta0: float) -> np.ndarray:
    c, s = math.cos(theta0 / 2), math.sin(theta0 / 2)
    psi = np.array([c, s], dtype=complex)
    return np.outer(psi, psi.conj())


def initial_state(p: ModelParams) -> HierarchyState:
    n1, n2 = p.depth
    ados = np.zeros((n1 + 1, n2 + 1, 2, 2), dtype=complex)
    ados[0, 0] = pure_state(p.theta0)
    return HierarchyState(ados, 0.0)


def relaxation_rates(p: ModelParams, depth=None) -> np.ndarray:
    """``n1 nu1 + n2 nu2`` over the ADO lattice."""
    n1, n2 = depth or p.depth
    nu1, nu2 = nu(p)
    return np.arange(n1 + 1)[:, None] * nu1 + np.arange(n2 + 1)[None, :] * nu2


def _sx_comm(x):
    # [sigma_x, x]: sigma_x x swaps rows, x sigma_x swaps columns
    return x[..., ::-1, :] - x[..., :, ::-1]


def _sx_anti(x):
    return x[..., ::-1, :] + x[..., :, ::-1]


def rhs(ados: np.ndarray, tau: float, p: ModelParams, rates=None) -> np.ndarray:
    """Time derivative of every ADO.

    ``rates`` may be passed to skip recomputing :func:`relaxation_rates`.
    """
    if rates is None:
        rates = relaxation_rates(p, (ados.shape[0] - 1, ados.shape[1] - 1))
    w = omega0(tau, p)
    out = -rates[..., None, None] * ados
    # -i [w |0><0|, rho] only touches the coherences
    out[..., 0, 1] -= 1j * w * ados[..., 0, 1]
    out[..., 1, 0] += 1j * w * ados[..., 1, 0]

    out[:-1, :] -= 1j * _sx_comm(ados[1:, :])
    out[:, :-1] -= 1j * _sx_comm(ados[:, 1:])

    pref = coupling_prefactor(p)
    n1 = np.arange(1, ados.shape[0])[:, None, None, None]
    n2 = np.arange(1, ados.shape[1])[None, :, None, None]
    lower1 = ados[:-1, :]
    lower2 = ados[:, :-1]
    out[1:, :] -= 1j * pref * n1 * (_sx_comm(lower1) - _sx_anti(lower1))
    out[:, 1:] -= 1j * pref * n2 * (_sx_comm(lower2) + _sx_anti(lower2))
    return out


def trace_drift(state) -> float:
    ados = state.ados if isinstance(state, HierarchyState) else state
    rho = ados[0, 0] if ados.ndim == 4 else ados
    return abs(np.trace(rho) - 1.0)


def stability_dt(p: ModelParams) -> float:
    """Upper bound on the RK4 step from the fastest ADO relaxation rate."""
    n = sum(p.depth)
    return 0.5 / (n + abs(p.Omega) * n)


@dataclass
class ConvergenceReport:
    depths: list
    distances: list  # max-over-time Frobenius distance to the previous depth
    min_eigenvalues: list
    converged: bool
    threshold: float
    extra: dict = field(default_factory=dict)

    def rows(self):
        prev = [None] + list(self.distances)
        for depth, dist, mine in zip(self.depths, prev, self.min_eigenvalues):
            yield {"N1": depth[0], "N2": depth[1], "distance": dist, "min_eig": mine}


def convergence_scan(p: ModelParams, depths, threshold=1e-6, raise_on_failure=True):
    """Evolve at each truncation depth and compare consecutive depths.

    A common time step (the one valid for the deepest hierarchy) is used at
    every depth so that differences measure truncation only.
    """
    from .integrate import default_dt, evolve

    depths = [tuple(d) for d in depths]
    if depths != sorted(depths):
        raise ValueError("depths must be sorted ascending")
    dt = p.dt or default_dt(p.replace(depth=depths[-1]))
    trajs = [evolve(p.replace(depth=d, dt=dt)) for d in depths]
    distances = [
        float(np.max(np.linalg.norm(b.rhos - a.rhos, axis=(1, 2))))
        for a, b in zip(trajs, trajs[1:])
    ]
    mins = [float(np.min(eig_hermitian(hermitize(t.rhos)).values[:, 1])) for t in trajs]
    converged = bool(distances) and distances[-1] < threshold
    if len(depths) == 1:
        converged = False
    report = ConvergenceReport(depths, distances, mins, converged, threshold, {"dt": dt})
    if raise_on_failure and not converged:
        raise NotConverged(
            f"depth {depths[-1]} differs from {depths[-2] if len(depths) > 1 else None} "
            f"by {distances[-1] if distances else float('nan'):.3g} >= {threshold:g}"
        )
    return report

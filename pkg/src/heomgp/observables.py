"""Bloch-vector observables, revival detection and the single-G form check."""
from __future__ import annotations

import numpy as np
from scipy.signal import find_peaks

from .errors import PreconditionViolated


def bloch(rho) -> np.ndarray:
    """``(x, y, z) = (Tr rho sx, Tr rho sy, Tr rho sz)``, broadcasting over stacks."""
    rho = np.asarray(rho)
    x = 2 * rho[..., 0, 1].real
    y = -2 * rho[..., 0, 1].imag
    z = (rho[..., 0, 0] - rho[..., 1, 1]).real
    return np.stack([x, y, z], axis=-1)


def bloch_norm(rho):
    return np.linalg.norm(bloch(rho), axis=-1)


def revival_count(traj_or_R, prominence: float = 1e-3) -> int:
    """Number of interior local maxima of R(tau) with prominence >= threshold.

    Accepts a :class:`~heomgp.integrate.Trajectory` or a 1-D array of R values.
    """
    if prominence <= 0:
        raise ValueError("prominence must be positive")
    R = getattr(traj_or_R, "R", traj_or_R)
    peaks, _ = find_peaks(np.asarray(R, dtype=float), prominence=prominence)
    return int(len(peaks))


def g_form_check(traj) -> float:
    """Largest violation of ``|rho12/rho12(0)|^2 == rho11/rho11(0)``.

    For undriven dynamics of the single-G form both sides equal ``|G|^2``.
    """
    r11, r12 = traj.rho11, traj.rho12
    if abs(r11[0]) < 1e-12 or abs(r12[0]) < 1e-12:
        raise PreconditionViolated("initial population and coherence must be non-zero")
    if getattr(traj.params, "Delta", 0) != 0:
        raise PreconditionViolated("the single-G form applies to undriven runs (Delta = 0)")
    lhs = np.abs(r12 / r12[0]) ** 2
    return float(np.max(np.abs(lhs - r11 / r11[0])))

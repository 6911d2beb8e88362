"""Kinematic geometric phase of the dominant eigenvector of rho(tau).

For a pure initial state only the dominant eigen-branch contributes, so the
phase reduces to

    Phi(T) = arg <v(0)|v(T)> + i int_0^T <v|d_t v> dt.

Two independent evaluations are provided:

* Pancharatnam: a product of overlaps between successive sampled eigenvectors
  (manifestly gauge invariant). Each increment is corrected by the local
  three-point Bargmann invariant, which removes the leading chord error.
* Direct: the connection ``i <v|d_t v>`` computed analytically from rho and
  d rho/d tau in the gauge where the ground-state component of v is real,
  integrated with Simpson's rule.

The accumulated phase is reported with the principal value of the overlap
argument, so for unitary precession it grows by ``pi (1 + cos theta0)`` per
cycle. It therefore jumps by 2 pi when <v(0)|v(T)> crosses the negative real
axis (mid-cycle for theta0 < pi/2). ``phi_continuous`` is the same phase
unwrapped by continuity; the two differ by a multiple of 2 pi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson

from .algebra import eig_hermitian, hermitize
from .errors import DegeneracyEncountered, OverlapTooSmall, PreconditionViolated

GAP_TOL = 1e-8
MIN_OVERLAP = 0.9


def _inner(u, v):
    return np.sum(np.conj(u) * v, axis=-1)


def pancharatnam_increments(vectors) -> np.ndarray:
    """Phase increments ``-arg <v_j|v_{j+1}>`` with the O(h^2) chord correction.

    The geodesic polygon through the samples misses a sliver of solid angle
    on every step; the three-point Bargmann phase of neighbouring samples
    measures it (one sixth of a two-step triangle per step).
    """
    v = np.asarray(vectors)
    o1 = _inner(v[:-1], v[1:])
    if np.any(np.abs(o1) < MIN_OVERLAP):
        j = int(np.argmax(np.abs(o1) < MIN_OVERLAP))
        raise OverlapTooSmall(f"|<v_j|v_j+1>| = {abs(o1[j]):.3f} at sample {j}; sample more densely")
    inc = -np.angle(o1)
    if len(v) < 3:
        return inc
    # triangle phase of (j-1, j, j+1)
    tri = np.angle(o1[:-1] * o1[1:] * _inner(v[2:], v[:-2]))
    corr = np.empty_like(inc)
    corr[1:] = tri
    corr[0] = tri[0]
    corr[-1] = tri[-1]
    # average the two triangles that contain each step where both exist
    corr[1:-1] = 0.5 * (tri[:-1] + tri[1:])
    return inc - corr / 6.0


def pancharatnam_phase(vectors) -> np.ndarray:
    """Geometric phase along sampled vectors, unwrapped by continuity.

    Depends only on the rays, not on the phase of each vector.
    """
    v = np.asarray(vectors)
    total = np.angle(_inner(v[:1], v))
    acc = np.concatenate([[0.0], np.cumsum(pancharatnam_increments(v))])
    # increments are small, so unwrapping only fixes branch cuts of arg <v0|vj>
    return np.unwrap(total + acc)


def ground_real_gauge(vectors) -> np.ndarray:
    """Rephase so the ground-state component is real and non-negative."""
    v = np.asarray(vectors, dtype=complex)
    g = v[..., 1]
    phase = np.where(np.abs(g) > 0, np.conj(g) / np.where(np.abs(g) > 0, np.abs(g), 1), 1)
    return v * phase[..., None]


def connection_rate(rho, drho) -> np.ndarray:
    """``i <v|d_t v>`` for the dominant eigenvector in the ground-real gauge."""
    pair = eig_hermitian(hermitize(rho))
    v1 = ground_real_gauge(pair.vectors[..., :, 0])
    v2 = pair.vectors[..., :, 1]
    gap = pair.values[..., 0] - pair.values[..., 1]
    q = _inner(v2, np.einsum("...ij,...j->...i", drho, v1)) / gap
    return (v2[..., 1] * q).imag / v1[..., 1].real


@dataclass
class GpResult:
    taus: np.ndarray
    phi: np.ndarray             # accumulated, principal-valued closure term
    phi_continuous: np.ndarray  # unwrapped by continuity (Pancharatnam)
    phi_direct: np.ndarray      # explicit connection integral, same convention as phi
    eigenvalues: np.ndarray
    samples_per_cycle: int
    events: list = field(default_factory=list)

    @property
    def phi_mod(self) -> np.ndarray:
        m = np.mod(self.phi, 2 * math.pi)
        # tiny negatives round up to exactly 2 pi
        return np.where(m >= 2 * math.pi, 0.0, m)

    def at_cycle(self, n: int) -> float:
        return float(self.phi[int(n) * self.samples_per_cycle])

    @property
    def route_mismatch(self) -> float:
        """Largest |phi - phi_direct| over samples where both are defined."""
        d = np.abs(self.phi - self.phi_direct)
        return float(np.nanmax(d)) if np.any(np.isfinite(d)) else math.nan


class GpAccumulator:
    """Running eigen-trajectory state; feed samples in time order.

    Used for streaming evaluation; :func:`gp_accumulate` is the batch form
    and the two agree exactly on the uncorrected increments.
    """

    def __init__(self):
        self.v0 = None
        self.eps0 = None
        self.v_prev = None
        self.connection = 0.0
        self.phi = 0.0
        self.events = []

    def push(self, tau, rho):
        pair = eig_hermitian(hermitize(rho))
        if pair.values[0] - pair.values[1] < GAP_TOL:
            self.events.append(("degenerate", tau))
            raise DegeneracyEncountered(f"eigenvalues cross at tau={tau:.6g}", tau)
        v = ground_real_gauge(pair.vectors[:, 0])
        if self.v0 is None:
            self.v0, self.eps0, self.v_prev = v, pair.values[0], v
            return self.phi
        o = np.vdot(self.v_prev, v)
        if abs(o) < MIN_OVERLAP:
            raise OverlapTooSmall(f"|overlap| = {abs(o):.3f} at tau={tau:.6g}")
        self.connection -= np.angle(o)
        self.v_prev = v
        self.phi = float(np.angle(np.vdot(self.v0, v)) + self.connection)
        return self.phi


def gp_accumulate(traj) -> GpResult:
    """Geometric phase at every sample of a trajectory.

    Raises
    ------
    DegeneracyEncountered
        If the eigenvalue gap falls below 1e-8 (the state passes through
        the maximally mixed point and the branch is ill defined).
    OverlapTooSmall
        If successive samples are too far apart to follow the branch.
    """
    rhos = hermitize(np.asarray(traj.rhos))
    pair = eig_hermitian(rhos)
    gap = pair.values[:, 0] - pair.values[:, 1]
    bad = np.nonzero(gap < GAP_TOL)[0]
    if bad.size:
        tau = float(traj.taus[bad[0]])
        raise DegeneracyEncountered(f"eigenvalue gap {gap[bad[0]]:.2e} at tau={tau:.6g}", tau)
    if pair.values[0, 1] > 1e-9:
        raise PreconditionViolated("initial state must be pure (second eigenvalue 0)")

    v = ground_real_gauge(pair.vectors[:, :, 0])
    inc = pancharatnam_increments(v)
    connection = np.concatenate([[0.0], np.cumsum(inc)])
    closure = np.angle(_inner(v[:1], v))
    phi = closure + connection
    phi_cont = np.unwrap(phi)
    phi_cont += 2 * math.pi * np.round((phi[0] - phi_cont[0]) / (2 * math.pi))

    ground = np.abs(v[:, 1])
    if np.all(ground > 1e-6):
        dt = float(traj.taus[1] - traj.taus[0])
        rate = connection_rate(rhos, np.asarray(traj.drhos))
        direct = closure + cumulative_simpson(rate, dx=dt, initial=0.0)
    else:
        direct = np.full_like(phi, np.nan)

    spc = traj.params.samples_per_cycle
    return GpResult(np.asarray(traj.taus), phi, phi_cont, direct, pair.values, spc)


def unitary_gp(theta0: float, n: int = 1) -> float:
    """Accumulated unitary phase ``n pi (1 + cos theta0)``."""
    return n * math.pi * (1 + math.cos(theta0))


def gp_ratio(traj_or_result, theta0: float, n: int) -> float:
    res = traj_or_result if isinstance(traj_or_result, GpResult) else gp_accumulate(traj_or_result)
    return res.at_cycle(n) / unitary_gp(theta0, n)

"""Dense 2x2 complex linear algebra.

Matrices are plain ``numpy`` arrays of shape ``(..., 2, 2)``; every function
broadcasts over leading axes so a whole trajectory can be processed at once.
Basis convention: index 0 is the excited state |0>, index 1 the ground state |1>.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import NonHermitianInput

HERMITIAN_TOL = 1e-9
DEGENERATE_TOL = 1e-10

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
# sigma_+ sigma_- projects on the excited state
EXCITED = np.array([[1, 0], [0, 0]], dtype=complex)


def dag(m):
    return np.conj(np.swapaxes(m, -1, -2))


def commutator(a, b):
    return a @ b - b @ a


def anticommutator(a, b):
    return a @ b + b @ a


def hermitize(m):
    return 0.5 * (m + dag(m))


class EigenPair2(NamedTuple):
    """Eigen-decomposition of a Hermitian 2x2 matrix, eigenvalues descending.

    ``vectors[..., :, k]`` is the unit eigenvector of ``values[..., k]``.
    """

    values: np.ndarray
    vectors: np.ndarray
    degenerate: np.ndarray


def eig_hermitian(m, tol=HERMITIAN_TOL) -> EigenPair2:
    """Closed-form eigen-decomposition of Hermitian 2x2 matrices.

    The dominant eigenvector is built from whichever row of ``M - e1`` avoids
    cancellation, so the result is stable for nearly diagonal input. The
    gauge returned here is arbitrary but deterministic; phase conventions
    are the caller's business.

    Raises
    ------
    NonHermitianInput
        If ``max |M - M^dagger| > tol``.
    """
    m = np.asarray(m, dtype=complex)
    if np.max(np.abs(m - dag(m)), initial=0.0) > tol:
        raise NonHermitianInput("matrix is not Hermitian within %g" % tol)
    m = hermitize(m)
    a = m[..., 0, 0].real
    d = m[..., 1, 1].real
    b = m[..., 0, 1]
    mean = 0.5 * (a + d)
    half = 0.5 * (a - d)
    r = np.hypot(half, np.abs(b))
    values = np.stack([mean + r, mean - r], axis=-1)

    # v1 ~ (half + r, conj b) when half >= 0, else (b, r - half)
    pos = half >= 0
    x = np.where(pos, half + r, b)
    y = np.where(pos, np.conj(b), r - half)
    norm = np.sqrt(np.abs(x) ** 2 + np.abs(y) ** 2)
    flat = norm == 0
    x = np.where(flat, 1.0, x / np.where(flat, 1.0, norm))
    y = np.where(flat, 0.0, y / np.where(flat, 1.0, norm))
    v1 = np.stack([x, y], axis=-1).astype(complex)
    v2 = np.stack([-np.conj(y), np.conj(x)], axis=-1).astype(complex)
    vectors = np.stack([v1, v2], axis=-1)
    return EigenPair2(values, vectors, 2 * r < DEGENERATE_TOL)


def reconstruct(pair: EigenPair2):
    v = pair.vectors
    return (v * pair.values[..., None, :]) @ dag(v)

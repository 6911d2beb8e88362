import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heomgp.algebra import (
    IDENTITY,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    anticommutator,
    commutator,
    dag,
    eig_hermitian,
    hermitize,
    reconstruct,
)
from heomgp.errors import NonHermitianInput

finite = st.floats(-10, 10, allow_nan=False)


@st.composite
def hermitian(draw):
    a, d, re, im = (draw(finite) for _ in range(4))
    return np.array([[a, re + 1j * im], [re - 1j * im, d]])


@st.composite
def density(draw):
    x, y, z = (draw(st.floats(-1, 1)) for _ in range(3))
    n = max(1.0, np.sqrt(x * x + y * y + z * z))
    x, y, z = x / n, y / n, z / n
    return 0.5 * (IDENTITY + x * SIGMA_X + y * SIGMA_Y + z * SIGMA_Z)


def test_pauli_commutators():
    assert np.allclose(commutator(SIGMA_Z, SIGMA_Z), 0)
    assert np.allclose(commutator(SIGMA_X, SIGMA_Y), 2j * SIGMA_Z)
    assert np.allclose(anticommutator(SIGMA_X, SIGMA_X), 2 * IDENTITY)
    assert np.allclose(anticommutator(SIGMA_X, SIGMA_Y), 0)


def test_hand_evaluated_sigma_x_products():
    rho = np.diag([1.0, 0.0]).astype(complex)
    c = commutator(SIGMA_X, rho)
    assert c[0, 1] == -1 and c[1, 0] == 1 and c[0, 0] == 0 and c[1, 1] == 0
    a = anticommutator(SIGMA_X, np.diag([0.3, 0.5]))
    assert np.allclose(a, [[0, 0.8], [0.8, 0]])


@given(hermitian(), hermitian())
def test_commutator_structure(a, b):
    c = commutator(a, b)
    ac = anticommutator(a, b)
    assert np.allclose(c, -dag(c), atol=1e-12 * (1 + np.abs(c).max()))
    assert np.allclose(ac, dag(ac), atol=1e-12 * (1 + np.abs(ac).max()))


def test_hermitize_is_exact():
    m = np.random.default_rng(1).normal(size=(2, 2)) + 1j
    h = hermitize(m)
    assert np.array_equal(h, dag(h))


def test_eig_examples():
    pair = eig_hermitian(np.diag([1.0, 0.0]))
    assert np.allclose(pair.values, [1, 0])
    assert np.allclose(pair.vectors[:, 0], [1, 0])
    plus = 0.5 * (IDENTITY + SIGMA_X)
    pair = eig_hermitian(plus)
    assert np.allclose(pair.values, [1, 0])
    v = pair.vectors[:, 0]
    assert abs(abs(np.vdot(v, [1, 1])) / np.sqrt(2) - 1) < 1e-12


@settings(max_examples=300)
@given(hermitian())
def test_eig_properties(m):
    pair = eig_hermitian(m)
    v1, v2 = pair.vectors[:, 0], pair.vectors[:, 1]
    scale = 1 + np.abs(m).max()
    assert pair.values[0] >= pair.values[1]
    assert abs(np.vdot(v1, v2)) < 1e-10
    for k in range(2):
        v = pair.vectors[:, k]
        assert np.linalg.norm(m @ v - pair.values[k] * v) < 1e-10 * scale
    assert np.linalg.norm(reconstruct(pair) - m) < 1e-10 * scale


@given(density())
def test_density_eigenvalues(rho):
    pair = eig_hermitian(rho)
    assert abs(pair.values.sum() - 1) < 1e-12
    assert 0.5 - 1e-9 <= pair.values[0] <= 1 + 1e-9
    assert -1e-9 <= pair.values[1] <= 0.5 + 1e-9


def test_batched_reconstruction():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(10_000, 2, 2)) + 1j * rng.normal(size=(10_000, 2, 2))
    m = hermitize(a)
    err = np.linalg.norm(reconstruct(eig_hermitian(m)) - m, axis=(1, 2))
    assert err.max() < 1e-10


def test_near_diagonal_is_stable():
    m = np.array([[0.7, 1e-13], [1e-13, 0.3]])
    pair = eig_hermitian(m)
    assert np.linalg.norm(reconstruct(pair) - m) < 1e-15
    m = np.array([[0.3, 1e-13], [1e-13, 0.7]])
    assert np.linalg.norm(reconstruct(eig_hermitian(m)) - m) < 1e-15


def test_degenerate_flag():
    assert eig_hermitian(0.5 * IDENTITY).degenerate
    assert not eig_hermitian(np.diag([0.6, 0.4])).degenerate


def test_non_hermitian_rejected():
    with pytest.raises(NonHermitianInput):
        eig_hermitian(np.array([[1, 1], [0, 0]]))

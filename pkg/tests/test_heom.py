import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heomgp._kernels import rhs_kernel
from heomgp.algebra import SIGMA_X, commutator
from heomgp.errors import NotConverged
from heomgp.heom import (
    HierarchyState,
    convergence_scan,
    coupling_prefactor,
    initial_state,
    nu,
    pure_state,
    relaxation_rates,
    rhs,
    trace_drift,
)
from heomgp.integrate import _kernel_args, evolve
from heomgp.model import ModelParams
from heomgp.oracle import PseudomodeModel, qubit_reduce

SMALL = ModelParams(gamma0=1.0, depth=(4, 3), Delta=2.0, omegaD=3.0)


def random_ados(shape, seed):
    rng = np.random.default_rng(seed)
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def test_nu_pair():
    n1, n2 = nu(ModelParams(Omega=13.0))
    assert n1 == np.conj(n2) and n1.real == n2.real == 1.0


@pytest.mark.parametrize("theta,expect", [
    (0.0, [[1, 0], [0, 0]]),
    (math.pi / 2, [[0.5, 0.5], [0.5, 0.5]]),
    (math.pi / 4, [[0.853553, 0.353553], [0.353553, 0.146447]]),
])
def test_pure_state(theta, expect):
    assert np.allclose(pure_state(theta), expect, atol=1e-6)


def test_initial_state_layout():
    s = initial_state(ModelParams(depth=(3, 5)))
    assert s.ados.shape == (4, 6, 2, 2) and s.depth == (3, 5)
    assert np.count_nonzero(s.ados[1:]) == 0 and np.count_nonzero(s.ados[:, 1:]) == 0
    assert trace_drift(s) == 0


def test_relaxation_rates():
    p = ModelParams(Omega=3.0)
    r = relaxation_rates(p, (2, 2))
    assert r[2, 1] == 2 * (1 - 3j) + (1 + 3j)


@pytest.mark.parametrize("coupling,factor", [("literal", 1.0), ("matched", 0.5)])
def test_first_coupling_by_hand(coupling, factor):
    # with only rho(0,0) = diag(1,0) populated, the k=2 neighbour receives
    # -i pref ([sx, rho] + {sx, rho}) = -2i pref sx rho
    p = ModelParams(gamma0=0.3, depth=(2, 2), coupling=coupling)
    d = rhs(initial_state(p.replace(theta0=0.0)).ados, 0.0, p)
    expected = -1j * 0.3 * factor * SIGMA_X @ np.diag([1.0, 0.0])
    assert np.allclose(d[0, 1], expected, atol=1e-15)
    # k=1 receives -2i pref * (-rho sx)
    assert np.allclose(d[1, 0], 1j * 0.3 * factor * np.diag([1.0, 0.0]) @ SIGMA_X, atol=1e-15)
    assert coupling_prefactor(p) == pytest.approx(0.15 * factor)


@settings(max_examples=25, deadline=None)
@given(st.complex_numbers(max_magnitude=3), st.complex_numbers(max_magnitude=3),
       st.floats(0, 5), st.integers(0, 1000))
def test_rhs_is_linear(a, b, tau, seed):
    s1 = random_ados((5, 4, 2, 2), seed)
    s2 = random_ados((5, 4, 2, 2), seed + 1)
    lhs = rhs(a * s1 + b * s2, tau, SMALL)
    rhs_ = a * rhs(s1, tau, SMALL) + b * rhs(s2, tau, SMALL)
    assert np.allclose(lhs, rhs_, atol=1e-10 * (1 + np.abs(lhs).max()))


@pytest.mark.parametrize("coupling", ["matched", "literal"])
def test_compiled_kernel_matches_reference(coupling):
    p = SMALL.replace(coupling=coupling, depth=(6, 5))
    x = random_ados((7, 6, 2, 2), 3)
    ref = rhs(x, 0.37, p)
    fast = rhs_kernel(x, 0.37, *_kernel_args(p)[:-1])
    assert np.max(np.abs(ref - fast)) < 1e-12


def test_backends_agree_over_a_run():
    p = SMALL.replace(cycles=1, samples_per_cycle=32)
    a = evolve(p)
    b = evolve(p, backend="numpy")
    assert np.max(np.abs(a.rhos - b.rhos)) < 1e-12


def test_physical_trace_is_conserved_by_rhs():
    d = rhs(random_ados((5, 4, 2, 2), 9), 1.0, SMALL)
    assert abs(np.trace(d[0, 0])) < 1e-12


def test_conjugation_symmetry():
    p = ModelParams(gamma0=1.0, depth=(10, 10), cycles=3, theta0=1.1)
    a = evolve(p)
    q = p.replace(Omega=-p.Omega)
    s = initial_state(q)
    s = HierarchyState(np.conj(s.ados), 0.0)
    b = evolve(q, s)
    assert np.max(np.abs(np.conj(a.rhos) - b.rhos)) < 1e-9


def test_decoupling_limit():
    tr = evolve(ModelParams(gamma0=1e-12, cycles=10))
    assert np.max(np.abs(tr.R - 1)) < 1e-9


def test_zero_coupling_is_von_neumann():
    p = ModelParams(gamma0=0.0, depth=(2, 2), Delta=4.0, omegaD=1.5)
    s = initial_state(p)
    d = rhs(s.ados, 0.8, p)
    h = np.diag([20 + 4 * math.cos(1.2), 0])
    assert np.allclose(d[0, 0], -1j * commutator(h, s.rho), atol=1e-13)
    assert np.count_nonzero(d[1:]) == 0 and np.count_nonzero(d[:, 1:]) == 0


def _bath_curvature_heom(p):
    def second(q):
        x = initial_state(q).ados
        return rhs(rhs(x, 0.0, q), 0.0, q)[0, 0]
    return second(p) - second(p.replace(gamma0=0.0))


def _bath_curvature_oracle(p, n=6):
    def second(q, g):
        m = PseudomodeModel(q, n, g)
        return qubit_reduce(m.rhs(m.rhs(m.initial(), 0.0), 0.0), n)
    return second(p, math.sqrt(p.gamma0 / 2)) - second(p, 0.0)


def test_short_time_double_commutator():
    p = ModelParams(gamma0=0.8, depth=(3, 3), theta0=0.9)
    rho = pure_state(p.theta0)
    dc = commutator(SIGMA_X, commutator(SIGMA_X, rho))
    heom = _bath_curvature_heom(p)
    oracle = _bath_curvature_oracle(p)
    c_heom = -np.vdot(dc, heom).real / np.vdot(dc, dc).real
    c_oracle = -np.vdot(dc, oracle).real / np.vdot(dc, dc).real
    assert np.allclose(heom, -c_heom * dc, atol=1e-12)
    assert c_heom == pytest.approx(p.gamma0 / 2, rel=1e-12)
    assert abs(c_heom / c_oracle - 1) < 0.01
    # the literal prefactor doubles the coefficient and misses the oracle
    lit = _bath_curvature_heom(p.replace(coupling="literal"))
    assert -np.vdot(dc, lit).real / np.vdot(dc, dc).real == pytest.approx(2 * c_oracle)


def test_convergence_scan_weak_coupling():
    rep = convergence_scan(ModelParams(gamma0=0.01), [(5, 5), (10, 10)])
    assert rep.converged and rep.distances[0] < 1e-6
    rows = list(rep.rows())
    assert rows[0]["distance"] is None and rows[1]["N1"] == 10


def test_convergence_scan_decoupled_depths_identical():
    rep = convergence_scan(ModelParams(gamma0=0.0, cycles=2), [(1, 1), (4, 4)])
    assert rep.distances == [0.0]


def test_convergence_scan_strong_coupling():
    rep = convergence_scan(ModelParams(gamma0=1.0), [(10, 10), (25, 25)])
    assert rep.distances[0] < 1e-6
    assert min(rep.min_eigenvalues) >= -1e-6


def test_convergence_scan_reports_failure():
    with pytest.raises(NotConverged):
        convergence_scan(ModelParams(gamma0=1.0, cycles=3), [(1, 1), (2, 2)])
    rep = convergence_scan(ModelParams(gamma0=1.0, cycles=3), [(1, 1), (2, 2)],
                           raise_on_failure=False)
    assert not rep.converged


def test_kernel_flushes_negligible_entries():
    from heomgp._kernels import TINY, propagate

    p = ModelParams(gamma0=1e-12, depth=(3, 3))
    x = np.full_like(initial_state(p).ados, 1e-260)
    y, ok = propagate(x, 0.0, 1e-4, 3, *_kernel_args(p))
    assert ok and TINY < 1e-200 and not np.any(y)
    ref = evolve(p.replace(cycles=1), backend="numpy")
    assert np.max(np.abs(evolve(p.replace(cycles=1)).rhos - ref.rhos)) < 1e-13

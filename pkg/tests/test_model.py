import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from heomgp.model import ModelParams, correlation, hamiltonian, omega0, spectral_density


def test_defaults_and_derived():
    p = ModelParams()
    assert (p.Omega, p.gamma0, p.depth, p.cycles) == (20.0, 0.01, (25, 25), 15)
    assert p.tau_c == 1.0 and p.tau_r == pytest.approx(100.0)
    assert p.markovian and not p.replace(gamma0=1.0).markovian
    assert p.period == pytest.approx(2 * math.pi / 20)
    q = p.replace(Delta=7.0, period_policy="omega-plus-delta")
    assert q.period == pytest.approx(2 * math.pi / 27)


@pytest.mark.parametrize("bad", [dict(gamma0=-1), dict(depth=(0, 3)), dict(dt=0.0),
                                 dict(theta0=4.0), dict(period_policy="x"), dict(coupling="x")])
def test_validation(bad):
    with pytest.raises(ValueError):
        ModelParams(**bad)


def test_omega0_examples():
    assert omega0(0.0, ModelParams(Delta=5, omegaD=5)) == 25
    assert omega0(3.3, ModelParams(Delta=0)) == 20
    assert omega0(math.pi / 4, ModelParams(Delta=7, omegaD=4)) == pytest.approx(13)


def test_hamiltonian():
    assert np.array_equal(hamiltonian(1.7, ModelParams()), np.diag([20, 0]))
    p = ModelParams(Delta=3.0, omegaD=2.0)
    assert np.allclose(hamiltonian(math.pi / 2, p), np.diag([17, 0]))
    for tau in np.random.default_rng(0).uniform(0, 10, 100):
        h = hamiltonian(tau, p)
        assert np.array_equal(h, h.conj().T)


def test_spectral_density_values():
    p = ModelParams(gamma0=1.0)
    peak = spectral_density(20.0, p)
    assert peak == pytest.approx(1 / (2 * math.pi))
    assert spectral_density(21.0, p) == pytest.approx(peak / 2)
    assert spectral_density(19.0, p) == pytest.approx(peak / 2)
    assert spectral_density(22.0, p) == pytest.approx(0.031831, abs=1e-6)


@given(st.floats(0, 10), st.floats(0.01, 5))
def test_spectral_density_even_and_positive(d, g):
    p = ModelParams(gamma0=g)
    assert spectral_density(p.Omega + d, p) == pytest.approx(spectral_density(p.Omega - d, p))
    assert spectral_density(p.Omega + d, p) > 0


@given(st.floats(-20, 20))
def test_correlation_symmetry_and_modulus(t):
    p = ModelParams(gamma0=0.6)
    assert correlation(-t, p) == pytest.approx(np.conj(correlation(t, p)))
    assert abs(correlation(t, p)) == pytest.approx(0.3 * math.exp(-abs(t)))


def test_correlation_at_zero():
    c = correlation(0.0, ModelParams(gamma0=0.4))
    assert c == 0.2 and np.imag(c) == 0


@pytest.mark.parametrize("w", [15.0, 19.0, 20.0, 22.0, 30.0])
def test_spectral_density_from_correlation(w):
    p = ModelParams(gamma0=1.0)
    val = quad(lambda t: (correlation(t, p) * np.exp(1j * w * t)).real, 0, np.inf, limit=200)[0]
    assert abs(val / math.pi / spectral_density(w, p) - 1) < 1e-3


def test_one_sided_transform_gap():
    # integrating J over (0, inf) instead of the full line misses the tail
    # below zero frequency: at t = 0 the relative gap is (pi/2 - atan Omega)/pi
    for omega in (20.0, 50.0):
        p = ModelParams(gamma0=1.0, Omega=omega)
        c0 = quad(lambda w: spectral_density(w, p), 0, np.inf)[0]
        gap = 1 - c0 / correlation(0.0, p).real
        assert gap == pytest.approx((math.pi / 2 - math.atan(omega)) / math.pi, rel=1e-6)
    # measured: 1.59e-2 at Omega = 20, about 1/(pi Omega)

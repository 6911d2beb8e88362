"""Compiled hierarchy propagation; mirrors :func:`heomgp.heom.rhs` term by term."""
import numpy as np
from numba import njit

# ADO entries below this magnitude are flushed to zero
TINY = 1e-250


@njit(cache=True)
def _rhs_into(x, out, tau, omega, delta, omega_d, nu1, nu2, pref):
    a, b = x.shape[0], x.shape[1]
    w = omega + delta * np.cos(omega_d * tau)
    iw = 1j * w
    for n1 in range(a):
        for n2 in range(b):
            rate = n1 * nu1 + n2 * nu2
            d00 = -rate * x[n1, n2, 0, 0]
            d01 = -(rate + iw) * x[n1, n2, 0, 1]
            d10 = -(rate - iw) * x[n1, n2, 1, 0]
            d11 = -rate * x[n1, n2, 1, 1]
            # upward couplings -i [sigma_x, y], with
            # [sigma_x, y] = [[y10 - y01, y11 - y00], [y00 - y11, y01 - y10]]
            if n1 + 1 < a:
                u00 = x[n1 + 1, n2, 0, 0]
                u01 = x[n1 + 1, n2, 0, 1]
                u10 = x[n1 + 1, n2, 1, 0]
                u11 = x[n1 + 1, n2, 1, 1]
                d00 -= 1j * (u10 - u01)
                d01 -= 1j * (u11 - u00)
                d10 -= 1j * (u00 - u11)
                d11 -= 1j * (u01 - u10)
            if n2 + 1 < b:
                u00 = x[n1, n2 + 1, 0, 0]
                u01 = x[n1, n2 + 1, 0, 1]
                u10 = x[n1, n2 + 1, 1, 0]
                u11 = x[n1, n2 + 1, 1, 1]
                d00 -= 1j * (u10 - u01)
                d01 -= 1j * (u11 - u00)
                d10 -= 1j * (u00 - u11)
                d11 -= 1j * (u01 - u10)
            # k = 1: [sigma_x, y] - {sigma_x, y} = -2 y sigma_x
            if n1 > 0:
                c = 2j * pref * n1
                d00 += c * x[n1 - 1, n2, 0, 1]
                d01 += c * x[n1 - 1, n2, 0, 0]
                d10 += c * x[n1 - 1, n2, 1, 1]
                d11 += c * x[n1 - 1, n2, 1, 0]
            # k = 2: [sigma_x, y] + {sigma_x, y} = 2 sigma_x y
            if n2 > 0:
                c = -2j * pref * n2
                d00 += c * x[n1, n2 - 1, 1, 0]
                d01 += c * x[n1, n2 - 1, 1, 1]
                d10 += c * x[n1, n2 - 1, 0, 0]
                d11 += c * x[n1, n2 - 1, 0, 1]
            out[n1, n2, 0, 0] = d00
            out[n1, n2, 0, 1] = d01
            out[n1, n2, 1, 0] = d10
            out[n1, n2, 1, 1] = d11


@njit(cache=True)
def rhs_kernel(x, tau, omega, delta, omega_d, nu1, nu2, pref):
    out = np.empty_like(x)
    _rhs_into(x, out, tau, omega, delta, omega_d, nu1, nu2, pref)
    return out


@njit(cache=True)
def _axpy(out, y, h, k):
    fy = y.ravel()
    fk = k.ravel()
    fo = out.ravel()
    for i in range(fy.size):
        fo[i] = fy[i] + h * fk[i]


@njit(cache=True)
def propagate(x, tau0, dt, steps, omega, delta, omega_d, nu1, nu2, pref, limit):
    """``steps`` RK4 steps from ``tau0``; returns (state, ok flag)."""
    k1 = np.empty_like(x)
    k2 = np.empty_like(x)
    k3 = np.empty_like(x)
    k4 = np.empty_like(x)
    tmp = np.empty_like(x)
    y = x.copy()
    fy = y.ravel()
    f1, f2, f3, f4 = k1.ravel(), k2.ravel(), k3.ravel(), k4.ravel()
    sixth = dt / 6.0
    for i in range(steps):
        t = tau0 + i * dt
        _rhs_into(y, k1, t, omega, delta, omega_d, nu1, nu2, pref)
        _axpy(tmp, y, 0.5 * dt, k1)
        _rhs_into(tmp, k2, t + 0.5 * dt, omega, delta, omega_d, nu1, nu2, pref)
        _axpy(tmp, y, 0.5 * dt, k2)
        _rhs_into(tmp, k3, t + 0.5 * dt, omega, delta, omega_d, nu1, nu2, pref)
        _axpy(tmp, y, dt, k3)
        _rhs_into(tmp, k4, t + dt, omega, delta, omega_d, nu1, nu2, pref)
        peak = 0.0
        for m in range(fy.size):
            fy[m] += sixth * (f1[m] + 2.0 * f2[m] + 2.0 * f3[m] + f4[m])
            mag = abs(fy[m])
            if mag < TINY:
                # deep ADOs at tiny coupling would otherwise decay into
                # subnormals, which are very slow to compute with
                fy[m] = 0.0
                mag = 0.0
            if not mag <= peak:  # NaN-propagating max
                peak = mag
        if not peak < limit:
            return y, False
    return y, True

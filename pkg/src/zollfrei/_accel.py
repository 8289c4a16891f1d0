"""Hot numerical kernels with an optional numba backend.

Every kernel exists in two flavours: a loop version compiled with
``numba.njit`` and a vectorised numpy version. The numba path is used
when numba imports cleanly and the environment variable
``ZOLLFREI_DISABLE_NUMBA`` is unset or ``0``. Both paths return the same
values up to floating point reassociation.
"""

import os

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None

_DISABLED = os.environ.get("ZOLLFREI_DISABLE_NUMBA", "0") not in ("", "0")
USE_NUMBA = njit is not None and not _DISABLED


def _mixture_numpy(r2, coeffs, widths):
    out = np.zeros_like(r2)
    for c, k in zip(coeffs, widths):
        out += c * np.exp(-k * r2)
    return out


def _mixture_loop(r2, coeffs, widths):
    out = np.empty_like(r2)
    flat = r2.ravel()
    res = out.ravel()
    for i in range(flat.size):
        acc = 0.0
        for j in range(coeffs.size):
            acc += coeffs[j] * np.exp(-widths[j] * flat[i])
        res[i] = acc
    return out


def _pair_sum_numpy(plus, minus, u, w):
    # plus/minus have shape (m, n): integrand samples at mu +- u_j.
    return ((plus - minus) / u) @ w


def _pair_sum_loop(plus, minus, u, w):
    m, n = plus.shape
    out = np.zeros(m, dtype=plus.dtype)
    for i in range(m):
        acc = out[i]
        for j in range(n):
            acc += w[j] * (plus[i, j] - minus[i, j]) / u[j]
        out[i] = acc
    return out


def _rk4_numpy(rhs_half, h):
    # With a right-hand side depending on s only, one RK4 step reduces to
    # Simpson updates; cumulative sums give the same recurrence.
    r0 = rhs_half[0:-1:2]
    rm = rhs_half[1::2]
    r1 = rhs_half[2::2]
    dv = h / 6.0 * (r0 + 4.0 * rm + r1)
    dnu_part = h * h / 6.0 * (r0 + 2.0 * rm)
    v = np.concatenate(([0.0], np.cumsum(dv)))
    nu = np.concatenate(([0.0], np.cumsum(h * v[:-1] + dnu_part)))
    return nu, v


def _rk4_loop(rhs_half, h):
    n = (rhs_half.size - 1) // 2
    nu = np.zeros(n + 1)
    v = np.zeros(n + 1)
    for i in range(n):
        r0 = rhs_half[2 * i]
        rm = rhs_half[2 * i + 1]
        r1 = rhs_half[2 * i + 2]
        # Classical RK4 for (nu, v)' = (v, r(s)).
        k1n = v[i]
        k2n = v[i] + 0.5 * h * r0
        k3n = v[i] + 0.5 * h * rm
        k4n = v[i] + h * rm
        nu[i + 1] = nu[i] + h / 6.0 * (k1n + 2.0 * k2n + 2.0 * k3n + k4n)
        v[i + 1] = v[i] + h / 6.0 * (r0 + 4.0 * rm + r1)
    return nu, v


def _horner_numpy(coeffs, w):
    acc = np.zeros_like(w)
    for c in coeffs[::-1]:
        acc = acc * w + c
    return acc


def _horner_loop(coeffs, w):
    # coefficient loop outside, point loop inside: the Horner recurrence is
    # serial per point, so independent points are what can be vectorised
    n = w.size
    wr = w.real.copy()
    wi = w.imag.copy()
    ar = np.zeros(n)
    ai = np.zeros(n)
    for j in range(coeffs.size - 1, -1, -1):
        cr = coeffs[j].real
        ci = coeffs[j].imag
        for i in range(n):
            t = ar[i] * wr[i] - ai[i] * wi[i] + cr
            ai[i] = ar[i] * wi[i] + ai[i] * wr[i] + ci
            ar[i] = t
    out = np.empty(n, dtype=np.complex128)
    for i in range(n):
        out[i] = complex(ar[i], ai[i])
    return out


if USE_NUMBA:
    _mixture = njit(cache=True)(_mixture_loop)
    _pair_sum = njit(cache=True)(_pair_sum_loop)
    _rk4 = njit(cache=True)(_rk4_loop)
    _horner = njit(cache=True)(_horner_loop)
else:
    _mixture = _mixture_numpy
    _pair_sum = _pair_sum_numpy
    _rk4 = _rk4_numpy
    _horner = _horner_numpy


def gaussian_mixture(r2, coeffs, widths):
    """Evaluate ``sum_j c_j exp(-k_j r2)`` elementwise."""
    r2 = np.asarray(r2, dtype=float)
    flat = np.ascontiguousarray(r2.ravel())
    out = _mixture(flat, np.asarray(coeffs, float), np.asarray(widths, float))
    return out.reshape(r2.shape)


def pair_sum(plus, minus, u, w):
    """Symmetric-pair principal value sum ``sum_j w_j (p_ij - m_ij) / u_j``."""
    plus = np.ascontiguousarray(plus)
    minus = np.ascontiguousarray(minus, dtype=plus.dtype)
    return _pair_sum(plus, minus, np.asarray(u, float), np.asarray(w, float))


def rk4_pure_forcing(rhs_half, h):
    """Integrate ``nu'' = r(s)`` from rest with fixed-step RK4.

    Parameters
    ----------
    rhs_half : ndarray
        Samples of ``r`` on the half-step grid ``s_0 + j h / 2``, odd length.
    h : float
        Step size (may be negative for backward integration).

    Returns
    -------
    nu, dnu : ndarray
        Solution and derivative on the full-step grid.
    """
    rhs_half = np.ascontiguousarray(rhs_half, dtype=float)
    if rhs_half.size % 2 != 1:
        raise ValueError("half-step samples must have odd length")
    return _rk4(rhs_half, float(h))


def horner(coeffs, w):
    """Evaluate ``sum_j coeffs[j] w**j`` for complex ``w`` of any shape."""
    w = np.asarray(w, dtype=complex)
    flat = np.ascontiguousarray(w.ravel())
    return _horner(np.asarray(coeffs, complex), flat).reshape(w.shape)


def set_threads(n):
    """Cap the numba thread pool at ``n``; a no-op on the numpy path."""
    if not USE_NUMBA:
        return
    import numba

    numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))

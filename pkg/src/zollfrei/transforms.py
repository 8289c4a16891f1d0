"""Radon, dual Radon, half-Radon and Hilbert transforms.

Conventions
-----------
The Hilbert transform carries a factor ``i``::

    (H phi)(mu) = (i / pi) * pv int phi(nu) / (nu - mu) dnu

so that it equals ``-i`` times the classical transform
``(1/pi) pv int phi(nu) / (mu - nu) dnu``. With this normalisation
``H(H phi) = phi`` and ``H`` maps real even functions to imaginary odd ones.

In this convention the inversion formula for an axisymmetric ``f`` reads::

    f = (i / 2) * (d/dmu H f_hat)^vee

where ``f_hat`` is the Radon transform and ``^vee`` the dual transform.
"""

import numpy as np
from scipy.interpolate import CubicSpline

from . import _accel
from .profiles import (
    GaussianMixture,
    LineFunction,
    OddMixture,
    OddProfile,
    OddTabulated,
    PlaneFunction,
    RadialProfile,
    TabulatedProfile,
    fit_power_tail,
    profile_from_dict,
)
from .quadrature import QuadratureConfig, converge, half_line_rule, uniform_rule

__all__ = [
    "EvenTable",
    "GaussianMixture",
    "LineFunction",
    "OddMixture",
    "OddProfile",
    "OddTabulated",
    "PlaneFunction",
    "QuadratureConfig",
    "RadialProfile",
    "TabulatedProfile",
    "dual_radon",
    "half_radon",
    "hilbert",
    "hilbert_involution_residual",
    "LineTable",
    "inversion_residual",
    "profile_from_dict",
    "radon",
    "radon_table",
]

DEFAULT_CFG = QuadratureConfig()
DIFF_STEP = 1e-3


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _line_rule(f, length, n):
    if getattr(f, "rapidly_decreasing", True):
        return uniform_rule(0.0, length, n)
    return half_line_rule(length, n)


def radon(f, mu, cfg=DEFAULT_CFG):
    """Radon transform of an axisymmetric profile.

    Parameters
    ----------
    f : RadialProfile
    mu : float or array_like
        Signed distance of the line from the origin.
    cfg : QuadratureConfig

    Returns
    -------
    float or ndarray
        ``int f(sqrt(t**2 + mu**2)) dt`` over the whole line.
    """
    mu, scalar = _as_array(mu)
    flat = np.abs(mu.ravel())
    length = cfg.truncation(f.cutoff, float(flat.max(initial=0.0)))

    def estimate(n):
        t, w = _line_rule(f, length, n)
        vals = f.radial(np.sqrt(t[:, None] ** 2 + flat[None, :] ** 2))
        return 2.0 * (w @ vals)

    out = converge(estimate, cfg, "radon").reshape(mu.shape)
    return float(out) if scalar else out


def half_radon(f, sigma, mu, sign, cfg=DEFAULT_CFG):
    """One-sided line integral from the foot point to ``sign * infinity``.

    The line is ``t -> (cos(sigma) t - sin(sigma) mu, sin(sigma) t + cos(sigma) mu)``
    and the integral follows the orientation, so ``sign = -1`` returns
    ``int_0^{-inf} = -int_{-inf}^0``.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    mu, scalar = _as_array(mu)
    flat = mu.ravel()
    length = cfg.truncation(f.cutoff, float(np.abs(flat).max(initial=0.0)))
    c, s = np.cos(sigma), np.sin(sigma)

    def estimate(n):
        t, w = _line_rule(f, length, n)
        tt = sign * t[:, None]
        vals = f.value_xy(c * tt - s * flat[None, :], s * tt + c * flat[None, :])
        return sign * (w @ vals)

    out = converge(estimate, cfg, "half radon").reshape(mu.shape)
    return float(out) if scalar else out


def dual_radon(phi, x, cfg=DEFAULT_CFG):
    """Angular average of a line function over all lines through ``x``.

    Parameters
    ----------
    phi : LineFunction or callable ``phi(sigma, mu)``
    x : array_like, shape (2,) or (m, 2)

    Returns
    -------
    scalar or ndarray of shape (m,)
    """
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)

    def estimate(n):
        m = 8 * n
        sig = 2.0 * np.pi * np.arange(m) / m
        mu = -pts[:, :1] * np.sin(sig)[None, :] + pts[:, 1:2] * np.cos(sig)[None, :]
        vals = np.asarray(phi(np.broadcast_to(sig, mu.shape), mu))
        return vals.mean(axis=1)

    out = converge(estimate, cfg, "dual radon")
    return out[0] if single else out


def hilbert(phi, mu, cfg=DEFAULT_CFG, scale=1.0):
    """Hilbert transform ``(i/pi) pv int phi(nu) / (nu - mu) dnu``.

    The principal value uses symmetric-pair excision,
    ``pv int phi(nu)/(nu - mu) dnu = int_0^inf (phi(mu+u) - phi(mu-u)) / u du``.
    The half line is split at ``multiplier * max(scale, |mu|) + 5``; the
    remainder is integrated after the substitution ``u = length / v`` so that
    inputs with algebraic decay (such as Hilbert transforms themselves) are
    handled without truncation error.

    Parameters
    ----------
    phi : callable
        Vectorised function of one real variable, real or complex valued.
    mu : float or array_like
    scale : float
        Effective support radius of ``phi``.
    """
    mu, scalar = _as_array(mu)
    flat = mu.ravel()
    length = cfg.truncation(scale, float(np.abs(flat).max(initial=0.0)))

    def estimate(n):
        u, w = half_line_rule(length, n)
        plus = np.asarray(phi(flat[:, None] + u[None, :]))
        minus = np.asarray(phi(flat[:, None] - u[None, :]))
        if np.iscomplexobj(plus) or np.iscomplexobj(minus):
            plus = plus.astype(complex)
            minus = minus.astype(complex)
        return _accel.pair_sum(plus, minus, u, w)

    loc = None if flat.size != 1 else float(flat[0])
    pv = converge(estimate, cfg, "hilbert principal value", location=loc)
    out = (1j / np.pi) * pv.reshape(mu.shape)
    return complex(out) if scalar else out


class EvenTable:
    """Even function of one variable tabulated on ``[0, V]``.

    Used to hold a Radon transform so that repeated evaluation (inside a
    Hilbert transform, say) costs a spline lookup. Outside the table either
    zero or a fitted even algebraic tail is used.
    """

    def __init__(self, x, values, power_tail=None):
        self.x = np.asarray(x, float)
        self.values = np.asarray(values, float)
        full_x = np.concatenate((-self.x[:0:-1], self.x))
        full_v = np.concatenate((self.values[:0:-1], self.values))
        self._spline = CubicSpline(full_x, full_v)
        self.power_tail = power_tail

    def __call__(self, x):
        x = np.abs(np.asarray(x, float))
        out = np.zeros_like(x)
        inside = x <= self.x[-1]
        out[inside] = self._spline(x[inside])
        if self.power_tail is not None and np.any(~inside):
            coeffs, powers = self.power_tail
            xo = x[~inside]
            out[~inside] = sum(a * xo ** (-float(p)) for a, p in zip(coeffs, powers))
        return out


def _negligible(values, rel=1e-13):
    peak = np.max(np.abs(values))
    return peak == 0.0 or abs(values[-1]) <= rel * peak


def radon_table(f, cfg=DEFAULT_CFG, step=5e-3, extent=None):
    """Tabulate the Radon transform of ``f`` on ``[0, extent]``."""
    if extent is None:
        extent = cfg.truncation(f.cutoff)
    nodes = np.arange(0.0, extent + 0.5 * step, step)
    values = radon(f, nodes, cfg)
    tail = None
    if not f.rapidly_decreasing and not _negligible(values):
        sel = nodes >= 0.7 * nodes[-1]
        powers = (2, 4, 6)
        tail = (fit_power_tail(nodes[sel], values[sel], powers), powers)
    return EvenTable(nodes, values, tail)


def hilbert_of_radon(f, mu, cfg=DEFAULT_CFG, table=None):
    """``H f_hat`` at ``mu`` using a tabulated Radon transform."""
    if table is None:
        table = radon_table(f, cfg)
    return hilbert(table, mu, cfg, scale=f.cutoff)


def inversion_residual(f, grid, cfg=DEFAULT_CFG, table=None):
    """Max relative error of the inversion formula on sample points.

    Computes ``f_hat``, then ``H f_hat`` on a ``mu`` grid of step ``1e-3``,
    differentiates with the five-point stencil, applies the dual transform
    and compares ``(i/2) (d H f_hat)^vee`` with ``f``.

    Parameters
    ----------
    f : RadialProfile
    grid : array_like, shape (m, 2)
    cfg : QuadratureConfig
    table : EvenTable, optional
        Precomputed Radon table of ``f``.

    Returns
    -------
    float
    """
    pts = np.atleast_2d(np.asarray(grid, float))
    peak = f.max_abs()
    if peak == 0.0:
        return 0.0
    rmax = float(np.max(np.hypot(pts[:, 0], pts[:, 1])))
    h = DIFF_STEP
    m = int(np.ceil(rmax / h)) + 3
    mu = h * np.arange(0, m + 3)
    if table is None:
        table = radon_table(f, cfg)
    hf = hilbert(table, mu, cfg, scale=f.cutoff)
    # H f_hat is odd: extend by symmetry to get stencils across mu = 0.
    ext = np.concatenate((-hf[2:0:-1], hf))
    deriv = (-ext[4:] + 8.0 * ext[3:-1] - 8.0 * ext[1:-3] + ext[:-4]) / (12.0 * h)
    dmu = mu[: deriv.size]
    spline_re = CubicSpline(dmu, deriv.real)
    spline_im = CubicSpline(dmu, deriv.imag)

    def g(sigma, nu):
        a = np.abs(nu)
        return spline_re(a) + 1j * spline_im(a)

    rec = 0.5j * dual_radon(LineFunction(g), pts, cfg)
    if np.max(np.abs(rec.imag)) > 1e-6 * peak:
        raise ArithmeticError("reconstruction has a non-negligible imaginary part")
    exact = f.value_xy(pts[:, 0], pts[:, 1])
    return float(np.max(np.abs(rec.real - exact)) / peak)



class LineTable:
    """Complex function on the line, tabulated on ``[-V, V]``.

    Beyond the table each side continues with its own fitted algebraic tail
    ``sum_p a_p x**-p``, ``p = 1..5``, which is the decay of a Hilbert
    transform of a rapidly decreasing function.
    """

    POWERS = (1, 2, 3, 4, 5)

    def __init__(self, x, values):
        self.x = np.asarray(x, float)
        values = np.asarray(values, complex)
        self._re = CubicSpline(self.x, values.real)
        self._im = CubicSpline(self.x, values.imag)
        sel = self.x >= 0.7 * self.x[-1]
        self._plus = self._fit(self.x[sel], values[sel])
        sel = self.x <= 0.7 * self.x[0]
        self._minus = self._fit(self.x[sel], values[sel])

    def _fit(self, x, v):
        re = fit_power_tail(np.abs(x), v.real, self.POWERS)
        im = fit_power_tail(np.abs(x), v.imag, self.POWERS)
        return np.asarray(re) + 1j * np.asarray(im)

    def __call__(self, x):
        x = np.asarray(x, float)
        out = np.empty(x.shape, complex)
        inside = np.abs(x) <= self.x[-1]
        out[inside] = self._re(x[inside]) + 1j * self._im(x[inside])
        for mask, coeffs in ((x > self.x[-1], self._plus), (x < self.x[0], self._minus)):
            if np.any(mask):
                a = np.abs(x[mask])
                out[mask] = sum(c * a ** (-float(p)) for c, p in zip(coeffs, self.POWERS))
        return out


def hilbert_involution_residual(phi, grid, cfg=DEFAULT_CFG, scale=1.0, step=2e-2):
    """Max relative error of ``H(H phi) = phi`` on ``grid``.

    The inner transform is tabulated on ``[-V, V]`` with ``V`` the truncation
    length for ``scale`` and continued by fitted algebraic tails; the outer
    transform is then evaluated directly at the grid points.
    """
    grid = np.asarray(grid, float)
    extent = cfg.truncation(scale)
    x = np.arange(-extent, extent + 0.5 * step, step)
    inner = np.concatenate([np.atleast_1d(hilbert(phi, x[lo : lo + 512], cfg, scale)) for lo in range(0, x.size, 512)])
    table = LineTable(x, inner)
    twice = hilbert(table, grid, cfg, scale)
    ref = np.asarray(phi(grid))
    peak = float(np.max(np.abs(ref)))
    err = float(np.max(np.abs(twice - ref)))
    return err if peak == 0.0 else err / peak

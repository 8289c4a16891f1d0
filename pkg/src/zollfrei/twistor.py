"""Twistor data of the singular Zollfrei structures.

A radially symmetric ``f`` corresponds to a purely imaginary odd function
``h`` through::

    h = (1/4) H f_hat,        f = 2i (d h / dt)^vee

with the Hilbert transform ``H`` of :mod:`zollfrei.transforms`. The
twistor space is ``CP^3`` with the deformed real projective space ``P``,
whose points are ``[z : t2 + rho h(z3 / rho)]`` for real ``z = (z1, z2, z3)``,
``rho = sqrt(z1**2 + z2**2)`` and real ``t2``.

Holomorphic disks are built from the half-integer Fourier coefficients
``h_{a,l}`` of ``theta -> h(a exp(-i theta/2) + conj(a) exp(i theta/2))``
through the series ``F(a, w) = 4i / (1 - w) * sum_l h_{a,l} w**(l+1)``
and, over the equator, through the Cauchy integral ``G``.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from scipy.fft import fft

from . import _accel
from .charts import ChartPoint, InfinityTag, transition
from .errors import AliasingError, DomainError, PoleError
from .profiles import (
    GaussianMixture,
    OddMixture,
    OddTabulated,
    TabulatedProfile,
    fit_power_tail,
)
from .quadrature import QuadratureConfig, converge, half_line_rule, uniform_rule
from .transforms import hilbert, radon_table

DEFAULT_CFG = QuadratureConfig()
TABLE_STEP = 1e-2
L_DEFAULT = 64
L_MAX = 1 << 16
TAIL_REL = 1e-10
P_TOL = 1e-10
_TINY = 1e-14


def _negligible(values, rel=1e-13):
    peak = np.max(np.abs(values))
    return peak == 0.0 or abs(values[-1]) <= rel * peak


def _tail(nodes, values, powers):
    if _negligible(values):
        return None
    sel = nodes >= 0.7 * nodes[-1]
    return fit_power_tail(nodes[sel], values[sel], powers), powers


# ---------------------------------------------------------------------------
# f <-> h
# ---------------------------------------------------------------------------


def f_to_h(f, cfg=DEFAULT_CFG, step=TABLE_STEP, extent=None, table=None):
    """Odd imaginary ``h = H f_hat / 4`` tabulated on a uniform grid.

    Parameters
    ----------
    f : RadialProfile
    cfg : QuadratureConfig
    step : float
        Grid step of the returned table.
    extent : float, optional
        Table length; defaults to the truncation length of ``f``.
    table : EvenTable, optional
        Precomputed Radon table of ``f``.

    Returns
    -------
    OddProfile
        ``OddTabulated`` carrying an odd algebraic tail ``t**-1, t**-3, t**-5``
        beyond the grid, or the zero profile when ``f`` vanishes.
    """
    if f.max_abs() == 0.0:
        return OddMixture(())
    if extent is None:
        extent = cfg.truncation(f.cutoff)
    if table is None:
        table = radon_table(f, cfg)
    t = np.arange(0.0, extent + 0.5 * step, step)
    s = np.empty_like(t)
    for lo in range(0, t.size, 512):
        chunk = t[lo : lo + 512]
        s[lo : lo + 512] = 0.25 * np.imag(hilbert(table, chunk, cfg, scale=f.cutoff))
    return OddTabulated(t, s, cutoff=f.cutoff, power_tail=_tail(t, s, (1, 3, 5)))


def h_to_f(h, cfg=DEFAULT_CFG, step=TABLE_STEP, extent=None):
    """Radial profile ``f = 2i (dh/dt)^vee``.

    For ``h = i s`` and a radial result this is
    ``f(r) = -(4/pi) int_0^{pi/2} s'(r cos(sigma)) dsigma``, which is real
    by construction.

    Returns
    -------
    RadialProfile
        ``TabulatedProfile`` with an algebraic tail ``r**-3, r**-5, r**-7``
        when needed, or the zero profile when ``h`` vanishes.
    """
    if h.max_abs() == 0.0:
        return GaussianMixture(())
    if extent is None:
        extent = cfg.truncation(h.cutoff)
    r = np.arange(0.0, extent + 0.5 * step, step)
    values = np.empty_like(r)
    for lo in range(0, r.size, 512):
        chunk = r[lo : lo + 512]

        def estimate(n, chunk=chunk):
            sig, w = uniform_rule(0.0, 0.5 * np.pi, n)
            return -(4.0 / np.pi) * (h.ds(chunk[:, None] * np.cos(sig)[None, :]) @ w)

        values[lo : lo + 512] = converge(estimate, cfg, "dual transform of dh")
    return TabulatedProfile(r, values, cutoff=h.cutoff, power_tail=_tail(r, values, (3, 5, 7)))


def correspondence_error(a, b, radius=None, n=401):
    """Max relative difference of two radial (or two odd) profiles on ``[0, radius]``."""
    if radius is None:
        radius = 3.0 * a.cutoff
    x = np.linspace(0.0, radius, n)
    if hasattr(a, "radial"):
        va, vb = a.radial(x), b.radial(x)
    else:
        va, vb = a.s(x), b.s(x)
    peak = np.max(np.abs(va))
    diff = np.max(np.abs(va - vb))
    return float(diff if peak == 0.0 else diff / peak)


# ---------------------------------------------------------------------------
# Fourier coefficients and the disk series
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FourierCoeffs:
    """Half-integer Fourier coefficients ``h_{a,l}``, ``l = 0..L``.

    ``h(a exp(-i theta/2) + conj(a) exp(i theta/2))`` equals
    ``sum_l h_{a,l} exp(i theta (l + 1/2)) - conj(h_{a,l}) exp(-i theta (l + 1/2))``.
    """

    a: complex
    L: int
    coeffs: np.ndarray = field(compare=False)

    def reconstruct(self, theta):
        theta = np.asarray(theta, float)
        e = np.exp(0.5j * theta)
        w = np.exp(1j * theta)
        s = e * _accel.horner(self.coeffs, w)
        return s - np.conj(s)

    def residual(self, h, n=1024):
        """Max reconstruction error on ``n`` points of ``[0, 4 pi)``."""
        theta = 4.0 * np.pi * np.arange(n) / n
        arg = 2.0 * np.real(self.a * np.exp(-0.5j * theta))
        return float(np.max(np.abs(self.reconstruct(theta) - h.h(arg))))

    def half_sum(self, theta):
        """``sum_l h_{a,l} exp(i theta (l + 1/2))``."""
        theta = np.asarray(theta, float)
        return np.exp(0.5j * theta) * _accel.horner(self.coeffs, np.exp(1j * theta))


def fourier_coeffs(h, a, L=L_DEFAULT, adapt=True):
    """Coefficients ``h_{a,l}`` by an FFT on the double cover.

    ``phi = theta / 2`` runs over ``N = 8 L`` equispaced points of
    ``[0, 2 pi)``; the half-integer frequency ``l + 1/2`` in ``theta`` is the
    odd harmonic ``2 l + 1`` in ``phi``.

    Parameters
    ----------
    h : OddProfile
    a : complex
    L : int
        Initial truncation order, a power of two not below 8.
    adapt : bool
        Double ``L`` until ``|h_{a,L}| < 1e-10 max |h_{a,l}|``.

    Raises
    ------
    AliasingError
        The tail test fails at the largest allowed order.
    """
    L = int(L)
    if L < 8 or L & (L - 1):
        raise ValueError("L must be a power of two and at least 8")
    a = complex(a)
    while True:
        n = 8 * L
        phi = 2.0 * np.pi * np.arange(n) / n
        g = np.asarray(h.h(2.0 * np.real(a * np.exp(-1j * phi))), complex)
        c = fft(g) / n
        coeffs = c[1 : 2 * L + 2 : 2].copy()
        peak = float(np.max(np.abs(coeffs)))
        if peak == 0.0 or abs(coeffs[-1]) <= TAIL_REL * peak:
            return FourierCoeffs(a, L, coeffs)
        if not adapt or L >= L_MAX:
            raise AliasingError(f"|h_(a,L)| / max = {abs(coeffs[-1]) / peak:.2e} at L = {L}; increase L")
        L *= 2


def omega_of(zeta):
    """Cayley map ``(zeta - i) / (zeta + i)``."""
    zeta = np.asarray(zeta, complex)
    return (zeta - 1j) / (zeta + 1j)


def F_series(coeffs, omega):
    """``F(a, w) = 4i / (1 - w) sum_l h_{a,l} w**(l+1)`` for ``|w| <= 1``.

    Raises
    ------
    PoleError
        At ``w = 1``, where the boundary form must be used instead.
    """
    w = np.asarray(omega, complex)
    if np.any(np.abs(w) > 1.0 + 1e-12):
        raise DomainError("F_series needs |omega| <= 1; use F_exterior")
    if np.any(w == 1.0):
        raise PoleError("omega = 1 is the pole of 1/(1 - omega); use the boundary form")
    out = 4j * w * _accel.horner(coeffs.coeffs, w) / (1.0 - w)
    return complex(out) if out.ndim == 0 else out


def F_exterior(coeffs, omega):
    """``-conj(F(a, 1 / conj(w)))`` for ``|w| >= 1``."""
    w = np.asarray(omega, complex)
    if np.any(np.abs(w) < 1.0 - 1e-12):
        raise DomainError("F_exterior needs |omega| >= 1")
    out = -np.conj(np.asarray(F_series(coeffs, 1.0 / np.conj(w))))
    return complex(out) if out.ndim == 0 else out


def a_of(x1, x2):
    """Disk parameter ``a = (i/2)(x1 + i x2)``."""
    return 0.5j * complex(x1, x2)


def H_plus(h, x1, x2, zeta, L=L_DEFAULT, coeffs=None):
    """``H+(x1, x2, zeta) = F(a, w(zeta))`` for ``Im zeta >= 0``."""
    if coeffs is None:
        coeffs = fourier_coeffs(h, a_of(x1, x2), L)
    return F_series(coeffs, omega_of(zeta))


def H_minus(h, x1, x2, zeta, L=L_DEFAULT, coeffs=None):
    """``H-(x1, x2, zeta) = -conj(F(a, 1/conj(w(zeta))))`` for ``Im zeta <= 0``."""
    if coeffs is None:
        coeffs = fourier_coeffs(h, a_of(x1, x2), L)
    zeta = np.asarray(zeta, complex)
    inv = np.conj((zeta + 1j) / (zeta - 1j))
    out = -np.conj(np.asarray(F_series(coeffs, inv)))
    return complex(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Cauchy integral and the equatorial integral
# ---------------------------------------------------------------------------


def _g_interior(h, xi, cfg):
    x0, y = xi.real, xi.imag
    length = cfg.truncation(h.cutoff, x0)
    h0 = complex(h.h(np.array(x0)))

    def estimate(n):
        u, w = half_line_rule(length, n, graded_from=y)
        hp = h.h(x0 + u)
        hm = h.h(x0 - u)
        d = u * u + y * y
        i1 = w @ (u * (hp - hm) / d)
        i2 = w @ ((hp + hm - 2.0 * h0) / d)
        return np.array([i1, i2])

    i1, i2 = converge(estimate, cfg, "Cauchy integral", location=complex(xi))
    return i1 / (np.pi * 1j) + y * i2 / np.pi + h0


def G_cauchy(h, xi, cfg=DEFAULT_CFG):
    """``G(xi) = (1/(pi i)) int h(mu) / (mu - xi) dmu`` on ``Im xi >= 0``.

    Off the axis the integral is split into pairs ``xi.real +- u``; the part
    ``i pi h(xi.real)`` of the Lorentzian kernel is taken out exactly, so the
    rule only has to resolve the scale ``Im xi``. On the axis the boundary
    value ``-H h + h`` is returned.
    """
    xi_arr = np.asarray(xi, complex)
    flat = xi_arr.ravel()
    if np.any(flat.imag < -_TINY):
        raise DomainError("G is defined on the closed upper half plane")
    out = np.empty(flat.shape, complex)
    for k, z in enumerate(flat):
        if z.imag <= _TINY:
            x = np.array(z.real)
            out[k] = -hilbert(h.h, x, cfg, scale=h.cutoff) + complex(h.h(x))
        else:
            out[k] = _g_interior(h, z, cfg)
    return complex(out[0]) if xi_arr.ndim == 0 else out.reshape(xi_arr.shape)


def B_integral(h, beta, xi, cfg=DEFAULT_CFG):
    """Equatorial integral ``B(alpha, beta, xi)`` for ``beta != 0`` and ``Im xi > 0``.

    ``(1 + xi^2 tan^2 b)/(pi i) int_{-cot b}^{cot b} h(mu) dmu /
    ((mu - xi sqrt(1 - mu^2 tan^2 b)) sqrt(1 - mu^2 tan^2 b))``; it does not
    depend on ``alpha``. The central part ``|mu| <= M`` is integrated in
    ``mu``, the rest after ``mu = cot(b) sin(phi)``, which removes the
    square-root endpoint singularity.
    """
    xi = complex(xi)
    if xi.imag <= 0:
        raise DomainError("B_integral needs Im xi > 0")
    tb = np.tan(beta)
    if tb == 0.0:
        raise DomainError("beta = 0: use G_cauchy")
    cot = abs(1.0 / tb)
    m = min(cfg.truncation(h.cutoff, abs(xi)), 0.5 * cot)
    phi0 = np.arcsin(m / cot)

    def estimate(n):
        mu, w = uniform_rule(-m, m, n)
        root = np.sqrt(1.0 - (mu * tb) ** 2)
        core = w @ (h.h(mu) / ((mu - xi * root) * root))
        ph, wp = uniform_rule(phi0, 0.5 * np.pi, n)
        mu_o = cot * np.sin(ph)
        outer = wp @ (cot * (h.h(mu_o) / (mu_o - xi * np.cos(ph)) + h.h(-mu_o) / (-mu_o - xi * np.cos(ph))))
        return core + outer

    total = converge(estimate, cfg, "B integral")
    return complex((1.0 + xi * xi * tb * tb) / (np.pi * 1j) * total)


def B_series(h, alpha, beta, xi, L=L_DEFAULT):
    """``B`` through the D-chart series: ``z1 * H+-`` at the W point ``(alpha, beta)``."""
    tb = np.tan(beta)
    if tb == 0.0:
        raise DomainError("beta = 0: use G_cauchy")
    ca, sa = np.cos(alpha), np.sin(alpha)
    xi = complex(xi)
    z1 = -xi * ca * tb - sa
    if z1 == 0:
        raise PoleError("z1 = 0: the fibre point is at zeta = infinity")
    zeta = (-xi * sa * tb + ca) / z1
    cot = 1.0 / tb
    x1, x2 = ca * cot, sa * cot
    H = H_plus if tb > 0 else H_minus
    return complex(z1 * H(h, x1, x2, zeta, L))


def equator_term(h, alpha, beta, xi, L=L_DEFAULT, cfg=DEFAULT_CFG):
    """Fourth-coordinate correction of the W-chart map.

    ``G(xi)`` on the equator; near it (``|tan(beta)| < 0.05``, ``Im xi > 0``)
    the integral form of ``B``, whose cost does not grow as ``beta -> 0``;
    otherwise the series ``z1 H+-``.
    """
    xi = complex(xi)
    if beta == 0.0 or abs(np.tan(beta)) < 1e-15:
        return complex(G_cauchy(h, xi, cfg))
    if abs(np.tan(beta)) < 0.05 and xi.imag > _TINY:
        return B_integral(h, beta, xi, cfg)
    return B_series(h, alpha, beta, xi, L)


@dataclass(frozen=True)
class BContinuity:
    """Result of :func:`B_continuity`."""

    betas: tuple
    residuals: tuple
    alpha_spread: float
    series_vs_integral: float

    @property
    def ratios(self):
        r = self.residuals
        return tuple(r[k] / r[k + 1] if r[k + 1] > 0 else np.inf for k in range(len(r) - 1))

    def to_dict(self):
        return {
            "betas": list(self.betas),
            "residuals": list(self.residuals),
            "ratios": [float(v) for v in self.ratios],
            "alpha_spread": self.alpha_spread,
            "series_vs_integral": self.series_vs_integral,
        }


def B_continuity(h, xi, betas=(1e-2, 1e-3), alphas=(0.3, 1.4, 2.9, 4.6), cfg=DEFAULT_CFG):
    """Distance of ``B(alpha, beta, xi)`` from ``G(xi)`` along ``beta -> 0``.

    Returns the residuals ``|B - G|`` for each ``beta`` (from the integral),
    the spread of the series form over ``alphas`` and the largest
    series/integral discrepancy.
    """
    g = G_cauchy(h, xi, cfg)
    res, spread, disc = [], 0.0, 0.0
    for b in betas:
        bi = B_integral(h, b, xi, cfg)
        res.append(abs(bi - g))
        if abs(np.tan(b)) > 0.05:
            bs = np.array([B_series(h, al, b, xi) for al in alphas])
            spread = max(spread, float(np.ptp(bs.real) + np.ptp(bs.imag)))
            disc = max(disc, float(np.max(np.abs(bs - bi))))
    return BContinuity(tuple(float(b) for b in betas), tuple(float(r) for r in res), spread, disc)


# ---------------------------------------------------------------------------
# Points of CP^3 and the set P
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwistorPoint:
    """Point of ``CP^3`` stored with its largest entry scaled to 1."""

    z: np.ndarray = field(compare=False)

    def __post_init__(self):
        z = np.array(self.z, dtype=complex).reshape(4)
        if not np.all(np.isfinite(z)):
            raise DomainError("twistor coordinates must be finite")
        k = int(np.argmax(np.abs(z)))
        if abs(z[k]) == 0.0:
            raise DomainError("the zero vector is not a point of CP^3")
        object.__setattr__(self, "z", z / z[k])

    def gz(self):
        """Affine coordinates ``(Gz1, Gz2, Gz3)`` of the chart ``z2 + i z1 != 0``."""
        z1, z2, z3, z4 = self.z
        d = z2 + 1j * z1
        if abs(d) < 1e-14:
            raise DomainError("point lies outside the (Gz) chart")
        return (z2 - 1j * z1) / d, z3 / d, z4 / d

    def distance(self, other):
        """Max entry difference after scaling ``other`` by this point's pivot."""
        k = int(np.argmax(np.abs(self.z)))
        if other.z[k] == 0:
            return np.inf
        return float(np.max(np.abs(self.z - other.z / other.z[k])))

    def to_list(self):
        return [[float(v.real), float(v.imag)] for v in self.z]


Y0 = TwistorPoint(np.array([0, 0, 0, 1], complex))


def _real_base(z3vec):
    """Real unit representative of ``[z1:z2:z3]`` and the phase that makes it real."""
    k = int(np.argmax(np.abs(z3vec)))
    lam = np.conj(z3vec[k]) / abs(z3vec[k])
    w = lam * z3vec
    norm = np.linalg.norm(w)
    return w / norm, lam / norm


def section(h, w):
    """Fourth coordinate ``rho h(w3 / rho)`` of the deformed section over real ``w``."""
    rho = float(np.hypot(w[0], w[1]))
    if rho == 0.0:
        return 0j
    return rho * complex(h.h(np.array(w[2] / rho)))


def p_residual(y, h):
    """Distance of ``y`` from ``P`` (union ``y0``) measured on a real unit base representative."""
    z = y.z
    if np.max(np.abs(z[:3])) == 0.0:
        return 0.0
    w, lam = _real_base(z[:3])
    r_base = float(np.max(np.abs(w.imag)))
    q = lam * z[3]
    r_fib = abs(q.imag - section(h, w.real).imag)
    return max(r_base, r_fib)


def gz_residual(y, h):
    """Distance of ``y`` from ``P`` in the ``(Gz)`` coordinates.

    ``P`` in this chart is ``(e^{i th}, t1 e^{i th/2}, (t2 + h(t1)) e^{i th/2})``
    with real ``th, t1, t2``; the residual is the largest of ``||Gz1| - 1|``,
    ``|Im t1|`` and ``|Im t2|``.
    """
    g1, g2, g3 = y.gz()
    r1 = abs(abs(g1) - 1.0)
    half = np.sqrt(g1 / abs(g1))
    t1 = g2 / half
    t2 = g3 / half - complex(h.h(np.array(t1.real)))
    return float(max(r1, abs(t1.imag), abs(t2.imag)))


# ---------------------------------------------------------------------------
# The map Phi_C
# ---------------------------------------------------------------------------


def _fiber_check(p):
    if p.fiber is None:
        raise DomainError("phi_C needs a chart point with a fibre coordinate")
    z = p.fiber
    if p.chart == "Dminus":
        if z.imag > _TINY:
            raise DomainError("D- fibres live in Im zeta <= 0")
    elif z.imag < -_TINY:
        raise DomainError(f"{p.chart} fibres live in the closed upper half plane")
    return z


def phi_C(h, p, L=L_DEFAULT, cfg=DEFAULT_CFG):
    """Holomorphic map from the disk bundle over ``TS^2`` into ``CP^3``.

    ``D+``: ``[1 : zeta : -x1 - x2 zeta : -x3 zeta + x4 + H+]`` with
    ``Im zeta >= 0``; ``D-`` the same with ``H-`` and ``Im zeta <= 0``.
    ``W``: ``[-xi cos(a) tan(b) - sin(a) : -xi sin(a) tan(b) + cos(a) : xi :
    -eps1 xi + eps2 + B]`` with ``Im xi >= 0``, where ``B = G(xi)`` on the
    equator and ``B = z1 H+-`` elsewhere.

    Parameters
    ----------
    h : OddProfile
    p : ChartPoint
        Point with its fibre coordinate.
    """
    z = _fiber_check(p)
    if p.chart in ("Dplus", "Dminus"):
        x1, x2, x3, x4 = p.coords
        H = H_plus if p.chart == "Dplus" else H_minus
        hv = H(h, x1, x2, z, L)
        return TwistorPoint(np.array([1.0, z, -x1 - x2 * z, -x3 * z + x4 + hv]))
    alpha, beta, e1, e2 = p.coords
    ca, sa = np.cos(alpha), np.sin(alpha)
    tb = np.tan(beta)
    base = -e1 * z + e2 + equator_term(h, alpha, beta, z, L, cfg)
    return TwistorPoint(np.array([-z * ca * tb - sa, -z * sa * tb + ca, z, base]))


def holomorphy_residual(h, f, x1, x2, zeta, step=1e-3, L=None):
    """Residual of ``(-zeta d1 + d2) H+ = (f/2)(zeta^2 + 1)`` at one point.

    Derivatives in ``x1, x2`` use the fourth-order central stencil with a
    truncation order frozen at the centre so that all stencil values come
    from the same discretisation.
    """
    if L is None:
        L = fourier_coeffs(h, a_of(x1, x2)).L

    def H(u1, u2):
        return H_plus(h, u1, u2, zeta, coeffs=fourier_coeffs(h, a_of(u1, u2), L, adapt=False))

    def d(fun):
        return (-fun(2) + 8.0 * fun(1) - 8.0 * fun(-1) + fun(-2)) / (12.0 * step)

    d1 = d(lambda k: H(x1 + k * step, x2))
    d2 = d(lambda k: H(x1, x2 + k * step))
    rhs = 0.5 * float(f.value_xy(np.array(x1), np.array(x2))) * (zeta * zeta + 1.0)
    return abs(-zeta * d1 + d2 - rhs)


# ---------------------------------------------------------------------------
# Disk families
# ---------------------------------------------------------------------------


class DiskCase(Enum):
    INTERIOR = "Interior"
    EXTERIOR = "Exterior"
    CASE2 = "Case2"
    INFINITY = "Infinity"


@dataclass(frozen=True)
class DiskParams:
    """Parameters of one holomorphic disk.

    ``Interior``/``Exterior`` use ``a`` and ``kappa``; ``Case2`` uses
    ``alpha`` and ``v = (v0, v1)`` with ``v(xi) = v0 + v1 xi``; ``Infinity``
    uses a real unit vector ``z``.
    """

    case: DiskCase
    a: complex = 0j
    kappa: complex = 0j
    alpha: float = 0.0
    v: tuple = (0.0, 0.0)
    z: tuple = (0.0, 0.0, 1.0)

    def __post_init__(self):
        object.__setattr__(self, "case", DiskCase(self.case))
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "kappa", complex(self.kappa))
        object.__setattr__(self, "alpha", float(self.alpha) % (2.0 * np.pi))
        v = tuple(float(c) for c in self.v)
        if len(v) != 2:
            raise ValueError("case-2 disks take v = (v0, v1)")
        object.__setattr__(self, "v", v)
        z = np.asarray(self.z, float)
        if z.shape != (3,) or abs(np.linalg.norm(z) - 1.0) > 1e-10:
            raise ValueError("infinity disks take a real unit 3-vector")
        object.__setattr__(self, "z", tuple(float(c) for c in z))

    def values(self):
        """Real parameter vector used for round-trip comparisons."""
        if self.case in (DiskCase.INTERIOR, DiskCase.EXTERIOR):
            return np.array([self.a.real, self.a.imag, self.kappa.real, self.kappa.imag])
        if self.case is DiskCase.CASE2:
            return np.array([np.cos(self.alpha), np.sin(self.alpha), *self.v])
        return np.array(self.z)

    def to_dict(self):
        d = {"case": self.case.value}
        if self.case in (DiskCase.INTERIOR, DiskCase.EXTERIOR):
            d.update(a=[self.a.real, self.a.imag], kappa=[self.kappa.real, self.kappa.imag])
        elif self.case is DiskCase.CASE2:
            d.update(alpha=self.alpha, v=list(self.v))
        else:
            d.update(z=list(self.z))
        return d

    def chart_point(self, fiber):
        """The chart point whose ``phi_C`` image is this disk (cases 1 and 2)."""
        if self.case is DiskCase.INFINITY:
            t = np.array(self.z)
            helper = np.array([1.0, 0.0, 0.0]) if abs(t[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
            tv = np.cross(t, helper)
            tv /= np.linalg.norm(tv)
            return InfinityTag(tuple(tv), tuple(np.cross(t, tv)))
        if self.case is DiskCase.CASE2:
            v0, v1 = self.v
            return ChartPoint("W", (self.alpha, 0.0, -v1, v0), fiber)
        x1, x2 = 2.0 * self.a.imag, -2.0 * self.a.real
        x3, x4 = -2.0 * self.kappa.real, -2.0 * self.kappa.imag
        chart = "Dplus" if self.case is DiskCase.INTERIOR else "Dminus"
        return ChartPoint(chart, (x1, x2, x3, x4), fiber)


def disk_params_of(p):
    """Disk through the fibre of a ``D+``/``D-`` point or an equatorial ``W`` point."""
    if p.chart == "W":
        alpha, beta, e1, e2 = p.coords
        if beta != 0.0:
            raise DomainError("case-2 disks sit over beta = 0; transition to D+/D- first")
        return DiskParams(DiskCase.CASE2, alpha=alpha, v=(e2, -e1))
    x1, x2, x3, x4 = p.coords
    case = DiskCase.INTERIOR if p.chart == "Dplus" else DiskCase.EXTERIOR
    return DiskParams(case, a=a_of(x1, x2), kappa=complex(-0.5 * x3, -0.5 * x4))


def disk_point(d, h, param, L=L_DEFAULT, cfg=DEFAULT_CFG):
    """Point of the disk ``d`` at ``param``.

    ``Interior``: ``[1 : zeta : -2 Im a + 2 Re a zeta : -2 Im k + 2 Re k zeta + F(a, w(zeta))]``
    on ``Im zeta >= 0``; ``Exterior`` the same with the exterior series on
    ``Im zeta <= 0``; ``Case2``: ``[-sin a : cos a : xi : v0 + v1 xi + G(xi)]``
    on ``Im xi >= 0``; ``Infinity``: ``[z : u + rho h(z3/rho)]`` on
    ``Im u >= 0``, with ``u = inf`` giving ``y0``.
    """
    if d.case is DiskCase.INFINITY:
        if param is None or (np.isscalar(param) and np.isinf(abs(param))):
            return Y0
        u = complex(param)
        if u.imag < -_TINY:
            raise DomainError("infinity disks live in Im u >= 0")
        z = np.array(d.z)
        return TwistorPoint(np.array([z[0], z[1], z[2], u + section(h, z)]))
    if d.case is DiskCase.CASE2:
        xi = complex(param)
        if xi.imag < -_TINY:
            raise DomainError("case-2 disks live in Im xi >= 0")
        ca, sa = np.cos(d.alpha), np.sin(d.alpha)
        v0, v1 = d.v
        return TwistorPoint(np.array([-sa, ca, xi, v0 + v1 * xi + G_cauchy(h, xi, cfg)]))
    zeta = complex(param)
    interior = d.case is DiskCase.INTERIOR
    if (interior and zeta.imag < -_TINY) or (not interior and zeta.imag > _TINY):
        raise DomainError(f"{d.case.value} disks live in the {'upper' if interior else 'lower'} half plane")
    coeffs = fourier_coeffs(h, d.a, L)
    w = omega_of(zeta)
    hv = F_series(coeffs, w) if interior else F_exterior(coeffs, w)
    a, k = d.a, d.kappa
    return TwistorPoint(
        np.array([1.0, zeta, -2 * a.imag + 2 * a.real * zeta, -2 * k.imag + 2 * k.real * zeta + hv])
    )


def boundary_samples(h, rng, n, L=L_DEFAULT, cfg=DEFAULT_CFG, box=1.5):
    """Random boundary points of ``phi_C`` spread over ``D+``, ``D-`` and the equator.

    Returns a list of ``(ChartPoint, TwistorPoint)`` pairs.
    """
    out = []
    for k in range(n):
        chart = ("Dplus", "Dminus", "W")[k % 3]
        if chart == "W":
            alpha = rng.uniform(0.0, 2.0 * np.pi)
            e1, e2 = rng.uniform(-box, box, 2)
            p = ChartPoint("W", (alpha, 0.0, e1, e2), rng.uniform(-3.0, 3.0))
        else:
            x = rng.uniform(-box, box, 4)
            p = ChartPoint(chart, tuple(x), np.tan(rng.uniform(-1.3, 1.3)))
        out.append((p, phi_C(h, p, L, cfg)))
    return out


# ---------------------------------------------------------------------------
# Foliation probe
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProbeResult:
    """Disk through a twistor point and the parameter of the point on it."""

    disk: DiskParams
    param: complex
    point: Optional[object] = None

    def to_dict(self):
        pt = self.point
        return {
            "disk": self.disk.to_dict(),
            "param": [self.param.real, self.param.imag],
            "point": pt.to_dict() if isinstance(pt, ChartPoint) else {"t": list(pt.t), "v": list(pt.v)},
        }


def _infinity_probe(y, h):
    w, lam = _real_base(y.z[:3])
    z = w.real
    u = lam * y.z[3] - section(h, z)
    if abs(u.imag) <= P_TOL:
        raise DomainError("point lies on P: it is a boundary point of a disk family")
    if u.imag < 0:
        z, u = -z, -u
    d = DiskParams(DiskCase.INFINITY, z=tuple(z))
    return ProbeResult(d, complex(u), d.chart_point(None))


def foliation_probe(y, h, L=L_DEFAULT, cfg=DEFAULT_CFG, w_band=0.5):
    """Unique disk of the foliation through ``y`` and the parameter of ``y``.

    The first three coordinates fix the standard disk: their real and
    imaginary parts span a real 2-plane whose oriented normal ``t`` is the
    base point on ``S^2``. Points with ``|t3| >= w_band * |(t1, t2)|`` are
    solved in ``D+``/``D-``, the others in ``W``. The fourth coordinate then
    determines the remaining two real parameters linearly.

    Raises
    ------
    DomainError
        If ``y`` is ``y0`` or lies on ``P``.
    """
    z = y.z
    if y.distance(Y0) <= P_TOL:
        raise DomainError("y0 lies on every infinity disk; it is not an interior point")
    w = z[:3]
    if np.max(np.abs(w)) == 0.0:
        raise DomainError("y0 lies on every infinity disk; it is not an interior point")
    w = w / w[int(np.argmax(np.abs(w)))]
    t = np.cross(w.real, w.imag)
    tn = np.linalg.norm(t)
    if tn <= 1e-12:
        return _infinity_probe(y, h)
    t = t / tn
    rho = np.hypot(t[0], t[1])
    if abs(t[2]) >= w_band * rho:
        chart = "Dplus" if t[2] > 0 else "Dminus"
        zv = z / z[0]
        zeta = zv[1]
        x2 = -zv[2].imag / zeta.imag
        x1 = -zv[2].real - x2 * zeta.real
        H = H_plus if chart == "Dplus" else H_minus
        q = zv[3] - H(h, x1, x2, zeta, L)
        x3 = -q.imag / zeta.imag
        x4 = q.real + x3 * zeta.real
        p = ChartPoint(chart, (x1, x2, x3, x4), zeta)
        return ProbeResult(disk_params_of(p), complex(zeta), p)
    alpha = float(np.arctan2(t[1], t[0]) % (2.0 * np.pi))
    beta = float(np.arctan(t[2] / rho))
    ca, sa = np.cos(alpha), np.sin(alpha)
    amp = -sa * z[0] + ca * z[1]
    xi = z[2] / amp
    q = z[3] / amp
    if abs(np.tan(beta)) < 1e-15:
        beta = 0.0
    q = q - equator_term(h, alpha, beta, xi, L, cfg)
    e1 = -q.imag / xi.imag
    e2 = q.real + e1 * xi.real
    p = ChartPoint("W", (alpha, beta, e1, e2), xi)
    if beta == 0.0:
        return ProbeResult(disk_params_of(p), complex(xi), p)
    dp = transition(p, "Dplus" if beta > 0 else "Dminus")
    return ProbeResult(disk_params_of(dp), complex(dp.fiber), dp)


def probe_point(h, r, L=L_DEFAULT, cfg=DEFAULT_CFG):
    """Re-evaluate the twistor point described by a :class:`ProbeResult`."""
    return disk_point(r.disk, h, r.param, L, cfg)


# ---------------------------------------------------------------------------
# The jump of Re H across Im w1 = 0
# ---------------------------------------------------------------------------


def _theta(s):
    th = float(np.angle((s - 1j) / (s + 1j)))
    return th % (2.0 * np.pi)


def varpi_limits(h, s, A, L=L_DEFAULT):
    """Closed-form one-sided limits of ``H(t)`` along ``(s + it, A(-s + it), c(t))``.

    Returns ``(re_plus, re_minus, im_limit)``.
    """
    if A <= 0:
        raise DomainError("A must be positive")
    th = _theta(s)
    sh = np.sin(0.5 * th)
    if sh == 0.0:
        raise DomainError("sin(theta/2) = 0")
    coeffs = fourier_coeffs(h, 0.5 * A, L)
    S = complex(coeffs.half_sum(th))
    re_plus = -2.0 * S.real / sh
    im_limit = float((1j * complex(h.h(np.array(A * np.cos(0.5 * th))))).real / sh)
    return float(re_plus), float(-re_plus), im_limit


def varpi_jump(h, s, A, L=L_DEFAULT):
    """``|lim_{t->0+} Re H - lim_{t->0-} Re H|`` from the Fourier sum."""
    re_plus, re_minus, _ = varpi_limits(h, s, A, L)
    return abs(re_plus - re_minus)


def varpi_numeric_limits(h, s, A, t=1e-8, L=L_DEFAULT):
    """``H(t)`` and ``H(-t)`` evaluated from ``H+`` and ``H-`` at ``x = (0, -A)``."""
    coeffs = fourier_coeffs(h, 0.5 * A, L)
    hp = H_plus(h, 0.0, -A, complex(s, t), coeffs=coeffs)
    hm = H_minus(h, 0.0, -A, complex(s, -t), coeffs=coeffs)
    return complex(hp), complex(hm)


__all__ = [
    "BContinuity",
    "B_continuity",
    "B_integral",
    "B_series",
    "DiskCase",
    "DiskParams",
    "F_exterior",
    "F_series",
    "FourierCoeffs",
    "G_cauchy",
    "H_minus",
    "H_plus",
    "ProbeResult",
    "TwistorPoint",
    "Y0",
    "a_of",
    "boundary_samples",
    "correspondence_error",
    "disk_params_of",
    "disk_point",
    "equator_term",
    "f_to_h",
    "foliation_probe",
    "fourier_coeffs",
    "gz_residual",
    "h_to_f",
    "holomorphy_residual",
    "omega_of",
    "p_residual",
    "phi_C",
    "probe_point",
    "section",
    "varpi_jump",
    "varpi_limits",
    "varpi_numeric_limits",
]

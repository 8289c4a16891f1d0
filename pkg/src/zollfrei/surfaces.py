"""Beta-surfaces of the patched Petean structure.

On ``TD+`` (coefficient ``f``) and ``TD-`` (coefficient ``-f``) a beta-surface
with parameters ``(sigma, c1, c2)`` is cut out by::

    r1 = -sin(sigma) x1 + cos(sigma) x2 - c1
    r2 = cos(sigma) x3 + sin(sigma) x4 +- phi(x1, x2, sigma) - c2

with the potential ``phi`` below. Near the equator ``beta = 0`` of the
``W`` chart the same surfaces read::

    r1 = sin(alpha - sigma) - c1 tan(beta)
    r2 = -c1 eps1 - cos(alpha - sigma) eps2 + Psi - c2

where ``Psi`` is half of a one-sided line integral for ``beta != 0`` and
``+-f_hat(c1) / 4`` on ``beta = 0``.
"""

from dataclasses import dataclass, replace

import numpy as np

from .charts import ChartPoint, GrassPoint, antipodal, transition
from .errors import DomainError
from .petean import PeteanMetric, orthonormal_frame
from .quadrature import QuadratureConfig, converge, uniform_rule
from .transforms import half_radon, radon

DEFAULT_CFG = QuadratureConfig()
FD_STEP = 1e-5


@dataclass(frozen=True)
class BetaParams:
    """Parameters of a beta-surface, with ``sigma`` reduced to ``[0, pi)``.

    ``(sigma, c1, c2)`` and ``(sigma + pi, -c1, -c2)`` describe the same
    surface; the constructor maps the latter to the former.
    """

    sigma: float
    c1: float
    c2: float

    def __post_init__(self):
        s = float(self.sigma) % (2.0 * np.pi)
        c1, c2 = float(self.c1), float(self.c2)
        if s >= np.pi:
            s, c1, c2 = s - np.pi, -c1, -c2
        if s >= np.pi:  # rounding right below 2 pi
            s = 0.0
        object.__setattr__(self, "sigma", s)
        object.__setattr__(self, "c1", c1)
        object.__setattr__(self, "c2", c2)

    def to_dict(self):
        return {"sigma": self.sigma, "c1": self.c1, "c2": self.c2}


def _sign_of(chart):
    if chart == "Dplus":
        return 1
    if chart == "Dminus":
        return -1
    raise DomainError(f"expected a D+ or D- point, got chart {chart!r}")


def varphi(f, x1, x2, sigma, cfg=DEFAULT_CFG):
    """Potential ``phi = 1/2 int_0^lambda f(line point) dt``.

    ``(lambda, mu)`` is ``(x1, x2)`` rotated by ``-sigma``, and the line point
    is ``(cos(sigma) t - sin(sigma) mu, sin(sigma) t + cos(sigma) mu)``. The
    rule is a fixed Gauss-Legendre rule scaled to ``[0, lambda]`` (clipped at
    the truncation length for rapidly decreasing ``f``), so the result is a
    smooth function of ``x`` and may be differentiated numerically when
    ``cfg.adaptive`` is false.

    Parameters
    ----------
    f : RadialProfile
    x1, x2 : float or array_like
    sigma : float
    cfg : QuadratureConfig

    Returns
    -------
    float or ndarray
    """
    x1 = np.asarray(x1, float)
    x2 = np.asarray(x2, float)
    shape = np.broadcast(x1, x2).shape
    x1, x2 = (np.broadcast_to(v, shape).ravel() for v in (x1, x2))
    c, s = np.cos(sigma), np.sin(sigma)
    lam = c * x1 + s * x2
    mu = -s * x1 + c * x2
    if f.rapidly_decreasing:
        length = cfg.truncation(f.cutoff, float(np.abs(mu).max(initial=0.0)))
        lam_eff = np.clip(lam, -length, length)
    else:
        lam_eff = lam

    def estimate(n):
        tau, w = uniform_rule(0.0, 1.0, n)
        t = lam_eff[:, None] * tau[None, :]
        vals = f.value_xy(c * t - s * mu[:, None], s * t + c * mu[:, None])
        return 0.5 * lam_eff * (vals @ w)

    out = converge(estimate, cfg, "varphi").reshape(shape)
    return float(out) if out.ndim == 0 else out


def psi_tilde(f, c1, branch, cfg=DEFAULT_CFG):
    """``branch * f_hat(c1) / 4`` where ``branch`` is the sign of ``cos(alpha - sigma)``."""
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    return branch * 0.25 * radon(f, c1, cfg)


def beta_residual_D(f, sign, params, p, cfg=DEFAULT_CFG):
    """Defining functions ``(r1, r2)`` of a beta-surface at a D+/D- point.

    Parameters
    ----------
    f : RadialProfile
    sign : int
        ``+1`` for ``D+`` and ``-1`` for ``D-``; must match ``p.chart``.
    params : BetaParams
    p : ChartPoint
    """
    if _sign_of(p.chart) != sign:
        raise DomainError(f"point in {p.chart} does not match sign {sign:+d}")
    x1, x2, x3, x4 = p.coords
    s, c = np.sin(params.sigma), np.cos(params.sigma)
    r1 = -s * x1 + c * x2 - params.c1
    r2 = c * x3 + s * x4 + sign * varphi(f, x1, x2, params.sigma, cfg) - params.c2
    return float(r1), float(r2)


def w_domain_limit(f):
    """Largest admissible ``|tan(beta)|`` for the W-chart description."""
    radius = f.support_radius()
    return np.inf if radius == 0.0 else 1.0 / radius


def big_psi(f, params, alpha, beta, cfg=DEFAULT_CFG):
    """``Psi(alpha, beta, sigma)`` of the W-chart description.

    For ``tan(beta) > 0`` it is ``f_hat^(+-)/2`` and for ``tan(beta) < 0`` it
    is ``-f_hat^(-+)/2``, the half chosen by the sign of ``cos(alpha - sigma)``
    and evaluated at ``mu = sin(alpha - sigma) cot(beta)``. On ``beta = 0``
    the limit ``+-f_hat(c1)/4`` is returned.
    """
    tb = np.tan(beta)
    if abs(tb) >= w_domain_limit(f):
        raise DomainError(f"|tan(beta)| = {abs(tb):.3g} exceeds 1/R_f = {w_domain_limit(f):.3g}")
    cos_d = np.cos(alpha - params.sigma)
    if cos_d == 0.0:
        raise DomainError("cos(alpha - sigma) = 0: Psi has no branch here")
    branch = 1 if cos_d > 0 else -1
    if tb == 0.0:
        return psi_tilde(f, params.c1, branch, cfg)
    side = int(np.sign(tb)) * branch
    mu = np.sin(alpha - params.sigma) / tb
    return float(np.sign(tb)) * 0.5 * half_radon(f, params.sigma, mu, side, cfg)


def beta_residual_W(f, params, p, cfg=DEFAULT_CFG):
    """Defining functions ``(r1, r2)`` of the extended surface at a W point."""
    if p.chart != "W":
        raise DomainError("beta_residual_W needs a W-chart point")
    alpha, beta, e1, e2 = p.coords
    d = alpha - params.sigma
    r1 = np.sin(d) - params.c1 * np.tan(beta)
    psi = big_psi(f, params, alpha, beta, cfg)
    r2 = -params.c1 * e1 - np.cos(d) * e2 + psi - params.c2
    return float(r1), float(r2)


def surface_point_D(f, sign, params, lam, tau, cfg=DEFAULT_CFG):
    """Point of the surface in ``D+`` (``sign=1``) or ``D-`` (``sign=-1``).

    ``lam`` moves along the base line and ``tau`` along the fibre direction
    ``sin(sigma) d3 - cos(sigma) d4``. Both defining equations are linear in
    the remaining unknowns, so the point is exact up to the quadrature of
    ``phi``.
    """
    s, c = np.sin(params.sigma), np.cos(params.sigma)
    x1 = lam * c - params.c1 * s
    x2 = lam * s + params.c1 * c
    k = params.c2 - sign * varphi(f, x1, x2, params.sigma, cfg)
    x3 = k * c + tau * s
    x4 = k * s - tau * c
    return ChartPoint("Dplus" if sign > 0 else "Dminus", (x1, x2, x3, x4))


def surface_point_W(f, params, beta, eps1, branch=1, cfg=DEFAULT_CFG):
    """Point of the extended surface in ``W`` near the equator.

    ``branch`` selects the sign of ``cos(alpha - sigma)``.
    """
    arg = params.c1 * np.tan(beta)
    if abs(arg) >= 1.0:
        raise DomainError("no surface point at this beta: |c1 tan(beta)| >= 1")
    d = np.arcsin(arg) if branch > 0 else np.pi - np.arcsin(arg)
    alpha = float((params.sigma + d) % (2.0 * np.pi))
    psi = big_psi(f, params, alpha, beta, cfg)
    e2 = (-params.c1 * eps1 + psi - params.c2) / np.cos(d)
    return ChartPoint("W", (alpha, beta, eps1, e2))


def null_fields(f, sign, sigma, p):
    """The fields ``n1``, ``n2`` spanning the beta-plane at a D+/D- point.

    Returns an array of shape (2, 4) in coordinate components.
    """
    x1, x2 = p.coords[:2]
    fv = sign * float(f.value_xy(x1, x2))
    s, c = np.sin(sigma), np.cos(sigma)
    n1 = np.array([c, s, -0.5 * fv * c, -0.5 * fv * s])
    n2 = np.array([0.0, 0.0, s, -c])
    return np.stack((n1, n2))


def frame_fields(f, sign, sigma, p):
    """The fields ``m1``, ``m2`` built from the orthonormal frame.

    ``m1 = e1 - sin(2 sigma) e3 + cos(2 sigma) e4`` and
    ``m2 = e2 + cos(2 sigma) e3 + sin(2 sigma) e4``. The second field starts
    with ``e2``: with ``e1`` in both, ``g(m1, m2) = 1`` and the span would not
    be totally null.
    """
    fd = orthonormal_frame(PeteanMetric(f, sign), p.array)
    e = fd.frame.T
    s2, c2 = np.sin(2 * sigma), np.cos(2 * sigma)
    m1 = e[0] - s2 * e[2] + c2 * e[3]
    m2 = e[1] + c2 * e[2] + s2 * e[3]
    return np.stack((m1, m2))


def span_angle(u, v):
    """Largest principal angle between the row spans of two (2, 4) arrays."""
    qu, _ = np.linalg.qr(np.asarray(u, float).T)
    qv, _ = np.linalg.qr(np.asarray(v, float).T)
    # the spectral norm of the residual is the sine of the largest angle
    resid = qv - qu @ (qu.T @ qv)
    return float(np.arcsin(min(1.0, np.linalg.norm(resid, 2))))


def annihilation_residual(f, sign, params, p, step=FD_STEP, cfg=DEFAULT_CFG):
    """Max of ``|n_a r_b|`` over the null fields and the defining functions.

    The derivatives are central differences with the given step. Quadrature
    runs with a fixed rule so that the differences are not polluted by
    changes of the panel count.
    """
    fixed = replace(cfg, adaptive=False, n=max(cfg.n, 128))
    fields = null_fields(f, sign, params.sigma, p)
    x = p.array
    worst = 0.0
    for vec in fields:
        plus = ChartPoint(p.chart, x + step * vec)
        minus = ChartPoint(p.chart, x - step * vec)
        rp = beta_residual_D(f, sign, params, plus, fixed)
        rm = beta_residual_D(f, sign, params, minus, fixed)
        for a, b in zip(rp, rm):
            worst = max(worst, abs(a - b) / (2.0 * step))
    return worst


def surface_endpoints(params):
    """The two classes at infinity reached along the fibres of the surface.

    Returns
    -------
    (GrassPoint, GrassPoint)
        Limits for ``tau -> +inf`` and ``tau -> -inf``. They are antipodal
        and do not depend on ``c2``.
    """
    s, c = np.sin(params.sigma), np.cos(params.sigma)
    c1 = params.c1
    plus = np.array([[-c1 * s, c], [c1 * c, s], [1.0, 0.0], [0.0, 0.0]])
    minus = np.array([[c1 * s, c], [-c1 * c, s], [-1.0, 0.0], [0.0, 0.0]])
    return GrassPoint(plus), GrassPoint(minus)


def endpoints_are_antipodal(params, tol=1e-12):
    a, b = surface_endpoints(params)
    return antipodal(a).same(b, tol)


def cross_chart_residual(f, params, p, cfg=DEFAULT_CFG):
    """Residuals of a D+/D- surface point after moving it to ``W``."""
    w = transition(p, "W")
    return beta_residual_W(f, params, w, cfg)


def sample_cloud(f, params, lams, taus, cfg=DEFAULT_CFG):
    """CSV rows ``chart,c1,c2,sigma,coords...`` for points on both charts."""
    rows = []
    for sign in (1, -1):
        for lam in lams:
            for tau in taus:
                p = surface_point_D(f, sign, params, lam, tau, cfg)
                rows.append([p.chart, params.c1, params.c2, params.sigma, *p.coords])
    return rows

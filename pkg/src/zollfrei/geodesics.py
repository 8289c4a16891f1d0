"""Null geodesics inside beta-surfaces and their closure across the equator.

With ``sigma = 0`` a null geodesic on ``TD+`` or ``TD-`` whose base image is
not a point reads::

    x1 = s, x2 = c1, x3 = c2 -+ phi(s, c1, 0), x4 = +-nu0(s) + q1 s + q2

where ``nu0'' = d2 f(s, c1) / 2`` with ``nu0(0) = nu0'(0) = 0``. For large
``|s|`` the solution is affine, ``nu0 = A1 |s| + A2``. Substituting
``u = -1/s`` and passing to the ``W`` chart, the pieces on ``TD+`` and
``TD-`` join smoothly exactly when ``q1- = q1+`` and ``q2- = q2+ + 2 A2``.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from . import _accel
from .charts import ChartPoint, embed, transition
from .errors import AsymptoticError, DomainError, StateError
from .petean import PeteanMetric, christoffel_fd, metric_tensor
from .quadrature import QuadratureConfig
from .surfaces import BetaParams, surface_endpoints, varphi

DEFAULT_CFG = QuadratureConfig()
ODE_STEP = 1e-3
JUNCTION_U = np.geomspace(1e-4, 1e-2, 5)


@dataclass(frozen=True, eq=False)
class Nu0Solution:
    """Even solution of ``nu'' = d2 f(s, c1) / 2`` from rest at ``s = 0``.

    Attributes
    ----------
    c1 : float
    s : ndarray
        Grid on ``[0, S]``; values for negative ``s`` follow by evenness.
    nu, dnu : ndarray
        Samples of ``nu0`` and ``nu0'`` on ``s``.
    A1, A2 : float
        Asymptotic constants, ``nu0(s) = A1 |s| + A2`` for ``|s| >= R_f``.
    tol : float
        Tolerance used to verify the affine regime.
    fit_error : float
        Largest deviation from the affine law on ``[R_f, S]``.
    """

    c1: float
    s: np.ndarray = field(repr=False)
    nu: np.ndarray = field(repr=False)
    dnu: np.ndarray = field(repr=False)
    A1: float = 0.0
    A2: float = 0.0
    tol: float = 1e-9
    fit_error: float = 0.0
    rhs: object = field(default=None, repr=False, compare=False)

    @property
    def span(self):
        return float(self.s[-1])

    def _spline(self):
        sp = self.__dict__.get("_cached")
        if sp is None:
            sp = CubicHermiteSpline(self.s, self.nu, self.dnu)
            object.__setattr__(self, "_cached", sp)
        return sp

    def __call__(self, s, order=0):
        """``nu0`` (``order=0``), ``nu0'`` (1) or ``nu0''`` (2) at ``s``."""
        s = np.asarray(s, float)
        a = np.abs(s)
        inside = a <= self.span
        sgn = np.where(s < 0, -1.0, 1.0)
        out = np.empty_like(a)
        if order == 0:
            out[inside] = self._spline()(a[inside])
            out[~inside] = self.A1 * a[~inside] + self.A2
        elif order == 1:
            out[inside] = self._spline()(a[inside], 1)
            out[~inside] = self.A1
            out = out * sgn
        elif order == 2:
            out = self.rhs(a) if self.rhs is not None else self._spline()(a, 2)
        else:
            raise ValueError("order must be 0, 1 or 2")
        return float(out) if out.ndim == 0 else out


def solve_nu0(f, c1, S=None, tol=1e-9, step=ODE_STEP):
    """Integrate ``nu'' = d2 f(s, c1) / 2`` by fixed-step RK4.

    Only ``s >= 0`` is integrated: the forcing is even in ``s``, so the
    backward solution is the mirror image and evenness holds bit for bit.

    Parameters
    ----------
    f : RadialProfile
    c1 : float
    S : float, optional
        Integration span; defaults to ``3 R_f + 1`` and must exceed ``3 R_f``.
    tol : float
        Allowed deviation from the affine law on ``[R_f, S]``.
    step : float
        RK4 step, at most ``1e-3 * S``.

    Raises
    ------
    AsymptoticError
        When ``nu0`` is not affine to within ``tol`` on ``[R_f, S]``.
    """
    radius = f.support_radius()
    if S is None:
        S = 3.0 * radius + 1.0
    if S <= 3.0 * radius:
        raise DomainError(f"S = {S} must exceed 3 R_f = {3.0 * radius}")
    if step > 1e-3 * S:
        step = 1e-3 * S
    n = int(np.ceil(S / step))
    h = S / n
    half = np.linspace(0.0, S, 2 * n + 1)

    def rhs(s):
        return 0.5 * np.asarray(f.grad_xy(s, np.full_like(s, c1, dtype=float))[1], float)

    nu, dnu = _accel.rk4_pure_forcing(rhs(half), h)
    grid = half[::2]
    A1 = float(dnu[-1])
    A2 = float(nu[-1] - A1 * S)
    sel = grid >= radius
    fit = float(np.max(np.abs(nu[sel] - (A1 * grid[sel] + A2)), initial=0.0))
    if fit > tol:
        raise AsymptoticError(
            f"nu0 deviates from its affine asymptote by {fit:.3g} > {tol:.3g} on [{radius:.3g}, {S:.3g}]"
        )
    return Nu0Solution(float(c1), grid, nu, dnu, A1, A2, tol, fit, rhs)


def a1_oracle(f, c1, cfg=DEFAULT_CFG):
    """``A1 = 1/2 int_0^inf d2 f(t, c1) dt`` by direct quadrature."""
    from .quadrature import converge, uniform_rule

    length = cfg.truncation(f.cutoff, c1)

    def estimate(n):
        t, w = uniform_rule(0.0, length, n)
        return 0.5 * w @ np.asarray(f.grad_xy(t, np.full_like(t, c1))[1], float)

    return float(converge(estimate, cfg, "A1 oracle"))


@dataclass(frozen=True)
class GeodesicSpec:
    """Constants of a null geodesic in the ``sigma = 0`` surface.

    The ``matched`` flag records whether the two halves join smoothly,
    judged against the asymptotic constants of ``solution``.
    """

    c1: float
    c2: float
    q1p: float
    q2p: float
    q1m: float
    q2m: float
    solution: Nu0Solution = field(default=None, repr=False, compare=False)
    match_tol: float = 1e-9

    @property
    def matched(self):
        if self.solution is None:
            return False
        return (
            abs(self.q1m - self.q1p) <= self.match_tol
            and abs(self.q2m - (self.q2p + 2.0 * self.solution.A2)) <= self.match_tol
        )

    @classmethod
    def matched_from(cls, solution, c2, q1, q2p, dq2=0.0):
        """Spec whose ``TD-`` constants follow from the ``TD+`` ones, plus ``dq2``."""
        return cls(solution.c1, c2, q1, q2p, q1, q2p + 2.0 * solution.A2 + dq2, solution)

    def to_dict(self):
        return {
            "c1": self.c1,
            "c2": self.c2,
            "q1p": self.q1p,
            "q2p": self.q2p,
            "q1m": self.q1m,
            "q2m": self.q2m,
            "matched": self.matched,
        }


def _require(spec):
    if spec.solution is None:
        raise StateError("GeodesicSpec has no solved nu0; call solve_nu0 first")
    if abs(spec.solution.c1 - spec.c1) > 1e-15:
        raise StateError("nu0 was solved for a different c1")
    return spec.solution


def geodesic_point(f, spec, branch, s, cfg=DEFAULT_CFG):
    """Point of the geodesic on ``TD+`` (``branch=1``) or ``TD-`` (``-1``)."""
    sol = _require(spec)
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    q1, q2 = (spec.q1p, spec.q2p) if branch > 0 else (spec.q1m, spec.q2m)
    x3 = spec.c2 - branch * varphi(f, s, spec.c1, 0.0, cfg)
    x4 = branch * sol(s) + q1 * s + q2
    return ChartPoint("Dplus" if branch > 0 else "Dminus", (s, spec.c1, x3, x4))


def velocity(f, spec, branch, s):
    """``c' = d1 -+ (f/2) d3 + x4' d4`` in coordinate components."""
    sol = _require(spec)
    q1 = spec.q1p if branch > 0 else spec.q1m
    fv = float(f.value_xy(s, spec.c1))
    return np.array([1.0, 0.0, -0.5 * branch * fv, branch * sol(s, 1) + q1])


def null_residual(f, spec, branch, s, cfg=DEFAULT_CFG):
    """``g(c', c')`` with the metric of the chart."""
    p = geodesic_point(f, spec, branch, s, cfg)
    v = velocity(f, spec, branch, s)
    g = metric_tensor(PeteanMetric(f, branch), p.array)
    return float(v @ g @ v)


def geodesic_equation_residual(f, spec, branch, s, step=1e-4, cfg=DEFAULT_CFG):
    """Norm of the part of ``nabla_s c'`` not proportional to ``c'``.

    Christoffel symbols come from the finite-difference oracle, so this is
    independent of the closed-form connection.
    """
    sol = _require(spec)
    p = geodesic_point(f, spec, branch, s, cfg)
    v = velocity(f, spec, branch, s)
    g1, _ = f.grad_xy(s, spec.c1)
    acc = np.array([0.0, 0.0, -0.5 * branch * float(g1), branch * sol(s, 2)])
    gam = christoffel_fd(PeteanMetric(f, branch), p.array, step)
    cov = acc + np.einsum("kij,i,j->k", gam, v, v)
    lam = (cov @ v) / (v @ v)
    return float(np.linalg.norm(cov - lam * v))


def trace(f, spec, s_values, cfg=DEFAULT_CFG):
    """CSV rows ``branch,s,x1,x2,x3,x4`` on both charts."""
    rows = []
    for branch in (1, -1):
        for s in s_values:
            p = geodesic_point(f, spec, branch, s, cfg)
            rows.append([branch, float(s), *p.coords])
    return rows


def _w_coords(f, spec, branch, s, cfg):
    return np.array(transition(geodesic_point(f, spec, branch, s, cfg), "W").coords)


def _wrap_near(angle, ref):
    return ref + (angle - ref + np.pi) % (2.0 * np.pi) - np.pi


def _one_side(f, spec, branch, u, ref, cfg):
    rows = np.array([_w_coords(f, spec, branch, -1.0 / ui, cfg) for ui in u])
    rows[:, 0] = _wrap_near(rows[:, 0], ref)
    # Degree-4 interpolation through the five samples, evaluated at u = 0,
    # is Richardson extrapolation for value and slope.
    scale = np.max(np.abs(u))
    coeffs = np.polynomial.polynomial.polyfit(u / scale, rows, len(u) - 1)
    return coeffs[0], coeffs[1] / scale


def junction_mismatch(f, spec, junction, u=JUNCTION_U, cfg=DEFAULT_CFG):
    """W-chart mismatch (values and ``u``-derivatives) at one junction.

    ``junction=1`` joins ``s+ -> +inf`` with ``s- -> -inf`` (near
    ``alpha = 0``); ``junction=2`` joins ``s- -> +inf`` with ``s+ -> -inf``
    (near ``alpha = pi``).
    """
    u = np.asarray(u, float)
    if junction == 1:
        left = _one_side(f, spec, 1, -u, 0.0, cfg)
        right = _one_side(f, spec, -1, u, 0.0, cfg)
    elif junction == 2:
        left = _one_side(f, spec, -1, -u, np.pi, cfg)
        right = _one_side(f, spec, 1, u, np.pi, cfg)
    else:
        raise ValueError("junction is 1 or 2")
    return np.abs(left[0] - right[0]), np.abs(left[1] - right[1])


def closure_gap(f, spec, u=JUNCTION_U, cfg=DEFAULT_CFG):
    """Largest W-chart mismatch over both junctions.

    Raises
    ------
    StateError
        If ``spec`` carries no solved ``nu0``.
    """
    _require(spec)
    worst = 0.0
    for junction in (1, 2):
        dv, dd = junction_mismatch(f, spec, junction, u, cfg)
        worst = max(worst, float(dv.max()), float(dd.max()))
    return worst


def continue_through_equator(f, solution, c2, q1p, q2p, u=JUNCTION_U, cfg=DEFAULT_CFG):
    """Determine ``(q1-, q2-)`` by matching at the first junction only.

    The W-chart data on the ``TD-`` side are affine in ``(q1-, q2-)``, so the
    match is a small least-squares problem. Closure is then a genuine check
    at the second junction.
    """

    def data(q1m, q2m):
        spec = GeodesicSpec(solution.c1, c2, q1p, q2p, q1m, q2m, solution)
        u_ = np.asarray(u, float)
        lv, ld = _one_side(f, spec, 1, -u_, 0.0, cfg)
        rv, rd = _one_side(f, spec, -1, u_, 0.0, cfg)
        return np.concatenate((rv - lv, rd - ld))

    base = data(0.0, 0.0)
    jac = np.stack((data(1.0, 0.0) - base, data(0.0, 1.0) - base), axis=1)
    sol, *_ = np.linalg.lstsq(jac, -base, rcond=None)
    return float(sol[0]), float(sol[1])


def fiber_line_point(p, sigma, tau):
    """Point ``p + tau (sin(sigma) d3 - cos(sigma) d4)`` of a fibre line."""
    x = p.array.copy()
    x[2] += tau * np.sin(sigma)
    x[3] -= tau * np.cos(sigma)
    return ChartPoint(p.chart, x)


def fiber_line_endpoints(p, sigma, tau=1e8):
    """Classes approached by a fibre line as ``tau -> +inf`` and ``-inf``."""
    return embed(fiber_line_point(p, sigma, tau)), embed(fiber_line_point(p, sigma, -tau))


def fiber_line_check(p, sigma, tol=1e-6):
    """True when the fibre-line ends are the antipodal endpoint pair."""
    c1 = -np.sin(sigma) * p.coords[0] + np.cos(sigma) * p.coords[1]
    a, b = surface_endpoints(BetaParams(sigma, c1, 0.0))
    e1, e2 = fiber_line_endpoints(p, sigma)
    return (e1.same(a, tol) and e2.same(b, tol)) or (e1.same(b, tol) and e2.same(a, tol))


@dataclass
class ScanReport:
    entries: list
    fibers: list

    @property
    def failures(self):
        bad = [e for e in self.entries if e["class"] == "unclassified"]
        bad += [e for e in self.fibers if e["class"] == "unclassified"]
        return len(bad)

    def to_dict(self):
        return {"entries": self.entries, "fibers": self.fibers, "failures": self.failures}


def zollfrei_scan(f, c1_values, q1_values, tol=1e-6, c2=0.3, q2p=0.1, n_fibers=4, cfg=DEFAULT_CFG):
    """Classify sampled null geodesics.

    For every ``(c1, q1)`` the ``TD+`` geodesic is continued into ``TD-``
    by matching at the first junction; it is ``closed`` when the second
    junction then matches within ``tol``. Fibre lines through a few base
    points are checked to end at the antipodal pair of the sphere at
    infinity.
    """
    entries = []
    for c1 in c1_values:
        sol = solve_nu0(f, float(c1))
        for q1 in q1_values:
            q1m, q2m = continue_through_equator(f, sol, c2, float(q1), q2p, cfg=cfg)
            spec = GeodesicSpec(sol.c1, c2, float(q1), q2p, q1m, q2m, sol)
            dv, dd = junction_mismatch(f, spec, 2, cfg=cfg)
            gap = max(float(dv.max()), float(dd.max()))
            entries.append(
                {
                    "c1": float(c1),
                    "q1": float(q1),
                    "class": "closed" if gap < tol else "unclassified",
                    "gap": gap,
                }
            )
    fibers = []
    for k in range(n_fibers):
        sigma = np.pi * k / max(n_fibers, 1)
        base = ChartPoint("Dplus" if k % 2 == 0 else "Dminus", (0.5 + k, -0.25 * k, 0.2, -0.1))
        ok = fiber_line_check(base, sigma)
        fibers.append(
            {
                "chart": base.chart,
                "sigma": float(sigma),
                "class": "ends-at-singular-surface" if ok else "unclassified",
            }
        )
    return ScanReport(entries, fibers)

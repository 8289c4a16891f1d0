"""Petean metrics ``g = 2(dx1 dx3 + dx2 dx4) + f(x1, x2)(dx1^2 + dx2^2)``.

The coefficient function ``f`` is any object exposing ``value_xy``,
``grad_xy`` and ``hess_xy`` (radial profiles and :class:`PlaneFunction`).
The dual metric replaces ``f`` by ``-f`` and is selected with ``sign=-1``.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

ETA = np.diag([1.0, 1.0, -1.0, -1.0])

# Entries of the Levi-Civita connection that are given in closed form.
# Pairs are (direction, field) with 0-based indices; the rest come from the
# finite-difference oracle.
_CLOSED_PAIRS = {(i, j) for i in range(4) for j in range(4) if i >= 2 or j >= 2} | {(0, 0)}


@dataclass(frozen=True)
class PeteanMetric:
    """Petean metric with coefficient ``sign * f``.

    Parameters
    ----------
    f : object
        Coefficient function with ``value_xy``, ``grad_xy``, ``hess_xy``.
    sign : int
        ``+1`` for the metric itself, ``-1`` for its dual.
    chart : str
        ``"Dplus"`` or ``"Dminus"``; informational.
    """

    f: object
    sign: int = 1
    chart: str = "Dplus"

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    def coeff(self, x1, x2):
        return self.sign * np.asarray(self.f.value_xy(x1, x2), float)

    def coeff_grad(self, x1, x2):
        g1, g2 = self.f.grad_xy(x1, x2)
        return self.sign * np.asarray(g1, float), self.sign * np.asarray(g2, float)

    def coeff_hess(self, x1, x2):
        a, b, c = self.f.hess_xy(x1, x2)
        return tuple(self.sign * np.asarray(v, float) for v in (a, b, c))


def metric_tensor(m, x):
    """4x4 matrix of the metric at ``x``."""
    x = np.asarray(x, float)
    fv = float(m.coeff(x[0], x[1]))
    g = np.zeros((4, 4))
    g[0, 0] = g[1, 1] = fv
    g[0, 2] = g[2, 0] = g[1, 3] = g[3, 1] = 1.0
    return g


@dataclass(frozen=True)
class FrameData:
    """Indefinite orthonormal frame and its scalar data.

    ``frame[:, i]`` holds the components of ``e_{i+1}`` in the coordinate
    basis. ``eta`` is the Gram matrix ``g(e_i, e_j)``.
    """

    D: float
    a: float
    b: float
    frame: np.ndarray
    eta: np.ndarray

    @property
    def residual(self):
        return float(np.max(np.abs(self.eta - ETA)))


def frame_matrix(fv):
    """Frame coefficient matrix for the coefficient value ``fv``.

    The entry pattern is the classical one with ``D = f^2 + 4`` and
    ``a, b = (f +- sqrt(D)) / 2``. The overall factor is
    ``(2 sqrt(D))**-1/2``, which is what makes the frame orthonormal:
    with ``1 / (2 sqrt(D))`` the Gram matrix would be ``ETA / (2 sqrt(D))``.
    """
    D = fv * fv + 4.0
    sq = np.sqrt(D)
    a = 0.5 * (fv + sq)
    b = 0.5 * (fv - sq)
    pattern = np.array(
        [
            [1.0, -1.0, -1.0, 1.0],
            [1.0, 1.0, -1.0, -1.0],
            [-b, b, a, -a],
            [-b, -b, a, a],
        ]
    )
    return D, a, b, pattern / np.sqrt(2.0 * sq)


def orthonormal_frame(m, x):
    """Indefinite orthonormal frame of ``m`` at ``x``."""
    x = np.asarray(x, float)
    D, a, b, E = frame_matrix(float(m.coeff(x[0], x[1])))
    eta = E.T @ metric_tensor(m, x) @ E
    return FrameData(D, a, b, E, eta)


def christoffel_fd(m, x, step=1e-4):
    """Christoffel symbols ``Gamma[k, i, j]`` from central differences.

    Parameters
    ----------
    m : PeteanMetric
    x : array_like, shape (4,)
    step : float
        Difference step in ``[1e-6, 1e-2]``.
    """
    if not 1e-6 <= step <= 1e-2:
        raise DomainError("finite-difference step must lie in [1e-6, 1e-2]")
    x = np.asarray(x, float)
    dg = np.empty((4, 4, 4))
    for c in range(4):
        e = np.zeros(4)
        e[c] = step
        dg[c] = (metric_tensor(m, x + e) - metric_tensor(m, x - e)) / (2.0 * step)
    g = metric_tensor(m, x)
    assert abs(np.linalg.det(g)) > 0.5, "metric matrix is singular"
    ginv = np.linalg.inv(g)
    # lowered[l, i, j] = (d_i g_lj + d_j g_li - d_l g_ij) / 2
    lowered = 0.5 * (np.transpose(dg, (1, 0, 2)) + np.transpose(dg, (1, 2, 0)) - dg)
    gam = np.einsum("kl,lij->kij", ginv, lowered)
    return 0.5 * (gam + np.transpose(gam, (0, 2, 1)))


def christoffel_exact(m, x):
    """Christoffel symbols from the analytic gradient of the coefficient."""
    x = np.asarray(x, float)
    f1, f2 = (float(v) for v in m.coeff_grad(x[0], x[1]))
    gam = np.zeros((4, 4, 4))
    gam[2, 0, 0] = 0.5 * f1
    gam[2, 0, 1] = gam[2, 1, 0] = 0.5 * f2
    gam[2, 1, 1] = -0.5 * f1
    gam[3, 0, 0] = -0.5 * f2
    gam[3, 0, 1] = gam[3, 1, 0] = 0.5 * f1
    gam[3, 1, 1] = 0.5 * f2
    return gam


def nabla_closed_form(m, direction, field, x, step=1e-4):
    """Coefficients of ``nabla_{d_direction} d_field`` (indices 1..4).

    Returns
    -------
    vector : ndarray, shape (4,)
    source : str
        ``"closed"`` for entries with a closed form, ``"oracle"`` for the
        remaining ones, which are taken from :func:`christoffel_fd`.

    Notes
    -----
    The closed forms are ``nabla_{d3} = nabla_{d4} = 0``,
    ``nabla_{d1} d3 = nabla_{d1} d4 = 0`` (torsion freeness together with
    ``nabla_{d3} d1 = 0``) and
    ``nabla_{d1} d1 = (f_1 / 2) d3 - (f_2 / 2) d4``.
    """
    i, j = direction - 1, field - 1
    if not (0 <= i < 4 and 0 <= j < 4):
        raise ValueError("indices run from 1 to 4")
    x = np.asarray(x, float)
    if (i, j) in _CLOSED_PAIRS:
        vec = np.zeros(4)
        if i == 0 and j == 0:
            f1, f2 = (float(v) for v in m.coeff_grad(x[0], x[1]))
            vec[2] = 0.5 * f1
            vec[3] = -0.5 * f2
        return vec, "closed"
    return christoffel_fd(m, x, step)[:, i, j].copy(), "oracle"


def riemann_fd(m, x, step=1e-4):
    """Riemann tensor ``R[a, b, c, d]`` by central differences of Gamma."""
    x = np.asarray(x, float)
    gam = christoffel_fd(m, x, step)
    dgam = np.empty((4, 4, 4, 4))
    for c in range(4):
        e = np.zeros(4)
        e[c] = step
        dgam[c] = (christoffel_fd(m, x + e, step) - christoffel_fd(m, x - e, step)) / (2.0 * step)
    # R^a_{bcd} = d_c G^a_{db} - d_d G^a_{cb} + G^a_{ce} G^e_{db} - G^a_{de} G^e_{cb}
    term = np.einsum("cadb->abcd", dgam)
    quad = np.einsum("ace,edb->abcd", gam, gam)
    return term - np.transpose(term, (0, 1, 3, 2)) + quad - np.transpose(quad, (0, 1, 3, 2))


def asd_bivectors(E):
    """The three bivectors ``e1^e2 - e3^e4``, ``e1^e3 - e2^e4``, ``e1^e4 + e2^e3``."""
    e = [E[:, i] for i in range(4)]

    def wedge(u, v):
        return np.outer(u, v) - np.outer(v, u)

    return np.stack(
        [
            wedge(e[0], e[1]) - wedge(e[2], e[3]),
            wedge(e[0], e[2]) - wedge(e[1], e[3]),
            wedge(e[0], e[3]) + wedge(e[1], e[2]),
        ]
    )


def asd_connection(m, x, step=1e-4):
    """Connection matrices of the anti-self-dual bivector frame.

    Returns
    -------
    A : ndarray, shape (4, 3, 3)
        ``nabla_{d_c} B_k = sum_j A[c, k, j] B_j``.
    leak : float
        Largest component of ``nabla B_k`` outside the span of the frame.
    """
    x = np.asarray(x, float)
    gam = christoffel_fd(m, x, step)
    B = asd_bivectors(orthonormal_frame(m, x).frame)
    basis = B.reshape(3, 16).T
    A = np.empty((4, 3, 3))
    leak = 0.0
    for c in range(4):
        e = np.zeros(4)
        e[c] = step
        dB = (
            asd_bivectors(orthonormal_frame(m, x + e).frame)
            - asd_bivectors(orthonormal_frame(m, x - e).frame)
        ) / (2.0 * step)
        for k in range(3):
            cov = dB[k] + gam[:, c, :] @ B[k] + B[k] @ gam[:, c, :].T
            coef, *_ = np.linalg.lstsq(basis, cov.ravel(), rcond=None)
            A[c, k] = coef
            leak = max(leak, float(np.max(np.abs(basis @ coef - cov.ravel()))))
    return A, leak


@dataclass(frozen=True)
class CurvatureReport:
    """Curvature diagnostics at one point."""

    x: tuple
    riem_max: float
    gamma_dev: float
    asd_norm: float
    harm_res: float

    def row(self):
        return [*self.x, self.riem_max, self.gamma_dev, self.asd_norm, self.harm_res]


def curvature_report(m, x, step=1e-4):
    """Curvature, Christoffel consistency and anti-self-dual triviality at ``x``.

    ``asd_norm`` is the largest connection coefficient of the anti-self-dual
    bivector frame (plus any component leaking out of its span).
    """
    x = np.asarray(x, float)
    riem = riemann_fd(m, x, step)
    gam_fd = christoffel_fd(m, x, step)
    dev = 0.0
    for i, j in itertools.product(range(4), repeat=2):
        if (i, j) in _CLOSED_PAIRS:
            vec, _ = nabla_closed_form(m, i + 1, j + 1, x, step)
            dev = max(dev, float(np.max(np.abs(vec - gam_fd[:, i, j]))))
    A, leak = asd_connection(m, x, step)
    f11, _, f22 = m.coeff_hess(x[0], x[1])
    return CurvatureReport(
        tuple(float(v) for v in x),
        float(np.max(np.abs(riem))),
        dev,
        max(float(np.max(np.abs(A))), leak),
        abs(float(f11 + f22)),
    )


def _u_to_x_jacobian(u1, u4, r, phi):
    """D+ coordinates and their Jacobian in cylindrical U-chart coordinates."""
    t = np.tan(phi)
    c = np.cos(phi)
    s = np.sin(phi)
    sec2 = 1.0 / (c * c)
    x = np.array([-u1 * t - u4, -t, 1.0 / (r * c), -u1 / (r * c)])
    J = np.array(
        [
            [-t, -1.0, 0.0, -u1 * sec2],
            [0.0, 0.0, 0.0, -sec2],
            [0.0, 0.0, -1.0 / (r * r * c), s / (r * c * c)],
            [-1.0 / (r * c), 0.0, u1 / (r * r * c), -u1 * s / (r * c * c)],
        ]
    )
    return x, J


def u_chart_to_dplus(u):
    """D+ coordinates of the U-chart point ``[[u1, -u4], [1, 0], [0, 1], [u2, u3]]``."""
    u1, u2, u3, u4 = (float(v) for v in u)
    if u2 == 0.0:
        raise DomainError("the U-chart meets D+ only where u2 != 0")
    return np.array([-(u1 * u3 + u2 * u4) / u2, -u3 / u2, 1.0 / u2, -u1 / u2])


def _cylindrical_pullback(f, u1, u4, r, phi):
    m = PeteanMetric(f)
    x, J = _u_to_x_jacobian(u1, u4, r, phi)
    G = J.T @ metric_tensor(m, x) @ J
    u2 = r * np.cos(phi)
    # Standard block 2(du1 du3 + du2 du4) in (u1, u4, r, phi).
    Ju = np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, np.cos(phi), -r * np.sin(phi)],
            [0.0, 0.0, np.sin(phi), r * np.cos(phi)],
            [0.0, 1.0, 0.0, 0.0],
        ]
    )
    S = np.zeros((4, 4))
    S[0, 2] = S[2, 0] = S[1, 3] = S[3, 1] = 1.0
    return u2 * u2 * G, Ju.T @ S @ Ju, x


def singular_expansion_residual(f, u):
    """Remainder of ``u2^2 g`` after the standard block and the ``r^2`` term.

    The metric is pulled back to cylindrical U-chart coordinates
    ``(u1, u4, r, phi)`` with ``u2 = r cos(phi)``, ``u3 = r sin(phi)``. The
    subtracted ``r^2`` term is
    ``r^2 f(x) [(1 + u1^2) sec(phi)^2 dphi^2 + (sin(phi) du1 + cos(phi) du4)^2]``
    with ``x = (-u1 tan(phi) - u4, -tan(phi))`` the base point. What remains
    is ``2 r^2 f(x) u1 sec(phi) (sin(phi) du1 + cos(phi) du4) dphi``, which is
    ``O(r^2)``.

    Parameters
    ----------
    f : RadialProfile
    u : array_like
        ``(u1, u2, u3, u4)`` with ``u2 < 0``.
    """
    u1, u2, u3, u4 = (float(v) for v in u)
    if u2 >= 0.0:
        raise DomainError("the residual is defined on the D+ side u2 < 0")
    r = float(np.hypot(u2, u3))
    phi = float(np.arctan2(u3, u2))
    pulled, std, x = _cylindrical_pullback(f, u1, u4, r, phi)
    fx = float(f.value_xy(x[0], x[1]))
    w = np.array([np.sin(phi), np.cos(phi), 0.0, 0.0])
    extra = r * r * fx * np.outer(w, w)
    extra[3, 3] += r * r * fx * (1.0 + u1 * u1) / np.cos(phi) ** 2
    return float(np.max(np.abs(pulled - std - extra)))


def dphi2_coefficient(f, u):
    """Coefficient of ``dphi^2`` in ``u2^2 g`` (cylindrical U-chart coordinates)."""
    u1, u2, u3, u4 = (float(v) for v in u)
    if u2 >= 0.0:
        raise DomainError("the coefficient is defined on the D+ side u2 < 0")
    r = float(np.hypot(u2, u3))
    phi = float(np.arctan2(u3, u2))
    pulled, std, _ = _cylindrical_pullback(f, u1, u4, r, phi)
    return float(pulled[3, 3] - std[3, 3])

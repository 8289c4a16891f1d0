"""Three-chart atlas on TS^2 and its embedding into the oriented Grassmannian.

Points of the oriented Grassmannian of 2-planes in R^4 are 4x2 matrices up
to right multiplication by matrices of positive determinant. TS^2 sits
inside as the classes whose last row is nonzero; the remaining classes form
the sphere at infinity.

Charts
------
``Dplus`` and ``Dminus``
    ``(x1, x2, x3, x4)`` with matrix ``[[+-x1, -x4], [+-x2, x3], [+-1, 0], [0, 1]]``.
``W``
    ``(alpha, beta, eps1, eps2)`` with matrix
    ``[[cos a, eps2 sin a], [sin a, -eps2 cos a], [tan b, eps1], [0, 1]]``.

On the overlaps ``x1 = cos(a) cot(b)``, ``x2 = sin(a) cot(b)``,
``x3 = -(eps1 sin(a) cot(b) + eps2 cos(a))`` and
``x4 = -(-eps1 cos(a) cot(b) + eps2 sin(a))``, the signs being the ones
that make both matrices describe the same class. Fibre coordinates are
related by ``zeta = (-xi sin(a) tan(b) + cos(a)) / (-xi cos(a) tan(b) - sin(a))``.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError

CHARTS = ("Dplus", "Dminus", "W")
_REL = 1e-13


@dataclass(frozen=True)
class ChartPoint:
    """A point of TS^2 (optionally with a fibre coordinate) in one chart."""

    chart: str
    coords: tuple
    fiber: Optional[complex] = None

    def __post_init__(self):
        if self.chart not in CHARTS:
            raise ValueError(f"unknown chart {self.chart!r}")
        coords = tuple(float(c) for c in self.coords)
        if len(coords) != 4:
            raise ValueError("chart points have four coordinates")
        object.__setattr__(self, "coords", coords)
        if self.fiber is not None:
            object.__setattr__(self, "fiber", complex(self.fiber))

    @property
    def array(self):
        return np.array(self.coords)

    def to_dict(self):
        d = {"chart": self.chart, "coords": list(self.coords)}
        if self.fiber is not None:
            d["fiber"] = [self.fiber.real, self.fiber.imag]
        return d

    @classmethod
    def from_dict(cls, d):
        fib = d.get("fiber")
        return cls(d["chart"], tuple(d["coords"]), None if fib is None else complex(fib[0], fib[1]))


@dataclass(frozen=True)
class GrassPoint:
    """Class of a rank-2 real 4x2 matrix under the positive-determinant action."""

    matrix: np.ndarray = field(compare=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float).reshape(4, 2)
        if np.linalg.matrix_rank(m, tol=1e-12 * max(1.0, np.abs(m).max())) != 2:
            raise DomainError("Grassmannian points need rank-2 matrices")
        object.__setattr__(self, "matrix", m)

    def pivot(self):
        """Row pair with the largest 2x2 minor."""
        best, rows = -1.0, (0, 1)
        for i in range(4):
            for j in range(i + 1, 4):
                d = abs(np.linalg.det(self.matrix[[i, j]]))
                if d > best:
                    best, rows = d, (i, j)
        return rows

    def canonical(self, rows=None):
        """Normal form with the pivot rows equal to ``diag(1, +-1)``."""
        rows = self.pivot() if rows is None else rows
        N = self.matrix[list(rows)]
        det = np.linalg.det(N)
        if abs(det) < _REL * max(1.0, np.abs(self.matrix).max()) ** 2:
            raise DomainError("pivot minor vanishes for this class")
        K = np.linalg.inv(N) @ np.diag([1.0, np.sign(det)])
        return self.matrix @ K

    def distance(self, other):
        """Max entry difference of the normal forms (inf if orientations differ)."""
        rows = self.pivot()
        a = self.canonical(rows)
        try:
            b = other.canonical(rows)
        except DomainError:
            return np.inf
        if np.sign(a[rows[1], 1]) != np.sign(b[rows[1], 1]):
            return np.inf
        return float(np.max(np.abs(a - b)))

    def same(self, other, tol=1e-10):
        return self.distance(other) <= tol

    def to_list(self):
        return [float(v) for v in self.matrix.ravel()]


@dataclass(frozen=True)
class InfinityTag:
    """A point of the sphere at infinity, ``[[t, -v], [0, 0]]``."""

    t: tuple
    v: tuple

    def grass(self):
        return infinity_point(self.t, self.v)


def _check_w(beta):
    if not -np.pi / 2 < beta < np.pi / 2:
        raise DomainError("W chart needs -pi/2 < beta < pi/2")


def transition(p, target):
    """Express ``p`` in the ``target`` chart.

    Raises
    ------
    DomainError
        When ``p`` is not in the overlap with ``target``.
    """
    if target not in CHARTS:
        raise ValueError(f"unknown chart {target!r}")
    if p.chart == target:
        return p
    if p.chart == "W":
        alpha, beta, e1, e2 = p.coords
        _check_w(beta)
        if beta == 0.0:
            raise DomainError("beta = 0 lies on W0, outside D+ and D-")
        expected = "Dplus" if beta > 0 else "Dminus"
        if target != expected:
            raise DomainError(f"beta = {beta} lies in {expected}, not {target}")
        ca, sa = np.cos(alpha), np.sin(alpha)
        cot = 1.0 / np.tan(beta)
        x = (
            ca * cot,
            sa * cot,
            -(e1 * sa * cot + e2 * ca),
            -(-e1 * ca * cot + e2 * sa),
        )
        fiber = None
        if p.fiber is not None:
            tb = np.tan(beta)
            xi = p.fiber
            den = -xi * ca * tb - sa
            if den == 0:
                raise DomainError("fibre coordinate maps to zeta = infinity")
            fiber = (-xi * sa * tb + ca) / den
        return ChartPoint(target, x, fiber)
    if target == "W":
        x1, x2, x3, x4 = p.coords
        r = np.hypot(x1, x2)
        if r == 0.0:
            raise DomainError("x1 = x2 = 0 corresponds to beta = +-pi/2, outside W")
        sgn = 1.0 if p.chart == "Dplus" else -1.0
        cot = sgn * r
        beta = float(np.arctan(1.0 / cot))
        alpha = float(np.arctan2(sgn * x2, sgn * x1) % (2 * np.pi))
        ca, sa = np.cos(alpha), np.sin(alpha)
        e1 = (-x3 * sa + x4 * ca) / cot
        e2 = -(x3 * ca + x4 * sa)
        fiber = None
        if p.fiber is not None:
            z = p.fiber
            den = np.tan(beta) * (sa - z * ca)
            if den == 0:
                raise DomainError("fibre coordinate maps to xi = infinity")
            fiber = (ca + z * sa) / den
        return ChartPoint("W", (alpha, beta, e1, e2), fiber)
    raise DomainError("D+ and D- do not overlap")


def embed(p):
    """Grassmannian class of a chart point (the fibre is ignored)."""
    if p.chart == "W":
        alpha, beta, e1, e2 = p.coords
        _check_w(beta)
        ca, sa = np.cos(alpha), np.sin(alpha)
        m = [[ca, e2 * sa], [sa, -e2 * ca], [np.tan(beta), e1], [0.0, 1.0]]
    else:
        s = 1.0 if p.chart == "Dplus" else -1.0
        x1, x2, x3, x4 = p.coords
        m = [[s * x1, -x4], [s * x2, x3], [s, 0.0], [0.0, 1.0]]
    return GrassPoint(np.array(m))


def infinity_point(t, v, tol=1e-10):
    """Class ``[[t, -v], [0, 0]]`` of the sphere at infinity."""
    t = np.asarray(t, float)
    v = np.asarray(v, float)
    if abs(np.linalg.norm(t) - 1) > tol or abs(np.linalg.norm(v) - 1) > tol or abs(t @ v) > tol:
        raise DomainError("infinity points need orthonormal t and v")
    m = np.zeros((4, 2))
    m[:3, 0] = t
    m[:3, 1] = -v
    return GrassPoint(m)


def antipodal(p):
    """Reverse the orientation of the 2-plane by swapping columns."""
    return GrassPoint(p.matrix[:, ::-1].copy())


def normalize(g, chart=None):
    """Chart coordinates of a Grassmannian class.

    Parameters
    ----------
    g : GrassPoint
    chart : str, optional
        Requested chart. When omitted, ``Dplus``/``Dminus`` is preferred and
        ``W`` is used for the classes over the equator.

    Returns
    -------
    ChartPoint or InfinityTag
    """
    M = g.matrix
    scale = max(1.0, float(np.abs(M).max()))
    p, q = M[3]
    n2 = p * p + q * q
    if np.sqrt(n2) <= 1e-12 * scale:
        a = M[:3, 0]
        b = M[:3, 1]
        t = a / np.linalg.norm(a)
        w = b - (b @ t) * t
        v = -w / np.linalg.norm(w)
        if chart is not None:
            raise DomainError("class lies on the sphere at infinity")
        return InfinityTag(tuple(t), tuple(v))
    a0 = q * M[:, 0] - p * M[:, 1]
    b1 = (p * M[:, 0] + q * M[:, 1]) / n2
    a0[3] = 0.0
    b1[3] = 1.0
    rho = np.hypot(a0[0], a0[1])
    if chart is None:
        chart = "W" if abs(a0[2]) <= 1e-12 * max(rho, 1e-300) else ("Dplus" if a0[2] > 0 else "Dminus")
    if chart in ("Dplus", "Dminus"):
        if a0[2] == 0.0 or (a0[2] > 0) != (chart == "Dplus"):
            raise DomainError(f"class is not in the image of {chart}")
        col = a0 / abs(a0[2])
        b2 = b1 - b1[2] * col / col[2]
        s = 1.0 if chart == "Dplus" else -1.0
        return ChartPoint(chart, (s * col[0], s * col[1], b2[1], -b2[0]))
    if rho <= 1e-14 * abs(a0[2]):
        raise DomainError("class corresponds to beta = +-pi/2, outside W")
    col = a0 / rho
    alpha = float(np.arctan2(col[1], col[0]) % (2 * np.pi))
    beta = float(np.arctan(col[2]))
    b2 = b1 - (b1[0] * col[0] + b1[1] * col[1]) * col
    e1 = b2[2]
    e2 = b2[0] * col[1] - b2[1] * col[0]
    return ChartPoint("W", (alpha, beta, e1, e2))


def u_chart_point(u):
    """Class of ``[[u1, -u4], [1, 0], [0, 1], [u2, u3]]``."""
    u1, u2, u3, u4 = (float(v) for v in u)
    return GrassPoint(np.array([[u1, -u4], [1.0, 0.0], [0.0, 1.0], [u2, u3]]))

"""Composite Gauss-Legendre rules and a panel-doubling driver."""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import QuadratureError

GL_ORDER = 10


@dataclass(frozen=True)
class QuadratureConfig:
    """Settings shared by every quadrature in the package.

    Parameters
    ----------
    n : int
        Initial number of panels; must be even and at least 16.
    multiplier : float
        Truncation radius multiplier. Integrals over the line are cut at
        ``multiplier * max(R, |mu|) + 5``.
    symmetric_pv : bool
        Use symmetric-pair excision for principal values. It is the only
        scheme implemented; the flag exists so configurations are explicit.
    tol : float
        Target tolerance for panel doubling.
    adaptive : bool
        When false, the rule with ``n`` panels is used as is. This is how the
        convergence-order tests pin the discretisation.
    max_doublings : int
        How many times the panel count may double before giving up.
    """

    n: int = 16
    multiplier: float = 10.0
    symmetric_pv: bool = True
    tol: float = 1e-9
    adaptive: bool = True
    max_doublings: int = 6

    def __post_init__(self):
        if self.n < 16 or self.n % 2:
            raise ValueError(f"panel count must be even and >= 16, got {self.n}")
        if self.multiplier <= 0 or self.tol <= 0:
            raise ValueError("multiplier and tol must be positive")
        if not self.symmetric_pv:
            raise ValueError("only the symmetric-pair principal value scheme is available")

    def truncation(self, radius, mu=0.0):
        return self.multiplier * max(radius, abs(mu)) + 5.0


@lru_cache(maxsize=None)
def _gl(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def panel_rule(breaks, order=GL_ORDER):
    """Gauss-Legendre rule on consecutive panels given by ``breaks``."""
    breaks = np.asarray(breaks, dtype=float)
    x, w = _gl(order)
    half = 0.5 * np.diff(breaks)
    mid = 0.5 * (breaks[1:] + breaks[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def uniform_rule(a, b, n, order=GL_ORDER):
    return panel_rule(np.linspace(a, b, n + 1), order)


def half_line_rule(length, n, graded_from=None, order=GL_ORDER):
    """Rule on ``[0, inf)``: panels on ``[0, length]`` plus a mapped tail.

    The tail uses ``t = length / v`` with ``v`` in ``(0, 1]``, which is exact
    enough for integrands decaying at least like ``t**-2``. If
    ``graded_from`` is given, panels are refined geometrically towards zero
    starting at that width, which resolves features of that scale.
    """
    breaks = np.linspace(0.0, length, n + 1)
    if graded_from is not None and graded_from < breaks[1]:
        fine = breaks[1] * 0.5 ** np.arange(0, 60)
        fine = fine[fine > graded_from * 1e-3]
        breaks = np.concatenate(([0.0], fine[::-1][:-1], breaks[1:]))
    nodes, weights = panel_rule(breaks, order)
    v, wv = uniform_rule(0.0, 1.0, max(n // 4, 4), order)
    tail_nodes = length / v
    tail_weights = wv * length / v**2
    return np.concatenate((nodes, tail_nodes)), np.concatenate((weights, tail_weights))


def converge(estimate, cfg, what="integral", location=None):
    """Run ``estimate(n)`` with doubling panel counts until it stabilises.

    ``estimate`` returns an array (or scalar); convergence is judged on the
    maximum absolute change relative to ``max(1, max|value|)``.
    """
    n = cfg.n
    prev = np.asarray(estimate(n))
    if not cfg.adaptive:
        return prev
    last = (prev, prev)
    for _ in range(cfg.max_doublings):
        n *= 2
        cur = np.asarray(estimate(n))
        scale = max(1.0, float(np.max(np.abs(cur), initial=0.0)))
        if np.max(np.abs(cur - prev), initial=0.0) <= cfg.tol * scale:
            return cur
        last = (prev, cur)
        prev = cur
    raise QuadratureError(
        f"{what} did not converge after {cfg.max_doublings} doublings",
        estimates=last,
        location=location,
    )

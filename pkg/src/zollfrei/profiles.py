"""Function containers: radial profiles f, odd profiles h, line functions.

Radial profiles describe an axisymmetric real function on the plane,
``f(x) = F(|x|)``. Odd profiles describe a purely imaginary odd function
``h(t) = i s(t)`` on the line through its real factor ``s``.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from . import _accel

REL_NEGLIGIBLE = 1e-12


def _power_tail(x, coeffs, powers):
    x = np.asarray(x, float)
    out = np.zeros_like(x)
    for a, p in zip(coeffs, powers):
        out += a * x ** (-float(p))
    return out


def _power_tail_deriv(x, coeffs, powers, order=1):
    x = np.asarray(x, float)
    out = np.zeros_like(x)
    for a, p in zip(coeffs, powers):
        fac = 1.0
        for j in range(order):
            fac *= -(p + j)
        out += a * fac * x ** (-float(p + order))
    return out


def fit_power_tail(x, y, powers):
    """Least-squares fit of ``y ~ sum_p a_p x**-p`` on the given samples."""
    x = np.asarray(x, float)
    basis = np.stack([x ** (-float(p)) for p in powers], axis=1)
    coeffs, *_ = np.linalg.lstsq(basis, np.asarray(y, float), rcond=None)
    return tuple(float(c) for c in coeffs)


class RadialProfile:
    """Axisymmetric real function ``f(x) = F(r)`` on the plane.

    Subclasses implement :meth:`radial` returning ``F`` and its first two
    radial derivatives. Everything else (Cartesian values, gradients and
    Hessians) is derived here.
    """

    cutoff: float

    def radial(self, r, order=0):
        raise NotImplementedError

    def __call__(self, r):
        return self.radial(np.abs(np.asarray(r, float)))

    def value_xy(self, x1, x2):
        return self.radial(np.hypot(x1, x2))

    def grad_xy(self, x1, x2):
        x1 = np.asarray(x1, float)
        x2 = np.asarray(x2, float)
        r = np.hypot(x1, x2)
        d1 = self.radial(r, 1)
        with np.errstate(invalid="ignore", divide="ignore"):
            q = np.where(r > 0, d1 / np.where(r > 0, r, 1.0), 0.0)
        return q * x1, q * x2

    def hess_xy(self, x1, x2):
        x1 = np.asarray(x1, float)
        x2 = np.asarray(x2, float)
        r = np.hypot(x1, x2)
        d1 = self.radial(r, 1)
        d2 = self.radial(r, 2)
        safe = np.where(r > 0, r, 1.0)
        q = np.where(r > 0, d1 / safe, d2)
        p = np.where(r > 0, (d2 - q) / safe**2, 0.0)
        return q + p * x1 * x1, p * x1 * x2, q + p * x2 * x2

    def max_abs(self):
        r = np.linspace(0.0, 10.0 * self.cutoff, 20001)
        return float(np.max(np.abs(self.radial(r))))

    def support_radius(self, rel=REL_NEGLIGIBLE):
        """Smallest ``R`` with ``|f(r)| < rel * max|f|`` for all sampled ``r > R``."""
        r = np.linspace(0.0, 10.0 * self.cutoff, 20001)
        vals = np.abs(self.radial(r))
        peak = vals.max()
        if peak == 0.0:
            return 0.0
        big = np.nonzero(vals >= rel * peak)[0]
        return float(r[min(big[-1] + 1, r.size - 1)])

    @property
    def rapidly_decreasing(self):
        return True


@dataclass(frozen=True)
class GaussianMixture(RadialProfile):
    """``f(r) = sum_i c_i exp(-k_i r**2)``."""

    terms: tuple = ()
    cutoff: float = 0.0

    def __post_init__(self):
        terms = tuple((float(c), float(k)) for c, k in self.terms)
        if any(k <= 0 for _, k in terms):
            raise ValueError("Gaussian widths must be positive")
        object.__setattr__(self, "terms", terms)
        if self.cutoff <= 0:
            kmin = min((k for _, k in terms), default=1.0)
            object.__setattr__(self, "cutoff", float(np.sqrt(28.0 / kmin)))

    @property
    def _ck(self):
        c = np.array([t[0] for t in self.terms], float)
        k = np.array([t[1] for t in self.terms], float)
        return c, k

    def radial(self, r, order=0):
        r = np.asarray(r, float)
        c, k = self._ck
        if not self.terms:
            return np.zeros_like(r)
        r2 = r * r
        if order == 0:
            return _accel.gaussian_mixture(r2, c, k)
        if order == 1:
            return r * _accel.gaussian_mixture(r2, -2.0 * c * k, k)
        if order == 2:
            return _accel.gaussian_mixture(r2, -2.0 * c * k, k) + r2 * _accel.gaussian_mixture(
                r2, 4.0 * c * k * k, k
            )
        raise ValueError("order must be 0, 1 or 2")

    def to_dict(self):
        return {
            "kind": "gaussian_mixture",
            "terms": [{"c": c, "k": k} for c, k in self.terms],
            "cutoff": self.cutoff,
        }


class TabulatedProfile(RadialProfile):
    """Radial profile given by samples with cubic interpolation.

    Beyond the last knot the profile continues either with a Gaussian-type
    exponential tail matched to the last knot, or with an algebraic tail
    ``sum_p a_p r**-p`` when ``power_tail`` is given. The algebraic form is
    what profiles reconstructed from a generic odd ``h`` need, since those
    decay only like ``r**-3``.
    """

    def __init__(self, r, values, cutoff=None, power_tail=None):
        r = np.asarray(r, float)
        values = np.asarray(values, float)
        if r.ndim != 1 or r.size < 4 or r[0] != 0.0 or np.any(np.diff(r) <= 0):
            raise ValueError("radial grid must start at 0 and increase")
        self.r = r
        self.values = values
        self.cutoff = float(cutoff) if cutoff else float(r[-1] / 10.0)
        self._spline = CubicSpline(r, values, bc_type=((1, 0.0), "not-a-knot"))
        self._d1 = self._spline.derivative(1)
        self._d2 = self._spline.derivative(2)
        self.power_tail = None if power_tail is None else (tuple(power_tail[0]), tuple(power_tail[1]))
        peak = np.max(np.abs(values)) if values.size else 0.0
        last = values[-1]
        self._lam = 0.0
        if self.power_tail is None and last != 0.0 and peak > 0:
            slope = float(self._d1(r[-1]))
            lam_fit = -slope / (2.0 * r[-1] * last)
            reach = (10.0 * self.cutoff) ** 2 - r[-1] ** 2
            lam_min = 30.0 / reach if reach > 0 else 1.0
            self._lam = max(lam_fit, lam_min)

    def radial(self, r, order=0):
        r = np.asarray(r, float)
        inside = r <= self.r[-1]
        out = np.empty_like(r)
        spl = (self._spline, self._d1, self._d2)[order]
        out[inside] = spl(r[inside])
        ro = r[~inside]
        if ro.size:
            if self.powers is not None:
                coeffs, powers = self.power_tail
                out[~inside] = (
                    _power_tail(ro, coeffs, powers)
                    if order == 0
                    else _power_tail_deriv(ro, coeffs, powers, order)
                )
            else:
                r0 = self.r[-1]
                lam = self._lam
                e = self.values[-1] * np.exp(-lam * (ro**2 - r0**2))
                if order == 0:
                    out[~inside] = e
                elif order == 1:
                    out[~inside] = -2.0 * lam * ro * e
                else:
                    out[~inside] = (4.0 * lam**2 * ro**2 - 2.0 * lam) * e
        return out

    @property
    def powers(self):
        return None if self.power_tail is None else self.power_tail[1]

    @property
    def rapidly_decreasing(self):
        return self.power_tail is None

    def to_dict(self):
        d = {
            "kind": "tabulated",
            "r": self.r.tolist(),
            "values": self.values.tolist(),
            "cutoff": self.cutoff,
        }
        if self.power_tail is not None:
            d["power_tail"] = {"coeffs": list(self.power_tail[0]), "powers": list(self.power_tail[1])}
        return d


@dataclass(frozen=True)
class PlaneFunction:
    """General smooth function on the plane, used for local harmonic patches.

    Parameters
    ----------
    value, grad, hess : callable
        ``value(x1, x2)``, ``grad(x1, x2) -> (f1, f2)`` and
        ``hess(x1, x2) -> (f11, f12, f22)``.
    """

    value: Callable
    grad: Callable
    hess: Callable
    name: str = "plane"

    def value_xy(self, x1, x2):
        return self.value(x1, x2)

    def grad_xy(self, x1, x2):
        return self.grad(x1, x2)

    def hess_xy(self, x1, x2):
        return self.hess(x1, x2)

    @classmethod
    def product(cls):
        """The harmonic polynomial ``f = x1 x2``."""
        return cls(
            lambda a, b: np.asarray(a, float) * b,
            lambda a, b: (np.asarray(b, float) * 1.0, np.asarray(a, float) * 1.0),
            lambda a, b: (0.0 * np.asarray(a, float), 1.0 + 0.0 * np.asarray(a, float), 0.0 * np.asarray(a, float)),
            name="x1*x2",
        )


class OddProfile:
    """Purely imaginary odd function ``h(t) = i s(t)`` on the real line."""

    cutoff: float

    def s(self, t):
        raise NotImplementedError

    def ds(self, t):
        raise NotImplementedError

    def h(self, t):
        return 1j * self.s(t)

    def dh(self, t):
        return 1j * self.ds(t)

    __call__ = h

    def max_abs(self):
        t = np.linspace(0.0, 10.0 * self.cutoff, 20001)
        return float(np.max(np.abs(self.s(t))))

    @property
    def rapidly_decreasing(self):
        return True


@dataclass(frozen=True)
class OddMixture(OddProfile):
    """``s(t) = sum_i c_i t**p_i exp(-k_i t**2)`` with odd powers ``p_i``."""

    terms: tuple = ()
    cutoff: float = 0.0

    def __post_init__(self):
        terms = tuple((float(c), float(k), int(p)) for c, k, p in self.terms)
        if any(k <= 0 or p % 2 != 1 or p < 1 for _, k, p in terms):
            raise ValueError("terms need k > 0 and odd positive powers")
        object.__setattr__(self, "terms", terms)
        if self.cutoff <= 0:
            kmin = min((k for _, k, _ in terms), default=1.0)
            object.__setattr__(self, "cutoff", float(np.sqrt(32.0 / kmin)))

    def s(self, t):
        t = np.asarray(t, float)
        out = np.zeros_like(t)
        for c, k, p in self.terms:
            out += c * t**p * np.exp(-k * t * t)
        return out

    def ds(self, t):
        t = np.asarray(t, float)
        out = np.zeros_like(t)
        for c, k, p in self.terms:
            out += c * np.exp(-k * t * t) * (p * t ** (p - 1) - 2.0 * k * t ** (p + 1))
        return out

    def to_dict(self):
        return {
            "kind": "odd_mixture",
            "terms": [{"c": c, "k": k, "p": p} for c, k, p in self.terms],
            "cutoff": self.cutoff,
        }


class OddTabulated(OddProfile):
    """Odd profile from samples of ``s`` on a uniform grid ``t >= 0``.

    The spline is built on the mirrored data so that it is odd, and values
    at negative arguments are produced as ``-s(|t|)`` so that the symmetry
    holds bit for bit. Beyond the table an odd algebraic tail
    ``sum_p b_p t**-p`` may be attached.
    """

    def __init__(self, t, samples, cutoff=None, power_tail=None):
        t = np.asarray(t, float)
        samples = np.asarray(samples, float)
        if t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise ValueError("grid must start at 0 and increase")
        samples = samples.copy()
        samples[0] = 0.0
        self.t = t
        self.samples = samples
        self.cutoff = float(cutoff) if cutoff else float(t[-1] / 10.0)
        full_t = np.concatenate((-t[:0:-1], t))
        full_s = np.concatenate((-samples[:0:-1], samples))
        self._spline = CubicSpline(full_t, full_s)
        self._d1 = self._spline.derivative(1)
        if power_tail is not None:
            coeffs, powers = power_tail
            if any(p % 2 != 1 for p in powers):
                raise ValueError("odd profile tails need odd powers")
            power_tail = (tuple(coeffs), tuple(powers))
        self.power_tail = power_tail

    def _eval(self, t, deriv):
        t = np.asarray(t, float)
        a = np.abs(t)
        out = np.zeros_like(a)
        inside = a <= self.t[-1]
        out[inside] = (self._d1 if deriv else self._spline)(a[inside])
        if self.power_tail is not None and np.any(~inside):
            coeffs, powers = self.power_tail
            ao = a[~inside]
            out[~inside] = _power_tail_deriv(ao, coeffs, powers) if deriv else _power_tail(ao, coeffs, powers)
        if deriv:
            return out
        return np.where(t < 0, -out, out)

    def s(self, t):
        return self._eval(t, False)

    def ds(self, t):
        return self._eval(t, True)

    @property
    def rapidly_decreasing(self):
        return self.power_tail is None

    def to_dict(self):
        d = {
            "kind": "odd_tabulated",
            "t": self.t.tolist(),
            "samples": self.samples.tolist(),
            "cutoff": self.cutoff,
        }
        if self.power_tail is not None:
            d["power_tail"] = {"coeffs": list(self.power_tail[0]), "powers": list(self.power_tail[1])}
        return d


@dataclass(frozen=True)
class LineFunction:
    """Function ``phi(sigma, mu)`` on the space of oriented lines.

    ``sigma_independent`` is verified on construction by spot samples.
    """

    fn: Callable
    even_in_mu: bool = False
    sigma_independent: bool = False
    scale: float = 1.0

    def __post_init__(self):
        if self.sigma_independent:
            mu = np.linspace(-2.0, 2.0, 7) * self.scale
            ref = np.asarray(self.fn(np.zeros_like(mu), mu))
            for sig in (0.7, 2.1, 4.4):
                other = np.asarray(self.fn(np.full_like(mu, sig), mu))
                if not np.allclose(other, ref, rtol=1e-10, atol=1e-12):
                    raise ValueError("line function flagged sigma-independent depends on sigma")

    def __call__(self, sigma, mu):
        return self.fn(sigma, mu)


def profile_from_dict(d):
    """Build a radial or odd profile from its JSON dictionary."""
    kind = d.get("kind")
    if kind == "gaussian_mixture":
        return GaussianMixture(tuple((t["c"], t["k"]) for t in d.get("terms", [])), float(d.get("cutoff", 0.0)))
    if kind == "tabulated":
        tail = d.get("power_tail")
        tail = None if tail is None else (tail["coeffs"], tail["powers"])
        return TabulatedProfile(d["r"], d["values"], d.get("cutoff"), tail)
    if kind == "odd_mixture":
        return OddMixture(tuple((t["c"], t["k"], t.get("p", 1)) for t in d.get("terms", [])), float(d.get("cutoff", 0.0)))
    if kind == "odd_tabulated":
        tail = d.get("power_tail")
        tail = None if tail is None else (tail["coeffs"], tail["powers"])
        return OddTabulated(d["t"], d["samples"], d.get("cutoff"), tail)
    raise ValueError(f"unknown profile kind {kind!r}")

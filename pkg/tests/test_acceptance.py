"""Acceptance criteria 1 to 10.

Each test records a one-line verdict that is printed in the terminal
summary; run this file directly (``python tests/test_acceptance.py``) to
execute only these checks.
"""

import time

import numpy as np
import pytest
from conftest import record_acceptance

from zollfrei.geodesics import GeodesicSpec, a1_oracle, closure_gap, solve_nu0, zollfrei_scan
from zollfrei.petean import PeteanMetric, curvature_report
from zollfrei.profiles import GaussianMixture, OddMixture, PlaneFunction, TabulatedProfile
from zollfrei.quadrature import QuadratureConfig
from zollfrei.surfaces import BetaParams, annihilation_residual, big_psi, psi_tilde, surface_point_D
from zollfrei.transforms import hilbert_involution_residual, inversion_residual
from zollfrei.twistor import (
    DiskCase,
    DiskParams,
    boundary_samples,
    correspondence_error,
    disk_point,
    f_to_h,
    foliation_probe,
    gz_residual,
    h_to_f,
    holomorphy_residual,
    probe_point,
    varpi_jump,
    varpi_limits,
    varpi_numeric_limits,
)

MIXTURES = (
    GaussianMixture(((1.0, 1.0),)),
    GaussianMixture(((1.0, 1.0), (-0.5, 3.0))),
    GaussianMixture(((0.7, 0.5), (0.4, 2.0))),
)
ODD = (
    OddMixture(((1.0, 1.0, 1),)),
    OddMixture(((1.0, 1.0, 1), (0.5, 2.0, 3))),
)
GRID9 = np.array([[x, y] for x in (0.0, 0.5, 1.0) for y in (0.0, 0.5, 1.0)])


def test_criterion_01_inversion():
    # Fixed panel counts pin the discretisation; 320 panels halve the step of 160.
    start = time.perf_counter()
    coarse = [inversion_residual(f, GRID9, QuadratureConfig(n=160, adaptive=False)) for f in MIXTURES]
    fine = [inversion_residual(f, GRID9, QuadratureConfig(n=320, adaptive=False)) for f in MIXTURES]
    elapsed = time.perf_counter() - start
    ratios = [c / f for c, f in zip(coarse, fine)]
    ok = max(fine) < 1e-4 and max(coarse) < 1e-4 and min(ratios) >= 2.0 and elapsed < 30.0
    record_acceptance(
        1,
        "inversion formula",
        ok,
        f"max residual {max(fine):.2e}, min halving ratio {min(ratios):.1f}, {elapsed:.1f} s",
    )
    assert max(fine) < 1e-4
    assert max(coarse) < 1e-4
    assert min(ratios) >= 2.0
    assert elapsed < 30.0


def test_criterion_02_involution(cfg):
    grid = np.linspace(-4.0, 4.0, 64)
    tests = (
        lambda m: np.exp(-m * m),
        lambda m: m * np.exp(-m * m),
        lambda m: (1.0 + m) * np.exp(-2.0 * (m - 0.5) ** 2),
    )
    errs = [hilbert_involution_residual(phi, grid, cfg) for phi in tests]
    record_acceptance(2, "Hilbert involution", max(errs) < 1e-6, f"max error {max(errs):.2e}")
    assert max(errs) < 1e-6


def test_criterion_03_flat_iff_harmonic(gauss):
    rng = np.random.default_rng(3)
    start = time.perf_counter()
    plane = PeteanMetric(PlaneFunction.product())
    reports = [curvature_report(plane, x) for x in rng.uniform(-1.5, 1.5, (20, 4))]
    flat = max(r.riem_max for r in reports)
    asd_flat = max(r.asd_norm for r in reports)
    curved = curvature_report(PeteanMetric(gauss), np.array([0.5, 0.0, 0.0, 0.0]))
    elapsed = time.perf_counter() - start
    ok = flat < 1e-6 and asd_flat < 1e-6 and curved.riem_max > 1e-3 and curved.asd_norm < 1e-6 and elapsed < 60
    record_acceptance(
        3,
        "flat iff harmonic",
        ok,
        f"x1*x2 |Riem| {flat:.1e}, Gaussian |Riem| {curved.riem_max:.2e}, "
        f"ASD {max(asd_flat, curved.asd_norm):.1e}, {elapsed:.1f} s",
    )
    assert flat < 1e-6
    assert asd_flat < 1e-6
    assert curved.riem_max > 1e-3
    assert curved.asd_norm < 1e-6
    assert elapsed < 60.0


def _profiles_for_annihilation():
    r = np.linspace(0.0, 6.0, 601)
    table = TabulatedProfile(r, np.exp(-r * r) * (1.0 + 0.3 * r * r), cutoff=2.0)
    return (*MIXTURES, table, GaussianMixture(((-0.8, 1.5),)))


def test_criterion_04_annihilation(cfg):
    rng = np.random.default_rng(4)
    worst, count = 0.0, 0
    for f in _profiles_for_annihilation():
        for _ in range(20):
            par = BetaParams(rng.uniform(0.0, np.pi), rng.uniform(-1.5, 1.5), rng.uniform(-1.0, 1.0))
            for k in range(10):
                sign = 1 if k % 2 == 0 else -1
                p = surface_point_D(f, sign, par, rng.uniform(-2.0, 2.0), rng.uniform(-1.0, 1.0), cfg)
                worst = max(worst, annihilation_residual(f, sign, par, p, cfg=cfg))
                count += 1
    record_acceptance(4, "beta-surface annihilation", worst < 1e-6, f"{count} points, max residual {worst:.2e}")
    assert count == 1000
    assert worst < 1e-6


def test_criterion_05_cross_chart_limits(gauss, cfg):
    par_sigma = 0.4
    worst = 0.0
    for c1 in np.linspace(-2.0, 2.0, 10):
        par = BetaParams(par_sigma, c1, 0.0)
        oracle = 0.25 * np.sqrt(np.pi) * np.exp(-c1 * c1)
        for branch in (1, -1):
            assert abs(psi_tilde(gauss, c1, branch, cfg) - branch * oracle) < 1e-9
            for beta in (1e-4, -1e-4, 1e-7, -1e-7):
                d = np.arcsin(c1 * np.tan(beta))
                alpha = par.sigma + (d if branch > 0 else np.pi - d)
                worst = max(worst, abs(big_psi(gauss, par, alpha, beta, cfg) - branch * oracle))
    record_acceptance(5, "cross-chart beta continuity", worst < 1e-6, f"max |Psi - (+-f_hat/4)| {worst:.2e}")
    assert worst < 1e-6


def test_criterion_06_geodesic_closure(gauss, cfg):
    start = time.perf_counter()
    delta = 1e-2
    worst, ratios = 0.0, []
    for c1 in np.linspace(-1.5, 1.5, 10):
        sol = solve_nu0(gauss, c1)
        for q1 in np.linspace(-0.5, 0.5, 10):
            spec = GeodesicSpec.matched_from(sol, 0.3, q1, 0.1)
            assert spec.matched
            worst = max(worst, closure_gap(gauss, spec, cfg=cfg))
            bad = GeodesicSpec.matched_from(sol, 0.3, q1, 0.1, dq2=delta)
            ratios.append(closure_gap(gauss, bad, cfg=cfg) / delta)
    a1 = solve_nu0(gauss, 1.0).A1
    exact = -np.exp(-1.0) * np.sqrt(np.pi) / 2.0
    a1_err = max(abs(a1 - exact), abs(a1 - a1_oracle(gauss, 1.0, cfg)))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-6 and 0.5 <= min(ratios) and max(ratios) <= 2.0 and a1_err < 1e-6 and elapsed < 120
    record_acceptance(
        6,
        "geodesic closure",
        ok,
        f"max matched gap {worst:.1e}, violation gap/delta in [{min(ratios):.2f}, {max(ratios):.2f}], "
        f"A1 error {a1_err:.1e}, {elapsed:.1f} s",
    )
    assert worst < 1e-6
    assert 0.5 <= min(ratios) and max(ratios) <= 2.0
    assert a1_err < 1e-6
    assert elapsed < 120.0


def test_criterion_07_zollfrei_scan(gauss, cfg):
    rep = zollfrei_scan(gauss, np.linspace(-1.5, 1.5, 10), np.linspace(-0.5, 0.5, 10), cfg=cfg)
    classified = sum(e["class"] in ("closed", "ends-at-singular-surface") for e in rep.entries)
    ok = classified == 100 and rep.failures == 0
    record_acceptance(
        7, "Zollfrei scan", ok, f"{classified}/100 geodesics closed, {len(rep.fibers)} fibre lines end at infinity"
    )
    assert len(rep.entries) == 100
    assert classified == 100
    assert rep.failures == 0


@pytest.mark.slow
def test_criterion_08_round_trips(cfg):
    errs = []
    for f in MIXTURES:
        errs.append(correspondence_error(f, h_to_f(f_to_h(f, cfg), cfg)))
    for h in ODD:
        errs.append(correspondence_error(h, f_to_h(h_to_f(h, cfg), cfg)))
    record_acceptance(8, "f <-> h round trips", max(errs) < 1e-4, f"5 round trips, max relative error {max(errs):.2e}")
    assert max(errs) < 1e-4


def _foliation_cases():
    rng = np.random.default_rng(9)
    out = []
    for k in range(24):
        case = (DiskCase.INTERIOR, DiskCase.EXTERIOR, DiskCase.CASE2, DiskCase.INFINITY)[k % 4]
        up = rng.uniform(0.1, 2.0)
        if case in (DiskCase.INTERIOR, DiskCase.EXTERIOR):
            d = DiskParams(case, a=complex(*rng.uniform(-1, 1, 2)), kappa=complex(*rng.uniform(-1, 1, 2)))
            par = complex(rng.uniform(-2, 2), up if case is DiskCase.INTERIOR else -up)
        elif case is DiskCase.CASE2:
            d = DiskParams(case, alpha=rng.uniform(0, 2 * np.pi), v=tuple(rng.uniform(-1, 1, 2)))
            par = complex(rng.uniform(-2, 2), up)
        else:
            z = rng.normal(size=3)
            d = DiskParams(case, z=tuple(z / np.linalg.norm(z)))
            par = complex(rng.uniform(-2, 2), up)
        out.append((d, par))
    return out


def test_criterion_09_holomorphy_boundary_foliation(gauss, gauss_h, cfg):
    axis = np.linspace(-1.0, 1.0, 5)
    zetas = (0.5j, 1.0j, 2.0j, 0.3 + 0.8j, -0.7 + 1.5j)
    pde = max(holomorphy_residual(gauss_h, gauss, x1, x2, z) for x1 in axis for x2 in axis for z in zetas)

    samples = boundary_samples(gauss_h, np.random.default_rng(99), 100, cfg=cfg)
    on_p = max(gz_residual(y, gauss_h) for _, y in samples)

    fol = 0.0
    for d, par in _foliation_cases():
        y = disk_point(d, gauss_h, par, cfg=cfg)
        r = foliation_probe(y, gauss_h, cfg=cfg)
        assert r.disk.case is d.case
        fol = max(fol, float(np.max(np.abs(r.disk.values() - d.values()))), abs(r.param - par))
        fol = max(fol, y.distance(probe_point(gauss_h, r, cfg=cfg)))
    ok = pde < 1e-5 and on_p < 1e-6 and fol < 1e-8
    record_acceptance(
        9,
        "twistor holomorphy and boundary",
        ok,
        f"PDE residual {pde:.1e} (125 pts), boundary on P {on_p:.1e} (100 pts), foliation {fol:.1e}",
    )
    assert pde < 1e-5
    assert on_p < 1e-6
    assert fol < 1e-8


def test_criterion_10_varpi_jump(zero_h, gauss_h, odd_gauss):
    s_vals = np.linspace(-4.0, 4.0, 32)
    a_vals = (0.5, 1.0, 2.0)
    zero = max(varpi_jump(zero_h, s, A) for s in s_vals for A in a_vals)
    peaks, im_gap = [], 0.0
    for h in (gauss_h, odd_gauss):
        peaks.append(max(varpi_jump(h, s, A) for s in s_vals for A in a_vals) / h.max_abs())
        for s in s_vals[::4]:
            for A in a_vals:
                hp, hm = varpi_numeric_limits(h, s, A)
                _, _, im_closed = varpi_limits(h, s, A)
                im_gap = max(im_gap, abs(hp.imag - hm.imag), abs(hp.imag - im_closed))
    ok = zero == 0.0 and min(peaks) > 1e-3 and im_gap < 1e-6
    record_acceptance(
        10,
        "varpi jump",
        ok,
        f"zero h: max jump {zero:.1e}; nonzero h: max jump/max|s| {min(peaks):.2f}; Im H gap {im_gap:.1e}",
    )
    assert zero == 0.0
    assert min(peaks) > 1e-3
    assert im_gap < 1e-6


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))

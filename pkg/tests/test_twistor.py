import numpy as np
import pytest
from scipy import integrate, special

from zollfrei.charts import ChartPoint, transition
from zollfrei.errors import AliasingError, DomainError, PoleError
from zollfrei.twistor import (
    Y0,
    B_continuity,
    B_integral,
    B_series,
    DiskCase,
    DiskParams,
    F_exterior,
    F_series,
    G_cauchy,
    TwistorPoint,
    boundary_samples,
    disk_params_of,
    disk_point,
    f_to_h,
    foliation_probe,
    fourier_coeffs,
    gz_residual,
    h_to_f,
    holomorphy_residual,
    p_residual,
    phi_C,
    probe_point,
    varpi_jump,
    varpi_limits,
    varpi_numeric_limits,
)


def _g_oracle(h, xi):
    """Adaptive quadrature of (1/(pi i)) int h(mu) / (mu - xi) dmu."""
    def part(fn):
        return integrate.quad(fn, -np.inf, np.inf, epsabs=1e-13, limit=400)[0]

    re = part(lambda m: (complex(h.h(np.array(m))) / (m - xi) / (np.pi * 1j)).real)
    im = part(lambda m: (complex(h.h(np.array(m))) / (m - xi) / (np.pi * 1j)).imag)
    return complex(re, im)


# --- f <-> h ----------------------------------------------------------------------


def test_zero_profiles_map_to_zero(zero_f, zero_h):
    assert f_to_h(zero_f).max_abs() == 0.0
    assert h_to_f(zero_h).max_abs() == 0.0


def test_h_of_gaussian_is_dawson(gauss_h):
    t = np.array([0.0, 0.5, 1.0, 2.5, 4.0])
    assert np.max(np.abs(gauss_h.h(t) - (-0.5j) * special.dawsn(t))) < 1e-8


def test_h_is_odd_and_imaginary(gauss_h):
    t = np.linspace(0.1, 30.0, 40)
    v = gauss_h.h(t)
    assert np.max(np.abs(v.real)) == 0.0
    assert np.max(np.abs(gauss_h.h(-t) + v)) == 0.0


def test_h_tail_follows_dawson_asymptotics(gauss_h):
    # dawsn(t) ~ 1/(2t) for large t.
    t = np.array([80.0, 200.0])
    assert np.max(np.abs(gauss_h.h(t) * t + 0.25j)) < 1e-4


# --- Fourier coefficients and F ---------------------------------------------------


def test_coefficients_vanish_for_zero_h_and_zero_a(zero_h, gauss_h):
    assert np.max(np.abs(fourier_coeffs(zero_h, 0.3 + 0.2j).coeffs)) == 0.0
    assert np.max(np.abs(fourier_coeffs(gauss_h, 0.0).coeffs)) == 0.0


def test_coefficients_reconstruct_h(gauss_h, odd_gauss):
    for h in (gauss_h, odd_gauss):
        for a in (0.5, 0.3 - 0.8j):
            assert fourier_coeffs(h, a).residual(h) < 1e-8


def test_coefficients_match_direct_integral(odd_gauss):
    a = 0.4 + 0.1j
    c = fourier_coeffs(odd_gauss, a)
    for l in (0, 1, 3):
        def integrand(th, part):
            v = odd_gauss.h(np.array(2.0 * np.real(a * np.exp(-0.5j * th)))) * np.exp(-1j * (l + 0.5) * th)
            return getattr(complex(v), part) / (4.0 * np.pi)

        ref = complex(
            integrate.quad(integrand, 0, 4 * np.pi, args=("real",), epsabs=1e-13)[0],
            integrate.quad(integrand, 0, 4 * np.pi, args=("imag",), epsabs=1e-13)[0],
        )
        assert abs(c.coeffs[l] - ref) < 1e-10


def test_order_validation_and_aliasing(gauss_h):
    with pytest.raises(ValueError):
        fourier_coeffs(gauss_h, 0.5, L=12)
    with pytest.raises(ValueError):
        fourier_coeffs(gauss_h, 0.5, L=4)
    with pytest.raises(AliasingError):
        fourier_coeffs(gauss_h, 40.0, L=8, adapt=False)


def test_F_series_basic_values(zero_h, gauss_h):
    c0 = fourier_coeffs(zero_h, 0.5)
    assert F_series(c0, 0.3j) == 0.0
    c = fourier_coeffs(gauss_h, 0.5)
    assert F_series(c, 0.0) == 0.0


def test_F_series_is_holomorphic(gauss_h):
    c = fourier_coeffs(gauss_h, 0.3 + 0.4j)
    e = 1e-5
    for th in np.linspace(0, 2 * np.pi, 8, endpoint=False):
        w = 0.9 * np.exp(1j * th)
        dx = (F_series(c, w + e) - F_series(c, w - e)) / (2 * e)
        dy = (F_series(c, w + 1j * e) - F_series(c, w - 1j * e)) / (2 * e)
        assert abs(dx + 1j * dy) < 1e-6 * max(1.0, abs(dx))  # d/d(conj w) = 0


def test_F_series_domain(gauss_h):
    c = fourier_coeffs(gauss_h, 0.5)
    with pytest.raises(PoleError):
        F_series(c, 1.0)
    with pytest.raises(DomainError):
        F_series(c, 1.5)
    with pytest.raises(DomainError):
        F_exterior(c, 0.5)


def test_H_plus_solves_holomorphy_equation(gauss, gauss_h):
    for x1, x2, zeta in ((0.3, -0.2, 0.4 + 0.7j), (1.1, 0.5, -0.8 + 1.5j)):
        assert holomorphy_residual(gauss_h, gauss, x1, x2, zeta) < 1e-6


# --- G and B ------------------------------------------------------------------------


def test_G_matches_quadrature_oracle(odd_gauss):
    for xi in (0.3 + 0.5j, -1.2 + 0.05j, 2.0 + 3.0j):
        assert abs(G_cauchy(odd_gauss, xi) - _g_oracle(odd_gauss, xi)) < 1e-8


def test_G_decays_at_infinity(gauss_h):
    assert abs(G_cauchy(gauss_h, 1e3j)) < 1e-3


def test_G_boundary_limit(gauss_h):
    assert abs(G_cauchy(gauss_h, 1.0 + 1e-3j) - G_cauchy(gauss_h, 1.0)) < 1e-3


def test_G_rejects_lower_half_plane(gauss_h):
    with pytest.raises(DomainError):
        G_cauchy(gauss_h, 0.5 - 0.1j)


def test_B_series_agrees_with_integral(gauss_h):
    xi = 0.4 + 0.8j
    for beta in (0.3, -0.2):
        bi = B_integral(gauss_h, beta, xi)
        for alpha in (0.3, 2.0, 4.5):
            assert abs(B_series(gauss_h, alpha, beta, xi) - bi) < 1e-8


def test_B_tends_to_G(gauss_h):
    rep = B_continuity(gauss_h, 0.5 + 0.7j, betas=(1e-1, 1e-2, 1e-3))
    assert all(r > 5 for r in rep.ratios)
    assert rep.alpha_spread < 1e-8
    assert rep.series_vs_integral < 1e-8
    assert set(rep.to_dict()) >= {"residuals", "ratios"}


def test_B_domain(gauss_h):
    with pytest.raises(DomainError):
        B_integral(gauss_h, 0.0, 1j)
    with pytest.raises(DomainError):
        B_integral(gauss_h, 0.1, 0.5)


# --- points, P and Phi_C ------------------------------------------------------------


def test_twistor_point_normalisation():
    p = TwistorPoint([2.0, 4.0j, 0.0, 1.0])
    assert p.z[1] == 1.0
    assert p.distance(TwistorPoint([1.0, 2.0j, 0.0, 0.5])) < 1e-15
    with pytest.raises(DomainError):
        TwistorPoint([0, 0, 0, 0])
    with pytest.raises(DomainError):
        TwistorPoint([np.nan, 0, 0, 1])


def test_phi_C_for_zero_h_is_standard_map(zero_h):
    x1, x2, x3, x4 = 0.3, -0.4, 1.2, 0.7
    zeta = 0.2 + 0.9j
    y = phi_C(zero_h, ChartPoint("Dplus", (x1, x2, x3, x4), zeta))
    ref = TwistorPoint([1.0, zeta, -x1 - x2 * zeta, -x3 * zeta + x4])
    assert y.distance(ref) < 1e-15


def test_phi_C_agrees_across_charts(gauss_h, rng):
    for beta in (0.4, -0.6, 0.02, -0.03):
        w = ChartPoint("W", (rng.uniform(0, 2 * np.pi), beta, *rng.uniform(-1, 1, 2)), complex(0.3, 0.6))
        d = transition(w, "Dplus" if beta > 0 else "Dminus")
        assert phi_C(gauss_h, w).distance(phi_C(gauss_h, d)) < 1e-8


def test_phi_C_fibre_half_planes(gauss_h):
    with pytest.raises(DomainError):
        phi_C(gauss_h, ChartPoint("Dplus", (0, 0, 0, 0), -0.5j))
    with pytest.raises(DomainError):
        phi_C(gauss_h, ChartPoint("Dminus", (0, 0, 0, 0), 0.5j))
    with pytest.raises(DomainError):
        phi_C(gauss_h, ChartPoint("Dplus", (0, 0, 0, 0)))


def test_boundary_lands_on_P(gauss_h):
    rng = np.random.default_rng(5)
    for p, y in boundary_samples(gauss_h, rng, 12):
        assert p_residual(y, gauss_h) < 1e-9
        assert gz_residual(y, gauss_h) < 1e-9


def test_interior_is_off_P(gauss_h):
    y = phi_C(gauss_h, ChartPoint("Dplus", (0.2, 0.1, 0.3, -0.1), 0.5j))
    assert p_residual(y, gauss_h) > 1e-3


# --- disks and the foliation ---------------------------------------------------------


def test_disk_params_validation():
    with pytest.raises(ValueError):
        DiskParams("Case2", v=(1.0,))
    with pytest.raises(ValueError):
        DiskParams("Infinity", z=(1.0, 1.0, 0.0))
    d = DiskParams("Interior", a=0.5j, kappa=1 - 1j)
    assert d.case is DiskCase.INTERIOR
    assert d.to_dict() == {"case": "Interior", "a": [0.0, 0.5], "kappa": [1.0, -1.0]}


def test_disk_point_examples(zero_h, gauss_h):
    d = DiskParams("Interior")
    assert disk_point(d, zero_h, 1j).distance(TwistorPoint([1, 1j, 0, 0])) == 0.0
    c2 = DiskParams("Case2", alpha=0.0, v=(0.5, 0.0))
    y = disk_point(c2, gauss_h, 0.7)
    assert abs(y.z[0]) == 0.0 and p_residual(y, gauss_h) < 1e-9
    inf = DiskParams("Infinity", z=(0.0, 0.6, 0.8))
    assert disk_point(inf, gauss_h, np.inf) is Y0
    assert p_residual(disk_point(inf, gauss_h, 2.0), gauss_h) < 1e-12


def test_disk_point_matches_phi_C(gauss_h):
    p = ChartPoint("Dminus", (0.3, -0.5, 0.2, 0.1), 0.4 - 0.9j)
    assert disk_point(disk_params_of(p), gauss_h, p.fiber).distance(phi_C(gauss_h, p)) < 1e-12


def test_probe_of_standard_point(zero_h):
    r = foliation_probe(TwistorPoint([1, 1j, 0, 0]), zero_h)
    assert r.point.chart == "Dplus"
    assert np.allclose(r.point.coords, 0.0, atol=1e-15)
    assert r.param == pytest.approx(1j)


def test_probe_round_trips(gauss_h):
    pts = [
        ChartPoint("Dplus", (0.3, -0.2, 0.5, 0.1), 0.2 + 0.7j),
        ChartPoint("Dminus", (-0.4, 0.6, 0.0, 1.0), -0.3 - 1.1j),
        ChartPoint("W", (1.0, 0.0, 0.4, -0.2), 0.3 + 0.5j),
        ChartPoint("W", (2.5, 0.02, 0.1, 0.3), 0.1 + 0.4j),
    ]
    for p in pts:
        y = phi_C(gauss_h, p)
        r = foliation_probe(y, gauss_h)
        assert probe_point(gauss_h, r).distance(y) < 1e-8


def test_probe_rejects_points_on_P(gauss_h):
    p, y = boundary_samples(gauss_h, np.random.default_rng(1), 1)[0]
    with pytest.raises(DomainError):
        foliation_probe(y, gauss_h)
    with pytest.raises(DomainError):
        foliation_probe(Y0, gauss_h)


# --- the jump of Re H ------------------------------------------------------------------


def test_varpi_for_zero_h(zero_h):
    assert varpi_jump(zero_h, 0.5, 1.0) == 0.0


def test_varpi_numeric_limits_match_closed_form(gauss_h):
    for s, A in ((0.7, 1.0), (-1.5, 0.5)):
        re_p, re_m, im = varpi_limits(gauss_h, s, A)
        hp, hm = varpi_numeric_limits(gauss_h, s, A)
        assert hp.real == pytest.approx(re_p, abs=1e-6)
        assert hm.real == pytest.approx(re_m, abs=1e-6)
        assert hp.imag == pytest.approx(im, abs=1e-6)


def test_varpi_domain(gauss_h):
    with pytest.raises(DomainError):
        varpi_limits(gauss_h, 0.5, 0.0)

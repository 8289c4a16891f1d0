import json
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from zollfrei import _accel

ROOT = Path(__file__).resolve().parents[1]


def _run(code, disable):
    env = dict(os.environ, ZOLLFREI_DISABLE_NUMBA="1" if disable else "0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return out.stdout.strip()


def test_loop_and_numpy_kernels_agree(rng):
    r2 = rng.uniform(0, 9, 50)
    c, k = np.array([1.0, -0.4]), np.array([1.0, 2.5])
    assert np.allclose(_accel._mixture_loop(r2, c, k), _accel._mixture_numpy(r2, c, k), rtol=1e-14)

    plus, minus = rng.normal(size=(3, 20)), rng.normal(size=(3, 20))
    u, w = rng.uniform(0.1, 2, 20), rng.uniform(0, 1, 20)
    assert np.allclose(_accel._pair_sum_loop(plus, minus, u, w), _accel._pair_sum_numpy(plus, minus, u, w), rtol=1e-13)

    rhs = np.sin(np.linspace(0, 3, 41))
    for a, b in zip(_accel._rk4_loop(rhs, 0.15), _accel._rk4_numpy(rhs, 0.15)):
        assert np.allclose(a, b, rtol=1e-13, atol=1e-15)

    poly = rng.normal(size=9) + 1j * rng.normal(size=9)
    pts = 0.9 * np.exp(1j * rng.uniform(0, 6.3, 15))
    assert np.allclose(_accel._horner_loop(poly, pts), _accel._horner_numpy(poly, pts), rtol=1e-13)
    assert np.allclose(_accel._horner_numpy(poly, pts), np.polynomial.polynomial.polyval(pts, poly), rtol=1e-13)


def test_rk4_is_exact_for_polynomial_forcing():
    # nu'' = s has nu = s^3 / 6; RK4 integrates cubics without error.
    h = 0.1
    s = np.arange(0, 2 * 20 + 1) * h / 2
    nu, v = _accel.rk4_pure_forcing(s, h)
    grid = np.arange(21) * h
    assert np.allclose(nu, grid**3 / 6, atol=1e-14)
    assert np.allclose(v, grid**2 / 2, atol=1e-14)


def test_wrapper_shapes_and_validation():
    assert _accel.horner([1.0, 2.0], 0.5).shape == ()
    assert _accel.gaussian_mixture(np.zeros((2, 3)), [1.0], [1.0]).shape == (2, 3)
    with pytest.raises(ValueError):
        _accel.rk4_pure_forcing(np.zeros(4), 0.1)


@pytest.mark.parametrize("flag,expected", [("1", "False"), ("0", "True")])
def test_environment_flag_selects_backend(flag, expected):
    env = dict(os.environ, ZOLLFREI_DISABLE_NUMBA=flag)
    out = subprocess.run(
        [sys.executable, "-c", "from zollfrei import _accel; print(_accel.USE_NUMBA)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == expected


def test_backends_give_same_results():
    code = (
        "import json\n"
        "from zollfrei.profiles import GaussianMixture\n"
        "from zollfrei.geodesics import solve_nu0\n"
        "from zollfrei.twistor import f_to_h, fourier_coeffs, F_series\n"
        "f = GaussianMixture(((1.0, 1.0), (-0.5, 3.0)))\n"
        "sol = solve_nu0(f, 0.8)\n"
        "h = f_to_h(GaussianMixture(((1.0, 1.0),)))\n"
        "v = F_series(fourier_coeffs(h, 0.4 + 0.2j), 0.3 + 0.5j)\n"
        "print(json.dumps([sol.A1, sol.A2, v.real, v.imag]))\n"
    )
    fast = json.loads(_run(code, False))
    slow = json.loads(_run(code, True))
    assert np.allclose(fast, slow, rtol=1e-10, atol=1e-13)


@pytest.mark.slow
def test_benchmark_runs(tmp_path):
    target = tmp_path / "bench.json"
    subprocess.run(
        [sys.executable, str(ROOT / "benchmarks" / "bench_kernels.py"), "--repeat", "1", "--json", str(target)],
        check=True,
        capture_output=True,
    )
    data = json.loads(target.read_text())
    assert data["backends"] == ["numba", "numpy"]
    assert all(row["rel_diff"] < 1e-8 for row in data["kernels"].values())

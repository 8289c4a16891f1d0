"""Compare the numba and numpy kernel backends.

The backend is fixed at import time by ``ZOLLFREI_DISABLE_NUMBA``, so each
backend runs in its own subprocess. Every kernel is timed with ``timeit``
after one warm-up call (which also triggers compilation on the numba path),
and the outputs of both backends are compared.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5] [--json results.json]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, timeit
import numpy as np
from zollfrei import _accel

rng = np.random.default_rng(7)
r2 = rng.uniform(0.0, 9.0, 200_000)
coeffs = np.array([1.0, -0.4, 0.25])
widths = np.array([1.0, 0.5, 2.0])
plus = rng.normal(size=(64, 4000))
minus = rng.normal(size=(64, 4000))
u = rng.uniform(0.01, 5.0, 4000)
w = rng.uniform(0.0, 1.0, 4000)
rhs = np.sin(np.linspace(0.0, 30.0, 2 * 20_000 + 1))
poly = rng.normal(size=129) + 1j * rng.normal(size=129)
pts = 0.95 * np.exp(1j * rng.uniform(0.0, 6.28, 20_000))

cases = {
    "gaussian_mixture": lambda: _accel.gaussian_mixture(r2, coeffs, widths),
    "pair_sum": lambda: _accel.pair_sum(plus, minus, u, w),
    "rk4_pure_forcing": lambda: _accel.rk4_pure_forcing(rhs, 1e-3)[0],
    "horner": lambda: _accel.horner(poly, pts),
}
repeat = int(sys.argv[1])
out = {"backend": "numba" if _accel.USE_NUMBA else "numpy", "kernels": {}}
for name, fn in cases.items():
    ref = fn()
    t = min(timeit.repeat(fn, number=1, repeat=repeat))
    out["kernels"][name] = {"seconds": t, "checksum": [float(np.real(np.sum(ref))), float(np.imag(np.sum(ref)))]}
print(json.dumps(out))
"""


def run_backend(disable, repeat):
    env = dict(os.environ, ZOLLFREI_DISABLE_NUMBA="1" if disable else "0")
    res = subprocess.run(
        [sys.executable, "-c", WORKER, str(repeat)], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(res.stdout)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--json", help="write the raw results to this file")
    args = parser.parse_args(argv)

    fast = run_backend(False, args.repeat)
    slow = run_backend(True, args.repeat)
    print(f"{'kernel':<18} {fast['backend']:>12} {slow['backend']:>12} {'speedup':>8} {'max rel diff':>13}")
    rows = {}
    for name, a in fast["kernels"].items():
        b = slow["kernels"][name]
        ca, cb = complex(*a["checksum"]), complex(*b["checksum"])
        diff = abs(ca - cb) / max(abs(cb), 1e-300)
        speed = b["seconds"] / a["seconds"] if a["seconds"] > 0 else float("inf")
        rows[name] = {"fast": a["seconds"], "reference": b["seconds"], "speedup": speed, "rel_diff": diff}
        print(f"{name:<18} {a['seconds']:>11.4f}s {b['seconds']:>11.4f}s {speed:>7.1f}x {diff:>13.2e}")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump({"backends": [fast["backend"], slow["backend"]], "kernels": rows}, fh, indent=2, sort_keys=True)


if __name__ == "__main__":
    main()

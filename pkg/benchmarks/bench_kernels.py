"""Benchmark the hot kernels: numba-compiled vs pure-Python/NumPy fallback.

Usage:
    python benchmarks/bench_kernels.py [--steps 200000]

The active backend is selected at import time by GEOFREQ_DISABLE_NUMBA; this
script times whatever is active against the reference Python implementations,
so run it twice (with and without the flag) or just once with numba enabled
to see the speedup.
"""

import argparse
import time

import numpy as np

from geofreq import _kernels as K
from geofreq.circuits import DEFAULT_DIODE_POLY


def timeit(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=200_000)
    args = parser.parse_args()
    n = args.steps

    A = np.array([[0.0, 2.0, 0.0], [-1.0, -1.0, 0.0], [0.0, 0.0, -1.0]])
    b = np.array([0.0, 1.0, 1.0])
    x0 = np.zeros(3)
    p = np.array(list(DEFAULT_DIODE_POLY) + [1.0, 1.0, 0.3688, 0.264])
    x0_td = np.zeros(2)
    rng = np.random.default_rng(0)
    lam = np.cumsum(0.01 * (rng.standard_normal((n // 2, 2))
                            + 1j * rng.standard_normal((n // 2, 2))), axis=0)
    lam = np.ascontiguousarray(lam)

    # warm up (JIT compile when numba is active)
    K.rk4_affine(A, b, x0, 1e-3, 10)
    K.rk4_tunnel(p, x0_td, 1e-3, 10)
    K.match_traces(lam[:10])

    backend = "numba" if K.NUMBA_ENABLED else "python (numba disabled)"
    print(f"active backend: {backend}; {n} RK4 steps, {n // 2} trace samples\n")
    print(f"{'kernel':16s} {'active [s]':>12s} {'python [s]':>12s} {'speedup':>9s}")
    cases = [
        ("rk4_affine", K.rk4_affine, K._rk4_affine_py, (A, b, x0, 1e-3, n)),
        ("rk4_tunnel", K.rk4_tunnel, K._rk4_tunnel_py, (p, x0_td, 1e-3, n)),
        ("match_traces", K.match_traces, K._match_traces_py, (lam,)),
    ]
    for name, active, ref, call_args in cases:
        t_active = timeit(active, *call_args)
        t_ref = timeit(ref, *call_args, repeat=1)
        print(f"{name:16s} {t_active:12.4f} {t_ref:12.4f} {t_ref / t_active:8.1f}x")


if __name__ == "__main__":
    main()

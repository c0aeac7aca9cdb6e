"""Hot numeric kernels: fixed-step RK4 integrators and eigenvalue-trace matching.

Each kernel has a plain-Python/NumPy implementation that is JIT-compiled with
numba when available.  Set the environment variable ``GEOFREQ_DISABLE_NUMBA=1``
(before import) to force the pure-NumPy fallback path; ``benchmarks/``
compares the two.
"""

from __future__ import annotations

import os

import numpy as np

_flag = os.environ.get("GEOFREQ_DISABLE_NUMBA", "").strip().lower()
NUMBA_REQUESTED = _flag not in ("1", "true", "yes", "on")

try:
    if not NUMBA_REQUESTED:
        raise ImportError("numba disabled via GEOFREQ_DISABLE_NUMBA")
    from numba import njit

    NUMBA_ENABLED = True
except ImportError:
    NUMBA_ENABLED = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


def _rk4_affine_py(A, b, x0, h, n_steps):
    """RK4 for x' = A x + b.  Returns (states, bad_step); bad_step is the
    index of the first non-finite state, or -1."""
    dim = x0.shape[0]
    X = np.empty((n_steps + 1, dim))
    X[0] = x0
    x = x0.copy()
    for k in range(n_steps):
        k1 = A @ x + b
        k2 = A @ (x + 0.5 * h * k1) + b
        k3 = A @ (x + 0.5 * h * k2) + b
        k4 = A @ (x + h * k3) + b
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        X[k + 1] = x
        ok = True
        for i in range(dim):
            if not np.isfinite(x[i]):
                ok = False
        if not ok:
            return X, k + 1
    return X, -1


def _tunnel_flow_py(x, p, out):
    # p = (c1..c5, L, C, R, Vdc); states x = (v_C, i_L)
    v = x[0]
    i_r = ((((p[4] * v + p[3]) * v + p[2]) * v + p[1]) * v + p[0]) * v
    out[0] = (-i_r + x[1]) / p[6]
    out[1] = (p[8] - p[7] * x[1] - v) / p[5]


def _rk4_tunnel_py(p, x0, h, n_steps):
    """RK4 for the tunnel-diode circuit.  p = (c1..c5, L, C, R, Vdc)."""
    X = np.empty((n_steps + 1, 2))
    X[0] = x0
    x = x0.copy()
    k1 = np.empty(2)
    k2 = np.empty(2)
    k3 = np.empty(2)
    k4 = np.empty(2)
    for k in range(n_steps):
        _tunnel_flow_py(x, p, k1)
        _tunnel_flow_py(x + 0.5 * h * k1, p, k2)
        _tunnel_flow_py(x + 0.5 * h * k2, p, k3)
        _tunnel_flow_py(x + h * k3, p, k4)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        X[k + 1] = x
        if not (np.isfinite(x[0]) and np.isfinite(x[1])):
            return X, k + 1
    return X, -1


def _match_traces_py(lams):
    """Reorder each row of an (n_samples, N) complex eigenvalue array so that
    every trace follows its nearest neighbor from the previous sample.
    Greedy over previous positions in order; deterministic."""
    n, m = lams.shape
    out = lams.copy()
    for t in range(1, n):
        taken = np.zeros(m, dtype=np.bool_)
        row = np.empty(m, dtype=np.complex128)
        for i in range(m):
            best = -1
            bestd = 1e300
            for j in range(m):
                if taken[j]:
                    continue
                d = abs(out[t, j] - out[t - 1, i])
                if d < bestd:
                    bestd = d
                    best = j
            taken[best] = True
            row[i] = out[t, best]
        out[t] = row
    return out


if NUMBA_ENABLED:
    rk4_affine = njit(cache=True)(_rk4_affine_py)
    _tunnel_flow = njit(cache=True)(_tunnel_flow_py)

    @njit(cache=True)
    def rk4_tunnel(p, x0, h, n_steps):
        X = np.empty((n_steps + 1, 2))
        X[0] = x0
        x = x0.copy()
        k1 = np.empty(2)
        k2 = np.empty(2)
        k3 = np.empty(2)
        k4 = np.empty(2)
        for k in range(n_steps):
            _tunnel_flow(x, p, k1)
            _tunnel_flow(x + 0.5 * h * k1, p, k2)
            _tunnel_flow(x + 0.5 * h * k2, p, k3)
            _tunnel_flow(x + h * k3, p, k4)
            x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            X[k + 1] = x
            if not (np.isfinite(x[0]) and np.isfinite(x[1])):
                return X, k + 1
        return X, -1

    match_traces = njit(cache=True)(_match_traces_py)
else:
    rk4_affine = _rk4_affine_py
    rk4_tunnel = _rk4_tunnel_py
    match_traces = _match_traces_py

import numpy as np
import pytest

import geofreq as gf


def random_diagonalizable(rng, n, max_cond=50.0):
    """Random real diagonalizable matrix with a known spectrum, built as
    V M V^-1 from a well-conditioned random V and a real block-diagonal M.

    Returns (A, real_eigs, pairs) with pairs as (alpha, beta > 0) rows.
    """
    n_pairs = rng.integers(0, n // 2 + 1)
    n_real = n - 2 * n_pairs
    reals = np.sort(rng.uniform(-3.0, 1.0, n_real))[::-1]
    alphas = rng.uniform(-3.0, 1.0, n_pairs)
    betas = rng.uniform(0.1, 3.0, n_pairs)
    M = np.zeros((n, n))
    for i, mu in enumerate(reals):
        M[i, i] = mu
    for k in range(n_pairs):
        o = n_real + 2 * k
        M[o, o] = M[o + 1, o + 1] = alphas[k]
        M[o, o + 1] = -betas[k]
        M[o + 1, o] = betas[k]
    while True:
        V = rng.standard_normal((n, n))
        if np.linalg.cond(V) < max_cond:
            break
    A = V @ M @ np.linalg.inv(V)
    return A, reals, np.column_stack([alphas, betas]) if n_pairs else np.empty((0, 2))


@pytest.fixture(scope="session")
def third_order_matrix():
    return np.array([[0.0, 2.0, 0.0], [-1.0, -1.0, 0.0], [0.0, 0.0, -1.0]])


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the numba kernels once so timed tests measure steady state."""
    m = gf.build_rc(gf.RcParams(1.0, 1.0, 1.0))
    gf.integrate(m, [0.0], 0.01, 1e-3)
    td = gf.build_tunnel_diode(gf.TunnelDiodeParams(1.0, 1.0, 1.0, 0.1))
    tr = gf.integrate(td, [0.0, 0.0], 0.01, 1e-3)
    gf.analyze_trajectory(tr, td)

"""The numba-compiled kernels and their pure-Python fallbacks must agree."""

import numpy as np
import pytest

from geofreq import _kernels as K


@pytest.fixture
def rng():
    return np.random.default_rng(41)


def test_backend_flag_is_reported():
    assert isinstance(K.NUMBA_ENABLED, bool)


def test_rk4_affine_matches_python(rng):
    A = rng.standard_normal((3, 3)) * 0.5
    A -= 2.0 * np.eye(3)
    b = rng.standard_normal(3)
    x0 = rng.standard_normal(3)
    X_disp, bad_disp = K.rk4_affine(A, b, x0, 1e-3, 500)
    X_py, bad_py = K._rk4_affine_py(A, b, x0, 1e-3, 500)
    assert bad_disp == bad_py == -1
    assert np.allclose(X_disp, X_py, rtol=1e-13, atol=1e-15)


def test_rk4_tunnel_matches_python():
    p = np.array([2.7834, -7.5151, -35.2248, 49.8913, 190.062, 1.0, 0.5, 0.2, 0.5])
    x0 = np.zeros(2)
    X_disp, bad_disp = K.rk4_tunnel(p, x0, 1e-3, 2000)
    X_py, bad_py = K._rk4_tunnel_py(p, x0, 1e-3, 2000)
    assert bad_disp == bad_py == -1
    assert np.allclose(X_disp, X_py, rtol=1e-13, atol=1e-15)


def test_rk4_affine_divergence_flagged():
    A = np.array([[50.0]])
    b = np.zeros(1)
    with np.errstate(over="ignore", invalid="ignore"):
        X, bad = K.rk4_affine(A, b, np.array([1.0]), 10.0, 100)
    assert bad >= 0
    assert not np.isfinite(X[bad]).all()


def test_match_traces_matches_python(rng):
    lam = rng.standard_normal((200, 4)) + 1j * rng.standard_normal((200, 4))
    # make rows slowly varying so matching is meaningful
    lam = np.cumsum(lam * 0.05, axis=0)
    got = np.asarray(K.match_traces(np.ascontiguousarray(lam)))
    ref = K._match_traces_py(lam)
    assert np.array_equal(got, ref)


def test_match_traces_follows_crossing():
    # two traces that swap raw ordering midway stay continuous after matching
    t = np.linspace(0.0, 1.0, 101)
    a = -1.0 + 2.0 * t  # crosses b at t = 0.5
    b = np.zeros_like(t)
    lam = np.sort(np.stack([a, b], axis=1), axis=1).astype(complex)
    out = np.asarray(K.match_traces(np.ascontiguousarray(lam)))
    assert np.abs(np.diff(out[:, 0].real)).max() < 0.05
    assert np.abs(np.diff(out[:, 1].real)).max() < 0.05

"""State-space system models, fixed-step trajectory integration, and exact
velocity/acceleration extraction.

States x are treated as generalized positions; the generalized velocity is
u = x' = f(x) and its derivative follows the chain rule, u' = J(x) u with J
the Jacobian of the flow.  Both u and u' are therefore evaluated exactly from
the model along the trajectory, never by differencing samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels

__all__ = [
    "DivergedError",
    "NoEquilibriumError",
    "SystemModel",
    "Trajectory",
    "integrate",
    "jacobian_fd",
    "equilibrium_find",
]


class DivergedError(RuntimeError):
    """Integration produced a non-finite state."""

    def __init__(self, time: float):
        super().__init__(f"trajectory diverged (non-finite state) at t = {time:.6g} s")
        self.time = time


class NoEquilibriumError(RuntimeError):
    """Newton iteration failed to locate a root of the flow."""


@dataclass
class SystemModel:
    """A first-order ODE system x' = flow(x).

    ``jacobian`` is the analytic Jacobian when available; otherwise finite
    differences are used.  Affine systems (flow = A x + b) carry A and b so
    velocities and accelerations vectorize and the Jacobian is exact.
    ``kernel``/``kernel_params`` select a compiled integrator for the built-in
    circuit families; ``flow_batch``/``jac_vel_batch`` are optional vectorized
    evaluators over (n_samples, dim) state arrays.
    """

    dim: int
    flow: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray] | None = None
    A: np.ndarray | None = None
    b: np.ndarray | None = None
    kernel: str | None = None
    kernel_params: np.ndarray | None = None
    flow_batch: Callable[[np.ndarray], np.ndarray] | None = None
    jac_vel_batch: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    name: str = ""

    @property
    def is_affine(self) -> bool:
        return self.A is not None

    def jac(self, x) -> np.ndarray:
        """Jacobian at x: constant A for affine systems, analytic when
        supplied, central finite differences otherwise."""
        if self.is_affine:
            return self.A
        if self.jacobian is not None:
            return np.asarray(self.jacobian(np.asarray(x, dtype=float)), dtype=float)
        return jacobian_fd(self.flow, x)


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled trajectory with exact velocities and accelerations.

    ``velocities[k] = flow(states[k])`` and
    ``accelerations[k] = J(states[k]) @ velocities[k]``; neither is obtained
    by numerical differencing.
    """

    times: np.ndarray
    states: np.ndarray
    velocities: np.ndarray
    accelerations: np.ndarray

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def __len__(self) -> int:
        return len(self.times)


def jacobian_fd(f, x, h_fd: float | None = None) -> np.ndarray:
    """Central-difference Jacobian of f at x, accurate to O(h_fd^2).

    The default step is eps^(1/3) * (1 + |x_j|) per component, the standard
    central-difference scaling.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    f0 = np.asarray(f(x), dtype=float)
    J = np.empty((f0.size, n))
    for j in range(n):
        hj = h_fd if h_fd is not None else np.finfo(float).eps ** (1.0 / 3.0) * (1.0 + abs(x[j]))
        e = np.zeros(n)
        e[j] = hj
        J[:, j] = (np.asarray(f(x + e), dtype=float) - np.asarray(f(x - e), dtype=float)) / (2.0 * hj)
    return J


def _rk4_python(flow, x0, h, n_steps):
    dim = x0.size
    X = np.empty((n_steps + 1, dim))
    X[0] = x0
    x = x0.copy()
    for k in range(n_steps):
        k1 = np.asarray(flow(x), dtype=float)
        k2 = np.asarray(flow(x + 0.5 * h * k1), dtype=float)
        k3 = np.asarray(flow(x + 0.5 * h * k2), dtype=float)
        k4 = np.asarray(flow(x + h * k3), dtype=float)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        X[k + 1] = x
        if not np.all(np.isfinite(x)):
            return X, k + 1
    return X, -1


def integrate(model: SystemModel, x0, t_end: float, h: float) -> Trajectory:
    """Integrate x' = flow(x) with classical fixed-step 4th-order Runge-Kutta.

    Samples every step; the final time is within h of t_end.  Raises
    DivergedError at the first non-finite state.
    """
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.size != model.dim:
        raise ValueError(f"x0 has dimension {x0.size}, model expects {model.dim}")
    if not np.all(np.isfinite(x0)):
        raise ValueError("x0 contains non-finite components")
    if h <= 0 or t_end <= 0:
        raise ValueError("h and t_end must be positive")
    n_steps = max(1, int(round(t_end / h)))

    if model.kernel == "affine":
        X, bad = _kernels.rk4_affine(model.A, model.b, x0, h, n_steps)
    elif model.kernel == "tunnel":
        X, bad = _kernels.rk4_tunnel(model.kernel_params, x0, h, n_steps)
    else:
        X, bad = _rk4_python(model.flow, x0, h, n_steps)
    if bad >= 0:
        raise DivergedError(bad * h)

    times = np.arange(n_steps + 1) * h
    if model.is_affine:
        U = X @ model.A.T + model.b
        dU = U @ model.A.T
    elif model.flow_batch is not None and model.jac_vel_batch is not None:
        U = model.flow_batch(X)
        dU = model.jac_vel_batch(X, U)
    else:
        U = np.empty_like(X)
        dU = np.empty_like(X)
        for k in range(X.shape[0]):
            U[k] = np.asarray(model.flow(X[k]), dtype=float)
            dU[k] = model.jac(X[k]) @ U[k]
    return Trajectory(times=times, states=X, velocities=U, accelerations=dU)


def equilibrium_find(model: SystemModel, x_guess, max_iter: int = 100) -> np.ndarray:
    """Damped Newton iteration on flow(x) = 0.

    Returns x* with ||flow(x*)||_inf < 1e-10, or raises NoEquilibriumError
    after max_iter iterations (or on a singular Jacobian).
    """
    x = np.asarray(x_guess, dtype=float).reshape(-1).copy()
    if x.size != model.dim:
        raise ValueError(f"x_guess has dimension {x.size}, model expects {model.dim}")
    fx = np.asarray(model.flow(x), dtype=float)
    for _ in range(max_iter):
        fn = np.abs(fx).max()
        if fn < 1e-10:
            return x
        try:
            step = np.linalg.solve(model.jac(x), -fx)
        except np.linalg.LinAlgError as exc:
            raise NoEquilibriumError(f"singular Jacobian at x = {x}") from exc
        lam = 1.0
        for _ in range(40):
            x_new = x + lam * step
            f_new = np.asarray(model.flow(x_new), dtype=float)
            if np.all(np.isfinite(f_new)) and np.abs(f_new).max() < (1.0 - 1e-4 * lam) * fn:
                break
            lam *= 0.5
        else:
            raise NoEquilibriumError(f"Newton line search stalled near x = {x}")
        x, fx = x_new, f_new
    if np.abs(fx).max() < 1e-10:
        return x
    raise NoEquilibriumError(f"no convergence in {max_iter} iterations from {x_guess}")

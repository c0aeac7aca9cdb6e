"""The four example circuits as parameterized system models.

All four are driven by a dc source switched in at t = 0 with the circuit
initially de-energized, so the natural initial condition is the zero state.
State orderings are fixed: (i, v) for the series RLC, (v_C1, i_L, v_C2) for
the third-order circuit, (v_C, i_L) for the tunnel diode.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynsys import SystemModel

__all__ = [
    "RcParams",
    "RlcParams",
    "ThirdOrderParams",
    "TunnelDiodeParams",
    "DEFAULT_DIODE_POLY",
    "build_rc",
    "build_rlc",
    "build_third_order",
    "build_tunnel_diode",
    "diode_current",
    "diode_conductance",
    "BUILTIN_SCENARIOS",
]

#: Default tunnel-diode characteristic i_R(v) = sum_m c_m v^m, m = 1..5.
#: An N-shaped quintic calibrated so the shipped scenario parameter sets
#: produce their intended regimes: current peak at v = 0.12 V (0.18 A) and
#: valley at v = 0.27 V (0.048 A).
DEFAULT_DIODE_POLY = (2.7834, -7.5151, -35.2248, 49.8913, 190.062)


def _require_positive(**kwargs) -> None:
    for name, value in kwargs.items():
        if not (np.isfinite(value) and value > 0):
            raise ValueError(f"{name} must be positive and finite, got {value}")


@dataclass(frozen=True)
class RcParams:
    """First-order RC circuit fed by a dc source."""

    R: float = 1.0
    C: float = 1.0
    V_dc: float = 1.0

    def __post_init__(self):
        _require_positive(R=self.R, C=self.C, V_dc=self.V_dc)

    @property
    def eigenvalue(self) -> float:
        return -1.0 / (self.R * self.C)


@dataclass(frozen=True)
class RlcParams:
    """Series RLC circuit fed by a dc source; states (i, v)."""

    R: float = 1.0
    L: float = 1.0
    C: float = 1.0
    V_dc: float = 1.0

    def __post_init__(self):
        _require_positive(R=self.R, L=self.L, C=self.C, V_dc=self.V_dc)

    @property
    def underdamped(self) -> bool:
        return self.R * self.R < 4.0 * self.L / self.C


@dataclass(frozen=True)
class ThirdOrderParams:
    """Series RLC branch in parallel with a series RC branch across a dc
    source; states (v_C1, i_L, v_C2).  The default values give the state
    matrix [[0, 2, 0], [-1, -1, 0], [0, 0, -1]]."""

    R1: float = 1.0
    L: float = 1.0
    C1: float = 0.5
    R2: float = 1.0
    C2: float = 1.0
    V_dc: float = 1.0

    def __post_init__(self):
        _require_positive(R1=self.R1, L=self.L, C1=self.C1, R2=self.R2, C2=self.C2, V_dc=self.V_dc)


@dataclass(frozen=True)
class TunnelDiodeParams:
    """Tunnel-diode circuit: dc source, series R and L, diode in parallel
    with C.  States (v_C, i_L).  The diode characteristic is the polynomial
    i_R(v) = sum_m diode_poly[m-1] v^m, validated N-shaped (its derivative
    changes sign exactly twice) over the operating interval
    [0, max(0.6, 1.2 V_dc)]."""

    L: float = 1.0
    C: float = 1.0
    R: float = 1.0
    V_dc: float = 1.0
    diode_poly: tuple = DEFAULT_DIODE_POLY

    def __post_init__(self):
        _require_positive(L=self.L, C=self.C, R=self.R, V_dc=self.V_dc)
        poly = tuple(float(c) for c in self.diode_poly)
        if len(poly) != 5 or not all(np.isfinite(poly)):
            raise ValueError("diode_poly must be five finite coefficients c1..c5")
        object.__setattr__(self, "diode_poly", poly)
        v_hi = max(0.6, 1.2 * self.V_dc)
        v = np.linspace(0.0, v_hi, 4001)
        slope = diode_conductance(v, poly)
        changes = int(np.count_nonzero(np.diff(np.sign(slope)) != 0))
        if changes != 2:
            raise ValueError(
                f"diode characteristic is not N-shaped on [0, {v_hi:g}]: "
                f"i_R' changes sign {changes} times, expected 2"
            )


def diode_current(v, poly=DEFAULT_DIODE_POLY):
    """i_R(v) = c1 v + c2 v^2 + ... + c5 v^5 (Horner form; i_R(0) = 0)."""
    c1, c2, c3, c4, c5 = poly
    v = np.asarray(v, dtype=float)
    return ((((c5 * v + c4) * v + c3) * v + c2) * v + c1) * v


def diode_conductance(v, poly=DEFAULT_DIODE_POLY):
    """d i_R / d v."""
    c1, c2, c3, c4, c5 = poly
    v = np.asarray(v, dtype=float)
    return (((5.0 * c5 * v + 4.0 * c4) * v + 3.0 * c3) * v + 2.0 * c2) * v + c1


def _affine_model(A, b, name: str) -> SystemModel:
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    return SystemModel(
        dim=A.shape[0],
        flow=lambda x, A=A, b=b: A @ x + b,
        A=A,
        b=b,
        kernel="affine",
        name=name,
    )


def build_rc(p: RcParams) -> SystemModel:
    """v' = (-v + V_dc)/(RC); the single eigenvalue is -1/(RC)."""
    k = 1.0 / (p.R * p.C)
    return _affine_model([[-k]], [k * p.V_dc], "rc")


def build_rlc(p: RlcParams) -> SystemModel:
    """i' = (-R i - v + V_dc)/L, v' = i/C."""
    A = [[-p.R / p.L, -1.0 / p.L], [1.0 / p.C, 0.0]]
    b = [p.V_dc / p.L, 0.0]
    return _affine_model(A, b, "rlc")


def build_third_order(p: ThirdOrderParams) -> SystemModel:
    """RLC branch (v_C1, i_L) plus RC branch (v_C2) across the source."""
    A = [
        [0.0, 1.0 / p.C1, 0.0],
        [-1.0 / p.L, -p.R1 / p.L, 0.0],
        [0.0, 0.0, -1.0 / (p.R2 * p.C2)],
    ]
    b = [0.0, p.V_dc / p.L, p.V_dc / (p.R2 * p.C2)]
    return _affine_model(A, b, "third-order")


def build_tunnel_diode(p: TunnelDiodeParams) -> SystemModel:
    """v_C' = (-i_R(v_C) + i_L)/C, i_L' = (V_dc - R i_L - v_C)/L."""
    poly = p.diode_poly
    L, C, R, V = p.L, p.C, p.R, p.V_dc

    def flow(x):
        return np.array(
            [(-diode_current(x[0], poly) + x[1]) / C, (V - R * x[1] - x[0]) / L]
        )

    def jacobian(x):
        return np.array(
            [[-diode_conductance(x[0], poly) / C, 1.0 / C], [-1.0 / L, -R / L]]
        )

    def flow_batch(X):
        U = np.empty_like(X)
        U[:, 0] = (-diode_current(X[:, 0], poly) + X[:, 1]) / C
        U[:, 1] = (V - R * X[:, 1] - X[:, 0]) / L
        return U

    def jac_vel_batch(X, U):
        dU = np.empty_like(U)
        g = diode_conductance(X[:, 0], poly)
        dU[:, 0] = (-g * U[:, 0] + U[:, 1]) / C
        dU[:, 1] = (-U[:, 0] - R * U[:, 1]) / L
        return dU

    params = np.array(list(poly) + [L, C, R, V])
    return SystemModel(
        dim=2,
        flow=flow,
        jacobian=jacobian,
        kernel="tunnel",
        kernel_params=params,
        flow_batch=flow_batch,
        jac_vel_batch=jac_vel_batch,
        name="tunnel-diode",
    )


# ---------------------------------------------------------------------------
# Built-in scenarios.  Flat dictionaries consumed by the CLI; the tunnel-diode
# parameter sets come from the dominant-monotonic / oscillatory / isotropic /
# limit-cycle / two-equilibria studies.  Exceptions forced by the default
# diode characteristic:
#   * td-isotropic uses V_dc = 0.1710986 (instead of 0.402) so the Jacobian
#     at the equilibrium is an exact scaled rotation: i_R'(v*) = R gives
#     eigenvalues -0.3688 +/- 1.0 j.
# ---------------------------------------------------------------------------

_TD_POLY = ", ".join(repr(c) for c in DEFAULT_DIODE_POLY)


def _td(name, L, C, R, V, x0, t_end, window, checks):
    return {
        "scenario": {"name": name},
        "system": {
            "kind": "tunnel-diode",
            "L": repr(L),
            "C": repr(C),
            "R": repr(R),
            "V_dc": repr(V),
            "diode_poly": _TD_POLY,
        },
        "initial": {"x": ", ".join(repr(float(v)) for v in x0)},
        "integration": {"t_end": repr(float(t_end)), "h": "0.001"},
        "analysis": {"modal": "false", "tail_window": repr(window)},
        "checks": checks,
    }


BUILTIN_SCENARIOS = {
    "rc": {
        "scenario": {"name": "rc"},
        "system": {"kind": "rc", "R": "1.0", "C": "1.0", "V_dc": "1.0"},
        "initial": {"x": "0.0"},
        "integration": {"t_end": "10.0", "h": "0.001"},
        "analysis": {"modal": "true", "tail_window": "0.2"},
        "checks": {"kind": "constant-rho", "rho_value": "-1.0", "tol": "1e-9"},
    },
    "rlc": {
        "scenario": {"name": "rlc"},
        "system": {"kind": "rlc", "R": "1.0", "L": "1.0", "C": "1.0", "V_dc": "1.0"},
        "initial": {"x": "0.0, 0.0"},
        "integration": {"t_end": "20.0", "h": "0.001"},
        "analysis": {"modal": "true", "tail_window": "0.2"},
        "checks": {"kind": "block-identity", "tol": "1e-8", "min_untransformed_rho_std": "1e-3"},
    },
    "third-order": {
        "scenario": {"name": "third-order"},
        "system": {
            "kind": "third-order",
            "R1": "1.0",
            "L": "1.0",
            "C1": "0.5",
            "R2": "1.0",
            "C2": "1.0",
            "V_dc": "1.0",
        },
        "initial": {"x": "0.0, 0.0, 0.0"},
        "integration": {"t_end": "20.0", "h": "0.001"},
        "analysis": {"modal": "true", "tail_window": "0.2"},
        "checks": {"kind": "block-identity", "tol": "1e-8"},
    },
    "td-monotonic": _td(
        "td-monotonic", 1.0, 0.5, 0.2, 0.5, (0.0, 0.0), 40.0, 0.2,
        {"kind": "real-tail", "rho_rtol": "0.01", "omega_atol": "1e-3"},
    ),
    "td-oscillatory": _td(
        "td-oscillatory", 1.0, 0.5, 0.2, 0.15, (0.0, 0.0), 40.0, 0.2,
        {"kind": "pair-tail", "rho_rtol": "0.05", "omega_rtol": "0.05", "min_sign_changes": "2"},
    ),
    "td-isotropic": _td(
        "td-isotropic", 1.0, 1.0, 0.3688, 0.1710986, (0.0, 0.0), 40.0, 0.2,
        {"kind": "pair-tail", "rho_rtol": "0.05", "omega_rtol": "0.05", "min_sign_changes": "0"},
    ),
    "td-limit-cycle": _td(
        "td-limit-cycle", 1.0, 1.0, 0.3688, 0.264, (0.0, 0.0), 80.0, 0.2,
        {
            "kind": "limit-cycle",
            "min_periods": "3",
            "max_period_spread": "0.01",
            "max_loop_integral": "1e-2",
        },
    ),
    "td-two-equilibria-a": _td(
        "td-two-equilibria-a", 1.0, 0.5, 1.5, 0.35, (0.0, 0.0), 12.0, 0.4,
        {"kind": "pair-tail", "rho_rtol": "0.05", "omega_rtol": "0.05", "min_sign_changes": "0"},
    ),
    "td-two-equilibria-b": _td(
        "td-two-equilibria-b", 1.0, 0.5, 1.5, 0.35, (0.35, 0.0), 20.0, 0.4,
        {"kind": "pair-tail", "rho_rtol": "0.05", "omega_rtol": "0.05", "min_sign_changes": "0"},
    ),
}

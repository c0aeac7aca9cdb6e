"""Along-trajectory analytics: geometric frequency, Jacobian spectra,
modal participation, and asymptotic-prediction comparison.

Near a stable equilibrium the tail of a trajectory is governed by the
dominant mode of the linearized system.  With a real dominant eigenvalue mu1
the velocity collapses onto the dominant eigenvector and rho -> mu1,
|omega| -> 0.  With a dominant conjugate pair (alpha, beta) the velocity
spirals on an ellipse: rho and |omega| oscillate around alpha and beta, with
excursions governed by the participation ratio c12 = c1/c2 of the two real
directions spanning the pair.  compare_tail quantifies how well a simulated
tail matches those forecasts; when the forecast is oscillatory the tail means
are taken over whole oscillation cycles (between like-phase crossings), which
removes the partial-period bias of a raw windowed mean.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dynsys import SystemModel, Trajectory
from .geomalg import batch_geometric_frequency
from .modal import BlockDesc, RealModalForm, Spectrum

__all__ = [
    "AmbiguousDominanceError",
    "InsufficientTailError",
    "BlockSeries",
    "AnalysisSeries",
    "ModalProjection",
    "AsymptoteForecast",
    "TailReport",
    "LimitCycleReport",
    "analyze_trajectory",
    "modal_projection",
    "reconstruct",
    "predict_asymptote",
    "compare_tail",
    "detect_limit_cycle",
]


class AmbiguousDominanceError(ValueError):
    """No strictly dominant excited mode (gap in real parts too small)."""


class InsufficientTailError(RuntimeError):
    """All samples in the requested tail window are degenerate."""


@dataclass(frozen=True)
class BlockSeries:
    """Per-sample complex frequency of one transformed modal block."""

    block: BlockDesc
    rho: np.ndarray
    omega: np.ndarray | None
    valid: np.ndarray


@dataclass(frozen=True)
class AnalysisSeries:
    """Sample-aligned analytics for one trajectory.

    ``eig_re``/``eig_im`` are (n_samples, dim) Jacobian eigenvalue traces in
    the deterministic spectrum ordering at the first sample, then followed by
    nearest-neighbor matching so each column is continuous.  ``switch_flags``
    marks samples where the real/complex classification of the spectrum
    changed relative to the previous sample.
    """

    times: np.ndarray
    rho: np.ndarray
    omega_norm: np.ndarray
    valid: np.ndarray
    eig_re: np.ndarray
    eig_im: np.ndarray
    switch_flags: np.ndarray
    blocks: tuple[BlockSeries, ...] = ()

    @property
    def dim(self) -> int:
        return self.eig_re.shape[1]


@dataclass(frozen=True)
class ModalProjection:
    """Participation of the modes of a spectrum in an initial velocity.

    ``coefficients[j] = left[j] . u0`` for each canonical mode (one entry per
    real eigenvalue and per conjugate pair).  ``dominant_index`` is the
    excited mode with the largest real part, or None if u0 excites nothing.
    For a dominant pair, ``c12``/``c21`` are the participation ratios of the
    two real directions spanning the pair's invariant plane (|Re r| / |Im r|
    of the right eigenvector and its inverse).
    """

    spectrum: Spectrum
    coefficients: np.ndarray
    excited: np.ndarray
    dominant_index: int | None
    c12: float | None = None
    c21: float | None = None


@dataclass(frozen=True)
class AsymptoteForecast:
    """Predicted tail behavior of rho and |omega| for the dominant mode.

    kind "real": rho -> rho_target, |omega| -> 0.  kind "pair": rho
    oscillates around rho_target (= alpha) within +/- rho_envelope, |omega|
    oscillates inside omega_range around omega_target (= beta).  The envelope
    and range assume the pair's two real directions are orthonormal, which
    generic Jacobians violate; ``notes`` records that assumption.
    """

    kind: str
    rho_target: float
    omega_target: float
    rho_envelope: float = 0.0
    omega_range: tuple[float, float] = (0.0, 0.0)
    c12: float | None = None
    c21: float | None = None
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class TailReport:
    """Tail statistics of a simulated series against a forecast."""

    rho_mean: float
    rho_std: float
    omega_mean: float
    omega_std: float
    rho_target: float
    omega_target: float
    rho_err: float
    omega_err: float
    rho_sign_changes: int
    omega_sign_changes: int
    n_tail: int
    n_used: int
    trimmed: bool
    pass_rho: bool
    pass_omega: bool
    passed: bool
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class LimitCycleReport:
    """Result of Poincare-section period detection on a velocity component."""

    detected: bool
    n_periods: int
    period_mean: float
    period_spread: float
    loop_integral_rho: float
    section_value: float
    crossing_times: np.ndarray
    message: str = ""


_EIG_IMAG_TOL = 1e-12


def _sort_initial(lams: np.ndarray, scale: float) -> np.ndarray:
    """Deterministic eigenvalue ordering for the first sample: real
    eigenvalues (descending), then pairs by real part descending with the
    positive-imaginary member first."""
    tol = 1e-9 * (1.0 + scale)
    reals = sorted([l for l in lams if abs(l.imag) <= tol], key=lambda l: -l.real)
    cplx = [l for l in lams if abs(l.imag) > tol]
    plus = sorted([l for l in cplx if l.imag > 0], key=lambda l: (-l.real, -l.imag))
    out = list(reals)
    for l in plus:
        out.append(l)
        out.append(np.conj(l))
    if len(out) != len(lams):  # unmatched conjugates; fall back to raw sort
        out = sorted(lams, key=lambda l: (-l.real, -l.imag))
    return np.array(out, dtype=complex)


def _eig_series(traj: Trajectory, model: SystemModel) -> np.ndarray:
    n = len(traj)
    if model.is_affine:
        lam = np.linalg.eigvals(model.A)
        lam = _sort_initial(lam, float(np.linalg.norm(model.A)))
        return np.broadcast_to(lam, (n, model.dim)).copy()
    if model.dim == 2 and model.name == "tunnel-diode":
        # closed-form 2x2 eigenvalues, vectorized over samples; only the
        # (0, 0) entry of the tunnel-diode Jacobian varies along a trajectory
        J = model.jac(traj.states[0])
        from .circuits import diode_conductance

        poly = tuple(model.kernel_params[:5])
        C = model.kernel_params[6]
        J11 = -diode_conductance(traj.states[:, 0], poly) / C
        tr = J11 + J[1, 1]
        det = J11 * J[1, 1] - J[0, 1] * J[1, 0]
        disc = tr * tr - 4.0 * det
        sq = np.sqrt(np.abs(disc))
        lam = np.empty((n, 2), dtype=complex)
        neg = disc < 0
        lam[neg, 0] = 0.5 * (tr[neg] + 1j * sq[neg])
        lam[neg, 1] = 0.5 * (tr[neg] - 1j * sq[neg])
        lam[~neg, 0] = 0.5 * (tr[~neg] + sq[~neg])
        lam[~neg, 1] = 0.5 * (tr[~neg] - sq[~neg])
    else:
        lam = np.empty((n, model.dim), dtype=complex)
        for k in range(n):
            lam[k] = np.linalg.eigvals(model.jac(traj.states[k]))
    lam[0] = _sort_initial(lam[0], float(np.max(np.abs(lam[0])) if n else 1.0))
    return np.asarray(_kernels.match_traces(np.ascontiguousarray(lam)))


def analyze_trajectory(
    traj: Trajectory, model: SystemModel, modal_form: RealModalForm | None = None
) -> AnalysisSeries:
    """Per-sample geometric frequency and Jacobian spectrum of a trajectory.

    Degenerate velocity samples are flagged, never dropped.  When
    ``modal_form`` is given (affine systems), the transformed coordinates
    zeta = W u are analyzed per modal block and attached as BlockSeries.
    """
    if len(traj) == 0:
        raise ValueError("trajectory is empty")
    rho, omega_norm, valid, _ = batch_geometric_frequency(traj.velocities, traj.accelerations)

    lam = _eig_series(traj, model)
    n_complex = (np.abs(lam.imag) > _EIG_IMAG_TOL).sum(axis=1)
    switch = np.zeros(len(traj), dtype=bool)
    switch[1:] = n_complex[1:] != n_complex[:-1]

    blocks: tuple[BlockSeries, ...] = ()
    if modal_form is not None:
        Z = traj.velocities @ modal_form.W.T
        dZ = traj.accelerations @ modal_form.W.T
        out = []
        for b in modal_form.blocks:
            o = b.offset
            if b.kind == "real":
                z = Z[:, o]
                dz = dZ[:, o]
                ok = np.abs(z) >= 1e-12 * (1.0 + np.abs(dz))
                r = np.where(ok, dz / np.where(ok, z, 1.0), np.nan)
                out.append(BlockSeries(b, r, None, ok))
            else:
                r, w, ok, w2 = batch_geometric_frequency(Z[:, o : o + 2], dZ[:, o : o + 2])
                out.append(BlockSeries(b, r, w2, ok))
        blocks = tuple(out)

    return AnalysisSeries(
        times=traj.times,
        rho=rho,
        omega_norm=omega_norm,
        valid=valid,
        eig_re=lam.real.copy(),
        eig_im=lam.imag.copy(),
        switch_flags=switch,
        blocks=blocks,
    )


def modal_projection(spec: Spectrum, u0) -> ModalProjection:
    """Participation coefficients c_j = l_j . u0 and the dominant excited mode."""
    u0 = np.asarray(u0, dtype=float).reshape(-1)
    if u0.size != spec.n:
        raise ValueError(f"u0 has dimension {u0.size}, spectrum expects {spec.n}")
    c = spec.left_eigvecs @ u0.astype(complex)
    cmax = float(np.max(np.abs(c))) if c.size else 0.0
    excite_tol = 1e-12 * (1.0 + float(np.linalg.norm(u0)))
    excited = np.abs(c) > max(excite_tol, 1e-12 * cmax)

    real_parts = np.concatenate([spec.real_eigs, spec.pairs[:, 0] if spec.s else np.empty(0)])
    dominant = None
    best = -np.inf
    for j in range(spec.r + spec.s):
        if excited[j] and real_parts[j] > best:
            best = real_parts[j]
            dominant = j

    c12 = c21 = None
    if dominant is not None and dominant >= spec.r:
        r_vec = spec.right_eigvecs[:, dominant]
        nz = float(np.linalg.norm(r_vec.real))
        ny = float(np.linalg.norm(r_vec.imag))
        if ny > 0.0 and nz > 0.0:
            c12 = nz / ny
            c21 = ny / nz
    return ModalProjection(spec, c, excited, dominant, c12, c21)


def reconstruct(proj: ModalProjection, times) -> np.ndarray:
    """Rebuild u(t) = sum_j c_j exp(lambda_j t) r_j from the projection.

    Conjugate pairs contribute twice the real part of their canonical term,
    so the result is real for real u(0)."""
    spec = proj.spectrum
    t = np.asarray(times, dtype=float).reshape(-1)
    U = np.zeros((t.size, spec.n))
    for j in range(spec.r):
        U += np.outer(
            (proj.coefficients[j] * np.exp(spec.real_eigs[j] * t)).real,
            spec.right_eigvecs[:, j].real,
        )
    for k in range(spec.s):
        j = spec.r + k
        lam = complex(spec.pairs[k, 0], spec.pairs[k, 1])
        term = np.outer(proj.coefficients[j] * np.exp(lam * t), spec.right_eigvecs[:, j])
        U += 2.0 * term.real
    return U


def _pair_grid(c12: float, c21: float, beta: float):
    """Dense-grid extrema of the oscillatory-tail formulas.

    With eta = c1 cos(beta t), sigma = c2 sin(beta t), evaluates
    f = eta sigma/(eta^2+sigma^2) (rho excursion shape, max |f| = 1/2) and
    g = (c12 eta^2 + c21 sigma^2)/(eta^2+sigma^2) (|omega|/beta, ranging over
    [min(c12, c21), max(c12, c21)])."""
    th = np.linspace(0.0, 2.0 * np.pi, 4096, endpoint=False)
    eta2 = (c12 * np.cos(th)) ** 2
    sig2 = np.sin(th) ** 2
    den = eta2 + sig2
    f = c12 * np.cos(th) * np.sin(th) / den
    g = (c12 * eta2 + c21 * sig2) / den
    return float(np.max(np.abs(f))), (beta * float(g.min()), beta * float(g.max()))


def predict_asymptote(spec: Spectrum, proj: ModalProjection) -> AsymptoteForecast:
    """Forecast the tail of rho and |omega| from the dominant excited mode.

    Real dominant eigenvalue mu1: (rho, |omega|) -> (mu1, 0).  Dominant pair
    (alpha, beta): rho oscillates around alpha within +/- rho_envelope and
    |omega| within omega_range; the isotropic case c12 = c21 = 1 collapses
    both to the constants (alpha, beta).  A pair degenerated to beta = 0
    reduces to the real forecast.
    """
    if proj.dominant_index is None:
        raise AmbiguousDominanceError("u(0) excites no mode")
    real_parts = np.concatenate([spec.real_eigs, spec.pairs[:, 0] if spec.s else np.empty(0)])
    excited = sorted(
        (float(real_parts[j]) for j in range(spec.r + spec.s) if proj.excited[j]),
        reverse=True,
    )
    if len(excited) > 1 and excited[0] - excited[1] <= 1e-9:
        raise AmbiguousDominanceError(
            f"dominant-mode gap {excited[0] - excited[1]:.3e} is not strictly positive"
        )
    j = proj.dominant_index
    if j < spec.r:
        return AsymptoteForecast("real", float(spec.real_eigs[j]), 0.0)
    alpha, beta = (float(v) for v in spec.pairs[j - spec.r])
    if beta == 0.0:
        return AsymptoteForecast("real", alpha, 0.0)
    c12 = proj.c12 if proj.c12 is not None else 1.0
    c21 = proj.c21 if proj.c21 is not None else 1.0
    max_f, omega_range = _pair_grid(c12, c21, beta)
    notes = ()
    if abs(c12 - 1.0) > 1e-9:
        notes = (
            "envelope and range assume an orthonormal dominant-pair basis; "
            "generic Jacobians violate this, so treat them as indicative",
        )
    return AsymptoteForecast(
        kind="pair",
        rho_target=alpha,
        omega_target=beta,
        rho_envelope=abs(beta * (c12 - c21)) * max_f,
        omega_range=omega_range,
        c12=c12,
        c21=c21,
        notes=notes,
    )


def _sign_changes(d: np.ndarray) -> int:
    s = np.sign(d)
    s = s[s != 0]
    if s.size < 2:
        return 0
    return int(np.count_nonzero(s[1:] != s[:-1]))


def compare_tail(
    series: AnalysisSeries,
    forecast: AsymptoteForecast,
    window: float = 0.2,
    rho_rtol: float = 0.05,
    omega_rtol: float = 0.05,
    omega_atol: float | None = None,
    min_sign_changes: int = 0,
) -> TailReport:
    """Tail-mean/std of rho and |omega| against a forecast.

    ``window`` is the trailing fraction of the horizon to examine; degenerate
    samples are excluded.  For an oscillatory forecast the means are computed
    between the first and last positive-going crossing of rho through its
    target (whole cycles), while sign changes are counted over the full valid
    tail.  Pass/fail tolerances: relative ``rho_rtol``/``omega_rtol`` against
    the targets, except that a zero omega target uses the absolute
    ``omega_atol`` (default 1e-3).
    """
    if not (0.0 < window <= 1.0):
        raise ValueError("window must be in (0, 1]")
    n = len(series.times)
    start = int(np.floor((1.0 - window) * (n - 1)))
    tail = slice(start, n)
    mask = series.valid[tail]
    if not np.any(mask):
        raise InsufficientTailError("all tail samples are degenerate")
    rho = series.rho[tail][mask]
    omega = series.omega_norm[tail][mask]
    n_tail = int(mask.sum())

    rho_sc = _sign_changes(rho - forecast.rho_target)
    omega_sc = _sign_changes(omega - forecast.omega_target)

    trimmed = False
    sel = slice(None)
    if forecast.kind == "pair":
        d = rho - forecast.rho_target
        pg = np.nonzero((d[:-1] <= 0) & (d[1:] > 0))[0]
        if pg.size >= 2:
            sel = slice(int(pg[0]), int(pg[-1]))
            trimmed = True
    rho_used = rho[sel]
    omega_used = omega[sel]

    rho_mean = float(rho_used.mean())
    omega_mean = float(omega_used.mean())
    rho_err = abs(rho_mean - forecast.rho_target) / max(abs(forecast.rho_target), 1e-12)
    if forecast.omega_target == 0.0:
        atol = 1e-3 if omega_atol is None else omega_atol
        omega_err = omega_mean
        pass_omega = omega_mean <= atol
    else:
        omega_err = abs(omega_mean - forecast.omega_target) / abs(forecast.omega_target)
        pass_omega = omega_err <= omega_rtol
    pass_rho = rho_err <= rho_rtol
    if min_sign_changes > 0:
        pass_rho = pass_rho and rho_sc >= min_sign_changes
        pass_omega = pass_omega and omega_sc >= min_sign_changes

    return TailReport(
        rho_mean=rho_mean,
        rho_std=float(rho_used.std()),
        omega_mean=omega_mean,
        omega_std=float(omega_used.std()),
        rho_target=forecast.rho_target,
        omega_target=forecast.omega_target,
        rho_err=float(rho_err),
        omega_err=float(omega_err),
        rho_sign_changes=rho_sc,
        omega_sign_changes=omega_sc,
        n_tail=n_tail,
        n_used=int(rho_used.size),
        trimmed=trimmed,
        pass_rho=bool(pass_rho),
        pass_omega=bool(pass_omega),
        passed=bool(pass_rho and pass_omega),
        notes=forecast.notes,
    )


def _integrate_between(times: np.ndarray, y: np.ndarray, a: float, b: float) -> float:
    """Trapezoid integral of sampled y(t) over [a, b] with linear
    interpolation at the fractional endpoints."""
    grid = times[(times > a) & (times < b)]
    pts = np.concatenate(([a], grid, [b]))
    vals = np.interp(pts, times, y)
    return float(np.trapezoid(vals, pts))


def detect_limit_cycle(
    series: AnalysisSeries,
    u1: np.ndarray,
    discard: float = 0.5,
    min_periods: int = 3,
) -> LimitCycleReport:
    """Detect a periodic orbit from successive positive-going crossings of the
    Poincare section u1 = mean(u1) after discarding the transient.

    Reports the mean period, the relative spread (max-min)/mean over the
    detected periods, and the integral of rho over one period starting at the
    first crossing (zero for a closed orbit, since |u| returns to itself).
    """
    n = len(series.times)
    keep = slice(int(np.floor(discard * n)), n)
    t = series.times[keep]
    u = np.asarray(u1, dtype=float)[keep]
    section = float(u.mean())
    d = u - section
    pg = np.nonzero((d[:-1] <= 0) & (d[1:] > 0))[0]
    crossings = []
    for i in pg:
        f0, f1 = d[i], d[i + 1]
        crossings.append(t[i] + (t[i + 1] - t[i]) * f0 / (f0 - f1))
    crossings = np.array(crossings)
    if crossings.size < min_periods + 1:
        return LimitCycleReport(
            False, max(0, crossings.size - 1), float("nan"), float("nan"), float("nan"),
            section, crossings,
            message=f"only {crossings.size} section crossings after the transient",
        )
    periods = np.diff(crossings)
    period_mean = float(periods.mean())
    spread = float((periods.max() - periods.min()) / period_mean)
    loop = _integrate_between(
        series.times, np.nan_to_num(series.rho), crossings[0], crossings[0] + period_mean
    )
    return LimitCycleReport(
        True, int(periods.size), period_mean, spread, loop, section, crossings
    )

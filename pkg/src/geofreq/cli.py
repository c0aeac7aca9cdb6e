"""Scenario-driven command line front end.

Subcommands:

* ``run <scenario>...``     integrate, analyze, write ``<name>_timeseries.csv``
                            and ``<name>_summary.txt``
* ``analyze-matrix <file>`` spectrum, W, G, residual and D/Q split of a matrix
* ``list``                  built-in scenario names
* ``validate <file>``       parse a scenario file and report problems

Exit codes: 0 success, 1 error, 2 scenario checks failed, 3 non-diagonalizable
matrix.  Scenario files are flat INI key/value sections (see ``to_text`` /
``from_text``); all numeric output uses shortest round-trip decimal formatting
so repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import configparser
import io
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import analysis as ana
from . import circuits, modal
from .dynsys import DivergedError, NoEquilibriumError, equilibrium_find, integrate

__all__ = ["Scenario", "load_scenario", "run_scenario", "main"]

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CHECKS_FAILED = 2
EXIT_NON_DIAGONALIZABLE = 3

_SYSTEM_KEYS = {
    "rc": ("R", "C", "V_dc"),
    "rlc": ("R", "L", "C", "V_dc"),
    "third-order": ("R1", "L", "C1", "R2", "C2", "V_dc"),
    "tunnel-diode": ("L", "C", "R", "V_dc"),
}


def _fmt(x) -> str:
    """Shortest decimal representation that parses back to the same float."""
    return repr(float(x))


@dataclass(frozen=True)
class Scenario:
    """A fully specified simulation job."""

    name: str
    kind: str
    params: dict
    x0: tuple
    t_end: float
    h: float
    modal: bool = True
    tail_window: float = 0.2
    checks: dict = field(default_factory=dict)
    csv_path: str | None = None
    summary_path: str | None = None

    def to_text(self) -> str:
        cp = configparser.ConfigParser()
        cp.optionxform = str
        cp["scenario"] = {"name": self.name}
        sys_sec = {"kind": self.kind}
        for k in _SYSTEM_KEYS[self.kind]:
            sys_sec[k] = _fmt(self.params[k])
        if self.kind == "tunnel-diode":
            sys_sec["diode_poly"] = ", ".join(_fmt(c) for c in self.params["diode_poly"])
        cp["system"] = sys_sec
        cp["initial"] = {"x": ", ".join(_fmt(v) for v in self.x0)}
        cp["integration"] = {"t_end": _fmt(self.t_end), "h": _fmt(self.h)}
        cp["analysis"] = {
            "modal": "true" if self.modal else "false",
            "tail_window": _fmt(self.tail_window),
        }
        if self.checks:
            cp["checks"] = dict(self.checks)
        out = {}
        if self.csv_path:
            out["csv"] = self.csv_path
        if self.summary_path:
            out["summary"] = self.summary_path
        if out:
            cp["output"] = out
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @staticmethod
    def from_text(text: str, fallback_name: str = "scenario") -> "Scenario":
        cp = configparser.ConfigParser()
        cp.optionxform = str
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ValueError(f"config parse error: {exc}") from None

        def need(section, key):
            if not cp.has_section(section):
                raise ValueError(f"missing [{section}] section")
            if key not in cp[section]:
                raise ValueError(f"missing key '{key}' in [{section}]")
            return cp[section][key]

        def fnum(section, key, raw=None):
            raw = need(section, key) if raw is None else raw
            try:
                return float(raw)
            except ValueError:
                raise ValueError(f"[{section}] {key}: not a number: {raw!r}") from None

        name = cp.get("scenario", "name", fallback=fallback_name)
        kind = need("system", "kind")
        if kind not in _SYSTEM_KEYS:
            raise ValueError(f"[system] kind: unknown system {kind!r}")
        params = {k: fnum("system", k) for k in _SYSTEM_KEYS[kind]}
        if kind == "tunnel-diode":
            raw = cp.get("system", "diode_poly", fallback=None)
            if raw is None:
                params["diode_poly"] = circuits.DEFAULT_DIODE_POLY
            else:
                try:
                    params["diode_poly"] = tuple(float(v) for v in raw.split(","))
                except ValueError:
                    raise ValueError(f"[system] diode_poly: bad coefficient list: {raw!r}") from None
        try:
            x0 = tuple(float(v) for v in need("initial", "x").split(","))
        except ValueError:
            raise ValueError("[initial] x: bad number list") from None
        t_end = fnum("integration", "t_end")
        h = fnum("integration", "h")
        modal_on = cp.getboolean("analysis", "modal", fallback=True)
        tail_window = fnum("analysis", "tail_window", cp.get("analysis", "tail_window", fallback="0.2"))
        checks = dict(cp["checks"]) if cp.has_section("checks") else {}
        csv_path = cp.get("output", "csv", fallback=None)
        summary_path = cp.get("output", "summary", fallback=None)
        return Scenario(
            name=name, kind=kind, params=params, x0=x0, t_end=t_end, h=h,
            modal=modal_on, tail_window=tail_window, checks=checks,
            csv_path=csv_path, summary_path=summary_path,
        )


def builtin_scenario(name: str) -> Scenario:
    sections = circuits.BUILTIN_SCENARIOS[name]
    cp = configparser.ConfigParser()
    cp.optionxform = str
    cp.read_dict(sections)
    buf = io.StringIO()
    cp.write(buf)
    return Scenario.from_text(buf.getvalue(), fallback_name=name)


def load_scenario(name_or_path: str) -> Scenario:
    """A built-in scenario name, or a path to a scenario file."""
    if name_or_path in circuits.BUILTIN_SCENARIOS:
        return builtin_scenario(name_or_path)
    if not os.path.exists(name_or_path):
        raise ValueError(
            f"{name_or_path!r} is neither a built-in scenario nor a file "
            f"(built-ins: {', '.join(sorted(circuits.BUILTIN_SCENARIOS))})"
        )
    with open(name_or_path, encoding="utf-8") as fh:
        return Scenario.from_text(fh.read(), fallback_name=os.path.basename(name_or_path))


def build_model(scenario: Scenario):
    p = scenario.params
    if scenario.kind == "rc":
        return circuits.build_rc(circuits.RcParams(p["R"], p["C"], p["V_dc"]))
    if scenario.kind == "rlc":
        return circuits.build_rlc(circuits.RlcParams(p["R"], p["L"], p["C"], p["V_dc"]))
    if scenario.kind == "third-order":
        return circuits.build_third_order(
            circuits.ThirdOrderParams(p["R1"], p["L"], p["C1"], p["R2"], p["C2"], p["V_dc"])
        )
    if scenario.kind == "tunnel-diode":
        return circuits.build_tunnel_diode(
            circuits.TunnelDiodeParams(p["L"], p["C"], p["R"], p["V_dc"], p["diode_poly"])
        )
    raise ValueError(f"unknown system kind {scenario.kind!r}")


# ---------------------------------------------------------------------------
# output writers
# ---------------------------------------------------------------------------

def _csv_header(dim: int, blocks) -> list[str]:
    cols = ["t"]
    cols += [f"x{i+1}" for i in range(dim)]
    cols += [f"u{i+1}" for i in range(dim)]
    cols.append("rho")
    if dim > 1:
        cols.append("omega_norm")
    cols.append("valid")
    for j in range(dim):
        cols += [f"eig{j+1}_re", f"eig{j+1}_im"]
    for k, bs in enumerate(blocks, start=1):
        cols.append(f"blk{k}_rho")
        if bs.block.kind == "pair":
            cols.append(f"blk{k}_omega")
    return cols


def write_csv(path: str, traj, series: ana.AnalysisSeries) -> None:
    dim = traj.dim
    cols = _csv_header(dim, series.blocks)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(cols) + "\n")
        for k in range(len(traj)):
            row = [_fmt(traj.times[k])]
            row += [_fmt(v) for v in traj.states[k]]
            row += [_fmt(v) for v in traj.velocities[k]]
            row.append(_fmt(series.rho[k]))
            if dim > 1:
                row.append(_fmt(series.omega_norm[k]))
            row.append("1" if series.valid[k] else "0")
            for j in range(dim):
                row.append(_fmt(series.eig_re[k, j]))
                row.append(_fmt(series.eig_im[k, j]))
            for bs in series.blocks:
                row.append(_fmt(bs.rho[k]))
                if bs.block.kind == "pair":
                    row.append(_fmt(bs.omega[k]))
            fh.write(",".join(row) + "\n")


def _matrix_lines(name: str, M: np.ndarray) -> list[str]:
    lines = [f"{name}:"]
    for row in np.atleast_2d(M):
        lines.append("  " + "  ".join(_fmt(v) for v in row))
    return lines


def _spectrum_lines(spec: modal.Spectrum) -> list[str]:
    lines = [f"spectrum: n={spec.n} r={spec.r} s={spec.s}"]
    for mu in spec.real_eigs:
        lines.append(f"  real      mu = {_fmt(mu)}")
    for alpha, beta in spec.pairs:
        lines.append(f"  pair      alpha = {_fmt(alpha)}  beta = {_fmt(beta)}")
    return lines


def _modal_report(A: np.ndarray) -> tuple[list[str], modal.RealModalForm]:
    form = modal.real_modal_form(A)
    spec = modal.classify_spectrum(A)
    lines = _spectrum_lines(spec)
    lines += _matrix_lines("W", form.W)
    lines += _matrix_lines("G", form.G)
    lines.append(f"residual ||WA - GW||_F / ||A||_F = {_fmt(form.residual)}")
    lines.append(f"cond(W) = {_fmt(form.cond_w)}")
    for w in form.warnings:
        lines.append(f"warning: {w}")
    for k, b in enumerate(form.blocks, start=1):
        if b.kind == "real":
            lines.append(f"block {k}: real  mu = {_fmt(b.mu)}")
        else:
            D, Q = modal.dq_split(b.matrix())
            lines.append(
                f"block {k}: pair  alpha = {_fmt(b.alpha)}  beta = {_fmt(b.beta)}"
            )
            lines += _matrix_lines(f"  D{k}", D)
            lines += _matrix_lines(f"  Q{k}", Q)
    return lines, form


# ---------------------------------------------------------------------------
# scenario checks
# ---------------------------------------------------------------------------

def _equilibrium_spectrum(model, traj):
    x_star = equilibrium_find(model, traj.states[-1])
    spec = modal.classify_spectrum(model.jac(x_star))
    return x_star, spec


def _run_checks(scenario: Scenario, model, traj, series) -> tuple[list[str], bool]:
    checks = scenario.checks
    kind = checks.get("kind", "none")
    lines = [f"checks: kind = {kind}"]
    if kind in ("none", ""):
        return lines, True
    ok = True

    def record(label: str, passed: bool, detail: str):
        nonlocal ok
        ok = ok and passed
        lines.append(f"  [{'PASS' if passed else 'FAIL'}] {label}: {detail}")

    if kind == "constant-rho":
        target = float(checks["rho_value"])
        tol = float(checks.get("tol", "1e-9"))
        dev = float(np.nanmax(np.abs(series.rho[series.valid] - target)))
        record("rho constant", dev <= tol, f"max |rho - ({_fmt(target)})| = {_fmt(dev)}")
    elif kind in ("real-tail", "pair-tail"):
        x_star, spec = _equilibrium_spectrum(model, traj)
        proj = ana.modal_projection(spec, traj.velocities[0])
        forecast = ana.predict_asymptote(spec, proj)
        report = ana.compare_tail(
            series,
            forecast,
            window=scenario.tail_window,
            rho_rtol=float(checks.get("rho_rtol", "0.05")),
            omega_rtol=float(checks.get("omega_rtol", "0.05")),
            omega_atol=float(checks["omega_atol"]) if "omega_atol" in checks else None,
            min_sign_changes=int(checks.get("min_sign_changes", "0")),
        )
        lines.append(f"  equilibrium x* = ({', '.join(_fmt(v) for v in x_star)})")
        lines.append(f"  forecast {forecast.kind}: rho -> {_fmt(forecast.rho_target)}"
                     f"  |omega| -> {_fmt(forecast.omega_target)}")
        record(
            "tail rho",
            report.pass_rho,
            f"mean = {_fmt(report.rho_mean)} err = {_fmt(report.rho_err)}"
            f" sign_changes = {report.rho_sign_changes}",
        )
        record(
            "tail |omega|",
            report.pass_omega,
            f"mean = {_fmt(report.omega_mean)} err = {_fmt(report.omega_err)}"
            f" sign_changes = {report.omega_sign_changes}",
        )
        for note in report.notes:
            lines.append(f"  note: {note}")
    elif kind == "limit-cycle":
        report = ana.detect_limit_cycle(
            series, traj.velocities[:, 0], min_periods=int(checks.get("min_periods", "3"))
        )
        if not report.detected:
            record("limit cycle", False, report.message)
        else:
            spread_ok = report.period_spread <= float(checks.get("max_period_spread", "0.01"))
            loop_ok = abs(report.loop_integral_rho) <= float(checks.get("max_loop_integral", "1e-2"))
            record(
                "period",
                spread_ok,
                f"T = {_fmt(report.period_mean)} over {report.n_periods} periods,"
                f" spread = {_fmt(report.period_spread)}",
            )
            record(
                "loop integral of rho",
                loop_ok,
                f"integral = {_fmt(report.loop_integral_rho)}",
            )
    elif kind == "block-identity":
        tol = float(checks.get("tol", "1e-8"))
        if not series.blocks:
            record("block identity", False, "modal transform disabled or unavailable")
        for k, bs in enumerate(series.blocks, start=1):
            b = bs.block
            dev = float(np.nanmax(np.abs(bs.rho[bs.valid] - b.alpha)))
            if b.kind == "pair":
                dev = max(dev, float(np.nanmax(np.abs(bs.omega[bs.valid] - b.beta))))
            record(
                f"block {k} ({b.kind})",
                dev <= tol,
                f"max deviation from eigenvalue = {_fmt(dev)}",
            )
        if "min_untransformed_rho_std" in checks:
            std = float(np.nanstd(series.rho[series.valid]))
            record(
                "untransformed rho is not constant",
                std > float(checks["min_untransformed_rho_std"]),
                f"std = {_fmt(std)}",
            )
    else:
        record("checks", False, f"unknown check kind {kind!r}")
    return lines, ok


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def run_scenario(scenario: Scenario, out_dir: str) -> int:
    os.makedirs(out_dir, exist_ok=True)
    model = build_model(scenario)
    try:
        traj = integrate(model, scenario.x0, scenario.t_end, scenario.h)
    except DivergedError as exc:
        print(f"{scenario.name}: {exc}", file=sys.stderr)
        return EXIT_ERROR

    summary = [f"scenario: {scenario.name}", f"system: {scenario.kind}"]
    for key in _SYSTEM_KEYS[scenario.kind]:
        summary.append(f"  {key} = {_fmt(scenario.params[key])}")
    if scenario.kind == "tunnel-diode":
        summary.append(
            "  diode_poly = " + ", ".join(_fmt(c) for c in scenario.params["diode_poly"])
        )
    summary.append(f"initial x = ({', '.join(_fmt(v) for v in scenario.x0)})")
    summary.append(f"t_end = {_fmt(scenario.t_end)}  h = {_fmt(scenario.h)}  samples = {len(traj)}")

    modal_form = None
    if scenario.modal and model.is_affine:
        lines, modal_form = _modal_report(model.A)
        summary += _matrix_lines("A", model.A)
        summary += lines
    elif scenario.modal and not model.is_affine:
        summary.append("modal transform: skipped (nonlinear system; W would be time-varying)")

    series = ana.analyze_trajectory(traj, model, modal_form)

    if not model.is_affine:
        try:
            x_star, spec = _equilibrium_spectrum(model, traj)
            summary.append(f"equilibrium x* = ({', '.join(_fmt(v) for v in x_star)})")
            summary += ["at equilibrium " + s for s in _spectrum_lines(spec)]
        except (NoEquilibriumError, modal.NonDiagonalizableError) as exc:
            summary.append(f"equilibrium: not found ({exc})")

    check_lines, checks_ok = _run_checks(scenario, model, traj, series)
    summary += check_lines

    csv_path = scenario.csv_path or os.path.join(out_dir, f"{scenario.name}_timeseries.csv")
    summary_path = scenario.summary_path or os.path.join(out_dir, f"{scenario.name}_summary.txt")
    write_csv(csv_path, traj, series)
    exit_code = EXIT_OK if checks_ok else EXIT_CHECKS_FAILED
    summary.append(f"csv: {os.path.basename(csv_path)}")
    summary.append(f"exit: {exit_code}")
    with open(summary_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(summary) + "\n")
    print(f"{scenario.name}: wrote {csv_path} and {summary_path} (exit {exit_code})")
    return exit_code


def read_matrix_file(path: str) -> np.ndarray:
    """Matrix text format: first line n, then n whitespace-separated rows."""
    with open(path, encoding="utf-8") as fh:
        tokens = fh.read().split()
    if not tokens:
        raise ValueError(f"{path}: empty matrix file")
    try:
        n = int(tokens[0])
        vals = [float(v) for v in tokens[1 : 1 + n * n]]
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
    if n < 1 or len(vals) != n * n:
        raise ValueError(f"{path}: expected {n}x{n} entries after the dimension line")
    return np.array(vals).reshape(n, n)


def cmd_analyze_matrix(path: str) -> int:
    try:
        A = read_matrix_file(path)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        lines, _ = _modal_report(A)
    except modal.NonDiagonalizableError as exc:
        print(f"non-diagonalizable: {exc}", file=sys.stderr)
        return EXIT_NON_DIAGONALIZABLE
    print("\n".join(_matrix_lines("A", A) + lines))
    return EXIT_OK


def cmd_list() -> int:
    for name in sorted(circuits.BUILTIN_SCENARIOS):
        sc = builtin_scenario(name)
        print(f"{name:22s} {sc.kind:13s} t_end={sc.t_end:g} h={sc.h:g} x0=({', '.join(map(str, sc.x0))})")
    return EXIT_OK


def cmd_validate(path: str) -> int:
    try:
        with open(path, encoding="utf-8") as fh:
            scenario = Scenario.from_text(fh.read(), fallback_name=os.path.basename(path))
        build_model(scenario)
    except (OSError, ValueError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(f"ok: {scenario.name} ({scenario.kind}, dim {len(scenario.x0)})")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="geofreq",
        description="Geometric/complex frequency analysis of circuit trajectories",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one or more scenarios")
    p_run.add_argument("scenarios", nargs="+", help="built-in name or scenario file path")
    p_run.add_argument("--out-dir", default=None, help="output directory (default: $GEOFREQ_OUT or .)")
    p_run.add_argument("--step", type=float, default=None, help="override integration step h")
    p_run.add_argument("--t-end", type=float, default=None, help="override horizon t_end")
    p_run.add_argument("--jobs", type=int, default=1, help="run scenarios concurrently")
    p_run.add_argument("--no-modal", action="store_true", help="disable the modal transform")

    p_mat = sub.add_parser("analyze-matrix", help="modal analysis of a matrix file")
    p_mat.add_argument("matrix_file")

    sub.add_parser("list", help="list built-in scenarios")

    p_val = sub.add_parser("validate", help="validate a scenario file")
    p_val.add_argument("scenario_file")

    args = parser.parse_args(argv)

    if args.command == "list":
        return cmd_list()
    if args.command == "analyze-matrix":
        return cmd_analyze_matrix(args.matrix_file)
    if args.command == "validate":
        return cmd_validate(args.scenario_file)

    out_dir = args.out_dir or os.environ.get("GEOFREQ_OUT") or "."
    try:
        scenarios = [load_scenario(s) for s in args.scenarios]
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    updated = []
    for sc in scenarios:
        if args.step is not None:
            sc = replace(sc, h=args.step)
        if args.t_end is not None:
            sc = replace(sc, t_end=args.t_end)
        if args.no_modal:
            sc = replace(sc, modal=False)
        updated.append(sc)

    def one(sc):
        try:
            return run_scenario(sc, out_dir)
        except modal.NonDiagonalizableError as exc:
            print(f"{sc.name}: non-diagonalizable: {exc}", file=sys.stderr)
            return EXIT_NON_DIAGONALIZABLE
        except (ValueError, NoEquilibriumError, ana.InsufficientTailError,
                ana.AmbiguousDominanceError) as exc:
            print(f"{sc.name}: error: {exc}", file=sys.stderr)
            return EXIT_ERROR

    if args.jobs > 1 and len(updated) > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            codes = list(pool.map(one, updated))
    else:
        codes = [one(sc) for sc in updated]
    return max(codes)


if __name__ == "__main__":
    sys.exit(main())

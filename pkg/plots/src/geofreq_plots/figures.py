"""Render publication-style figures from geofreq time-series CSVs.

Three figure kinds:

* ``phase-u``      velocity phase portrait (u1 vs u2; u1 vs t in 1-D)
* ``rho-vs-eig``   rho(t) overlaid with every Jacobian eigenvalue real part
* ``omega-vs-eig`` |omega|(t) overlaid with |Im| of every eigenvalue

Samples flagged invalid in the CSV (``valid`` column 0) are masked with NaN
before plotting, so no line segment is ever drawn through a degenerate
stretch.  Output is a vector SVG; rendering is deterministic for a given CSV
and spec (fixed figure size, no embedded dates, fixed hash salt).
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

KINDS = ("phase-u", "rho-vs-eig", "omega-vs-eig")

_DEFAULT_LABELS = {
    "phase-u": ("u1", "u2"),
    "rho-vs-eig": ("time [s]", "rho, Re(eig) [1/s]"),
    "omega-vs-eig": ("time [s]", "|omega|, |Im(eig)| [rad/s]"),
}


class SchemaError(ValueError):
    """CSV does not conform to the geofreq time-series schema."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure: source CSV, kind, axis labels, output path."""

    csv: str
    kind: str
    out: str
    xlabel: str | None = None
    ylabel: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")


@dataclass(frozen=True)
class TimeSeries:
    """Parsed CSV: column name -> float array, plus layout facts."""

    columns: dict
    dim: int
    eig_count: int

    @property
    def t(self) -> np.ndarray:
        return self.columns["t"]

    @property
    def valid(self) -> np.ndarray:
        return self.columns["valid"] != 0.0


def load_timeseries(path: str) -> TimeSeries:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header:
            raise SchemaError(f"{path}: empty file")
        names = header.split(",")
        try:
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise SchemaError(f"{path}: {exc}") from None
    if data.shape[1] != len(names):
        raise SchemaError(f"{path}: {data.shape[1]} columns of data, {len(names)} in header")
    cols = {name: data[:, i] for i, name in enumerate(names)}
    missing = [c for c in ("t", "valid", "rho", "u1") if c not in cols]
    if missing:
        raise SchemaError(f"{path}: missing required columns: {', '.join(missing)}")
    dim = sum(1 for n in names if n.startswith("u") and n[1:].isdigit())
    eig_count = sum(1 for n in names if n.startswith("eig") and n.endswith("_re"))
    return TimeSeries(cols, dim, eig_count)


def _masked(ts: TimeSeries, name: str) -> np.ndarray:
    """Column with invalid samples replaced by NaN (line breaks, no bridging)."""
    y = ts.columns[name].copy()
    y[~ts.valid] = np.nan
    return y


def build_figure(spec: FigureSpec, ts: TimeSeries):
    """Assemble the matplotlib figure for a spec.  Kept separate from
    render() so tests can inspect the drawn artists."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0), dpi=100)
    xlabel, ylabel = _DEFAULT_LABELS[spec.kind]

    if spec.kind == "phase-u":
        if ts.dim >= 2:
            line, = ax.plot(_masked(ts, "u1"), _masked(ts, "u2"), lw=0.9)
            line.set_gid("phase")
        else:
            xlabel, ylabel = "time [s]", "u1"
            line, = ax.plot(ts.t, _masked(ts, "u1"), lw=0.9)
            line.set_gid("phase")
    elif spec.kind == "rho-vs-eig":
        line, = ax.plot(ts.t, _masked(ts, "rho"), lw=1.2, label="rho")
        line.set_gid("rho")
        for j in range(1, ts.eig_count + 1):
            ln, = ax.plot(ts.t, ts.columns[f"eig{j}_re"], lw=0.8, ls="--",
                          label=f"Re eig{j}")
            ln.set_gid(f"eig{j}_re")
        ax.legend(loc="best", fontsize=8)
    else:  # omega-vs-eig
        if "omega_norm" in ts.columns:
            line, = ax.plot(ts.t, _masked(ts, "omega_norm"), lw=1.2, label="|omega|")
            line.set_gid("omega")
        for j in range(1, ts.eig_count + 1):
            ln, = ax.plot(ts.t, np.abs(ts.columns[f"eig{j}_im"]), lw=0.8, ls="--",
                          label=f"|Im eig{j}|")
            ln.set_gid(f"eig{j}_im")
        ax.legend(loc="best", fontsize=8)

    ax.set_xlabel(spec.xlabel or xlabel)
    ax.set_ylabel(spec.ylabel or ylabel)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig


def render(spec: FigureSpec) -> str:
    """Render the figure to a vector SVG file; returns the output path."""
    ts = load_timeseries(spec.csv)
    with plt.rc_context({"svg.hashsalt": "geofreq-plots"}):
        fig = build_figure(spec, ts)
        fig.savefig(spec.out, format="svg", metadata={"Date": None})
        plt.close(fig)
    return spec.out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plots", description="Render figures from geofreq time-series CSVs"
    )
    parser.add_argument("csv", help="time-series CSV written by `geofreq run`")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--out", default=None, help="output SVG path")
    args = parser.parse_args(argv)
    out = args.out or f"{os.path.splitext(args.csv)[0]}_{args.kind}.svg"
    try:
        path = render(FigureSpec(csv=args.csv, kind=args.kind, out=out))
    except (OSError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

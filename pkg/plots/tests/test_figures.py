import re
import subprocess
import sys

import numpy as np
import pytest

from geofreq_plots import FigureSpec, KINDS, SchemaError, build_figure, load_timeseries, render
from geofreq_plots.figures import main


@pytest.fixture(scope="session")
def csv_dir(tmp_path_factory):
    """Time-series produced by the geofreq CLI, the upstream interface."""
    out = tmp_path_factory.mktemp("csv")
    proc = subprocess.run(
        [sys.executable, "-m", "geofreq.cli", "run", "rc", "td-limit-cycle",
         "--out-dir", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return out


@pytest.fixture()
def masked_csv(tmp_path):
    """Handcrafted 1-D series with a degenerate stretch in the middle."""
    t = np.arange(0.0, 1.0, 0.01)
    valid = np.ones(len(t), dtype=int)
    valid[40:60] = 0
    lines = ["t,x1,u1,rho,valid,eig1_re,eig1_im"]
    for k in range(len(t)):
        rho = repr(float(-1.0 + 0.1 * np.sin(10.0 * t[k]))) if valid[k] else "nan"
        lines.append(
            f"{float(t[k])!r},0.0,{float(np.cos(t[k]))!r},{rho},{valid[k]},-1.0,0.0"
        )
    p = tmp_path / "masked_timeseries.csv"
    p.write_text("\n".join(lines) + "\n")
    return p


def _svg_path_d(svg_text, gid):
    group = re.search(rf'<g id="{gid}">(.*?)</g>', svg_text, re.S)
    assert group, f"no <g id={gid!r}> in SVG"
    return re.search(r'd="([^"]+)"', group.group(1)).group(1)


class TestLoad:
    def test_loads_cli_output(self, csv_dir):
        ts = load_timeseries(str(csv_dir / "td-limit-cycle_timeseries.csv"))
        assert ts.dim == 2
        assert ts.eig_count == 2
        assert "omega_norm" in ts.columns
        assert len(ts.t) > 1000

    def test_rc_has_no_omega_column(self, csv_dir):
        ts = load_timeseries(str(csv_dir / "rc_timeseries.csv"))
        assert ts.dim == 1
        assert "omega_norm" not in ts.columns

    def test_missing_columns_listed(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("t,x1\n0.0,1.0\n")
        with pytest.raises(SchemaError, match="missing required columns: valid, rho, u1"):
            load_timeseries(str(p))

    def test_ragged_rows_rejected(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("t,x1,u1,rho,valid,eig1_re,eig1_im\n0.0,1.0\n")
        with pytest.raises(SchemaError):
            load_timeseries(str(p))


class TestRender:
    @pytest.mark.parametrize("kind", KINDS)
    @pytest.mark.parametrize("name", ["rc", "td-limit-cycle"])
    def test_all_kinds_render(self, csv_dir, tmp_path, kind, name):
        out = tmp_path / f"{name}_{kind}.svg"
        got = render(FigureSpec(csv=str(csv_dir / f"{name}_timeseries.csv"),
                                kind=kind, out=str(out)))
        text = out.read_text()
        assert got == str(out)
        assert text.startswith("<?xml") and "</svg>" in text

    def test_masked_samples_break_the_line(self, masked_csv, tmp_path):
        out = tmp_path / "masked.svg"
        render(FigureSpec(csv=str(masked_csv), kind="rho-vs-eig", out=str(out)))
        d = _svg_path_d(out.read_text(), "rho")
        # the degenerate stretch must interrupt the polyline: more than one
        # moveto command, i.e. no segment bridges the masked span
        assert d.count("M") >= 2

    def test_unmasked_line_is_single_subpath(self, masked_csv, tmp_path):
        text = masked_csv.read_text().replace(",0,", ",1,").replace(",nan,", ",-1.0,")
        p = tmp_path / "allvalid.csv"
        p.write_text(text)
        out = tmp_path / "allvalid.svg"
        render(FigureSpec(csv=str(p), kind="rho-vs-eig", out=str(out)))
        assert _svg_path_d(out.read_text(), "rho").count("M") == 1

    def test_plotted_arrays_are_nan_on_masked_samples(self, masked_csv):
        ts = load_timeseries(str(masked_csv))
        fig = build_figure(FigureSpec(csv=str(masked_csv), kind="rho-vs-eig", out="x.svg"), ts)
        (rho_line,) = [l for l in fig.axes[0].get_lines() if l.get_gid() == "rho"]
        y = rho_line.get_ydata()
        assert np.isnan(y[40:60]).all()
        assert np.isfinite(y[:40]).all() and np.isfinite(y[60:]).all()

    def test_phase_u_in_1d_plots_against_time(self, csv_dir, tmp_path):
        out = tmp_path / "rc_phase.svg"
        render(FigureSpec(csv=str(csv_dir / "rc_timeseries.csv"), kind="phase-u", out=str(out)))
        assert out.exists()

    def test_deterministic_output(self, csv_dir, tmp_path):
        spec_a = FigureSpec(csv=str(csv_dir / "rc_timeseries.csv"), kind="rho-vs-eig",
                            out=str(tmp_path / "a.svg"))
        spec_b = FigureSpec(csv=str(csv_dir / "rc_timeseries.csv"), kind="rho-vs-eig",
                            out=str(tmp_path / "b.svg"))
        render(spec_a)
        render(spec_b)
        assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="kind must be one of"):
            FigureSpec(csv="x.csv", kind="pie", out="y.svg")


class TestMain:
    def test_cli_renders_with_default_out(self, csv_dir, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        csv = str(csv_dir / "rc_timeseries.csv")
        assert main([csv, "--kind", "rho-vs-eig", "--out", "rc.svg"]) == 0
        assert (tmp_path / "rc.svg").exists()

    def test_cli_default_out_name(self, csv_dir):
        csv = csv_dir / "rc_timeseries.csv"
        assert main([str(csv), "--kind", "phase-u"]) == 0
        assert (csv_dir / "rc_timeseries_phase-u.svg").exists()

    def test_cli_missing_file_exits_1(self, capsys):
        assert main(["nope.csv", "--kind", "phase-u", "--out", "x.svg"]) == 1
        assert "error" in capsys.readouterr().err

    def test_cli_bad_kind_rejected(self):
        with pytest.raises(SystemExit):
            main(["x.csv", "--kind", "scatter"])

import shutil
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from plotkit import PlotJob, SchemaError, build_figure, render

DATA = Path(__file__).parent / "data"


def fig_lines(fig):
    return fig.axes[0].lines


def solid_dotted_counts(fig):
    solid = sum(1 for ln in fig_lines(fig) if ln.get_linestyle() == "-")
    dotted = sum(1 for ln in fig_lines(fig) if ln.get_linestyle() == ":")
    return solid, dotted


class TestDfrCurves:
    def test_two_files_one_pair_per_v(self, tmp_path):
        job = PlotJob(
            inputs=(str(DATA / "dfr_v5.csv"), str(DATA / "dfr_v9.csv")),
            kind="dfr_curves",
            output=str(tmp_path / "dfr.png"),
        )
        fig = build_figure(job)
        solid, dotted = solid_dotted_counts(fig)
        assert solid == 2  # one standard curve per v
        assert dotted == 2  # one table-aware curve per v
        assert fig.axes[0].get_yscale() == "log"

    def test_render_writes_file(self, tmp_path):
        out = tmp_path / "dfr.png"
        job = PlotJob(inputs=(str(DATA / "dfr_v9.csv"),), kind="dfr_curves",
                      output=str(out), title="toy sweep")
        assert render(job) == str(out)
        assert out.stat().st_size > 0

    def test_ci_whiskers_optional(self, tmp_path):
        job = PlotJob(inputs=(str(DATA / "dfr_v9.csv"),), kind="dfr_curves",
                      output=str(tmp_path / "x.png"), ci_whiskers=True)
        fig = build_figure(job)
        assert len(fig.axes[0].containers) > 0

    def test_deterministic_canvas(self, tmp_path):
        job = PlotJob(inputs=(str(DATA / "dfr_v9.csv"),), kind="dfr_curves",
                      output=str(tmp_path / "x.png"))
        bufs = []
        for _ in range(2):
            fig = build_figure(job)
            fig.canvas.draw()
            bufs.append(np.asarray(fig.canvas.buffer_rgba()).copy())
        assert np.array_equal(bufs[0], bufs[1])


class TestUCurves:
    def test_failure_probability_axes(self, tmp_path):
        job = PlotJob(inputs=(str(DATA / "u_sweep.csv"),), kind="u_curves",
                      output=str(tmp_path / "u.png"))
        fig = build_figure(job)
        assert "u" in fig.axes[0].get_xlabel()
        solid, dotted = solid_dotted_counts(fig)
        assert solid == 1 and dotted == 1

    def test_wrong_sweep_kind_rejected(self, tmp_path):
        job = PlotJob(inputs=(str(DATA / "dfr_v9.csv"),), kind="u_curves",
                      output=str(tmp_path / "u.png"))
        with pytest.raises(SchemaError, match="'u' is empty"):
            build_figure(job)


class TestCounterHist:
    def test_reference_lines(self, tmp_path):
        job = PlotJob(inputs=(str(DATA / "hist_u3.csv"),), kind="counter_hist",
                      output=str(tmp_path / "h.png"), u=3, v=9)
        fig = build_figure(job)
        guides = sorted(
            ln.get_xdata()[0] for ln in fig_lines(fig) if ln.get_linestyle() == "-."
        )
        assert guides == [3, 7]  # u and v - u + 1

    def test_reference_lines_from_sidecar(self, tmp_path):
        # the harness config sidecar supplies u and v when flags are absent
        shutil.copy(DATA / "hist_u3.csv", tmp_path / "hist.csv")
        shutil.copy(DATA / "hist_u3.csv.json", tmp_path / "hist.csv.json")
        job = PlotJob(inputs=(str(tmp_path / "hist.csv"),), kind="counter_hist",
                      output=str(tmp_path / "h.png"))
        fig = build_figure(job)
        guides = sorted(
            ln.get_xdata()[0] for ln in fig_lines(fig) if ln.get_linestyle() == "-."
        )
        assert guides == [3, 7]

    def test_two_bar_groups(self, tmp_path):
        job = PlotJob(inputs=(str(DATA / "hist_u3.csv"),), kind="counter_hist",
                      output=str(tmp_path / "h.png"), u=3, v=9)
        fig = build_figure(job)
        assert len(fig.axes[0].containers) == 2


class TestValidation:
    def test_schema_mismatch_names_columns(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("experiment,decoder,trials\na,b,1\n")
        job = PlotJob(inputs=(str(bad),), kind="dfr_curves",
                      output=str(tmp_path / "x.png"))
        with pytest.raises(SchemaError, match="nc_aware"):
            build_figure(job)

    def test_empty_csv_no_image(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("experiment,decoder,nc_aware,r,v,t,u,trials,failures,"
                         "dfr,ci_low,ci_high,nc_hits,mean_iters,seed\n")
        out = tmp_path / "never.png"
        job = PlotJob(inputs=(str(empty),), kind="dfr_curves", output=str(out))
        with pytest.raises(SchemaError, match="no data rows"):
            render(job)
        assert not out.exists()

    def test_unknown_kind(self, tmp_path):
        with pytest.raises(ValueError):
            PlotJob(inputs=("x.csv",), kind="scatter", output="y.png")


class TestCli:
    def test_render_via_cli(self, tmp_path):
        out = tmp_path / "cli.png"
        res = subprocess.run(
            [sys.executable, "-m", "plotkit.cli", "render", "--kind", "dfr_curves",
             "--in", str(DATA / "dfr_v5.csv"), "--in", str(DATA / "dfr_v9.csv"),
             "--out", str(out), "--title", "toy"],
            capture_output=True, text=True,
        )
        assert res.returncode == 0, res.stderr
        assert out.exists()

    def test_cli_schema_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        res = subprocess.run(
            [sys.executable, "-m", "plotkit.cli", "render", "--kind", "u_curves",
             "--in", str(bad), "--out", str(tmp_path / "x.png")],
            capture_output=True, text=True,
        )
        assert res.returncode == 2
        assert "error" in res.stderr


def test_criterion_11_figure_styles(tmp_path):
    ok = True
    detail = []
    jobs = {
        "dfr.png": PlotJob(
            inputs=(str(DATA / "dfr_v5.csv"), str(DATA / "dfr_v9.csv")),
            kind="dfr_curves", output=str(tmp_path / "dfr.png"),
        ),
        "ucurves.png": PlotJob(
            inputs=(str(DATA / "u_sweep.csv"),), kind="u_curves",
            output=str(tmp_path / "ucurves.png"),
        ),
        "hist.png": PlotJob(
            inputs=(str(DATA / "hist_u3.csv"),), kind="counter_hist",
            output=str(tmp_path / "hist.png"), u=3, v=9,
        ),
    }
    try:
        fig = build_figure(jobs["dfr.png"])
        solid, dotted = solid_dotted_counts(fig)
        ok &= solid == 2 and dotted == 2
        detail.append(f"dfr_curves {solid} solid / {dotted} dotted")

        fig = build_figure(jobs["ucurves.png"])
        solid, dotted = solid_dotted_counts(fig)
        ok &= solid == 1 and dotted == 1 and fig.axes[0].get_yscale() == "log"
        detail.append(f"u_curves {solid} solid / {dotted} dotted, log-y")

        fig = build_figure(jobs["hist.png"])
        guides = sorted(
            ln.get_xdata()[0] for ln in fig_lines(fig) if ln.get_linestyle() == "-."
        )
        ok &= guides == [3, 7]
        detail.append(f"counter_hist guides at {guides}")

        for name, job in jobs.items():
            render(job)
            ok &= (tmp_path / name).stat().st_size > 0
        detail.append("all three images rendered")
    except Exception as exc:  # any render error fails the criterion
        ok = False
        detail.append(f"exception: {exc}")
    line = f"[criterion 11] {'PASS' if ok else 'FAIL'}: {'; '.join(detail)}"
    print(line, flush=True)
    assert ok, line

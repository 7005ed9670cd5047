"""Render decoder-experiment CSVs into the standard figure styles.

Three figure kinds cover the harness outputs:

- ``dfr_curves``: failure rate versus error weight t on a log y-axis, one
  curve per (decoder, v) group, solid for standard decoders and dotted for
  their table-aware counterparts.
- ``u_curves``: failure probability versus the near-codeword overlap u,
  same solid/dotted pairing.
- ``counter_hist``: side-by-side bars of the bad-bit and suspicious-bit
  counter distributions, with optional vertical guides at u and v - u + 1.

This module renders the numbers exactly as found in the CSV; it never
recomputes or smooths statistics. Inputs must carry the exact harness
headers, and an input with no data rows is an error rather than an empty
image.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

SWEEP_HEADER = [
    "experiment", "decoder", "nc_aware", "r", "v", "t", "u",
    "trials", "failures", "dfr", "ci_low", "ci_high", "nc_hits", "mean_iters", "seed",
]

HIST_HEADER = ["value", "bad_frac", "susp_frac"]

KINDS = ("dfr_curves", "u_curves", "counter_hist")

_COLORS = plt.rcParams["axes.prop_cycle"].by_key()["color"]


class SchemaError(ValueError):
    """Input columns do not match the harness schema."""


@dataclass(frozen=True)
class PlotJob:
    inputs: tuple[str, ...]
    kind: str
    output: str
    title: str | None = None
    log_y: bool = True
    ci_whiskers: bool = False
    u: int | None = None
    v: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind '{self.kind}'")
        if not self.inputs:
            raise ValueError("at least one input CSV required")


def _read_rows(path: str, expected_header: list[str]) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected columns {expected_header}")
        if header != expected_header:
            missing = [c for c in expected_header if c not in header]
            extra = [c for c in header if c not in expected_header]
            raise SchemaError(
                f"{path}: header mismatch (missing columns {missing or 'none'}, "
                f"unexpected columns {extra or 'none'})"
            )
        rows = [dict(zip(header, line)) for line in reader if line]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def _sidecar_params(path: str) -> tuple[int | None, int | None]:
    """Pull (u, v) for reference lines from the harness config sidecar."""
    sidecar = os.fspath(path) + ".json"
    if not os.path.exists(sidecar):
        return None, None
    try:
        with open(sidecar, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError):
        return None, None
    u = doc.get("u")
    code = doc.get("code", {})
    v = code.get("v") if isinstance(code, dict) else None
    return (u if isinstance(u, int) else None, v if isinstance(v, int) else None)


def _build_curves(job: PlotJob, fig, ax) -> None:
    x_field = "t" if job.kind == "dfr_curves" else "u"
    series: dict[tuple, dict[bool, list]] = {}
    for path in job.inputs:
        for row in _read_rows(path, SWEEP_HEADER):
            if row[x_field] == "":
                raise SchemaError(f"{path}: column '{x_field}' is empty; wrong sweep kind?")
            key = (row["decoder"], int(row["v"]))
            aware = row["nc_aware"] == "true"
            point = (
                int(row[x_field]),
                float(row["dfr"]),
                float(row["ci_low"]),
                float(row["ci_high"]),
            )
            series.setdefault(key, {}).setdefault(aware, []).append(point)

    many_v = len({key[1] for key in series}) > 1
    for idx, key in enumerate(sorted(series)):
        color = _COLORS[idx % len(_COLORS)]
        base_label = f"{key[0]}, v={key[1]}" if many_v else key[0]
        for aware, points in sorted(series[key].items()):
            points.sort()
            xs = [p[0] for p in points]
            ys = [p[1] for p in points]
            style = "dotted" if aware else "solid"
            label = base_label + (" (table-aware)" if aware else "")
            ax.plot(xs, ys, linestyle=style, color=color, linewidth=1.6, label=label)
            if job.ci_whiskers:
                lo = [max(p[1] - p[2], 0.0) for p in points]
                hi = [max(p[3] - p[1], 0.0) for p in points]
                ax.errorbar(xs, ys, yerr=[lo, hi], fmt="none", ecolor=color,
                            elinewidth=0.8, capsize=2)

    if job.log_y:
        ax.set_yscale("log")
    ax.set_xlabel("t (error weight)" if job.kind == "dfr_curves"
                  else "u (max near-codeword overlap)")
    ax.set_ylabel("decoding failure rate" if job.kind == "dfr_curves"
                  else "observed failure probability")
    ax.grid(True, which="both", alpha=0.4)
    ax.legend(fontsize=8)


def _build_counter_hist(job: PlotJob, fig, ax) -> None:
    if len(job.inputs) != 1:
        raise ValueError("counter_hist takes exactly one input CSV")
    rows = _read_rows(job.inputs[0], HIST_HEADER)
    values = [int(r["value"]) for r in rows]
    bad = [float(r["bad_frac"]) for r in rows]
    susp = [float(r["susp_frac"]) for r in rows]

    width = 0.4
    ax.bar([x - width / 2 for x in values], bad, width=width,
           color="tab:blue", alpha=0.7, label="bad bits")
    ax.bar([x + width / 2 for x in values], susp, width=width,
           color="tab:red", alpha=0.7, label="suspicious bits")

    u, v = job.u, job.v
    if u is None or v is None:
        side_u, side_v = _sidecar_params(job.inputs[0])
        u = u if u is not None else side_u
        v = v if v is not None else side_v
    if u is not None:
        ax.axvline(u, color="tab:red", linestyle="dashdot", label=f"u = {u}")
        if v is not None:
            ax.axvline(v - u + 1, color="tab:blue", linestyle="dashdot",
                       label=f"v - u + 1 = {v - u + 1}")

    ax.set_xlabel("counter value")
    ax.set_ylabel("fraction of bits")
    ax.set_ylim(0, 1)
    ax.grid(True, alpha=0.4)
    ax.legend(fontsize=8)


def build_figure(job: PlotJob):
    """Build the matplotlib figure for a job without writing it out."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0), dpi=130)
    try:
        if job.kind == "counter_hist":
            _build_counter_hist(job, fig, ax)
        else:
            _build_curves(job, fig, ax)
        if job.title:
            ax.set_title(job.title)
        fig.tight_layout()
    except Exception:
        plt.close(fig)
        raise
    return fig


def render(job: PlotJob) -> str:
    """Render a job to its output image; returns the output path.

    The figure is fully built before anything is written, so a schema error
    never leaves a partial or empty image behind.
    """
    fig = build_figure(job)
    try:
        fig.savefig(job.output)
    finally:
        plt.close(fig)
    return job.output

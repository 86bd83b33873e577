"""Turn simulator report CSVs into figures.

Four figure kinds, one per documented CSV contract:

* ``sweep``     -- SNR-vs-task-proxy lines, one per scheme; the digital cliff
  shows as a step, the analog scheme as a smooth curve.
* ``rates``     -- required data rate per payload/window case as bars against
  the 0.1-2.0 Gbps network peak band.
* ``heatmap``   -- per-pixel ray sample counts.
* ``broadcast`` -- unicast vs broadcast bit totals per group.

The input contract is enforced before anything touches the output path: a
wrong header or an empty body raises ``ContractError`` naming expected vs
found columns, and no file is written.  Rendering is a pure function of the
CSV bytes (fixed style, no timestamps), so regenerating a figure from the
same input is byte-reproducible.
"""

from __future__ import annotations

import csv
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("sweep", "rates", "heatmap", "broadcast")

EXPECTED_HEADERS = {
    "sweep": ["scheme", "snr_db", "feature_mse", "task_proxy", "payload_bits", "outage"],
    "rates": ["label", "payload_bits", "window_s", "required_rate_bps", "feasible"],
    "heatmap": ["y", "x", "samples"],
    "broadcast": [
        "users", "shared_bits", "residual_bits_total", "unicast_bits",
        "broadcast_bits", "savings_bits", "broadcast_s", "unicast_s", "airtime_ratio",
    ],
}

NETWORK_BAND_BPS = (0.1e9, 2.0e9)

STYLE = {
    "figure.figsize": (8.0, 5.0),
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
}

SCHEME_COLORS = {"traditional": "#d62728", "ssc": "#1f77b4", "deepsc": "#2ca02c"}


class ContractError(Exception):
    """The input file does not match the documented CSV contract."""


@dataclass(frozen=True)
class FigureSpec:
    input_path: str
    kind: str
    output_path: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ContractError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")


def read_rows(path: str | Path, kind: str) -> list[dict]:
    """Parse and validate one report CSV against its kind's contract."""
    expected = EXPECTED_HEADERS[kind]
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        found = reader.fieldnames
        if found != expected:
            raise ContractError(
                f"{path}: header mismatch for kind {kind!r}: "
                f"expected {','.join(expected)} but found "
                f"{','.join(found) if found else '<empty file>'}"
            )
        rows = list(reader)
    if not rows:
        raise ContractError(f"{path}: no data rows")
    return rows


def _floats(rows: list[dict], column: str) -> np.ndarray:
    try:
        return np.array([float(r[column]) for r in rows])
    except ValueError as exc:
        raise ContractError(f"column {column!r} holds a non-numeric value: {exc}") from exc


def _fig_sweep(rows: list[dict], ax):
    schemes = sorted({r["scheme"] for r in rows})
    for scheme in schemes:
        mine = [r for r in rows if r["scheme"] == scheme]
        mine.sort(key=lambda r: float(r["snr_db"]))
        x = _floats(mine, "snr_db")
        y = _floats(mine, "task_proxy")
        ax.semilogy(
            x, y,
            label=scheme,
            color=SCHEME_COLORS.get(scheme),
            drawstyle="steps-post" if scheme == "ssc" else "default",
        )
    ax.set_xlabel("SNR [dB]")
    ax.set_ylabel("task-error proxy (lower is better)")
    ax.set_title("Transmission schemes over the shared link")
    ax.legend()


def _fig_rates(rows: list[dict], ax):
    labels = [r["label"] for r in rows]
    rates = _floats(rows, "required_rate_bps")
    feasible = [r["feasible"] == "true" for r in rows]
    colors = ["#2ca02c" if f else "#d62728" for f in feasible]
    pos = np.arange(len(labels))
    ax.bar(pos, rates, color=colors)
    ax.axhspan(*NETWORK_BAND_BPS, color="#1f77b4", alpha=0.2,
               label="network peak 0.1-2.0 Gbps")
    ax.set_yscale("log")
    ax.set_xticks(pos)
    ax.set_xticklabels(labels, rotation=20, ha="right")
    ax.set_ylabel("required rate [bits/s]")
    ax.set_title("Required data rates vs deployed network peak")
    ax.legend()


def _fig_heatmap(rows: list[dict], ax):
    ys = _floats(rows, "y").astype(int)
    xs = _floats(rows, "x").astype(int)
    values = _floats(rows, "samples")
    grid = np.zeros((ys.max() + 1, xs.max() + 1))
    grid[ys, xs] = values
    image = ax.imshow(grid, cmap="viridis", interpolation="nearest")
    ax.figure.colorbar(image, ax=ax, label="samples per ray")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title("Ray sample budget")


def _fig_broadcast(rows: list[dict], ax):
    users = _floats(rows, "users").astype(int)
    unicast = _floats(rows, "unicast_bits")
    bcast = _floats(rows, "broadcast_bits")
    saved = _floats(rows, "savings_bits")
    pos = np.arange(len(rows))
    width = 0.35
    ax.bar(pos - width / 2, unicast, width, label="unicast", color="#d62728")
    ax.bar(pos + width / 2, bcast, width, label="broadcast", color="#2ca02c")
    for p, s in zip(pos, saved):
        ax.annotate(f"saved {s / 1e6:.1f} Mb", (p, max(unicast[p], bcast[p])),
                    ha="center", va="bottom", fontsize=8)
    ax.set_xticks(pos)
    ax.set_xticklabels([f"{u} users" for u in users])
    ax.set_ylabel("downlink bits per frame")
    ax.set_title("Shared-stream broadcast vs per-user unicast")
    ax.legend()


_RENDERERS = {
    "sweep": _fig_sweep,
    "rates": _fig_rates,
    "heatmap": _fig_heatmap,
    "broadcast": _fig_broadcast,
}

# strip writer-inserted timestamps so identical inputs give identical bytes
_METADATA = {
    ".png": {},
    ".svg": {"Date": None},
    ".pdf": {"CreationDate": None},
}


def render_figure(spec: FigureSpec) -> Path:
    """Validate the input, draw the figure, atomically write the image."""
    rows = read_rows(spec.input_path, spec.kind)
    out = Path(spec.output_path)
    suffix = out.suffix.lower()
    if suffix not in _METADATA:
        raise ContractError(
            f"unsupported output format {suffix or '<none>'}; use .png, .svg, or .pdf"
        )
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        try:
            _RENDERERS[spec.kind](rows, ax)
            fig.tight_layout()
            out.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=out.parent, suffix=suffix)
            os.close(fd)
            try:
                fig.savefig(tmp, metadata=_METADATA[suffix])
                os.replace(tmp, out)
            except BaseException:
                try:
                    os.unlink(tmp)
                except OSError:
                    pass
                raise
        finally:
            plt.close(fig)
    return out

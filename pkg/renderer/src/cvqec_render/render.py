"""Figure rendering for gain-sweep CSV files.

Consumes only the sweep artifact interface: the fixed-header CSV plus the
optional ``<csv>.meta.json`` sidecar (legend parameter values).  Every plotted
number is read from the CSV; the renderer recomputes nothing, and asserts as
much by checksumming the drawn series against the source columns.

Exit codes: 0 ok, 2 bad input (missing columns, empty data, non-positive
values on a log panel).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

EXPECTED_COLUMNS = ("g2", "xi", "lambda_used", "eta_eff", "added_noise",
                    "geof_corrected", "geof_baseline", "geof_deterministic",
                    "p_success", "saturation_residual", "engine_disagreement")

PANELS = ("eof", "psuccess")
X_AXES = ("g2", "eta_eff")


class RenderInputError(ValueError):
    """CSV missing, malformed, empty, or unusable for the requested panel."""


@dataclass
class PlotSpec:
    csv_path: str
    panel: str = "eof"
    x_axis: str = "g2"
    overlays: tuple = ("baseline",)        # subset of {"baseline", "bound"}
    overlay_csv: str = None                # second sweep drawn as extra curve
    out_path: str = "figure.png"


def read_sweep(path):
    """Load a sweep CSV into a dict of float columns; schema is validated."""
    path = Path(path)
    if not path.exists():
        raise RenderInputError(f"no such CSV: {path}")
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        names = tuple(reader.fieldnames or ())
        missing = [c for c in EXPECTED_COLUMNS if c not in names]
        if missing:
            raise RenderInputError(f"{path}: missing columns {missing}")
        rows = list(reader)
    if not rows:
        raise RenderInputError(f"{path}: no data rows")
    data = {}
    for c in names:
        try:
            data[c] = np.array([float(r[c]) for r in rows])
        except (TypeError, ValueError) as e:
            raise RenderInputError(f"{path}: column {c!r} not numeric: {e}") from None
    return data


def read_metadata(csv_path):
    side = Path(str(csv_path) + ".meta.json")
    if not side.exists():
        return {}
    try:
        return json.loads(side.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError):
        return {}


def _param_label(meta):
    cfg = meta.get("config", {})
    parts = [f"{k}={cfg[k]}" for k in ("eta", "chi", "tau", "epsilon", "delta")
             if k in cfg]
    return ", ".join(parts)


def series_checksum(*arrays):
    h = hashlib.sha256()
    for a in arrays:
        h.update(np.ascontiguousarray(a, dtype=np.float64).tobytes())
    return h.hexdigest()


def build_figure(spec: PlotSpec):
    """Assemble the figure; returns (figure, drawn-series dict)."""
    if spec.panel not in PANELS:
        raise RenderInputError(f"unknown panel {spec.panel!r}")
    if spec.x_axis not in X_AXES:
        raise RenderInputError(f"unknown x axis {spec.x_axis!r}")
    data = read_sweep(spec.csv_path)
    meta = read_metadata(spec.csv_path)
    x = data[spec.x_axis]
    drawn = {}

    plt.rcParams["svg.hashsalt"] = "cvqec-render"
    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=150)
    label_extra = _param_label(meta)
    suffix = f"  ({label_extra})" if label_extra else ""

    if spec.panel == "eof":
        ax.plot(x, data["geof_corrected"], color="#1f3d99", lw=1.8,
                label="error-corrected" + suffix)
        drawn["geof_corrected"] = data["geof_corrected"]
        if "baseline" in spec.overlays:
            ax.plot(x, data["geof_baseline"], color="black", lw=1.4,
                    label="uncorrected loss")
            drawn["geof_baseline"] = data["geof_baseline"]
        if "bound" in spec.overlays:
            ax.plot(x, data["geof_deterministic"], color="#b02020", lw=1.4,
                    linestyle="-.", label="deterministic bound")
            drawn["geof_deterministic"] = data["geof_deterministic"]
        if spec.overlay_csv:
            extra = read_sweep(spec.overlay_csv)
            emeta = read_metadata(spec.overlay_csv)
            mode = emeta.get("config", {}).get("lambda_mode", "overlay")
            ax.plot(extra[spec.x_axis], extra["geof_corrected"], color="#d4a017",
                    lw=1.6, linestyle="--", label=f"error-corrected ({mode} gain)")
            drawn["overlay_geof_corrected"] = extra["geof_corrected"]
        ax.set_ylabel("entanglement of formation (ebits)")
    else:
        p = data["p_success"]
        if np.any(p <= 0.0):
            raise RenderInputError("log-scale success panel requires strictly "
                                   "positive probabilities")
        ax.semilogy(x, p, color="#1f3d99", lw=1.8, label="success probability" + suffix)
        drawn["p_success"] = p
        if spec.overlay_csv:
            extra = read_sweep(spec.overlay_csv)
            if np.any(extra["p_success"] <= 0.0):
                raise RenderInputError("overlay has non-positive probabilities")
            ax.semilogy(extra[spec.x_axis], extra["p_success"], color="#d4a017",
                        lw=1.6, linestyle="--", label="overlay")
            drawn["overlay_p_success"] = extra["p_success"]
        ax.set_ylabel("success probability")

    ax.set_xlabel("intensity gain $g^2$" if spec.x_axis == "g2"
                  else r"effective transmission $\eta_{\mathrm{eff}}$")
    ax.legend(frameon=False, fontsize=9)
    ax.grid(alpha=0.25, lw=0.5)
    fig.tight_layout()

    # no-recomputation check: what the axes hold is what the CSV holds
    lines = {l.get_label(): l for l in ax.get_lines()}
    plotted = [np.asarray(l.get_ydata(), dtype=float) for l in ax.get_lines()]
    source = list(drawn.values())
    assert series_checksum(*plotted) == series_checksum(*source), \
        "rendered series diverged from CSV source"
    return fig, drawn


def render(spec: PlotSpec):
    """Render to spec.out_path; deterministic bytes for identical inputs."""
    fig, drawn = build_figure(spec)
    out = Path(spec.out_path)
    fmt = out.suffix.lstrip(".").lower() or "png"
    meta = {"Date": None} if fmt == "svg" else {"Software": "cvqec-render"}
    fig.savefig(out, format=fmt, metadata=meta)
    plt.close(fig)
    return drawn


def main(argv=None):
    ap = argparse.ArgumentParser(prog="cvqec-render",
                                 description="render sweep CSVs as figures")
    ap.add_argument("--csv", required=True)
    ap.add_argument("--panel", choices=PANELS, default="eof")
    ap.add_argument("--x", choices=X_AXES, default="g2")
    ap.add_argument("--overlays", default="baseline",
                    help="comma list from {baseline, bound, none}")
    ap.add_argument("--overlay-csv", dest="overlay_csv")
    ap.add_argument("--out", required=True)
    args = ap.parse_args(argv)
    overlays = tuple(o for o in args.overlays.split(",") if o and o != "none")
    bad = [o for o in overlays if o not in ("baseline", "bound")]
    if bad:
        print(f"input error: unknown overlays {bad}", file=sys.stderr)
        return 2
    spec = PlotSpec(csv_path=args.csv, panel=args.panel, x_axis=args.x,
                    overlays=overlays, overlay_csv=args.overlay_csv,
                    out_path=args.out)
    try:
        render(spec)
    except RenderInputError as e:
        print(f"input error: {e}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

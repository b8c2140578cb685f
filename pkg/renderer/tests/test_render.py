"""Renderer contracts: schema validation, no-recomputation checksum,
log-panel guards, deterministic bytes, CLI exit codes."""

import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from cvqec_render import (EXPECTED_COLUMNS, PlotSpec, RenderInputError,
                          build_figure, read_sweep, render, series_checksum)

HEADER = ",".join(EXPECTED_COLUMNS)


def write_fixture(path, n=8, p_success_floor=1e-3, meta=True):
    """Schema-conformant sweep CSV with a baseline crossing mid-range."""
    g2 = np.linspace(5.0, 9.0, n)
    baseline = np.full(n, 0.0252750535268)
    corrected = baseline + (g2 - 7.0) * 0.004
    bound = np.full(n, 0.0816092281777)
    psucc = 0.08 * np.exp(-0.25 * g2)
    if p_success_floor <= 0.0:
        psucc[0] = p_success_floor
    rows = []
    for i in range(n):
        rows.append([g2[i], 1 / (1 + g2[i]), 0.05 * np.sqrt(g2[i]),
                     0.0025 * g2[i], 1 - 0.002 * g2[i], corrected[i],
                     baseline[i], bound[i], psucc[i], 0.0, 0.0])
    text = HEADER + "\n" + "\n".join(",".join(f"{v:.12g}" for v in r)
                                     for r in rows) + "\n"
    path.write_text(text, encoding="utf-8", newline="\n")
    if meta:
        sidecar = {"config": {"eta": 0.01, "chi": 0.5, "tau": 0.98,
                              "epsilon": 0.7, "delta": 0.9,
                              "lambda_mode": "optimized"}}
        (path.parent / (path.name + ".meta.json")).write_text(
            json.dumps(sidecar), encoding="utf-8")
    return path


def run_cli(args):
    return subprocess.run([sys.executable, "-m", "cvqec_render.render", *args],
                          capture_output=True, text=True)


def test_read_sweep_roundtrip(tmp_path):
    p = write_fixture(tmp_path / "s.csv")
    data = read_sweep(p)
    assert set(EXPECTED_COLUMNS) <= set(data)
    assert len(data["g2"]) == 8


def test_missing_column_rejected(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("g2,xi\n1,0.5\n", encoding="utf-8")
    with pytest.raises(RenderInputError):
        read_sweep(p)


def test_empty_data_rejected(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text(HEADER + "\n", encoding="utf-8")
    with pytest.raises(RenderInputError):
        read_sweep(p)


def test_eof_panel_series_match_csv(tmp_path):
    p = write_fixture(tmp_path / "s.csv")
    spec = PlotSpec(csv_path=str(p), panel="eof", overlays=("baseline", "bound"),
                    out_path=str(tmp_path / "f.png"))
    fig, drawn = build_figure(spec)
    data = read_sweep(p)
    # exactly the CSV series, nothing recomputed
    assert series_checksum(drawn["geof_corrected"]) == series_checksum(data["geof_corrected"])
    assert series_checksum(drawn["geof_baseline"]) == series_checksum(data["geof_baseline"])
    assert series_checksum(drawn["geof_deterministic"]) == \
        series_checksum(data["geof_deterministic"])
    assert set(drawn) == {"geof_corrected", "geof_baseline", "geof_deterministic"}
    labels = [l.get_label() for l in fig.axes[0].get_lines()]
    assert any("eta=0.01" in l for l in labels)   # metadata reaches the legend


def test_overlay_curve_drawn_from_second_csv(tmp_path):
    p = write_fixture(tmp_path / "a.csv")
    q = write_fixture(tmp_path / "b.csv", n=6)
    spec = PlotSpec(csv_path=str(p), overlay_csv=str(q),
                    out_path=str(tmp_path / "f.png"))
    _, drawn = build_figure(spec)
    assert "overlay_geof_corrected" in drawn
    assert len(drawn["overlay_geof_corrected"]) == 6


def test_log_panel_rejects_nonpositive(tmp_path):
    p = write_fixture(tmp_path / "s.csv", p_success_floor=-1.0)
    spec = PlotSpec(csv_path=str(p), panel="psuccess",
                    out_path=str(tmp_path / "f.png"))
    with pytest.raises(RenderInputError):
        build_figure(spec)


def test_render_deterministic_bytes(tmp_path):
    p = write_fixture(tmp_path / "s.csv")
    out1, out2 = tmp_path / "a.png", tmp_path / "b.png"
    render(PlotSpec(csv_path=str(p), out_path=str(out1)))
    render(PlotSpec(csv_path=str(p), out_path=str(out2)))
    assert out1.read_bytes() == out2.read_bytes()
    svg1, svg2 = tmp_path / "a.svg", tmp_path / "b.svg"
    render(PlotSpec(csv_path=str(p), out_path=str(svg1)))
    render(PlotSpec(csv_path=str(p), out_path=str(svg2)))
    assert svg1.read_bytes() == svg2.read_bytes()


def test_cli_ok_and_exit_codes(tmp_path):
    p = write_fixture(tmp_path / "s.csv")
    res = run_cli(["--csv", str(p), "--panel", "eof", "--x", "g2",
                   "--out", str(tmp_path / "f.png")])
    assert res.returncode == 0, res.stderr
    assert (tmp_path / "f.png").exists()

    res = run_cli(["--csv", str(tmp_path / "nope.csv"),
                   "--out", str(tmp_path / "g.png")])
    assert res.returncode == 2

    bad = tmp_path / "bad.csv"
    bad.write_text("g2,xi\n1,0.5\n", encoding="utf-8")
    res = run_cli(["--csv", str(bad), "--out", str(tmp_path / "h.png")])
    assert res.returncode == 2

    zero = write_fixture(tmp_path / "zero.csv", p_success_floor=0.0)
    res = run_cli(["--csv", str(zero), "--panel", "psuccess",
                   "--out", str(tmp_path / "i.png")])
    assert res.returncode == 2


def test_cli_x_axis_eta_eff(tmp_path):
    p = write_fixture(tmp_path / "s.csv")
    res = run_cli(["--csv", str(p), "--panel", "psuccess", "--x", "eta_eff",
                   "--out", str(tmp_path / "f.svg")])
    assert res.returncode == 0, res.stderr


@pytest.mark.skipif(shutil.which("cvqec") is None,
                    reason="primary sweep driver not installed")
def test_acceptance_fig_main_render(tmp_path):
    # secondary acceptance: EOF panel carries exactly the CSV series
    # (checksum), the log success panel rejects non-positive data, and the
    # output bytes are deterministic -- all against a real fig-main sweep
    out = tmp_path / "fig_main.csv"
    res = subprocess.run(["cvqec", "sweep", "--scenario", "fig-main",
                          "--g2-min", "6", "--g2-max", "8", "--g2-step", "1",
                          "--lambda-mode", "nominal", "--out", str(out)],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    data = read_sweep(out)

    spec = PlotSpec(csv_path=str(out), panel="eof", overlays=("baseline", "bound"),
                    out_path=str(tmp_path / "eof.png"))
    _, drawn = build_figure(spec)
    assert series_checksum(*drawn.values()) == series_checksum(
        data["geof_corrected"], data["geof_baseline"], data["geof_deterministic"])

    drawn = render(PlotSpec(csv_path=str(out), panel="psuccess",
                            out_path=str(tmp_path / "p.png")))
    assert series_checksum(drawn["p_success"]) == series_checksum(data["p_success"])

    tampered = tmp_path / "tampered.csv"
    lines = out.read_text(encoding="utf-8").strip().split("\n")
    cols = lines[1].split(",")
    cols[EXPECTED_COLUMNS.index("p_success")] = "0"
    tampered.write_text("\n".join([lines[0], ",".join(cols)] + lines[2:]) + "\n",
                        encoding="utf-8")
    res = run_cli(["--csv", str(tampered), "--panel", "psuccess",
                   "--out", str(tmp_path / "x.png")])
    assert res.returncode == 2

    a, b = tmp_path / "d1.png", tmp_path / "d2.png"
    render(PlotSpec(csv_path=str(out), out_path=str(a)))
    render(PlotSpec(csv_path=str(out), out_path=str(b)))
    assert a.read_bytes() == b.read_bytes()
    print("\n[PASS] criterion 9 (renderer): checksum match, log guard, "
          "deterministic bytes")

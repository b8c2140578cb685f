"""Command-line driver: parameter sweeps over the amplifier gain, figure-ready
CSV output and machine-readable run metadata.

Exit codes: 0 ok, 2 config error, 3 validation/cross-check failure,
4 numerical failure.  Worker-pool width comes from CVQEC_THREADS.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from . import __version__
from . import analytic, channel as channel_mod, entanglement, gain, pipeline
from .analytic import ProtocolParams
from .channel import NonlinearChannelError
from .entanglement import OptimizerError
from .fock import InvalidParameterError, default_cutoff

CSV_HEADER = ("g2,xi,lambda_used,eta_eff,added_noise,geof_corrected,"
              "geof_baseline,geof_deterministic,p_success,saturation_residual,"
              "engine_disagreement")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4


@dataclass
class SweepConfig:
    scenario: str = "custom"
    eta: float = 0.01
    chi: float = 0.5
    zeta: float = 0.5
    tau: float = 1.0
    epsilon: float = 1.0
    delta: float = 1.0
    g2_min: float = 1.0
    g2_max: float = 60.0
    g2_step: float = 0.5
    lambda_mode: str = "optimized"      # nominal | optimized | fixed
    lambda_fixed: float = None
    herald_mode: str = "single"         # single | both
    engine: str = "analytic"            # analytic | fock | cross-check
    seed: int = 0
    out: str = "sweep.csv"
    cross_check_tol: float = 1e-8
    refine_crossings: bool = True
    gh_order: int = 40
    cutoff: int = None


# Figure presets: the realistic-components case, the reduced-efficiency case,
# the ideal-components gain-tuning case, and the deterministic-bound case.
PRESETS = {
    "fig-main": dict(eta=0.01, chi=0.5, zeta=0.5, tau=0.98, epsilon=0.7, delta=0.9),
    "fig-gain-tuned": dict(eta=0.01, chi=0.5, zeta=0.5, tau=1.0, epsilon=1.0, delta=1.0),
    "fig-degraded": dict(eta=0.01, chi=0.5, zeta=0.5, tau=0.98, epsilon=0.5, delta=0.8),
    "fig-deterministic": dict(eta=0.005, chi=0.5, zeta=0.5, tau=0.98, epsilon=0.9, delta=0.9),
}


def load_config_file(path):
    """Flat key = value text; '#' starts a comment; keys use flag names."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            k, v = (s.strip() for s in line.split("=", 1))
            out[k.replace("-", "_")] = v
    return out


_FLOAT_KEYS = {"eta", "chi", "zeta", "tau", "epsilon", "delta", "g2_min",
               "g2_max", "g2_step", "lambda_fixed", "cross_check_tol"}
_INT_KEYS = {"seed", "gh_order", "cutoff"}
_BOOL_KEYS = {"refine_crossings"}


def build_config(args):
    cfg = SweepConfig()
    file_vals = load_config_file(args.config) if getattr(args, "config", None) else {}

    def apply(key, val):
        if val is None:
            return
        if key in _FLOAT_KEYS:
            val = float(val)
        elif key in _INT_KEYS:
            val = int(val)
        elif key in _BOOL_KEYS and isinstance(val, str):
            val = val.lower() in ("1", "true", "yes", "on")
        setattr(cfg, key, val)

    scenario = file_vals.get("scenario", None)
    if getattr(args, "scenario", None):
        scenario = args.scenario
    if scenario and scenario != "custom":
        if scenario not in PRESETS:
            raise ValueError(f"unknown scenario {scenario!r}; try 'presets list'")
        cfg.scenario = scenario
        for k, v in PRESETS[scenario].items():
            setattr(cfg, k, v)
    elif scenario:
        cfg.scenario = scenario
    for k, v in file_vals.items():
        if k == "scenario":
            continue
        if not hasattr(cfg, k):
            raise ValueError(f"unknown config key {k!r}")
        apply(k, v)
    for k in vars(cfg):
        if hasattr(args, k) and getattr(args, k) is not None and k != "scenario":
            apply(k, getattr(args, k))
    if cfg.g2_step <= 0:
        raise ValueError(f"g2-step must be > 0, got {cfg.g2_step}")
    if cfg.g2_max < cfg.g2_min:
        raise ValueError(f"empty sweep range [{cfg.g2_min}, {cfg.g2_max}]")
    if cfg.lambda_mode not in ("nominal", "optimized", "fixed"):
        raise ValueError(f"bad lambda-mode {cfg.lambda_mode!r}")
    if cfg.lambda_mode == "fixed" and cfg.lambda_fixed is None:
        raise ValueError("lambda-mode fixed requires --lambda-fixed")
    if cfg.herald_mode not in ("single", "both"):
        raise ValueError(f"bad herald-mode {cfg.herald_mode!r}")
    if cfg.engine not in ("analytic", "fock", "cross-check"):
        raise ValueError(f"bad engine {cfg.engine!r}")
    return cfg


# ---------------------------------------------------------------------------
# point evaluation

def params_at(cfg: SweepConfig, g2):
    return ProtocolParams(eta=cfg.eta, chi=cfg.chi, zeta=cfg.zeta,
                          g=math.sqrt(g2), tau=cfg.tau, epsilon=cfg.epsilon,
                          delta=cfg.delta,
                          herald_patterns=2 if cfg.herald_mode == "both" else 1)


def evaluate_point(cfg: SweepConfig, g2, index=0):
    """One sweep row; deterministic given (config, seed, g2)."""
    p = params_at(cfg, g2)
    seed = (cfg.seed, index)
    geof_kwargs = dict(seed=abs(hash(seed)) % (2 ** 31))
    moment_engine = "fock" if cfg.engine == "fock" else "analytic"

    if cfg.lambda_mode == "nominal":
        lam = p.nominal_lambda()
        ch = channel_mod.characterize(p.with_lambda(lam), engine=moment_engine,
                                      cutoff=cfg.cutoff, gh_order=cfg.gh_order)
        sigma = channel_mod.corrected_covariance(cfg.zeta, ch)
        geof_c = entanglement.geof_from_cov(sigma, **geof_kwargs).value
    elif cfg.lambda_mode == "fixed":
        lam = cfg.lambda_fixed
        ch = channel_mod.characterize(p.with_lambda(lam), engine=moment_engine,
                                      cutoff=cfg.cutoff, gh_order=cfg.gh_order)
        sigma = channel_mod.corrected_covariance(cfg.zeta, ch)
        geof_c = entanglement.geof_from_cov(sigma, **geof_kwargs).value
    else:
        opt = gain.optimize_lambda(p, engine=moment_engine, **geof_kwargs)
        lam = opt.lambda_opt
        ch = channel_mod.characterize(p.with_lambda(lam), engine=moment_engine,
                                      cutoff=cfg.cutoff, gh_order=cfg.gh_order)
        geof_c = opt.geof_opt

    p_lam = p.with_lambda(lam)
    psucc = analytic.success_probability(p_lam)
    disagreement = 0.0
    if cfg.engine == "cross-check":
        ch_f = channel_mod.characterize(p_lam, engine="fock",
                                        cutoff=cfg.cutoff, gh_order=cfg.gh_order)
        ps_f = pipeline.scissor_success_probability(p_lam, cutoff=cfg.cutoff)
        disagreement = max(abs(ch_f.eta_eff - ch.eta_eff),
                           abs(ch_f.added_noise - ch.added_noise),
                           abs(ps_f - psucc))
    row = dict(
        g2=g2, xi=p.xi, lambda_used=lam,
        eta_eff=ch.eta_eff, added_noise=ch.added_noise,
        geof_corrected=geof_c,
        geof_baseline=entanglement.geof_of_r(
            entanglement.r0_lossy_tmsv(cfg.zeta, cfg.eta)),
        geof_deterministic=channel_mod.deterministic_bound(cfg.eta),
        p_success=psucc,
        saturation_residual=ch.saturation_residual,
        engine_disagreement=disagreement,
    )
    for k, v in row.items():
        if not np.isfinite(v):
            raise FloatingPointError(f"non-finite {k} at g2 = {g2}")
    return row


def _fmt(v):
    return f"{v:.12g}"


def rows_to_csv(rows):
    lines = [CSV_HEADER]
    keys = CSV_HEADER.split(",")
    for row in rows:
        lines.append(",".join(_fmt(row[k]) for k in keys))
    return "\n".join(lines) + "\n"


def _crossing(rows, key_ref):
    pts = [(r["g2"], r["geof_corrected"] - r[key_ref]) for r in rows]
    for (g0, v0), (g1, v1) in zip(pts, pts[1:]):
        if v0 < 0 <= v1:
            return g0 - v0 * (g1 - g0) / (v1 - v0)
    return None


def run_sweep(cfg: SweepConfig):
    t0 = time.time()
    n = int(math.floor((cfg.g2_max - cfg.g2_min) / cfg.g2_step + 1e-9)) + 1
    grid = [cfg.g2_min + i * cfg.g2_step for i in range(n)]
    if not grid:
        raise ValueError("empty sweep grid")
    rows = _evaluate_grid(cfg, grid)

    if cfg.refine_crossings:
        extra = set()
        for ref in ("geof_baseline", "geof_deterministic"):
            vals = [r["geof_corrected"] - r[ref] for r in rows]
            for i in range(1, len(vals)):
                if vals[i - 1] < 0 <= vals[i]:
                    step = (rows[i]["g2"] - rows[i - 1]["g2"]) / 4.0
                    extra.update(rows[i - 1]["g2"] + k * step for k in (1, 2, 3))
        extra = sorted(extra - set(r["g2"] for r in rows))
        if extra:
            rows.extend(_evaluate_grid(cfg, extra, offset=len(rows)))
            rows.sort(key=lambda r: r["g2"])

    if cfg.engine == "cross-check":
        worst = max(r["engine_disagreement"] for r in rows)
        if worst > cfg.cross_check_tol:
            raise CrossCheckError(f"engine disagreement {worst:.3e} > {cfg.cross_check_tol:.1e}")

    csv_text = rows_to_csv(rows)
    p0 = params_at(cfg, grid[0])
    meta = dict(
        version=__version__,
        config={k: v for k, v in asdict(cfg).items()},
        effective=dict(series_order=p0.series_order(),
                       fock_cutoff=cfg.cutoff if cfg.cutoff is not None
                       else default_cutoff(cfg.chi)),
        rows=len(rows),
        crossings=dict(
            baseline=_crossing(rows, "geof_baseline"),
            deterministic=_crossing(rows, "geof_deterministic"),
        ),
        wall_clock_s=round(time.time() - t0, 3),
    )
    return csv_text, meta


class CrossCheckError(RuntimeError):
    pass


def _evaluate_grid(cfg, grid, offset=0):
    width = int(os.environ.get("CVQEC_THREADS", "1"))
    if width > 1 and len(grid) > 1:
        with ProcessPoolExecutor(max_workers=width) as pool:
            futs = [pool.submit(evaluate_point, cfg, g2, offset + i)
                    for i, g2 in enumerate(grid)]
            return [f.result() for f in futs]   # grid order regardless of completion
    return [evaluate_point(cfg, g2, offset + i) for i, g2 in enumerate(grid)]


# ---------------------------------------------------------------------------
# subcommands

def cmd_sweep(args):
    try:
        cfg = build_config(args)
    except (ValueError, InvalidParameterError, OSError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        csv_text, meta = run_sweep(cfg)
    except CrossCheckError as e:
        print(f"cross-check failure: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NonlinearChannelError, OptimizerError, FloatingPointError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(csv_text)
    with open(cfg.out + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {cfg.out} ({meta['rows']} rows, {meta['wall_clock_s']}s)")
    return EXIT_OK


def cmd_point(args):
    try:
        cfg = build_config(args)
        if args.g2 is None:
            raise ValueError("point requires --g2")
    except (ValueError, InvalidParameterError, OSError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        row = evaluate_point(cfg, args.g2)
    except (NonlinearChannelError, OptimizerError, FloatingPointError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"scenario {cfg.scenario}  (engine {cfg.engine}, lambda {cfg.lambda_mode})")
    print(f"  eta={cfg.eta} chi={cfg.chi} zeta={cfg.zeta} "
          f"tau={cfg.tau} epsilon={cfg.epsilon} delta={cfg.delta}")
    for k in CSV_HEADER.split(","):
        print(f"  {k:<20} {_fmt(row[k])}")
    return EXIT_OK


def cmd_presets(args):
    if args.action != "list":
        print(f"unknown presets action {args.action!r}", file=sys.stderr)
        return EXIT_CONFIG
    for name, vals in PRESETS.items():
        fields = " ".join(f"{k}={v}" for k, v in vals.items())
        print(f"{name:<20} {fields}")
    return EXIT_OK


def _add_common(sub):
    sub.add_argument("--scenario", choices=list(PRESETS) + ["custom"])
    sub.add_argument("--config", help="flat key = value config file")
    for name in ("eta", "chi", "zeta", "tau", "epsilon", "delta"):
        sub.add_argument(f"--{name}", type=float)
    sub.add_argument("--g2-min", dest="g2_min", type=float)
    sub.add_argument("--g2-max", dest="g2_max", type=float)
    sub.add_argument("--g2-step", dest="g2_step", type=float)
    sub.add_argument("--lambda-mode", dest="lambda_mode",
                     choices=["nominal", "optimized", "fixed"])
    sub.add_argument("--lambda-fixed", dest="lambda_fixed", type=float)
    sub.add_argument("--herald-mode", dest="herald_mode", choices=["single", "both"])
    sub.add_argument("--engine", choices=["analytic", "fock", "cross-check"])
    sub.add_argument("--seed", type=int)
    sub.add_argument("--gh-order", dest="gh_order", type=int)
    sub.add_argument("--cutoff", type=int)
    sub.add_argument("--cross-check-tol", dest="cross_check_tol", type=float)


def main(argv=None):
    ap = argparse.ArgumentParser(prog="cvqec",
                                 description="CV error-correction channel sweeps")
    sp = ap.add_subparsers(dest="command", required=True)

    p_sweep = sp.add_parser("sweep", help="run a gain sweep and write CSV")
    _add_common(p_sweep)
    p_sweep.add_argument("--out", help="output CSV path")
    p_sweep.add_argument("--no-refine", dest="refine_crossings",
                         action="store_false", default=None)
    p_sweep.set_defaults(func=cmd_sweep)

    p_point = sp.add_parser("point", help="evaluate a single g^2 with diagnostics")
    _add_common(p_point)
    p_point.add_argument("--g2", type=float)
    p_point.set_defaults(func=cmd_point)

    p_presets = sp.add_parser("presets", help="preset management")
    p_presets.add_argument("action", choices=["list"])
    p_presets.set_defaults(func=cmd_presets)

    args = ap.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

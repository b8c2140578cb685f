"""Numerical optimization of the classical teleportation gain.

The sweet spot sits above the ideal-teleporter value lambda0 = g sqrt(eta) chi
once scissor truncation noise is present: raising lambda buys effective
transmission at the cost of displacement noise.  Coarse grid plus
golden-section refinement; unimodality is not assumed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import channel as channel_mod
from . import entanglement
from .analytic import ProtocolParams
from .entanglement import OptimizerError


@dataclass(frozen=True)
class GainOptimum:
    lambda_opt: float
    geof_opt: float
    geof_at_nominal: float
    eta_eff_at_opt: float
    evaluations: int


def _objective(params: ProtocolParams, engine, geof_kwargs):
    def f(lam):
        ch = channel_mod.characterize(params.with_lambda(lam), engine=engine)
        sigma = channel_mod.corrected_covariance(params.zeta, ch)
        res = entanglement.geof_from_cov(sigma, **geof_kwargs)
        return res.value, ch
    return f


def optimize_lambda(params: ProtocolParams, engine="analytic", grid_points=17,
                    rel_tol=1e-4, bracket_factor=3.0, max_widen=2, **geof_kwargs):
    """Maximize corrected-channel GEOF over the classical gain.

    Searches [lambda0, bracket_factor * lambda0] on a coarse grid, refines by
    golden section, and never returns below the nominal-gain value (lambda0
    is always a grid point).  An optimum pinned to the upper edge triggers a
    widened re-run; persisting edge optima raise OptimizerError.
    """
    lam0 = params.nominal_lambda()
    f = _objective(params, engine, geof_kwargs)
    evals = 0
    hi_factor = bracket_factor
    for attempt in range(max_widen + 1):
        grid = np.linspace(lam0, hi_factor * lam0, grid_points)
        vals = []
        for lam in grid:
            try:
                vals.append(f(lam)[0])
            except channel_mod.NonlinearChannelError:
                vals.append(-np.inf)   # excluded point, diagnostic via count
            evals += 1
        if not np.isfinite(vals).any():
            raise OptimizerError("every gain candidate failed characterization")
        i = int(np.argmax(vals))
        if i < grid_points - 1:
            break
        hi_factor *= 2.0
        if attempt == max_widen:
            raise OptimizerError(
                f"gain optimum pinned at bracket edge after widening to {hi_factor/2:.1f}x")

    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid_points - 1)]
    gr = (np.sqrt(5.0) - 1.0) / 2.0
    c1, c2 = hi - gr * (hi - lo), lo + gr * (hi - lo)
    f1, _ = f(c1)
    f2, _ = f(c2)
    evals += 2
    while hi - lo > rel_tol * lam0:
        if f1 < f2:
            lo, c1, f1 = c1, c2, f2
            c2 = lo + gr * (hi - lo)
            f2, _ = f(c2)
        else:
            hi, c2, f2 = c2, c1, f1
            c1 = hi - gr * (hi - lo)
            f1, _ = f(c1)
        evals += 1
    lam_best = 0.5 * (lo + hi)
    g_best, ch_best = f(lam_best)
    evals += 1
    g_nom = vals[0]
    if g_nom > g_best:
        lam_best, g_best = lam0, g_nom
        _, ch_best = f(lam0)
        evals += 1
    return GainOptimum(float(lam_best), float(g_best), float(g_nom),
                       float(ch_best.eta_eff), evals)

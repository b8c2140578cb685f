"""Gaussian entanglement of formation for two-mode covariance matrices.

Closed forms for the lossy two-mode squeezed vacuum, and a numerical routine
for general states: GEOF = E(r*) where r* is the least two-mode squeezing r
such that sigma - S sigma_r S^T >= 0 for some local symplectic S = S1 + S2.
The search runs on the standard form (local rotations removed), where local
squeezes along x/p suffice; the full six-parameter local search is kept as a
verification path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .channel import InvalidCovarianceError, assert_bona_fide
from .fock import InvalidParameterError


class OptimizerError(RuntimeError):
    """The feasibility search failed to converge; no fallback value is produced."""


@dataclass(frozen=True)
class OptimizerReport:
    iterations: int
    inner_evaluations: int
    residual: float


@dataclass(frozen=True)
class GEOFResult:
    value: float
    r0: float
    method: str                    # "closed-form" | "optimized"
    optimizer_report: OptimizerReport = None


def geof_of_r(r0):
    """E(r0) = cosh^2 r0 log2 cosh^2 r0 - sinh^2 r0 log2 sinh^2 r0, in ebits.

    The r0 -> 0 limit is 0 (removable x log x singularity).
    """
    if r0 < 0:
        raise InvalidParameterError(f"r0 must be >= 0, got {r0}")
    if r0 == 0.0:
        return 0.0
    c2 = math.cosh(r0) ** 2
    s2 = math.sinh(r0) ** 2
    out = c2 * math.log2(c2)
    if s2 > 0.0:
        out -= s2 * math.log2(s2)
    return out


def r0_lossy_tmsv(zeta, eta):
    """Optimal squeezing for a TMSV(zeta) with loss eta on one arm:
    r0 = (1/2) ln[(1 + zeta sqrt(eta)) / (1 - zeta sqrt(eta))] = artanh(zeta sqrt(eta))."""
    if not 0.0 <= zeta < 1.0:
        raise InvalidParameterError(f"zeta must be in [0, 1), got {zeta}")
    if not 0.0 <= eta <= 1.0:
        raise InvalidParameterError(f"eta must be in [0, 1], got {eta}")
    return math.atanh(zeta * math.sqrt(eta))


# ---------------------------------------------------------------------------
# standard form

def _rot(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


def standard_form(sigma):
    """Local-symplectic reduction to A = aI, B = bI, C = diag(c+, c-).

    Returns (a, b, cplus, cminus).  GEOF is invariant under the reduction.
    """
    sigma = np.asarray(sigma, dtype=float)
    A = sigma[:2, :2].copy()
    B = sigma[2:, 2:].copy()
    C = sigma[:2, 2:].copy()

    def equalize(M):
        # rotation diagonalizing M, then squeeze to sqrt(det M) * I
        w, Q = np.linalg.eigh(M)
        if np.linalg.det(Q) < 0:
            Q[:, 1] *= -1
        R = Q.T
        z = (w[1] / w[0]) ** 0.25
        Z = np.diag([z, 1.0 / z])
        return Z @ R, math.sqrt(w[0] * w[1])

    S1, a = equalize(A)
    S2, b = equalize(B)
    C = S1 @ C @ S2.T
    U, s, Vt = np.linalg.svd(C)
    if np.linalg.det(U) < 0:
        U[:, 1] *= -1
        s = np.array([s[0], -s[1]])
    else:
        s = s.copy()
    if np.linalg.det(Vt) < 0:
        Vt[1, :] *= -1
        s[1] = -s[1]
    return a, b, float(s[0]), float(s[1])


def ppt_min_symplectic(a, b, cp, cm):
    """Smallest symplectic eigenvalue of the partial transpose (standard form)."""
    dtil = a * a + b * b - 2.0 * cp * cm
    det = (a * b - cp * cp) * (a * b - cm * cm)
    inner = max(dtil * dtil - 4.0 * det, 0.0)
    return math.sqrt(max((dtil - math.sqrt(inner)) / 2.0, 0.0))


# ---------------------------------------------------------------------------
# inner feasibility

def _mineig2(m00, m01, m11):
    t = 0.5 * (m00 + m11)
    d = 0.5 * (m00 - m11)
    return t - np.hypot(d, m01)


_LOGGRID = np.stack(np.meshgrid(np.linspace(-1.2, 1.2, 21),
                                np.linspace(-1.2, 1.2, 21)), axis=-1).reshape(-1, 2)


def _phi_scalings(a, b, cp, cm, r, warm=None):
    """max over local x/p squeezes diag(s1, s2, 1/s1, 1/s2) of the smallest
    eigenvalue of sigma - S sigma_r S^T, evaluated per 2x2 block."""
    C, S = math.cosh(2 * r), math.sinh(2 * r)

    def neg(p):
        p = np.asarray(p)
        x, y = np.exp(p[..., 0]), np.exp(p[..., 1])
        sxy = np.sqrt(x * y)
        e1 = _mineig2(a - x * C, cp - sxy * S, b - y * C)
        e2 = _mineig2(a - C / x, cm + S / sxy, b - C / y)
        return -np.minimum(e1, e2)

    vals = neg(_LOGGRID)
    i = int(np.argmin(vals))
    starts = [_LOGGRID[i]]
    if warm is not None:
        starts.append(warm)
    best = None
    nev = len(_LOGGRID)
    for s0 in starts:
        res = minimize(neg, s0, method="Nelder-Mead",
                       options=dict(xatol=1e-9, fatol=1e-14, maxiter=300))
        nev += res.nfev
        if best is None or res.fun < best.fun:
            best = res
    return -float(best.fun), best.x, nev


def _local_symplectic(p):
    th1, z1, ph1, th2, z2, ph2 = p
    s1 = _rot(ph1) @ np.diag([math.exp(z1), math.exp(-z1)]) @ _rot(th1)
    s2 = _rot(ph2) @ np.diag([math.exp(z2), math.exp(-z2)]) @ _rot(th2)
    out = np.zeros((4, 4))
    out[:2, :2] = s1
    out[2:, 2:] = s2
    return out


def _phi_full(sigma_std, r, rng, restarts=8, warm=None):
    """Verification path: NM over the full 6 local-symplectic parameters
    (rotation-squeeze-rotation per mode), multi-start."""
    C, S = math.cosh(2 * r), math.sinh(2 * r)
    sr = np.diag([C, C, C, C]).astype(float)
    sr[0, 2] = sr[2, 0] = S
    sr[1, 3] = sr[3, 1] = -S

    def neg(p):
        Sm = _local_symplectic(p)
        return -np.linalg.eigvalsh(sigma_std - Sm @ sr @ Sm.T)[0]

    starts = [np.zeros(6)]
    if warm is not None:
        starts.append(warm)
    starts += [rng.normal(0.0, 0.3, 6) for _ in range(restarts)]
    best = None
    nev = 0
    for s0 in starts:
        res = minimize(neg, s0, method="Nelder-Mead",
                       options=dict(xatol=1e-9, fatol=1e-14, maxiter=800))
        nev += res.nfev
        if best is None or res.fun < best.fun:
            best = res
    return -float(best.fun), best.x, nev


# ---------------------------------------------------------------------------
# outer search

def geof_from_cov(sigma, r_tol=1e-6, margin=1e-9, inner="scalings",
                  restarts=8, seed=0):
    """GEOF of a bona-fide two-mode covariance matrix.

    Outer search on the squeezing r: the candidate from the lossy-TMSV shape
    is checked for feasibility (golden-section maximization of the feasibility
    margin phi(r) as fallback), then the least feasible r is located by
    bisection between an infeasible lower point and the feasible one.
    Failure to find any feasible r raises OptimizerError, never a silent value.
    """
    sigma = np.asarray(sigma, dtype=float)
    assert_bona_fide(sigma)
    a, b, cp, cm = standard_form(sigma)
    if ppt_min_symplectic(a, b, cp, cm) >= 1.0 - 1e-12:
        return GEOFResult(0.0, 0.0, "closed-form", OptimizerReport(0, 0, 0.0))
    if cp <= 0.0 or cm >= 0.0:
        raise InvalidCovarianceError(
            f"entangled input left standard form with c+ = {cp:.3e}, c- = {cm:.3e}")

    rng = np.random.default_rng(seed)
    evals = [0]

    if inner == "scalings":
        def phi(r, warm=None):
            v, w, n = _phi_scalings(a, b, cp, cm, r, warm)
            evals[0] += n
            return v, w
    elif inner == "full":
        sigma_std = np.diag([a, a, b, b]).astype(float)
        sigma_std[0, 2] = sigma_std[2, 0] = cp
        sigma_std[1, 3] = sigma_std[3, 1] = cm

        def phi(r, warm=None):
            v, w, n = _phi_full(sigma_std, r, rng, restarts, warm)
            evals[0] += n
            return v, w
    else:
        raise InvalidParameterError(f"unknown inner search {inner!r}")

    # candidate squeezing from the lossy-TMSV shape of the state
    rz = math.acosh(max(a, 1.0)) / 2.0
    etastar = min(cp * (-cm) / max(a * a - 1.0, 1e-300), 1.0)
    rc = math.atanh(min(math.tanh(rz) * math.sqrt(etastar), 1.0 - 1e-15))
    rc = max(rc, 1e-12)
    iters = 0
    fc, warm = phi(rc)
    if fc < -margin:
        # golden-section maximization of phi over a bracket around rc
        lo, hi = rc / 3.0, min(3.0 * rc, 0.5 * math.acosh(min(a, b)) + r_tol)
        gr = (math.sqrt(5.0) - 1.0) / 2.0
        c1, c2 = hi - gr * (hi - lo), lo + gr * (hi - lo)
        f1, warm = phi(c1, warm)
        f2, warm = phi(c2, warm)
        while hi - lo > r_tol:
            iters += 1
            if f1 < f2:
                lo, c1, f1 = c1, c2, f2
                c2 = lo + gr * (hi - lo)
                f2, warm = phi(c2, warm)
            else:
                hi, c2, f2 = c2, c1, f1
                c1 = hi - gr * (hi - lo)
                f1, warm = phi(c1, warm)
        rc = 0.5 * (lo + hi)
        fc, warm = phi(rc, warm)
        if fc < -margin:
            raise OptimizerError(
                f"no feasible squeezing found: best margin {fc:.3e} at r = {rc:.6f}")

    # left-edge guard: confirm infeasibility just below, else keep moving left
    probe = rc * (1.0 - 1e-3)
    fprobe, wprobe = phi(probe, warm)
    while fprobe >= -margin and probe > 1e-12:
        rc, fc, warm = probe, fprobe, wprobe
        probe = rc * 0.75
        fprobe, wprobe = phi(probe, warm)
        iters += 1
        if iters > 300:
            raise OptimizerError("left-edge search did not terminate")

    rlo, rhi = probe, rc
    while rhi - rlo > r_tol:
        iters += 1
        rm = 0.5 * (rlo + rhi)
        fm, wm = phi(rm, warm)
        if fm >= -margin:
            rhi, warm = rm, wm
        else:
            rlo = rm
    report = OptimizerReport(iters, evals[0], fc)
    return GEOFResult(geof_of_r(rhi), rhi, "optimized", report)

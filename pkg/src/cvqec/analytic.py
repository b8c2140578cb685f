"""Closed-form heralded output of the error-correction protocol.

The protocol: one arm of a two-mode squeezed vacuum (strength chi) passes
through a loss channel, is distilled by a single heralded quantum scissor
(gain g, beam-splitter ratio xi = 1/(1+g^2)), and the distilled resource
teleports a coherent probe with classical gain lambda.  Imperfections:
homodyne efficiency tau, single-photon source efficiency epsilon, detector
efficiency delta (folded into the internal transmission nu = eta*delta).

Everything here is evaluated by truncated series over the squeezed-state
photon number, never by tensor simulation; the Fock engine provides the
independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .fock import InvalidParameterError


@dataclass(frozen=True)
class ProtocolParams:
    """All scalar knobs of the protocol.

    Either g or xi may be given; they are kept mutually consistent via
    g = sqrt((1-xi)/xi).  nu is always derived as eta*delta.
    """

    eta: float = 0.01
    chi: float = 0.5
    zeta: float = 0.5
    g: float = None
    xi: float = None
    tau: float = 1.0
    epsilon: float = 1.0
    delta: float = 1.0
    lam: float = None
    alpha: complex = 0.0
    herald_patterns: int = 1       # 1 = single accepted pattern, 2 = both

    def __post_init__(self):
        g, xi = self.g, self.xi
        if g is None and xi is None:
            raise InvalidParameterError("one of g, xi is required")
        if g is None:
            g = math.sqrt((1.0 - xi) / xi)
        if xi is None:
            xi = 1.0 / (1.0 + g * g)
        if abs(g - math.sqrt((1.0 - xi) / xi)) > 1e-10 * max(1.0, g):
            raise InvalidParameterError(f"inconsistent g={g} vs xi={xi}")
        object.__setattr__(self, "g", float(g))
        object.__setattr__(self, "xi", float(xi))
        if not 0.0 < self.eta <= 1.0:
            raise InvalidParameterError(f"eta must be in (0, 1], got {self.eta}")
        if not 0.0 <= self.chi < 1.0:
            raise InvalidParameterError(f"chi must be in [0, 1), got {self.chi}")
        if not 0.0 <= self.zeta < 1.0:
            raise InvalidParameterError(f"zeta must be in [0, 1), got {self.zeta}")
        for name in ("tau", "epsilon", "delta"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise InvalidParameterError(f"{name} must be in (0, 1], got {v}")
        if self.g < 1.0:
            raise InvalidParameterError(f"g must be >= 1, got {self.g}")
        if self.lam is None:
            object.__setattr__(self, "lam", self.nominal_lambda())
        if self.lam < 0.0:
            raise InvalidParameterError("lambda must be >= 0")
        if self.herald_patterns not in (1, 2):
            raise InvalidParameterError("herald_patterns must be 1 or 2")

    @property
    def nu(self):
        return self.eta * self.delta

    def nominal_lambda(self):
        """Ideal-teleporter gain g sqrt(eta) chi."""
        return self.g * math.sqrt(self.eta) * self.chi

    def with_lambda(self, lam):
        return replace(self, lam=float(lam))

    def with_alpha(self, alpha):
        return replace(self, alpha=complex(alpha))

    def series_order(self, tol=1e-12):
        """Truncation order: geometric chi^(2s) tail below tol plus margin."""
        if self.chi <= 1e-8:
            return 20
        return max(20, math.ceil(math.log(tol) / math.log(self.chi ** 2)) + 5)


@dataclass(frozen=True)
class SeriesReport:
    order: int
    tail_estimate: float


@dataclass(frozen=True)
class HeraldedQubitBlock:
    """Un-normalized 2x2 output block on span{|0>, |1>} for one outcome beta.

    The physical output is D(displacement) block D!(displacement); the
    displacement is recorded, not applied.  weight = rho00 + rho11.
    """

    rho00: float
    rho01: complex
    rho10: complex
    rho11: float
    displacement: complex
    beta: complex
    weight: float
    report: SeriesReport = None

    def matrix(self):
        return np.array([[self.rho00, self.rho01], [self.rho10, self.rho11]], dtype=complex)

    def min_eigenvalue(self):
        m = self.matrix()
        return float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])


def _series_weights(p: ProtocolParams, smax):
    """Per-s ingredients shared by the block and the moment sums."""
    nu = p.nu
    q = p.chi ** 2 * (1.0 - nu)
    s = np.arange(smax + 1)
    qs = q ** s
    dark = nu * (p.epsilon * p.xi * (1.0 - p.delta) + (1.0 - p.epsilon))
    return s, qs, dark


def rho_out(params: ProtocolParams, beta, smax=None):
    """Heralded output block conditioned on dual-homodyne outcome beta.

    Coefficients follow the double series over the squeezed photon number s
    and the homodyne-loss count, with the prefactor
    (1-chi^2)/(2 pi) * exp(-|sqrt(tau) alpha - beta|^2); the 1/2 is the
    50:50 herald amplitude squared.  Hermiticity of the off-diagonals is
    exact by construction (rho10 = conj(rho01)).
    """
    p = params
    if smax is None:
        smax = p.series_order()
    u = math.sqrt(p.tau) * complex(p.alpha) - complex(beta)
    P = abs(u) ** 2
    s, qs, dark = _series_weights(p, smax)
    tau, xi, eps, delta, nu, chi = p.tau, p.xi, p.epsilon, p.delta, p.nu, p.chi

    # inner sums over the detected count n; n <= s for the s-indexed pieces,
    # n <= s+1 for the (s+1)-indexed pieces
    nmax = smax + 1
    n = np.arange(nmax + 1)
    logn = np.cumsum(np.concatenate([[0.0], np.log(np.arange(1, nmax + 1, dtype=float))]))
    with np.errstate(divide="ignore"):
        pn = np.where(n == 0, 1.0, P ** n) / np.exp(logn)          # P^n / n!
        tn = tau ** n
        ln1mt = np.log1p(-tau) if tau < 1.0 else -np.inf

    def binom_rows(mrow):
        # C(m, n) for n = 0..m as a vector
        lf = logn
        return np.exp(lf[mrow] - lf[: mrow + 1] - lf[mrow::-1])

    r00 = r11 = 0.0
    r01_mag = 0.0
    for si in range(smax + 1):
        w = qs[si]
        if w < 1e-300:
            break
        cs = binom_rows(si)
        cs1 = binom_rows(si + 1)
        if tau < 1.0:
            om1 = np.exp((si - n[: si + 1]) * ln1mt)
            om2 = np.exp((si + 1 - n[: si + 2]) * ln1mt)
        else:
            om1 = np.zeros(si + 1); om1[si] = 1.0
            om2 = np.zeros(si + 2); om2[si + 1] = 1.0
        inner1 = float(np.sum(cs * tn[: si + 1] * om1 * pn[: si + 1]))
        inner2 = float(np.sum(cs1 * tn[: si + 2] * om2 * pn[: si + 2]))
        innero = float(np.sum(cs * (si + 1.0) / (n[: si + 1] + 1.0)
                              * tn[: si + 1] * om1 * pn[: si + 1]))
        r00 += w * (eps * xi * delta * inner1 + dark * (si + 1) * chi ** 2 * inner2)
        r11 += w * eps * (1.0 - xi) * nu * (si + 1) * chi ** 2 * inner2
        r01_mag += w * innero

    pref = (1.0 - chi ** 2) / (2.0 * np.pi) * math.exp(-P) * p.herald_patterns
    koff = eps * math.sqrt(xi * delta * nu * (1.0 - xi) * tau) * chi
    rho00 = pref * r00
    rho11 = pref * r11
    rho01 = pref * koff * r01_mag * np.conj(u)
    q = p.chi ** 2 * (1.0 - p.nu)
    tail = q ** (smax + 1) / max(1.0 - q, 1e-300)
    return HeraldedQubitBlock(rho00, rho01, np.conj(rho01), rho11,
                              displacement=p.lam * complex(beta), beta=complex(beta),
                              weight=rho00 + rho11,
                              report=SeriesReport(smax, tail))


@dataclass(frozen=True)
class BetaAveragedMoments:
    mean_X: float
    mean_P: float
    mean_X2: float
    mean_P2: float
    herald_probability: float
    variance_X: float
    variance_P: float
    report: SeriesReport = None


def _moment_sums(p: ProtocolParams, smax):
    """Gaussian-identity beta integrals of the block, term by term in s.

    With u = sqrt(tau) alpha - beta the only integrals needed are
    int e^(-|u|^2) u^m (u*)^n d^2u = pi n! [m == n]; the inner detected-count
    sums then close binomially:
        sum_n C(m,n) tau^n (1-tau)^(m-n) (n+1) = m tau + 1.
    Returns (M0, M1, M0p, M1p, F1): weights, (k+1)!-weighted sums and the
    off-diagonal coherence sum.
    """
    s, qs, dark = _series_weights(p, smax)
    tau, xi, eps, delta, nu, chi = p.tau, p.xi, p.epsilon, p.delta, p.nu, p.chi
    t1 = eps * xi * delta * qs                               # scissor branch, m = s
    t2 = dark * chi ** 2 * qs * (s + 1)                      # dark branches, m = s+1
    t3 = eps * (1.0 - xi) * nu * chi ** 2 * qs * (s + 1)     # photon branch, m = s+1
    M0 = float(np.sum(t1 + t2))
    M1 = float(np.sum(t3))
    M0p = float(np.sum(t1 * (1.0 + s * tau) + t2 * (1.0 + (s + 1) * tau)))
    M1p = float(np.sum(t3 * (1.0 + (s + 1) * tau)))
    koff = eps * math.sqrt(xi * delta * nu * (1.0 - xi) * tau) * chi
    F1 = float(koff * np.sum(qs * (s + 1)))
    return M0, M1, M0p, M1p, F1


def moments_beta_averaged(params: ProtocolParams, smax=None):
    """Herald probability and post-selection-normalized output moments.

    mean quadratures come out as 2 lambda sqrt(tau) Re/Im(alpha) exactly: the
    block coherence is odd in u and integrates away, only the corrective
    displacement survives.  The variance combines the block populations,
    the coherence-displacement cross term and the displacement spread.
    """
    p = params
    if smax is None:
        smax = p.series_order()
    M0, M1, M0p, M1p, F1 = _moment_sums(p, smax)
    lam = p.lam
    W = (1.0 - p.chi ** 2) * (M0 + M1) / 2.0 * p.herald_patterns
    mean_x = 2.0 * lam * math.sqrt(p.tau) * complex(p.alpha).real
    mean_p = 2.0 * lam * math.sqrt(p.tau) * complex(p.alpha).imag
    var = (M0 + 3.0 * M1 - 4.0 * lam * F1 + 2.0 * lam ** 2 * (M0p + M1p)) / (M0 + M1)
    q = p.chi ** 2 * (1.0 - p.nu)
    tail = q ** (smax + 1) / max(1.0 - q, 1e-300)
    return BetaAveragedMoments(mean_x, mean_p,
                               var + mean_x ** 2, var + mean_p ** 2,
                               W, var, var,
                               report=SeriesReport(smax, tail))


def success_probability(params: ProtocolParams):
    """Herald probability of the distillation stage alone.

    Closed form from the geometric photon-number sums:
        P = (1-chi^2)/2 [ eps xi delta / (1-q) + nu chi^2 (1 - eps xi delta) / (1-q)^2 ],
    q = chi^2 (1 - nu).  alpha, lambda and tau do not enter: integrating the
    dual-homodyne outcome restores the identity on the teleporter modes.
    Doubled in both-pattern herald mode.
    """
    p = params
    nu = p.nu
    q = p.chi ** 2 * (1.0 - nu)
    exd = p.epsilon * p.xi * p.delta
    val = (1.0 - p.chi ** 2) / 2.0 * (exd / (1.0 - q)
                                      + nu * p.chi ** 2 * (1.0 - exd) / (1.0 - q) ** 2)
    return val * p.herald_patterns

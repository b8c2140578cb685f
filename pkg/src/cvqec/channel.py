"""Effective Gaussian channel extraction and two-mode covariance assembly.

The corrected protocol is reduced to a phase-insensitive Gaussian channel by
probing with small coherent states: amplitude gain from first moments,
added noise from second moments.  Covariance matrices are 4x4 real symmetric
in (x1, p1, x2, p2) ordering with vacuum variance 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import analytic, pipeline
from .analytic import ProtocolParams
from .fock import InvalidParameterError


class NonlinearChannelError(RuntimeError):
    """Probe gains disagree beyond tolerance: gain saturation suspected."""


class InvalidCovarianceError(ValueError):
    """Matrix fails the bona-fide condition sigma + i Omega >= 0."""


@dataclass(frozen=True)
class EffectiveChannel:
    """Gaussian channel summary: Var_out = eta_eff * Var_in + added_noise.

    added_noise includes the vacuum replenishment, so a pure loss channel of
    transmission eta reads (eta, 1 - eta).
    """

    eta_eff: float
    added_noise: float
    saturation_residual: float = 0.0


OMEGA = np.array([[0, 1, 0, 0],
                  [-1, 0, 0, 0],
                  [0, 0, 0, 1],
                  [0, 0, -1, 0]], dtype=float)


def bona_fide_defect(sigma):
    """Most negative eigenvalue of sigma + i Omega (>= 0 means physical)."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (4, 4) or np.max(np.abs(sigma - sigma.T)) > 1e-12:
        raise InvalidCovarianceError("need a symmetric 4x4 covariance matrix")
    ev = np.linalg.eigvalsh(sigma + 1j * OMEGA)
    return float(ev[0])


def assert_bona_fide(sigma, tol=-1e-9):
    d = bona_fide_defect(sigma)
    if d < tol:
        raise InvalidCovarianceError(f"bona-fide defect {d:.3e} below tolerance {tol:.1e}")
    return sigma


def characterize_from_moments(moments_fn, probe=0.1, linearity_tol=0.01):
    """Extract (eta_eff, added_noise) from a coherent-probe moment provider.

    moments_fn(alpha) must return an object with mean_X and variance_X.
    A second probe at twice the amplitude guards against gain saturation;
    disagreement beyond linearity_tol raises NonlinearChannelError.
    """
    m1 = moments_fn(probe)
    m2 = moments_fn(2.0 * probe)
    gain1 = m1.mean_X / (2.0 * probe)
    gain2 = m2.mean_X / (4.0 * probe)
    residual = abs(gain2 / gain1 - 1.0) if gain1 != 0.0 else abs(gain2)
    if residual > linearity_tol:
        raise NonlinearChannelError(
            f"probe gains differ by {residual:.2e} (> {linearity_tol}); "
            "reduce the probe amplitude or expect gain saturation")
    eta_eff = gain1 ** 2
    n_add = m1.variance_X - eta_eff
    if n_add < 0.0:
        if n_add < -1e-9:
            raise NonlinearChannelError(f"negative added noise {n_add:.3e}")
        n_add = 0.0
    return EffectiveChannel(eta_eff, n_add, residual)


def characterize(params: ProtocolParams, engine="analytic", probe=0.1,
                 linearity_tol=0.01, cutoff=None, gh_order=40):
    """Effective channel of the corrected protocol at the given parameters.

    The probe replaces params.alpha; params.lam is the gain actually applied.
    """
    if engine == "analytic":
        fn = lambda a: analytic.moments_beta_averaged(params.with_alpha(a))
    elif engine == "fock":
        fn = lambda a: pipeline.moments_beta_averaged_fock(
            params.with_alpha(a), cutoff=cutoff, gh_order=gh_order)
    else:
        raise InvalidParameterError(f"unknown engine {engine!r}")
    return characterize_from_moments(fn, probe, linearity_tol)


def corrected_covariance(zeta, channel: EffectiveChannel):
    """Two-mode covariance of a TMSV(zeta) with one arm through the channel.

    B-block variance is eta_eff cosh(2r) + added_noise; with the pure-loss
    values (eta, 1 - eta) this reproduces the uncorrected baseline exactly.
    """
    if not 0.0 <= zeta < 1.0:
        raise InvalidParameterError(f"zeta must be in [0, 1), got {zeta}")
    r = math.atanh(zeta)
    a = math.cosh(2 * r)
    b = channel.eta_eff * math.cosh(2 * r) + channel.added_noise
    c = math.sqrt(max(channel.eta_eff, 0.0)) * math.sinh(2 * r)
    sigma = np.diag([a, a, b, b]).astype(float)
    sigma[0, 2] = sigma[2, 0] = c
    sigma[1, 3] = sigma[3, 1] = -c
    return assert_bona_fide(sigma)


def loss_baseline(zeta, eta):
    """Covariance of TMSV(zeta) with one arm through plain loss eta."""
    return corrected_covariance(zeta, EffectiveChannel(eta, 1.0 - eta))


def deterministic_bound(eta, eta_max=1.0 - 1e-9):
    """GEOF ceiling of any deterministic strategy: infinite squeezing through
    the same loss, E(r0) with r0 = artanh(sqrt(eta))."""
    from .entanglement import geof_of_r
    if not 0.0 < eta < 1.0:
        raise InvalidParameterError(f"eta must be in (0, 1), got {eta}")
    if eta > eta_max:
        raise InvalidParameterError(f"eta {eta} too close to 1: bound diverges")
    return geof_of_r(math.atanh(math.sqrt(eta)))


def ideal_nla_reference(chi, eta, g, lam, tau=1.0, probe=0.1,
                        linearity_tol=0.01, cutoff=None, gh_order=40):
    """Channel characterization with the scissor replaced by the ideal g^n
    amplifier (reference curve only)."""
    fn = lambda a: pipeline.ideal_nla_moments(chi, eta, g, lam, tau=tau, alpha=a,
                                              cutoff=cutoff, gh_order=gh_order)
    return characterize_from_moments(fn, probe, linearity_tol)

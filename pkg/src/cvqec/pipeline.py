"""Full-protocol pipelines on the Fock engine.

These drive the generic engine operations end to end and serve as the
brute-force cross-check for the closed-form module: two-mode squeezed vacuum
on (R, B), channel loss into F, heralded quantum scissor with ancilla modes
(D, C) and loss modes (G, H), homodyne inefficiency into E, dual-homodyne
contraction of (A, R), corrective displacement on C.

Loss modes are kept as explicit state modes on the pure-state branch and only
contracted at the end; linearity makes this identical to tracing them eagerly
after each dissipative step while keeping every tensor small.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial.hermite import hermgauss

from . import fock
from .analytic import BetaAveragedMoments, HeraldedQubitBlock, ProtocolParams, SeriesReport
from .fock import FockState, InvalidParameterError


def _scissor_ancilla(params: ProtocolParams):
    """Single-photon ancilla after source loss (G), tunable splitter (C) and
    detector loss (H); pure state on (D, C, H, G) with single-photon cutoffs."""
    st = fock.number_state("D", 1, 1)
    st = st.tensor(fock.vacuum(("C", "H", "G"), (1, 1, 1)))
    st = fock.apply_beamsplitter(st, "D", "G", params.epsilon)
    st = fock.apply_beamsplitter(st, "D", "C", params.xi)
    st = fock.apply_beamsplitter(st, "D", "H", params.delta)
    return st


def pipeline_cutoff(params: ProtocolParams, cutoff=None):
    return fock.default_cutoff(params.chi) if cutoff is None else cutoff


def heralded_resource_state(params: ProtocolParams, cutoff=None):
    """Distilled (un-normalized) resource after the scissor herald.

    Pure state on (R, F, C, H, G); the squared norm is the single-pattern
    herald probability of the distillation stage.
    """
    N = pipeline_cutoff(params, cutoff)
    st = fock.make_tmsv(params.chi, N)
    st = st.tensor(fock.vacuum(("F",), (N,)))
    st = fock.apply_beamsplitter(st, "B", "F", params.nu)
    st = st.tensor(_scissor_ancilla(params))
    # pad D so the mixer holds every populated sector; D first so both herald
    # branches interfere with a + sign
    st = fock.pad_mode(st, "D", N)
    st = fock.apply_beamsplitter(st, "D", "B", 0.5)
    st, _ = fock.herald_pattern(st, {"B": 1, "D": 0})
    return st


def scissor_success_probability(params: ProtocolParams, cutoff=None):
    st = heralded_resource_state(params, cutoff)
    return st.norm_squared() * params.herald_patterns


def _teleporter_ready_state(params: ProtocolParams, cutoff=None):
    """Heralded resource with homodyne loss applied on R (mode E added).

    tau = 1 skips the lossless splitter and its mode.
    """
    st = heralded_resource_state(params, cutoff)
    if params.tau >= 1.0:
        return st
    N = st.cutoffs[st.axis("R")]
    st = st.tensor(fock.vacuum(("E",), (N,)))
    st = fock.apply_beamsplitter(st, "R", "E", params.tau)
    return st


def _homodyne_vectors(params, betas, dim):
    """v_n(beta) = <n| D(-beta) |sqrt(tau) alpha> / sqrt(pi) for each beta.

    Uses the exact truncated displacement matrix; equivalent to contracting
    mode A of the dual-homodyne eigenstate against the coherent probe.
    """
    coh = fock.coherent_state("A", np.sqrt(params.tau) * complex(params.alpha), dim - 1)
    out = np.empty((len(betas), dim), dtype=complex)
    for i, b in enumerate(betas):
        D = fock.displacement_matrix(b, dim)
        out[i] = (D.conj().T @ coh.array) / np.sqrt(np.pi)
    return out


def reduced_resource(params: ProtocolParams, cutoff=None):
    """Reduced density operator on (R, C) with every loss mode traced out.

    Independent of alpha, lambda and the outcome beta; reusable across an
    entire quadrature batch or cross-check grid.
    """
    st = _teleporter_ready_state(params, cutoff)
    rest = [m for m in st.labels if m not in ("R", "C")]
    rho = fock.trace_out(st, rest)
    perm = [rho.axis("R"), rho.axis("C")]
    arr = rho.array.transpose(perm + [p + 2 for p in perm])
    return np.ascontiguousarray(arr), arr.shape[0]


def _blocks_at(params, rho_rc, d, betas):
    """2x2 output blocks for a batch of outcomes: contract R against the
    homodyne vectors on both sides of the reduced operator."""
    V = _homodyne_vectors(params, betas, d)
    blocks = np.einsum("br,rcsd,bs->bcd", V, rho_rc, V.conj(), optimize=True)
    return blocks * params.herald_patterns


def block_at_beta(params: ProtocolParams, beta, cutoff=None, prepared=None):
    """Heralded output block at outcome beta via tensor simulation.

    Mirrors analytic.rho_out; displacement recorded, not applied.  prepared
    takes a reduced_resource() result to amortize the state construction.
    """
    rho_rc, d = prepared if prepared is not None else reduced_resource(params, cutoff)
    blk = _blocks_at(params, rho_rc, d, [complex(beta)])[0]
    return HeraldedQubitBlock(float(blk[0, 0].real), complex(blk[0, 1]),
                              complex(blk[1, 0]), float(blk[1, 1].real),
                              displacement=params.lam * complex(beta),
                              beta=complex(beta),
                              weight=float(blk[0, 0].real + blk[1, 1].real))


def beta_quadrature(params: ProtocolParams, gh_order=40):
    """Gauss-Hermite nodes (complex beta) and total weights for d^2 beta
    integrals of e^(-|sqrt(tau) alpha - beta|^2) x smooth; centered on the
    attenuated probe."""
    x, w = hermgauss(gh_order)
    c = np.sqrt(params.tau) * complex(params.alpha)
    bx = c.real + x[:, None]
    by = c.imag + x[None, :]
    betas = (bx + 1j * by).ravel()
    tot = (w[:, None] * np.exp(x[:, None] ** 2)) * (w[None, :] * np.exp(x[None, :] ** 2))
    return betas, tot.ravel()


def moments_beta_averaged_fock(params: ProtocolParams, cutoff=None, gh_order=40,
                               prepared=None):
    """Beta-averaged output moments via quadrature over the simulated blocks.

    Displacement enters through the exact shift identities
    <X> -> <X> + 2 Re(d) w,  <X^2> -> <X^2> + 4 Re(d) <X> + 4 Re(d)^2 w.
    """
    rho_rc, d = prepared if prepared is not None else reduced_resource(params, cutoff)
    betas, wq = beta_quadrature(params, gh_order)
    blocks = _blocks_at(params, rho_rc, d, betas)
    w = blocks[:, 0, 0].real + blocks[:, 1, 1].real
    trx = 2.0 * blocks[:, 0, 1].real
    trp = -2.0 * blocks[:, 0, 1].imag
    # X^2 and P^2 coincide on span{|0>,|1>}: both diag(1, 3) with no coherences
    trx2 = blocks[:, 0, 0].real + 3.0 * blocks[:, 1, 1].real
    lam = params.lam
    cx = 2.0 * lam * betas.real
    cp = 2.0 * lam * betas.imag
    W = float(np.dot(wq, w))
    X1 = float(np.dot(wq, trx + cx * w))
    P1 = float(np.dot(wq, trp + cp * w))
    X2 = float(np.dot(wq, trx2 + 2.0 * cx * trx + cx ** 2 * w))
    P2 = float(np.dot(wq, trx2 + 2.0 * cp * trp + cp ** 2 * w))
    mx, mp = X1 / W, P1 / W
    mx2, mp2 = X2 / W, P2 / W
    return BetaAveragedMoments(mx, mp, mx2, mp2, W,
                               mx2 - mx ** 2, mp2 - mp ** 2,
                               report=SeriesReport(d - 1, 0.0))


# ---------------------------------------------------------------------------
# ideal amplifier reference (g^n-hat in place of the scissor)

def ideal_nla_cutoff(chi, eta, g, tol=1e-12, floor=10):
    """Cutoff for the amplified arm: gain rescales the squeezing to
    chi' = chi sqrt(1 - eta + g^2 eta)."""
    chi_eff = chi * np.sqrt(1.0 - eta + g * g * eta)
    if chi_eff >= 1.0:
        raise InvalidParameterError(f"g^n diverges: g^2 chi^2 eta terms give chi'={chi_eff:.3f}")
    return max(fock.default_cutoff(chi_eff, tol), floor)


def ideal_nla_moments(chi, eta, g, lam, tau=1.0, alpha=0.0, cutoff=None, gh_order=40):
    """Beta-averaged teleportation moments with the scissor replaced by g^n.

    The amplified state is renormalized once; the teleportation output mode
    is B itself (no photon-number truncation of the output, so moments use
    dense quadrature operators padded past the cutoff).
    """
    N = ideal_nla_cutoff(chi, eta, g) if cutoff is None else cutoff
    st = fock.make_tmsv(chi, N)
    st = st.tensor(fock.vacuum(("F",), (N,)))
    st = fock.apply_beamsplitter(st, "B", "F", eta)
    st = fock.apply_gain_operator(st, "B", g)
    st = FockState(st.labels, st.cutoffs, st.kind,
                   st.array / np.sqrt(st.norm_squared()),
                   st.truncation_mass, st.truncation_events)
    if tau < 1.0:
        st = st.tensor(fock.vacuum(("E",), (N,)))
        st = fock.apply_beamsplitter(st, "R", "E", tau)

    rest = [m for m in st.labels if m not in ("R", "B")]
    perm = [st.axis("R"), st.axis("B")] + [st.axis(m) for m in rest]
    psi = np.ascontiguousarray(st.array.transpose(perm))
    d = psi.shape[0]
    db = psi.shape[1]
    psi = psi.reshape(d, -1)
    nrest = psi.shape[1] // db

    a = np.diag(np.sqrt(np.arange(1.0, db + 2)), 1)            # padded by 2
    X = (a + a.T)
    P = -1j * (a - a.T)
    params = ProtocolParams(eta=eta, chi=chi, g=max(g, 1.0), tau=tau, lam=lam, alpha=alpha)
    betas, wq = beta_quadrature(params, gh_order)
    acc = np.zeros(5)                                          # W, X1, P1, X2, P2
    for lo in range(0, len(betas), 128):
        bs = betas[lo: lo + 128]
        ws = wq[lo: lo + 128]
        V = _homodyne_vectors(params, bs, d)
        T = (V @ psi).reshape(len(bs), db, nrest)
        Tp = np.zeros((len(bs), db + 2, nrest), dtype=complex)
        Tp[:, :db] = T
        Tc = Tp.conj()

        def tr(rows):
            return np.einsum("bor,bor->b", Tc, rows).real

        TX = np.einsum("oq,bqr->bor", X, Tp)
        TP = np.einsum("oq,bqr->bor", P, Tp)
        w = tr(Tp)
        trx = tr(TX)
        trp = tr(TP)
        trx2 = np.einsum("bor,bor->b", TX.conj(), TX).real
        trp2 = np.einsum("bor,bor->b", TP.conj(), TP).real
        cx = 2.0 * lam * bs.real
        cp = 2.0 * lam * bs.imag
        acc += [np.dot(ws, w),
                np.dot(ws, trx + cx * w),
                np.dot(ws, trp + cp * w),
                np.dot(ws, trx2 + 2.0 * cx * trx + cx ** 2 * w),
                np.dot(ws, trp2 + 2.0 * cp * trp + cp ** 2 * w)]
    W, X1, P1, X2, P2 = acc
    mx, mp = X1 / W, P1 / W
    mx2, mp2 = X2 / W, P2 / W
    return BetaAveragedMoments(mx, mp, mx2, mp2, W,
                               mx2 - mx ** 2, mp2 - mp ** 2,
                               report=SeriesReport(N, st.truncation_mass))

"""Dense truncated-Fock-space simulation kernel.

States live on a labelled tensor product of single-mode Fock spaces with
per-mode photon-number cutoffs.  Quadrature convention throughout:

    X = a + a!,   P = -i (a - a!),   vacuum Var(X) = Var(P) = 1.

Every operation is a pure function: inputs are never mutated, outputs are
fresh states.  Heralded branches are deliberately kept un-normalized; the
squared norm (or trace) carries the event probability.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.linalg import expm


class InvalidParameterError(ValueError):
    """A protocol or state parameter is outside its physical domain."""


class CutoffWarning(UserWarning):
    """Photon-number cutoff too small for the requested tolerance."""


@dataclass(frozen=True)
class FockState:
    """Pure vector or density operator over a labelled product Fock basis.

    array axes: one per mode for pure states, kets then bras for density
    operators (shape dims + dims).  truncation_mass accumulates norm or
    trace lost to cutoffs by previous operations.
    """

    labels: tuple
    cutoffs: tuple
    kind: str                      # "pure" | "density"
    array: np.ndarray
    truncation_mass: float = 0.0
    truncation_events: int = 0

    @property
    def dims(self):
        return tuple(c + 1 for c in self.cutoffs)

    @property
    def nmodes(self):
        return len(self.labels)

    def axis(self, label):
        try:
            return self.labels.index(label)
        except ValueError:
            raise InvalidParameterError(f"mode {label!r} not in state {self.labels}") from None

    def norm_squared(self):
        if self.kind != "pure":
            raise InvalidParameterError("norm_squared defined for pure payloads only")
        return float(np.vdot(self.array, self.array).real)

    def trace(self):
        if self.kind == "pure":
            return self.norm_squared()
        n = self.nmodes
        idx = list(range(n))
        return float(np.einsum(self.array, idx + idx).real)

    def to_density(self):
        """Promote a pure vector to a density operator (identity on density input)."""
        if self.kind == "density":
            return self
        rho = np.tensordot(self.array, self.array.conj(), axes=0)
        return replace(self, kind="density", array=rho)

    def tensor(self, other):
        if set(self.labels) & set(other.labels):
            raise InvalidParameterError("duplicate mode labels in tensor product")
        if self.kind != other.kind:
            a, b = self.to_density(), other.to_density()
        else:
            a, b = self, other
        if a.kind == "pure":
            arr = np.tensordot(a.array, b.array, axes=0)
        else:
            # interleave so axes stay (kets..., bras...)
            na, nb = a.nmodes, b.nmodes
            arr = np.tensordot(a.array, b.array, axes=0)
            order = (list(range(na)) + list(range(2 * na, 2 * na + nb))
                     + list(range(na, 2 * na)) + list(range(2 * na + nb, 2 * (na + nb))))
            arr = arr.transpose(order)
        return FockState(a.labels + b.labels, a.cutoffs + b.cutoffs, a.kind, arr,
                         a.truncation_mass + b.truncation_mass,
                         a.truncation_events + b.truncation_events)


# ---------------------------------------------------------------------------
# constructors

def vacuum(labels, cutoffs):
    labels, cutoffs = tuple(labels), tuple(cutoffs)
    arr = np.zeros(tuple(c + 1 for c in cutoffs), dtype=complex)
    arr[(0,) * len(labels)] = 1.0
    return FockState(labels, cutoffs, "pure", arr)


def number_state(label, n, cutoff):
    if n > cutoff:
        raise InvalidParameterError(f"photon number {n} exceeds cutoff {cutoff}")
    arr = np.zeros(cutoff + 1, dtype=complex)
    arr[n] = 1.0
    return FockState((label,), (cutoff,), "pure", arr)


def coherent_state(label, alpha, cutoff):
    n = np.arange(cutoff + 1)
    amps = np.exp(-0.5 * abs(alpha) ** 2) * alpha ** n * np.exp(-0.5 * _log_factorial(cutoff + 1))
    return FockState((label,), (cutoff,), "pure", amps.astype(complex))


def default_cutoff(chi, tol=1e-12, floor=8):
    """Smallest n with chi^(2n) < tol, clamped from below."""
    if chi <= 0:
        return floor
    n = int(np.ceil(np.log(tol) / (2.0 * np.log(chi))))
    return max(n, floor)


def make_tmsv(chi, cutoff, labels=("R", "B"), tail_tol=1e-10):
    """Two-mode squeezed vacuum sqrt(1-chi^2) sum chi^n |n,n>.

    The neglected tail has squared norm chi^(2(cutoff+1)); a CutoffWarning is
    emitted when it exceeds tail_tol.
    """
    if not 0.0 <= chi < 1.0:
        raise InvalidParameterError(f"chi must be in [0, 1), got {chi}")
    if cutoff < 1:
        raise InvalidParameterError("cutoff must be >= 1")
    tail = chi ** (2 * (cutoff + 1))
    if tail > tail_tol:
        warnings.warn(f"TMSV tail {tail:.2e} exceeds {tail_tol:.1e} at cutoff {cutoff}",
                      CutoffWarning, stacklevel=2)
    d = cutoff + 1
    arr = np.zeros((d, d), dtype=complex)
    n = np.arange(d)
    arr[n, n] = np.sqrt(1.0 - chi ** 2) * chi ** n
    return FockState(tuple(labels), (cutoff, cutoff), "pure", arr)


# ---------------------------------------------------------------------------
# beam splitter / loss

def _log_factorial(n):
    return np.cumsum(np.concatenate([[0.0], np.log(np.arange(1, n, dtype=float))]))


@lru_cache(maxsize=128)
def _bs_unitary(da, db, t):
    """exp(theta (a b! - a! b)) on the composite da*db space, theta = arccos sqrt(t).

    Convention: |m>|0> -> sum_k sqrt(C(m,k)) t^(k/2) (1-t)^((m-k)/2) |k>|m-k>.
    Exact within every complete total-photon sector; sectors clipped by a
    cutoff are where truncation loss occurs.
    """
    a = np.diag(np.sqrt(np.arange(1, da)), 1)
    b = np.diag(np.sqrt(np.arange(1, db)), 1)
    A = np.kron(a, np.eye(db))
    B = np.kron(np.eye(da), b)
    gen = A @ B.conj().T - A.conj().T @ B
    theta = float(np.arccos(np.clip(np.sqrt(t), 0.0, 1.0)))
    return expm(theta * gen)


def _sector_risk(state, ia, ib):
    """Population on joint photon-number sectors the cutoffs cannot represent
    in full (total count above min cutoff): an upper bound on the weight the
    truncated mixer can distort."""
    mmin = min(state.cutoffs[ia], state.cutoffs[ib])
    if state.kind == "pure":
        probs = np.abs(state.array) ** 2
        idx = list(range(state.nmodes))
        joint = np.einsum(probs, idx, [ia, ib])
    else:
        n = state.nmodes
        ket = list(range(n))
        joint = np.einsum(state.array, ket + ket, [ia, ib]).real
    i = np.arange(joint.shape[0])[:, None] + np.arange(joint.shape[1])[None, :]
    return float(np.sum(joint[i > mmin]))


def apply_beamsplitter(state, mode_a, mode_b, transmissivity):
    """Mix two modes on a beam splitter of intensity transmissivity t.

    mode_a is the 'kept' input in the binomial convention above.  The mixer is
    exactly unitary within every photon-number sector both cutoffs can hold;
    population on higher sectors is accounted in truncation_mass, never silent.
    """
    t = float(transmissivity)
    if not 0.0 <= t <= 1.0:
        raise InvalidParameterError(f"transmissivity must be in [0, 1], got {t}")
    ia, ib = state.axis(mode_a), state.axis(mode_b)
    da, db = state.dims[ia], state.dims[ib]
    U = _bs_unitary(da, db, t)
    risk = _sector_risk(state, ia, ib)

    def mix(arr, axa, axb, op):
        moved = np.moveaxis(arr, (axa, axb), (0, 1))
        sh = moved.shape
        flat = moved.reshape(sh[0] * sh[1], -1)
        flat = op @ flat
        return np.moveaxis(flat.reshape(sh), (0, 1), (axa, axb))

    arr = mix(state.array, ia, ib, U)
    if state.kind == "density":
        n = state.nmodes
        arr = mix(arr, n + ia, n + ib, U.conj())

    return FockState(state.labels, state.cutoffs, state.kind, arr,
                     state.truncation_mass + risk,
                     state.truncation_events + (1 if risk > 1e-14 else 0))


def pad_mode(state, label, new_cutoff):
    """Grow one mode's cutoff, zero-filling the new levels."""
    i = state.axis(label)
    old = state.cutoffs[i]
    if new_cutoff < old:
        raise InvalidParameterError("pad_mode cannot shrink a cutoff")
    if new_cutoff == old:
        return state
    naxes = state.array.ndim
    pads = [(0, 0)] * naxes
    pads[i] = (0, new_cutoff - old)
    if state.kind == "density":
        pads[state.nmodes + i] = (0, new_cutoff - old)
    arr = np.pad(state.array, pads)
    cut = list(state.cutoffs)
    cut[i] = new_cutoff
    return FockState(state.labels, tuple(cut), state.kind, arr,
                     state.truncation_mass, state.truncation_events)


def trace_out(state, modes):
    """Partial trace over the named modes (density result).

    Pure inputs avoid the full outer product: |psi><psi| traced over a mode
    subset is a single contraction of psi with its conjugate.
    """
    keep = [l for l in state.labels if l not in set(modes)]
    cut = tuple(state.cutoffs[state.axis(l)] for l in keep)
    if state.kind == "pure":
        perm = [state.axis(l) for l in keep] + [state.axis(l) for l in state.labels
                                                if l in set(modes)]
        psi = np.ascontiguousarray(state.array.transpose(perm))
        dk = int(np.prod(psi.shape[: len(keep)], initial=1))
        flat = psi.reshape(dk, -1)
        arr = (flat @ flat.conj().T).reshape(*psi.shape[: len(keep)],
                                             *psi.shape[: len(keep)])
        return FockState(tuple(keep), cut, "density", arr,
                         state.truncation_mass, state.truncation_events)
    rho = state
    n = rho.nmodes
    idx_ket = list(range(n))
    idx_bra = list(range(n, 2 * n))
    for l in modes:
        i = rho.labels.index(l)
        idx_bra[i] = idx_ket[i]
    out_idx = [idx_ket[rho.labels.index(l)] for l in keep] + \
              [idx_bra[rho.labels.index(l)] for l in keep]
    arr = np.einsum(rho.array, idx_ket + idx_bra, out_idx)
    return FockState(tuple(keep), cut, "density", arr,
                     rho.truncation_mass, rho.truncation_events)


def apply_loss(rho, mode, transmission, ancilla_label="_loss"):
    """Bosonic loss channel: beam splitter into a fresh vacuum ancilla, ancilla traced.

    Pure inputs are auto-promoted to density operators.  Trace is preserved
    up to cutoff truncation (reported via truncation_mass).
    """
    rho = rho.to_density()
    cut = rho.cutoffs[rho.axis(mode)]
    anc = vacuum((ancilla_label,), (cut,)).to_density()
    joint = rho.tensor(anc)
    joint = apply_beamsplitter(joint, mode, ancilla_label, transmission)
    return trace_out(joint, (ancilla_label,))


# ---------------------------------------------------------------------------
# heralding and projections

def herald_pattern(state, pattern):
    """Project the named modes onto definite photon counts.

    Returns (projected state on the remaining modes, herald weight).  The
    output stays un-normalized; weight is its squared norm / trace.
    """
    for l, c in pattern.items():
        if c > state.cutoffs[state.axis(l)]:
            raise InvalidParameterError(f"pattern count {c} exceeds cutoff on {l!r}")
    keep = [l for l in state.labels if l not in pattern]
    if state.kind == "pure":
        sl = [pattern[l] if l in pattern else slice(None) for l in state.labels]
        arr = state.array[tuple(sl)]
    else:
        n = state.nmodes
        sl = [pattern[l] if l in pattern else slice(None) for l in state.labels]
        arr = state.array[tuple(sl) * 2]
    cut = tuple(state.cutoffs[state.axis(l)] for l in keep)
    out = FockState(tuple(keep), cut, state.kind, np.ascontiguousarray(arr),
                    state.truncation_mass, state.truncation_events)
    return out, out.trace() if out.kind == "density" else out.norm_squared()


def displacement_matrix(beta, dim):
    """Exact matrix elements of D(beta) on the truncated space.

    Built from the normal-ordered factorization D = e^(-|b|^2/2) e^(b a!) e^(-b* a);
    each retained element is exact (no generator-truncation artifacts).
    """
    lf = _log_factorial(dim)
    i = np.arange(dim)
    low = np.tril(i[:, None] - i[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        L = np.where(i[:, None] >= i[None, :],
                     _safe_pow(beta, low) * np.exp(0.5 * (lf[:, None] - lf[None, :])
                                                   - lf[np.clip(low, 0, dim - 1)]),
                     0.0)
        up = np.triu(i[None, :] - i[:, None])
        U = np.where(i[None, :] >= i[:, None],
                     _safe_pow(-np.conj(beta), up) * np.exp(0.5 * (lf[None, :] - lf[:, None])
                                                            - lf[np.clip(up, 0, dim - 1)]),
                     0.0)
    return np.exp(-0.5 * abs(beta) ** 2) * (L @ U)


def _safe_pow(z, k):
    # z**k with 0**0 = 1 for complex z and integer array k
    if z == 0:
        return np.where(k == 0, 1.0 + 0j, 0.0 + 0j)
    return np.asarray(z, dtype=complex) ** k


def project_dual_homodyne(state, mode_a, mode_r, beta):
    """Contract two modes against the dual-homodyne eigenstate.

    The eigenstate is (1/sqrt(pi)) sum_n D_a(beta)|n>_a|n>_r, i.e. the matrix
    D(beta)/sqrt(pi) across the (a, r) indices.  Returns the un-normalized
    state on the remaining modes; its norm squared (trace) per unit d^2 beta
    is the outcome density.
    """
    ia, ir = state.axis(mode_a), state.axis(mode_r)
    da, dr = state.dims[ia], state.dims[ir]
    d = max(da, dr)
    E = displacement_matrix(beta, d)[:da, :dr] / np.sqrt(np.pi)
    keep = [l for l in state.labels if l not in (mode_a, mode_r)]
    cut = tuple(state.cutoffs[state.axis(l)] for l in keep)
    if state.kind == "pure":
        n = state.nmodes
        idx = list(range(n))
        out_idx = [i for i in idx if i not in (ia, ir)]
        arr = np.einsum(E.conj(), [ia, ir], state.array, idx, out_idx)
    else:
        n = state.nmodes
        ket = list(range(n))
        bra = list(range(n, 2 * n))
        out_idx = ([i for i in ket if i not in (ia, ir)]
                   + [i for i in bra if i not in (n + ia, n + ir)])
        arr = np.einsum(E.conj(), [ia, ir], E, [n + ia, n + ir],
                        state.array, ket + bra, out_idx)
    return FockState(tuple(keep), cut, state.kind, np.ascontiguousarray(arr),
                     state.truncation_mass, state.truncation_events)


# ---------------------------------------------------------------------------
# gain and moments

def apply_gain_operator(state, mode, g, tail_tol=1e-8):
    """Multiply the |n> amplitude on one mode by g^n (ideal amplifier g^n-hat).

    Caller renormalizes; the un-normalized weight carries the bookkeeping.
    Warns when the amplified population at the top two levels exceeds tail_tol
    relative to the total.
    """
    if g < 1.0:
        raise InvalidParameterError(f"gain must be >= 1, got {g}")
    i = state.axis(mode)
    d = state.dims[i]
    scale = g ** np.arange(d)
    sh = [1] * state.array.ndim
    sh[i] = d
    arr = state.array * scale.reshape(sh)
    if state.kind == "density":
        sh2 = [1] * state.array.ndim
        sh2[state.nmodes + i] = d
        arr = arr * scale.reshape(sh2)
    out = FockState(state.labels, state.cutoffs, state.kind, arr,
                    state.truncation_mass, state.truncation_events)
    pops = _mode_populations(out, mode)
    total = pops.sum()
    if total > 0 and pops[-2:].sum() / total > tail_tol:
        warnings.warn(f"amplified tail mass {pops[-2:].sum() / total:.2e} at cutoff {d - 1}",
                      CutoffWarning, stacklevel=2)
    return out


def _mode_populations(state, mode):
    i = state.axis(mode)
    if state.kind == "pure":
        probs = np.abs(state.array) ** 2
        return np.einsum(probs, list(range(state.nmodes)), [i])
    n = state.nmodes
    ket = list(range(n))
    bra = ket.copy()
    bra[i] = n
    arr = np.einsum(state.array, ket + bra, [i, n])
    return np.real(np.diag(arr))


@dataclass(frozen=True)
class Moments:
    mean_X: float
    mean_P: float
    mean_X2: float
    mean_P2: float
    weight: float


def quadrature_moments(rho, mode):
    """First and second X, P moments of one mode; weight = trace (un-normalized).

    X = a + a!, P = -i(a - a!).  The mode is padded internally so a!-couplings
    at the stored cutoff do not bias <X^2>.
    """
    rho = rho.to_density()
    i = rho.axis(mode)
    n = rho.nmodes
    ket = list(range(n))
    bra = ket.copy()
    bra[i] = n
    red = np.einsum(rho.array, ket + bra, [i, n])  # single-mode reduced op
    d = red.shape[0]
    dp = d + 2
    padded = np.zeros((dp, dp), dtype=complex)
    padded[:d, :d] = red
    a = np.diag(np.sqrt(np.arange(1, dp)), 1)
    X = a + a.conj().T
    P = -1j * (a - a.conj().T)
    w = float(np.trace(padded).real)
    mx = float(np.trace(padded @ X).real)
    mp = float(np.trace(padded @ P).real)
    mx2 = float(np.trace(padded @ X @ X).real)
    mp2 = float(np.trace(padded @ P @ P).real)
    return Moments(mx, mp, mx2, mp2, w)


def hermiticity_defect(state):
    rho = state.to_density()
    n = rho.nmodes
    perm = list(range(n, 2 * n)) + list(range(n))
    return float(np.max(np.abs(rho.array - rho.array.conj().transpose(perm))))


def min_eigenvalue(state):
    rho = state.to_density()
    d = int(np.prod(rho.dims))
    mat = rho.array.reshape(d, d)
    return float(np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))[0])

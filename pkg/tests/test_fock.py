"""Engine-level contracts: state constructors, beam splitters, loss, heralding,
dual-homodyne projection, quadrature moments, ideal gain."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial.hermite import hermgauss

from cvqec import fock
from cvqec.fock import (CutoffWarning, FockState, InvalidParameterError,
                        apply_beamsplitter, apply_gain_operator, apply_loss,
                        coherent_state, displacement_matrix, herald_pattern,
                        make_tmsv, number_state, project_dual_homodyne,
                        quadrature_moments, vacuum)

def random_density(rng, dims, support=None):
    """Random PSD trace-1 operator, optionally supported on low photon numbers."""
    d = int(np.prod(dims))
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = A @ A.conj().T
    rho /= np.trace(rho).real
    rho = rho.reshape(*dims, *dims)
    if support is not None:
        mask = np.zeros(dims)
        sl = tuple(slice(0, s + 1) for s in np.minimum(support, np.array(dims) - 1))
        mask[sl] = 1.0
        rho = rho * mask.reshape(*dims, *[1] * len(dims))
        rho = rho * mask.reshape(*[1] * len(dims), *dims)
        tr = np.einsum(rho, list(range(len(dims))) * 2).real
        rho = rho / tr
    return rho


# ---------------------------------------------------------------------------
# make_tmsv

def test_tmsv_vacuum_limit():
    st_ = make_tmsv(0.0, 5)
    assert st_.array[0, 0] == 1.0
    assert np.count_nonzero(st_.array) == 1


def test_tmsv_direct_amplitudes():
    st_ = make_tmsv(0.5, 1, tail_tol=1.0)
    assert st_.array[0, 0] == pytest.approx(np.sqrt(0.75), abs=1e-15)
    assert st_.array[1, 1] == pytest.approx(np.sqrt(0.75) * 0.5, abs=1e-15)
    assert st_.array[0, 1] == 0.0


def test_tmsv_norm_geometric_tail():
    # residual tail at cutoff 25 is 0.25^26 ~ 2e-16
    st_ = make_tmsv(0.5, 25)
    assert abs(st_.norm_squared() - 1.0) < 1e-14


def test_tmsv_invalid_chi():
    with pytest.raises(InvalidParameterError):
        make_tmsv(1.0, 10)


def test_tmsv_cutoff_warning():
    with pytest.warns(CutoffWarning):
        make_tmsv(0.9, 3)


def test_default_cutoff_rule():
    assert fock.default_cutoff(0.5) == 20       # smallest n with 0.25^n < 1e-12
    assert fock.default_cutoff(0.0) == 8        # floor
    assert fock.default_cutoff(0.3) >= 8


# ---------------------------------------------------------------------------
# beam splitter

def test_bs_identity():
    st_ = number_state("a", 1, 3).tensor(vacuum(("b",), (3,)))
    out = apply_beamsplitter(st_, "a", "b", 1.0)
    assert np.allclose(out.array, st_.array, atol=1e-12)


def test_bs_single_photon_split():
    st_ = number_state("a", 1, 2).tensor(vacuum(("b",), (2,)))
    out = apply_beamsplitter(st_, "a", "b", 0.5)
    assert out.array[1, 0] == pytest.approx(np.sqrt(0.5), abs=1e-12)
    assert out.array[0, 1] == pytest.approx(np.sqrt(0.5), abs=1e-12)


def test_bs_two_photon_binomial():
    # |2,0>, t=0.7 -> amplitudes (0.7, sqrt(2*0.7*0.3), 0.3) on |2,0>,|1,1>,|0,2>
    st_ = number_state("a", 2, 4).tensor(vacuum(("b",), (4,)))
    out = apply_beamsplitter(st_, "a", "b", 0.7)
    assert out.array[2, 0] == pytest.approx(0.7, abs=1e-12)
    assert out.array[1, 1] == pytest.approx(0.6480740698407860, abs=1e-12)
    assert out.array[0, 2] == pytest.approx(0.3, abs=1e-12)


def test_bs_second_mode_sign_convention():
    # |0,1> -> -sqrt(1-t)|1,0> + sqrt(t)|0,1>
    st_ = vacuum(("a",), (2,)).tensor(number_state("b", 1, 2))
    out = apply_beamsplitter(st_, "a", "b", 0.5)
    assert out.array[1, 0] == pytest.approx(-np.sqrt(0.5), abs=1e-12)
    assert out.array[0, 1] == pytest.approx(np.sqrt(0.5), abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(t=st.floats(0.0, 1.0),
       seed=st.integers(0, 10 ** 6))
def test_bs_unitarity_without_truncation(t, seed):
    rng = np.random.default_rng(seed)
    arr = np.zeros((7, 7), dtype=complex)
    arr[:3, :3] = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    arr /= np.linalg.norm(arr)
    st_ = FockState(("a", "b"), (6, 6), "pure", arr)
    out = apply_beamsplitter(st_, "a", "b", t)
    assert abs(out.norm_squared() - 1.0) < 1e-12
    assert out.truncation_events == 0


def test_bs_truncation_reported():
    st_ = number_state("a", 3, 3).tensor(number_state("b", 3, 3))
    out = apply_beamsplitter(st_, "a", "b", 0.5)
    assert out.truncation_mass > 1e-3
    assert out.truncation_events == 1


def test_bs_invalid_transmissivity():
    st_ = vacuum(("a", "b"), (2, 2))
    with pytest.raises(InvalidParameterError):
        apply_beamsplitter(st_, "a", "b", 1.5)


# ---------------------------------------------------------------------------
# loss channel

def test_loss_coherent_mean_scaling():
    alpha, t = 0.4, 0.37
    st_ = coherent_state("a", alpha, 20)
    out = apply_loss(st_, "a", t)
    m = quadrature_moments(out, "a")
    assert m.mean_X == pytest.approx(2 * np.sqrt(t) * alpha, abs=1e-12)
    assert m.weight == pytest.approx(1.0, abs=1e-12)


def test_loss_identity():
    rho = coherent_state("a", 0.3, 12).to_density()
    out = apply_loss(rho, "a", 1.0)
    assert np.allclose(out.array, rho.array, atol=1e-12)


def test_loss_single_photon_mixture():
    out = apply_loss(number_state("a", 1, 3), "a", 0.25)
    assert out.array[1, 1].real == pytest.approx(0.25, abs=1e-12)
    assert out.array[0, 0].real == pytest.approx(0.75, abs=1e-12)


def test_loss_composition(rng):
    rho = FockState(("a",), (9,), "density", random_density(rng, (10,), support=[4]))
    a = apply_loss(apply_loss(rho, "a", 0.8), "a", 0.6)
    b = apply_loss(rho, "a", 0.48)
    assert np.max(np.abs(a.array - b.array)) < 1e-12


def test_loss_preserves_trace_hermiticity_psd(rng):
    rho = FockState(("a",), (11,), "density", random_density(rng, (12,), support=[5]))
    out = apply_loss(rho, "a", 0.33)
    assert abs(out.trace() - 1.0) < 1e-12
    assert fock.hermiticity_defect(out) < 1e-12
    assert fock.min_eigenvalue(out) > -1e-10


# ---------------------------------------------------------------------------
# heralding

def _scissor_ancilla_ideal(xi):
    amp = np.zeros((2, 2), dtype=complex)
    amp[1, 0] = np.sqrt(xi)
    amp[0, 1] = np.sqrt(1 - xi)
    return FockState(("D", "C"), (1, 1), "pure", amp)


def test_vacuum_scissor_herald_weight():
    # vacuum input: only the D-photon branch passes, amplitude sqrt(xi)/sqrt(2)
    xi = 0.2
    st_ = _scissor_ancilla_ideal(xi).tensor(vacuum(("B",), (2,)))
    st_ = apply_beamsplitter(st_, "D", "B", 0.5)
    out, w = herald_pattern(st_, {"B": 1, "D": 0})
    assert w == pytest.approx(xi / 2, abs=1e-14)
    assert abs(out.array[0]) ** 2 == pytest.approx(xi / 2, abs=1e-14)
    assert out.labels == ("C",)


def test_herald_impossible_pattern():
    st_ = vacuum(("a", "b"), (2, 2))
    _, w = herald_pattern(st_, {"a": 1})
    assert w == 0.0


def test_herald_count_above_cutoff():
    st_ = vacuum(("a",), (1,))
    with pytest.raises(InvalidParameterError):
        herald_pattern(st_, {"a": 2})


# ---------------------------------------------------------------------------
# dual homodyne

def _gh_integrate(fn, center=0.0, order=30):
    x, w = hermgauss(order)
    total = 0.0
    c = complex(center)
    for xi_, wx in zip(x, w):
        for yi, wy in zip(x, w):
            b = (c.real + xi_) + 1j * (c.imag + yi)
            total += wx * wy * np.exp(xi_ ** 2 + yi ** 2) * fn(b)
    return total


def test_dual_homodyne_completeness_vacuum():
    st_ = vacuum(("A", "R"), (6, 6))
    tot = _gh_integrate(lambda b: project_dual_homodyne(st_, "A", "R", b).norm_squared())
    assert tot == pytest.approx(1.0, abs=1e-8)


def test_dual_homodyne_coherent_outcome_density():
    alpha = 0.35 + 0.1j
    st_ = coherent_state("A", alpha, 18).tensor(vacuum(("R",), (18,)))
    for beta in (0.0, 0.3 - 0.2j, alpha):
        out = project_dual_homodyne(st_, "A", "R", beta)
        expected = np.exp(-abs(alpha - beta) ** 2) / np.pi
        assert out.norm_squared() == pytest.approx(expected, abs=1e-12)


def test_dual_homodyne_completeness_entangled():
    st_ = make_tmsv(0.4, 8, tail_tol=1e-6)
    st_ = FockState(("A",) + st_.labels[1:], st_.cutoffs, "pure", st_.array)
    tot = _gh_integrate(lambda b: project_dual_homodyne(st_, "A", "B", b).norm_squared(),
                        order=35)
    assert tot == pytest.approx(st_.norm_squared(), abs=1e-8)


# ---------------------------------------------------------------------------
# quadrature moments

def test_moments_vacuum():
    m = quadrature_moments(vacuum(("a",), (4,)), "a")
    assert (m.mean_X, m.mean_P, m.weight) == (0.0, 0.0, pytest.approx(1.0))
    assert m.mean_X2 == pytest.approx(1.0, abs=1e-12)
    assert m.mean_P2 == pytest.approx(1.0, abs=1e-12)


def test_moments_coherent_shot_noise():
    m = quadrature_moments(coherent_state("a", 0.3, 16), "a")
    assert m.mean_X == pytest.approx(0.6, abs=1e-12)
    assert m.mean_X2 - m.mean_X ** 2 == pytest.approx(1.0, abs=1e-12)


def test_moments_single_photon():
    m = quadrature_moments(number_state("a", 1, 1), "a")
    assert m.mean_X == 0.0
    assert m.mean_X2 == pytest.approx(3.0, abs=1e-12)


# ---------------------------------------------------------------------------
# ideal gain operator

def test_gain_identity():
    st_ = make_tmsv(0.4, 14)
    out = apply_gain_operator(st_, "B", 1.0)
    assert np.allclose(out.array, st_.array)


def test_gain_tmsv_rescaling():
    chi, g = 0.3, 1.8
    st_ = make_tmsv(chi, 12, tail_tol=1.0)
    with pytest.warns(CutoffWarning):
        out = apply_gain_operator(st_, "B", g, tail_tol=1e-12)
    n = np.arange(13)
    expect = np.sqrt(1 - chi ** 2) * (g * chi) ** n
    assert np.allclose(np.diag(out.array), expect, atol=1e-12)


def test_gain_requires_amplification():
    with pytest.raises(InvalidParameterError):
        apply_gain_operator(make_tmsv(0.3, 12), "B", 0.5)


# ---------------------------------------------------------------------------
# displacement matrix

def test_displacement_matrix_vs_expm():
    from scipy.linalg import expm
    beta = 0.37 - 0.21j
    d = 24
    a = np.diag(np.sqrt(np.arange(1, d)), 1)
    De = expm(beta * a.conj().T - np.conj(beta) * a)
    Dx = displacement_matrix(beta, d)
    # generator truncation only corrupts the top of the expm version
    assert np.max(np.abs((De - Dx)[:10, :10])) < 1e-10


def test_displacement_on_vacuum_is_coherent():
    beta = 0.5 + 0.2j
    D = displacement_matrix(beta, 22)
    coh = coherent_state("a", beta, 21).array
    assert np.max(np.abs(D[:, 0] - coh)) < 1e-14

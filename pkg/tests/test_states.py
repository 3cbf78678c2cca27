import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hilmod.algebra import AlgebraDescriptor, top_eigenpair
from hilmod.errors import ConfigError, DimensionError, DomainError
from hilmod.states import (
    NormalState,
    diagonal_state,
    evaluate,
    geometric_weights,
    norm_attaining_state,
    random_state,
    state_from_json,
    state_from_preset,
    vector_state,
)

D2 = AlgebraDescriptor(2)


def test_trace_functional_examples():
    e11 = NormalState(D2, np.diag([1.0, 0.0]))
    assert evaluate(e11, D2.diag([2, 1])) == 2
    assert evaluate(state_from_preset("uniform", D2), D2.unit()) == pytest.approx(1.0)
    plus = vector_state(np.array([1, 1]) / np.sqrt(2))
    assert evaluate(plus, D2.element([[0, 1], [1, 0]])) == pytest.approx(1.0)
    assert np.linalg.matrix_rank(plus.rho) == 1


def test_vector_state_reads_entry():
    a = D2.element([[5, 1j], [2, 7]])
    assert vector_state([1, 0])(a) == 5


def test_invalid_density_matrices():
    with pytest.raises(DomainError):
        NormalState(D2, np.diag([0.5, 0.6]))
    with pytest.raises(DomainError):
        NormalState(D2, np.diag([1.5, -0.5]))
    with pytest.raises(DomainError):
        NormalState(D2, np.array([[0.5, 0.5], [0.0, 0.5]]))
    with pytest.raises(DomainError):
        vector_state([1, 1])
    with pytest.raises(DimensionError):
        evaluate(state_from_preset("uniform", D2), AlgebraDescriptor(3).unit())


def test_norm_attaining_state():
    assert norm_attaining_state(D2.diag([2, 1]))(D2.diag([2, 1])).real == pytest.approx(2.0)
    assert norm_attaining_state(D2.unit())(D2.unit()).real == pytest.approx(1.0)
    psi = np.array([1, 1j]) / np.sqrt(2)
    proj = D2.element(np.outer(psi, psi.conj()))
    assert norm_attaining_state(proj)(proj).real == pytest.approx(1.0)
    dc = AlgebraDescriptor(3, commutative=True)
    a = dc.diag([0.2, 3.0, 1.0])
    assert norm_attaining_state(a)(a).real == 3.0
    with pytest.raises(DomainError):
        norm_attaining_state(D2.diag([1, -2]))


def test_zero_and_projection_spectra():
    lam, h = top_eigenpair(D2.zero())
    assert lam == pytest.approx(0.0) and np.linalg.norm(h) == pytest.approx(1.0)
    lam, h = top_eigenpair(D2.diag([2, 1]))
    assert lam == pytest.approx(2.0) and abs(h[0]) == pytest.approx(1.0)


def test_geometric_weights_tails():
    w = geometric_weights(16, 0.5)
    assert w.sum() == pytest.approx(1.0, abs=1e-15)
    tails = [w[k:].sum() for k in range(16)]
    assert np.allclose(tails, 0.5 ** np.arange(16), rtol=0, atol=1e-15)
    with pytest.raises(ConfigError):
        geometric_weights(4, 1.5)


def test_presets_and_json():
    assert np.allclose(state_from_preset("vector:2", D2).rho, np.diag([0, 1]))
    assert np.allclose(state_from_preset("geometric:0.5", D2).rho, np.diag([0.5, 0.5]))
    assert np.allclose(state_from_json("uniform", D2).rho, np.eye(2) / 2)
    rho = state_from_json([[[0.25, 0], [0, 0]], [[0, 0], [0.75, 0]]], D2).rho
    assert np.allclose(rho, np.diag([0.25, 0.75]))
    with pytest.raises(ConfigError):
        state_from_preset("vector:3", D2)
    with pytest.raises(ConfigError):
        state_from_preset("thermal", D2)
    with pytest.raises(ConfigError):
        state_from_json([[[2, 0], [0, 0]], [[0, 0], [0, 0]]], D2)


def test_diagonal_state_normalises():
    phi = diagonal_state(AlgebraDescriptor(3, commutative=True), [1, 1, 2])
    assert np.allclose(np.diag(phi.rho), [0.25, 0.25, 0.5])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.booleans())
def test_random_states_are_states(seed, n, commutative):
    d = AlgebraDescriptor(n, commutative)
    rng = np.random.default_rng(seed)
    phi = random_state(d, rng)
    assert np.trace(phi.rho) == pytest.approx(1.0)
    assert np.linalg.eigvalsh(phi.rho)[0] >= -1e-12
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    if commutative:
        g = np.diag(np.diag(g))
    a = d.element(g)
    # positivity and the Cauchy-Schwarz bound |phi(a)|^2 <= phi(a^* a)
    assert phi(a.H * a).real >= -1e-12
    assert abs(phi(a)) ** 2 <= phi(a.H * a).real + 1e-10

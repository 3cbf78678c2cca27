import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hilmod import algebra as alg
from hilmod.algebra import AlgebraDescriptor, AlgebraElement
from hilmod.errors import DimensionError, DomainError, NumericError

D2 = AlgebraDescriptor(2)


def _element(seed, n=3):
    return alg.random_element(AlgebraDescriptor(n), np.random.default_rng(seed))


def test_hand_product():
    a = D2.element([[1, 2], [3, 4]])
    b = D2.element([[0, 1j], [1, 0]])
    expected = np.array([[2, 1j], [4, 3j]])
    assert np.allclose((a * b).entries, expected)
    assert np.allclose(a.H.entries, [[1, 3], [2, 4]])


def test_scalar_action_and_unit():
    a = D2.element([[1, 2], [3, 4]])
    assert np.allclose((2j * a).entries, 2j * a.entries)
    assert (a * D2.unit()).allclose(a)
    assert (a + D2.zero()).allclose(a)
    assert (a - a).allclose(D2.zero())


def test_norm_of_known_matrices():
    # singular values of [[3, 0], [4, 5]] are 3*sqrt(5) and sqrt(5)
    a = D2.element([[3, 0], [4, 5]])
    assert alg.operator_norm_alg(a) == pytest.approx(3 * np.sqrt(5), abs=1e-12)
    assert alg.power_norm(a.entries) == pytest.approx(3 * np.sqrt(5), abs=1e-8)


def test_top_eigenpair_of_known_matrix():
    a = D2.element([[2, 1], [1, 2]])
    lam, h = alg.top_eigenpair(a)
    assert lam == pytest.approx(3.0, abs=1e-12)
    assert np.allclose(np.abs(h), [1 / np.sqrt(2)] * 2)
    assert np.allclose(a.entries @ h, lam * h)


def test_top_eigenpair_rejects_non_positive():
    with pytest.raises(DomainError):
        alg.top_eigenpair(D2.element([[0, 1], [0, 0]]))
    with pytest.raises(DomainError):
        alg.top_eigenpair(D2.element([[-1, 0], [0, -2]]))


def test_commutative_descriptor():
    d = AlgebraDescriptor(3, commutative=True)
    a, b = d.diag([1, 2j, 3]), d.diag([4, 5, -6j])
    assert np.array_equal((a * b).entries, (b * a).entries)
    with pytest.raises(DomainError):
        d.element([[1, 1, 0], [0, 1, 0], [0, 0, 1]])


def test_bad_entries():
    with pytest.raises(DimensionError):
        D2.element(np.eye(3))
    with pytest.raises((DomainError, ValueError)):
        D2.element([[np.nan, 0], [0, 1]])
    with pytest.raises(DimensionError):
        _element(0, 3) * D2.unit()


def test_unitary_from_to_examples():
    psi, h = np.array([1, 0]), np.array([0, 1j])
    v = alg.unitary_from_to(psi, h)
    assert np.allclose(v @ psi, h)
    assert np.allclose(v.conj().T @ v, np.eye(2))
    assert np.allclose(alg.unitary_from_to(psi, psi), np.eye(2))


def test_random_unitary_is_seeded():
    u1, u2 = alg.random_unitary(AlgebraDescriptor(4), 7), alg.random_unitary(AlgebraDescriptor(4), 7)
    assert np.array_equal(u1.entries, u2.entries)
    assert alg.is_unitary(u1)
    du = alg.random_unitary(AlgebraDescriptor(3, commutative=True), 1)
    assert alg.is_unitary(du) and np.allclose(du.entries, np.diag(np.diag(du.entries)))


def test_power_norm_reports_nonconvergence():
    # one iteration cannot reach this tolerance
    m = np.array([[1.0, 0.5], [0.5, -1.0]])
    with pytest.raises(NumericError) as info:
        alg.power_norm(m, tol=1e-16, max_iter=1)
    assert info.value.residual is not None


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_c_star_identity(seed, n):
    a = _element(seed, n)
    assert alg.operator_norm_alg(a.H * a) == pytest.approx(alg.operator_norm_alg(a) ** 2, rel=1e-10, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_involution_reverses_products(seed, n):
    rng = np.random.default_rng(seed)
    d = AlgebraDescriptor(n)
    a, b = alg.random_element(d, rng), alg.random_element(d, rng)
    assert np.allclose((a * b).H.entries, (b.H * a.H).entries, atol=1e-12)
    assert np.linalg.eigvalsh((a.H * a).entries)[0] >= -1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_unitary_from_to_property(seed, n):
    rng = np.random.default_rng(seed)
    psi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    h = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    psi, h = psi / np.linalg.norm(psi), h / np.linalg.norm(h)
    v = alg.unitary_from_to(psi, h)
    assert np.allclose(v.conj().T @ v, np.eye(n), atol=1e-12)
    assert np.linalg.norm(v @ psi - h) <= 1e-10


def test_power_norm_matches_svd():
    rng = np.random.default_rng(3)
    m = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    assert alg.power_norm(m) == pytest.approx(np.linalg.norm(m, 2), rel=1e-9)


def test_element_is_immutable():
    a = AlgebraElement(D2, np.eye(2))
    with pytest.raises(ValueError):
        a.entries[0, 0] = 5

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hilmod.algebra import AlgebraDescriptor
from hilmod.errors import DimensionError, DomainError
from hilmod.module import (
    ModuleVector,
    basis_vector,
    coord_project,
    inner_product,
    module_norm,
    module_norms,
    rank_one_from_unit,
    random_vector,
    right_mul,
    vector_from_json,
    vector_to_json,
)

SCALARS = AlgebraDescriptor(1)
D2 = AlgebraDescriptor(2)


def scalar_vector(values):
    return ModuleVector(SCALARS, np.asarray(values, dtype=complex).reshape(-1, 1, 1))


def test_scalar_inner_product():
    # over A = C this is the usual inner product, conjugate-linear on the left
    x, y = scalar_vector([1, 2]), scalar_vector([3, 4])
    assert inner_product(x, y).entries[0, 0] == 11
    assert inner_product(scalar_vector([1j, 0]), scalar_vector([1, 0])).entries[0, 0] == -1j
    assert module_norm(scalar_vector([3, 4])) == pytest.approx(5.0, abs=1e-14)


def test_norm_of_matrix_coordinates():
    # <x, x> = diag(1, 0) + diag(0, 4) -> norm 2
    x = ModuleVector(D2, np.array([np.diag([1, 0]), np.diag([0, 2])], dtype=complex))
    assert np.allclose(inner_product(x, x).entries, np.diag([1, 4]))
    assert module_norm(x) == pytest.approx(2.0, abs=1e-14)


def test_basis_and_projection():
    e3 = basis_vector(3, D2.unit(), 5)
    assert np.allclose(e3.entry(3).entries, np.eye(2))
    assert module_norm(coord_project(2, e3)) == 0.0
    assert np.array_equal(coord_project(3, e3).entries, e3.entries)
    with pytest.raises(IndexError):
        basis_vector(0, D2.unit(), 5)
    with pytest.raises(IndexError):
        coord_project(6, e3)


def test_mismatched_vectors():
    with pytest.raises(DimensionError):
        inner_product(random_vector(D2, 3, np.random.default_rng(0)), random_vector(D2, 4, np.random.default_rng(0)))
    with pytest.raises(DimensionError):
        ModuleVector(D2, np.zeros((3, 2, 3)))


def test_rank_one_embedding():
    v = np.zeros(6, dtype=complex)
    v[3] = 1.0
    x = rank_one_from_unit(v, D2, 3)
    assert np.allclose(inner_product(x, x).entries, [[1, 0], [0, 0]])
    assert module_norm(x) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        rank_one_from_unit(2 * v, D2, 3)
    with pytest.raises(DomainError):
        rank_one_from_unit(v, AlgebraDescriptor(2, commutative=True), 3)


def test_batch_norms_match():
    rng = np.random.default_rng(5)
    xs = [random_vector(D2, 4, rng) for _ in range(6)]
    batch = np.stack([x.entries for x in xs])
    assert np.allclose(module_norms(batch), [module_norm(x) for x in xs], rtol=1e-12)


def test_json_round_trip():
    x = random_vector(D2, 3, np.random.default_rng(1))
    back = vector_from_json(json.dumps(vector_to_json(x)))
    assert np.array_equal(back.entries, x.entries)
    flat = [[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]]
    assert np.allclose(vector_from_json(flat).entries[0], np.eye(2))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.integers(1, 8))
def test_inner_product_axioms(seed, n, N):
    rng = np.random.default_rng(seed)
    d = AlgebraDescriptor(n)
    x, y = random_vector(d, N, rng), random_vector(d, N, rng)
    a = d.element(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    xy = inner_product(x, y).entries
    assert np.allclose(xy.conj().T, inner_product(y, x).entries, atol=1e-12)
    # right A-linearity: <x, y a> = <x, y> a
    assert np.allclose(inner_product(x, right_mul(y, a)).entries, xy @ a.entries, atol=1e-10)
    assert np.linalg.eigvalsh(inner_product(x, x).entries)[0] >= -1e-10
    # Cauchy-Schwarz in norm and the triangle inequality
    assert np.linalg.norm(xy, 2) <= module_norm(x) * module_norm(y) + 1e-9
    assert module_norm(x + y) <= module_norm(x) + module_norm(y) + 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(1, 8))
def test_norm_scales(seed, n, N):
    rng = np.random.default_rng(seed)
    x = random_vector(AlgebraDescriptor(n), N, rng)
    c = complex(*rng.standard_normal(2))
    assert module_norm(x * c) == pytest.approx(abs(c) * module_norm(x), rel=1e-10)
    assert module_norm(x) ** 2 == pytest.approx(np.linalg.norm(inner_product(x, x).entries, 2), rel=1e-10)

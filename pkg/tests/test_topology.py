import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hilmod.algebra import AlgebraDescriptor
from hilmod.errors import ConfigError, DegenerateWeightsError, DimensionError, DomainError
from hilmod.module import ModuleVector, basis_vector, coord_project, random_vector
from hilmod.states import NormalState, random_state, state_from_preset
from hilmod.topology import (
    SeminormSpec,
    is_admissible,
    normalize_admissible,
    ones_weights,
    p_generalized,
    p_tau1,
    p_tau2,
    spec_from_json,
    spec_to_json,
)
from hilmod.verify import random_instance

SCALARS = AlgebraDescriptor(1)
ID = NormalState(SCALARS, [[1.0]])


def sv(values):
    return ModuleVector(SCALARS, np.asarray(values, dtype=complex).reshape(-1, 1, 1))


def weights(values):
    return np.asarray(values, dtype=complex).reshape(-1, 1, 1)


def test_admissibility_examples():
    assert is_admissible(ID, weights([1, 1, 1]))
    assert is_admissible(ID, weights([1, 1 / math.sqrt(2)]))
    assert not is_admissible(ID, weights([0, 0]))
    assert not is_admissible(ID, weights([2, 1]))


def test_normalize_admissible():
    assert np.allclose(normalize_admissible(ID, weights([2, 1])), weights([1, 1]))
    d = AlgebraDescriptor(2)
    phi = state_from_preset("vector:1", d)
    eta = np.array([np.eye(2), np.diag([0, 3])], dtype=complex)
    # phi(eta_2^* eta_2) = 0, so that slot becomes zero
    assert np.allclose(normalize_admissible(phi, eta), [np.eye(2), np.zeros((2, 2))])
    ones = ones_weights(d, 3)
    assert np.allclose(normalize_admissible(phi, ones), ones, atol=1e-12)
    with pytest.raises(DegenerateWeightsError):
        normalize_admissible(ID, weights([0, 0]))


def test_scalar_seminorm_values():
    spec = SeminormSpec.tau(ID, weights([1, 1]))
    assert spec(sv([1, -1])) == pytest.approx(math.sqrt(2), abs=1e-15)
    assert spec(sv([0, 0])) == 0.0
    assert SeminormSpec.tau(ID, weights([1, 1 / math.sqrt(2)]))(sv([1, 1])) == pytest.approx(math.sqrt(1.5), abs=1e-15)
    assert p_tau1(ID, sv([1, 1]), sv([1, -1])) == 0.0
    assert p_tau1(ID, sv([1, 2]), sv([3, 4])) == pytest.approx(11.0)
    assert p_tau2(ID, sv([3, 4])) == pytest.approx(5.0)
    assert p_tau2(ID, sv([0, 0])) == 0.0


def test_basis_vector_values_for_any_state():
    d = AlgebraDescriptor(3)
    e1 = basis_vector(1, d.unit(), 4)
    for phi in (state_from_preset("uniform", d), random_state(d, np.random.default_rng(2))):
        assert p_tau1(phi, e1, e1) == pytest.approx(1.0)
        assert p_tau2(phi, e1) == pytest.approx(1.0)


def test_generalized_seminorm():
    d = AlgebraDescriptor(2)
    phi = state_from_preset("uniform", d)
    e1, e2 = basis_vector(1, d.unit(), 3), basis_vector(2, d.unit(), 3)
    spec = SeminormSpec.generalized(phi, [e1])
    assert p_generalized(spec, e1) == pytest.approx(1.0)
    assert p_generalized(spec, e2) == 0.0
    with pytest.raises(DomainError):
        SeminormSpec.generalized(phi, [e1, e1 + e2])


def test_generalized_reduces_to_tau():
    rng = np.random.default_rng(11)
    d = AlgebraDescriptor(2)
    phi = random_state(d, rng)
    eta = normalize_admissible(phi, random_vector(d, 4, rng).entries)
    family = [basis_vector(j + 1, d.element(eta[j]), 4) for j in range(4)]
    x = random_vector(d, 4, rng)
    assert SeminormSpec.generalized(phi, family)(x) == pytest.approx(SeminormSpec.tau(phi, eta)(x), rel=1e-12)


def test_spec_errors():
    with pytest.raises(DomainError):
        SeminormSpec.tau(ID, weights([2, 1]))
    with pytest.raises(DimensionError):
        SeminormSpec.tau(ID, weights([1, 1]))(sv([1, 2, 3]))
    with pytest.raises(DomainError):
        SeminormSpec("tau3", ID)


def test_features_match_formulas():
    rng = np.random.default_rng(4)
    d = AlgebraDescriptor(3)
    phi = random_state(d, rng)
    y = random_vector(d, 5, rng)
    eta = normalize_admissible(phi, random_vector(d, 5, rng).entries)
    x = random_vector(d, 5, rng)
    for spec in (SeminormSpec.tau(phi, eta), SeminormSpec.tau1(phi, y), SeminormSpec.tau2(phi)):
        assert np.linalg.norm(spec.features(x.entries)) == pytest.approx(spec(x), rel=1e-12)


def test_json_round_trip():
    d = AlgebraDescriptor(2)
    spec = spec_from_json({"kind": "tau", "state": "vector:1", "weights": [1, 0.5, [0, 1]]}, d, 3)
    again = spec_from_json(spec_to_json(spec), d, 3)
    x = random_vector(d, 3, np.random.default_rng(0))
    assert again(x) == pytest.approx(spec(x), rel=1e-14)
    assert spec_from_json({"kind": "tau", "weights": [4, 1], "normalize": True}, d, 2).weights.eta[0, 0, 0] == 1
    with pytest.raises(ConfigError):
        spec_from_json({"kind": "tau", "weights": [3, 1]}, d, 2)
    with pytest.raises(ConfigError):
        spec_from_json({"kind": "bogus"}, d, 2)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_seminorm_axioms(seed):
    rng = np.random.default_rng(seed)
    desc, phi, x, y, eta = random_instance(rng)
    lam = complex(*rng.standard_normal(2))
    for spec in (SeminormSpec.tau(phi, eta), SeminormSpec.tau1(phi, y), SeminormSpec.tau2(phi)):
        px = spec(x)
        assert px >= 0
        assert spec(x * lam) == pytest.approx(abs(lam) * px, abs=1e-10, rel=1e-12)
        assert spec(x + y) <= px + spec(y) + 1e-9


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_comparison_bounds(seed):
    rng = np.random.default_rng(seed)
    desc, phi, x, y, eta = random_instance(rng)
    N = x.truncation
    p = SeminormSpec.tau(phi, eta)(x)
    tau2 = p_tau2(phi, x)
    assert p * p <= tau2 * tau2 + 1e-9
    vals = np.abs([phi(desc.element(e.conj().T @ s)) for e, s in zip(eta, x.entries)])
    assert vals.max() <= p + 1e-10
    assert p <= math.sqrt(N) * vals.max() + 1e-10
    # truncation density: tails shrink to zero
    prof = [SeminormSpec.tau(phi, eta)(x - coord_project(k, x)) for k in range(N + 1)]
    assert all(b <= a + 1e-12 for a, b in zip(prof, prof[1:]))
    assert prof[-1] == 0.0

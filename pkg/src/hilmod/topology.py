"""Seminorms generating the weak PF topology, the strong PF topology, and the
intermediate topology tau, plus the generalized orthogonal-family seminorms.

Each seminorm here has the form ``p(x) = ||L(x)||_2`` for a complex-linear map
``L`` from A^N into some C^m.  :meth:`SeminormSpec.features` exposes ``L`` so
that nets and probes can work on plain complex vectors; the ``p_*``
functions evaluate the defining formulas directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraDescriptor, AlgebraElement
from .errors import ConfigError, DegenerateWeightsError, DimensionError, DomainError
from .module import ModuleVector, inner_product_array, matrix_from_json, vector_from_json
from .states import NormalState, state_from_json

ADMISSIBLE_TOL = 1e-9
ZERO_WEIGHT = 1e-14
ORTHOGONAL_TOL = 1e-10

TAU1, TAU, TAU2, GENERALIZED = "tau1", "tau", "tau2", "generalized"
KINDS = (TAU1, TAU, TAU2, GENERALIZED)


def _stack(seq, descriptor: AlgebraDescriptor | None = None) -> np.ndarray:
    if isinstance(seq, ModuleVector):
        return seq.entries
    if isinstance(seq, np.ndarray):
        return seq
    return np.stack([s.entries if isinstance(s, AlgebraElement) else np.asarray(s, dtype=complex) for s in seq])


def weight_masses(phi: NormalState, eta) -> np.ndarray:
    """phi(eta_j^* eta_j) for every slot."""
    eta = _stack(eta)
    return phi.expect(np.swapaxes(eta.conj(), -1, -2) @ eta).real


def is_admissible(phi: NormalState, eta) -> bool:
    """True iff max_j phi(eta_j^* eta_j) is 1 up to ``ADMISSIBLE_TOL``."""
    masses = weight_masses(phi, eta)
    if masses.size == 0:
        return False
    return abs(float(masses.max()) - 1.0) <= ADMISSIBLE_TOL


def normalize_admissible(phi: NormalState, eta) -> np.ndarray:
    """zeta_j = eta_j / phi(eta_j^* eta_j)^(1/2), or 0 where that mass is null."""
    arr = _stack(eta)
    masses = weight_masses(phi, arr)
    live = masses > ZERO_WEIGHT
    if not live.any():
        raise DegenerateWeightsError("every weight slot is null under the state")
    out = np.zeros_like(arr, dtype=complex)
    out[live] = arr[live] / np.sqrt(masses[live])[:, None, None]
    return out


@dataclass(frozen=True, eq=False)
class AdmissibleWeights:
    phi: NormalState
    eta: np.ndarray

    def __post_init__(self):
        eta = np.array(_stack(self.eta), dtype=complex)
        self.phi.descriptor.check_entries(eta)
        if eta.ndim != 3:
            raise DimensionError(f"weights must be a sequence of matrices, got shape {eta.shape}")
        if not is_admissible(self.phi, eta):
            m = weight_masses(self.phi, eta)
            raise DomainError(f"weights are not admissible: max phi(eta^* eta) = {m.max() if m.size else None}")
        eta.flags.writeable = False
        object.__setattr__(self, "eta", eta)


@dataclass(frozen=True, eq=False)
class SeminormSpec:
    """One seminorm of a family.

    ``kind`` selects the data that is used: ``y`` (a module vector) for
    ``tau1``, ``weights`` for ``tau``, nothing extra for ``tau2`` and an
    orthogonal ``family`` of module vectors for ``generalized``.
    """

    kind: str
    phi: NormalState
    y: ModuleVector | None = None
    weights: AdmissibleWeights | None = None
    family: tuple[ModuleVector, ...] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown seminorm kind {self.kind!r}")
        if self.kind == TAU1 and self.y is None:
            raise DomainError("tau1 seminorm needs a vector y")
        if self.kind == TAU and self.weights is None:
            raise DomainError("tau seminorm needs admissible weights")
        if self.kind == GENERALIZED:
            if not self.family:
                raise DomainError("generalized seminorm needs a nonempty family")
            object.__setattr__(self, "family", tuple(self.family))
            check_orthogonal_family(self.phi, self.family)

    @classmethod
    def tau(cls, phi: NormalState, eta) -> SeminormSpec:
        return cls(TAU, phi, weights=eta if isinstance(eta, AdmissibleWeights) else AdmissibleWeights(phi, eta))

    @classmethod
    def tau1(cls, phi: NormalState, y: ModuleVector) -> SeminormSpec:
        return cls(TAU1, phi, y=y)

    @classmethod
    def tau2(cls, phi: NormalState) -> SeminormSpec:
        return cls(TAU2, phi)

    @classmethod
    def generalized(cls, phi: NormalState, family) -> SeminormSpec:
        return cls(GENERALIZED, phi, family=tuple(family))

    @property
    def truncation(self) -> int | None:
        if self.kind == TAU:
            return self.weights.eta.shape[0]
        if self.kind == TAU1:
            return self.y.truncation
        if self.kind == GENERALIZED:
            return self.family[0].truncation
        return None

    def __call__(self, x: ModuleVector) -> float:
        return seminorm(self, x)

    def distance(self, x: ModuleVector, y: ModuleVector) -> float:
        return seminorm(self, x - y)

    def features(self, entries: np.ndarray) -> np.ndarray:
        """The linear map ``L`` on a stack ``(..., N, n, n)``; ``p = ||L||_2``."""
        entries = np.asarray(entries)
        N = self.truncation
        if N is not None and entries.shape[-3] != N:
            raise DimensionError(f"seminorm is defined on truncation {N}, got {entries.shape[-3]}")
        rho = self.phi.rho
        if self.kind == TAU2:
            flat = entries @ self.phi.sqrt_rho
            return flat.reshape(flat.shape[:-3] + (-1,))
        if self.kind == TAU:
            g = functional_kernel(rho, self.weights.eta)
            return np.einsum("jab,...jab->...j", g, entries)
        if self.kind == TAU1:
            g = functional_kernel(rho, self.y.entries)
            return np.einsum("jab,...jab->...", g, entries)[..., None]
        g = functional_kernel(rho, np.stack([z.entries for z in self.family]))
        return np.einsum("ijab,...jab->...i", g, entries)


def functional_kernel(rho: np.ndarray, eta: np.ndarray) -> np.ndarray:
    # phi(eta^* xi) = trace(rho eta^* xi) = sum_ab (rho eta^*)^T_ab xi_ab
    return np.swapaxes(rho @ np.swapaxes(eta.conj(), -1, -2), -1, -2)


def check_orthogonal_family(phi: NormalState, family) -> None:
    zs = np.stack([z.entries for z in family])
    for z in family[1:]:
        if z.truncation != family[0].truncation or z.descriptor != family[0].descriptor:
            raise DimensionError("family members must share truncation and descriptor")
    grams = np.einsum("ajki,bjkl->abil", zs.conj(), zs)
    m = len(family)
    off = grams[~np.eye(m, dtype=bool)]
    if off.size and np.max(np.abs(off)) > ORTHOGONAL_TOL:
        raise DomainError("generalized seminorm family is not pairwise orthogonal")
    masses = phi.expect(grams[np.arange(m), np.arange(m)]).real
    if abs(float(masses.max()) - 1.0) > ADMISSIBLE_TOL:
        raise DomainError(f"family is not admissible: max phi(<z_j, z_j>) = {masses.max()}")


def _root_sum_squares(values: np.ndarray) -> float:
    return math.sqrt(math.fsum(np.abs(values) ** 2))


def _check_trunc(N: int, x: ModuleVector) -> None:
    if x.truncation != N:
        raise DimensionError(f"truncation mismatch: seminorm on {N}, vector on {x.truncation}")


def weighted_values(phi: NormalState, eta, entries: np.ndarray) -> np.ndarray:
    """phi(eta_j^* xi_j) slot by slot; ``entries`` may be a stack ``(..., N, n, n)``."""
    eta = _stack(eta)
    return phi.expect(np.swapaxes(eta.conj(), -1, -2) @ entries)


def p_weighted(phi: NormalState, eta, x: ModuleVector) -> float:
    """The tau formula without the admissibility requirement on ``eta``.

    Positive multiples of tau seminorms (e.g. weights taken from an arbitrary
    vector z) are continuous in tau and show up in separation arguments.
    """
    eta = _stack(eta)
    _check_trunc(eta.shape[0], x)
    return _root_sum_squares(weighted_values(phi, eta, x.entries))


def p_tau(spec: SeminormSpec, x: ModuleVector) -> float:
    """sqrt(sum_j |phi(eta_j^* xi_j)|^2)."""
    return p_weighted(spec.phi, spec.weights.eta, x)


def p_tau1(phi: NormalState, y: ModuleVector, x: ModuleVector) -> float:
    """|phi(<y, x>)|."""
    _check_trunc(y.truncation, x)
    return float(abs(phi.expect(inner_product_array(y.entries, x.entries))))


def p_tau2(phi: NormalState, x: ModuleVector) -> float:
    """phi(<x, x>)^(1/2)."""
    val = phi.expect(inner_product_array(x.entries, x.entries)).real
    return math.sqrt(max(float(val), 0.0))


def p_generalized(spec: SeminormSpec, x: ModuleVector) -> float:
    """sqrt(sum_j |phi(<z_j, x>)|^2) over the orthogonal family."""
    _check_trunc(spec.family[0].truncation, x)
    zs = np.stack([z.entries for z in spec.family])
    vals = spec.phi.expect(inner_product_array(zs, x.entries[None]))
    return _root_sum_squares(vals)


def seminorm(spec: SeminormSpec, x: ModuleVector) -> float:
    if spec.kind == TAU:
        return p_tau(spec, x)
    if spec.kind == TAU1:
        return p_tau1(spec.phi, spec.y, x)
    if spec.kind == TAU2:
        return p_tau2(spec.phi, x)
    return p_generalized(spec, x)


def features_norm(features: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.abs(features) ** 2, axis=-1))


def ones_weights(descriptor: AlgebraDescriptor, truncation: int) -> np.ndarray:
    """eta = (1, 1, ...), admissible for every state."""
    return np.broadcast_to(np.eye(descriptor.dim, dtype=complex), (truncation, descriptor.dim, descriptor.dim)).copy()


# -- JSON ---------------------------------------------------------------------

def _weights_from_json(data, descriptor: AlgebraDescriptor, truncation: int) -> np.ndarray:
    n = descriptor.dim
    if data is None or data == "ones":
        return ones_weights(descriptor, truncation)
    if not isinstance(data, list) or len(data) != truncation:
        raise ConfigError(f"expected {truncation} weights", field="weights")
    out = np.zeros((truncation, n, n), dtype=complex)
    for j, w in enumerate(data):
        if isinstance(w, (int, float)):
            out[j] = w * np.eye(n)
        elif isinstance(w, list) and len(w) == 2 and all(isinstance(t, (int, float)) for t in w):
            out[j] = complex(w[0], w[1]) * np.eye(n)
        else:
            out[j] = matrix_from_json(w)
    return out


def spec_from_json(data: dict, descriptor: AlgebraDescriptor, truncation: int) -> SeminormSpec:
    """Build a seminorm from ``{"kind", "state", "weights", "family"}``.

    ``weights`` may be ``"ones"``, a list of scalars (multiples of the unit),
    or a list of matrices; for ``tau1`` the weights list is the vector ``y``.
    With ``"normalize": true`` the weights are passed through
    :func:`normalize_admissible` first.
    """
    kind = data.get("kind", TAU)
    if kind not in KINDS:
        raise ConfigError(f"unknown seminorm kind {kind!r}", field="seminorm.kind")
    phi = state_from_json(data.get("state", "uniform"), descriptor)
    try:
        if kind == TAU2:
            return SeminormSpec.tau2(phi)
        if kind == GENERALIZED:
            fam = [vector_from_json(v, descriptor) for v in data.get("family", [])]
            return SeminormSpec.generalized(phi, fam)
        w = _weights_from_json(data.get("weights"), descriptor, truncation)
        if kind == TAU1:
            return SeminormSpec.tau1(phi, ModuleVector(descriptor, w))
        if data.get("normalize"):
            w = normalize_admissible(phi, w)
        return SeminormSpec.tau(phi, w)
    except DomainError as exc:
        raise ConfigError(str(exc), field="seminorm") from exc


def spec_to_json(spec: SeminormSpec) -> dict:
    from .module import matrix_to_json, vector_to_json

    out = {"kind": spec.kind, "state": spec.phi.to_json()}
    if spec.kind == TAU:
        out["weights"] = [matrix_to_json(m) for m in spec.weights.eta]
    elif spec.kind == TAU1:
        out["weights"] = vector_to_json(spec.y)
    elif spec.kind == GENERALIZED:
        out["family"] = [vector_to_json(z) for z in spec.family]
    return out

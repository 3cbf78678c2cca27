"""Normal states on M_n(C) as density matrices.

Every normal state on a matrix algebra is ``a -> trace(rho a)`` for a unique
density matrix ``rho``.  On the diagonal (commutative) algebra ``rho`` is a
diagonal probability vector.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraDescriptor, AlgebraElement, frozen_array, top_eigenpair
from .errors import ConfigError, DimensionError, DomainError

STATE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class NormalState:
    descriptor: AlgebraDescriptor
    rho: np.ndarray

    def __post_init__(self):
        rho = frozen_array(self.rho)
        self.descriptor.check_entries(rho)
        if rho.ndim != 2:
            raise DimensionError(f"density matrix must be square, got shape {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > STATE_TOL:
            raise DomainError("density matrix is not Hermitian")
        evals = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
        if evals[0] < -STATE_TOL:
            raise DomainError(f"density matrix is not positive (min eigenvalue {evals[0]:.3e})")
        tr = np.trace(rho)
        if abs(tr - 1.0) > STATE_TOL:
            raise DomainError(f"density matrix must have unit trace, got {tr}")
        object.__setattr__(self, "rho", rho)

    def __call__(self, a: AlgebraElement) -> complex:
        return evaluate(self, a)

    def expect(self, arr: np.ndarray) -> np.ndarray:
        """trace(rho m) for every matrix in a stack ``(..., n, n)``."""
        return np.einsum("ij,...ji->...", self.rho, arr)

    @property
    def sqrt_rho(self) -> np.ndarray:
        vals, vecs = np.linalg.eigh(self.rho)
        return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T

    def to_json(self) -> list:
        from .module import matrix_to_json

        return matrix_to_json(self.rho)


def evaluate(phi: NormalState, a: AlgebraElement) -> complex:
    """phi(a) = trace(rho a)."""
    if phi.descriptor != a.descriptor:
        raise DimensionError(f"descriptor mismatch: {phi.descriptor} vs {a.descriptor}")
    return complex(np.einsum("ij,ji->", phi.rho, a.entries))


def vector_state(psi, descriptor: AlgebraDescriptor | None = None) -> NormalState:
    """phi(a) = <a psi, psi> for a unit vector ``psi``."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    npsi = np.linalg.norm(psi)
    if abs(npsi - 1.0) > 1e-10:
        raise DomainError(f"vector state needs a unit vector (norm {npsi!r})")
    psi = psi / npsi
    if descriptor is None:
        descriptor = AlgebraDescriptor(psi.shape[0])
    if descriptor.dim != psi.shape[0]:
        raise DimensionError(f"vector of length {psi.shape[0]} for algebra of dim {descriptor.dim}")
    rho = np.outer(psi, psi.conj())
    rho = (rho + rho.conj().T) / 2
    return NormalState(descriptor, rho)


def diagonal_state(descriptor: AlgebraDescriptor, weights) -> NormalState:
    w = np.asarray(weights, dtype=float)
    if w.shape != (descriptor.dim,):
        raise DimensionError(f"expected {descriptor.dim} weights, got {w.shape}")
    if np.any(w < 0) or not np.isfinite(w).all():
        raise DomainError("state weights must be finite and non-negative")
    total = w.sum()
    if total <= 0:
        raise DomainError("state weights must not all vanish")
    return NormalState(descriptor, np.diag(w / total))


def norm_attaining_state(a: AlgebraElement) -> NormalState:
    """Vector state at a top eigenvector of a positive element, so phi(a) = ||a||."""
    desc = a.descriptor
    if desc.commutative:
        d = np.diagonal(a.entries)
        if np.max(np.abs(d.imag)) > 1e-10 or np.min(d.real) < -1e-10 * max(1.0, np.max(np.abs(d))):
            raise DomainError("element is not positive")
        psi = np.zeros(desc.dim)
        psi[int(np.argmax(d.real))] = 1.0
        return vector_state(psi, desc)
    _, h = top_eigenpair(a)
    return vector_state(h, desc)


def random_state(descriptor: AlgebraDescriptor, rng: np.random.Generator) -> NormalState:
    """A random faithful-ish density matrix (Wishart, normalised)."""
    n = descriptor.dim
    if descriptor.commutative:
        return diagonal_state(descriptor, rng.exponential(size=n))
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return NormalState(descriptor, rho / np.trace(rho).real)


def geometric_weights(count: int, r: float) -> np.ndarray:
    """Probability weights with tail mass sum_{j>k} w_j = r^k for k < count.

    ``w_j = (1 - r) r^(j-1)`` for ``j < count`` and the remaining mass
    ``r^(count-1)`` sits on the last slot, i.e. the geometric distribution
    with everything beyond the truncation collapsed onto the final index.
    """
    if not 0 < r < 1:
        raise ConfigError(f"geometric ratio must lie in (0, 1), got {r}", field="weights")
    if count < 1:
        raise ConfigError("need at least one weight", field="weights")
    j = np.arange(1, count + 1, dtype=float)
    w = (1 - r) * r ** (j - 1)
    w[-1] = r ** (count - 1)
    return w


def state_from_preset(name: str, descriptor: AlgebraDescriptor) -> NormalState:
    """Named presets: ``uniform``, ``vector:k`` (1-based), ``geometric:r``."""
    n = descriptor.dim
    kind, _, arg = name.partition(":")
    if kind == "uniform":
        return NormalState(descriptor, np.eye(n) / n)
    if kind == "vector":
        try:
            k = int(arg)
        except ValueError:
            raise ConfigError(f"bad vector preset {name!r}", field="state") from None
        if not 1 <= k <= n:
            raise ConfigError(f"vector index {k} outside 1..{n}", field="state")
        rho = np.zeros((n, n))
        rho[k - 1, k - 1] = 1.0
        return NormalState(descriptor, rho)
    if kind == "geometric":
        try:
            r = float(arg)
        except ValueError:
            raise ConfigError(f"bad geometric preset {name!r}", field="state") from None
        return NormalState(descriptor, np.diag(geometric_weights(n, r)))
    raise ConfigError(f"unknown state preset {name!r}", field="state")


def state_from_json(data, descriptor: AlgebraDescriptor) -> NormalState:
    """Accept either a preset name or a matrix in the AlgebraElement JSON format."""
    if isinstance(data, str):
        stripped = data.strip()
        if stripped.startswith("["):
            data = json.loads(stripped)
        else:
            return state_from_preset(stripped, descriptor)
    from .module import matrix_from_json

    rho = matrix_from_json(data)
    if rho.shape != (descriptor.dim, descriptor.dim):
        raise ConfigError(f"state matrix has shape {rho.shape}, algebra dim is {descriptor.dim}", field="state")
    try:
        return NormalState(descriptor, rho)
    except DomainError as exc:
        raise ConfigError(str(exc), field="state") from exc

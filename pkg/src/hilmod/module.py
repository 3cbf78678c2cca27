"""The truncated standard Hilbert module A^N inside l^2(A).

A :class:`ModuleVector` stores its N coordinates as one ``(N, n, n)`` array.
Coordinates are numbered from 1 in the public API (``basis_vector(1, a)`` is
``e_1 a``) because coordinate projections ``P_k`` keep "the first k slots".
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from numbers import Number

import numpy as np

from .algebra import AlgebraDescriptor, AlgebraElement, frozen_array, spectral_norm
from .errors import DimensionError, DomainError


@dataclass(frozen=True, eq=False)
class ModuleVector:
    descriptor: AlgebraDescriptor
    entries: np.ndarray

    def __post_init__(self):
        arr = frozen_array(self.entries)
        if arr.ndim != 3 or arr.shape[0] < 1:
            raise DimensionError(f"module vector entries must have shape (N, n, n) with N >= 1, got {arr.shape}")
        self.descriptor.check_entries(arr)
        object.__setattr__(self, "entries", arr)

    @property
    def truncation(self) -> int:
        return self.entries.shape[0]

    def entry(self, j: int) -> AlgebraElement:
        """The 1-based coordinate ``xi_j``."""
        if not 1 <= j <= self.truncation:
            raise IndexError(f"coordinate {j} outside 1..{self.truncation}")
        return AlgebraElement(self.descriptor, self.entries[j - 1])

    def __add__(self, other: ModuleVector) -> ModuleVector:
        _check_pair(self, other)
        return ModuleVector(self.descriptor, self.entries + other.entries)

    def __sub__(self, other: ModuleVector) -> ModuleVector:
        _check_pair(self, other)
        return ModuleVector(self.descriptor, self.entries - other.entries)

    def __neg__(self) -> ModuleVector:
        return ModuleVector(self.descriptor, -self.entries)

    def __mul__(self, other):
        # x * a is the right module action; x * c scales by a complex number
        if isinstance(other, AlgebraElement):
            return right_mul(self, other)
        if isinstance(other, Number):
            return ModuleVector(self.descriptor, other * self.entries)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Number):
            return ModuleVector(self.descriptor, other * self.entries)
        return NotImplemented

    def __repr__(self):
        return f"ModuleVector(N={self.truncation}, dim={self.descriptor.dim})"


def _check_pair(x: ModuleVector, y: ModuleVector) -> None:
    if x.descriptor != y.descriptor:
        raise DimensionError(f"descriptor mismatch: {x.descriptor} vs {y.descriptor}")
    if x.truncation != y.truncation:
        raise DimensionError(f"truncation mismatch: {x.truncation} vs {y.truncation}")


def zeros(descriptor: AlgebraDescriptor, truncation: int) -> ModuleVector:
    n = descriptor.dim
    return ModuleVector(descriptor, np.zeros((truncation, n, n)))


def from_entries(entries: list[AlgebraElement]) -> ModuleVector:
    if not entries:
        raise DimensionError("a module vector needs at least one coordinate")
    desc = entries[0].descriptor
    for e in entries[1:]:
        if e.descriptor != desc:
            raise DimensionError("all coordinates must share one algebra descriptor")
    return ModuleVector(desc, np.stack([e.entries for e in entries]))


def inner_product_array(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """sum_j x_j^* y_j for stacks of shape ``(..., N, n, n)``."""
    return np.einsum("...jki,...jkl->...il", x.conj(), y)


def inner_product(x: ModuleVector, y: ModuleVector) -> AlgebraElement:
    """A-valued inner product <x, y> = sum_j xi_j^* eta_j (conjugate-linear in x)."""
    _check_pair(x, y)
    return AlgebraElement(x.descriptor, inner_product_array(x.entries, y.entries))


def module_norm(x: ModuleVector) -> float:
    """||x|| = ||<x, x>||^(1/2).

    Computed as the spectral norm of the stacked ``(N n) x n`` column of
    coordinates, which equals the square root of the largest eigenvalue of
    <x, x> without squaring the condition number.
    """
    n = x.descriptor.dim
    return spectral_norm(x.entries.reshape(x.truncation * n, n))


def module_norms(batch: np.ndarray) -> np.ndarray:
    """Module norms of a stack ``(S, N, n, n)`` of vectors."""
    s, N, n, _ = batch.shape
    if s == 0:
        return np.zeros(0)
    return np.linalg.svd(batch.reshape(s, N * n, n), compute_uv=False)[:, 0]


def basis_vector(j: int, a: AlgebraElement, truncation: int) -> ModuleVector:
    """``e_j a``: the element ``a`` in coordinate ``j`` (1-based), zeros elsewhere."""
    if not 1 <= j <= truncation:
        raise IndexError(f"coordinate {j} outside 1..{truncation}")
    n = a.descriptor.dim
    arr = np.zeros((truncation, n, n), dtype=complex)
    arr[j - 1] = a.entries
    return ModuleVector(a.descriptor, arr)


def coord_project(k: int, x: ModuleVector) -> ModuleVector:
    """P_k x: keep coordinates 1..k, zero the rest (k = 0 gives the zero vector)."""
    if not 0 <= k <= x.truncation:
        raise IndexError(f"projection index {k} outside 0..{x.truncation}")
    arr = np.array(x.entries)
    arr[k:] = 0
    return ModuleVector(x.descriptor, arr)


def right_mul(x: ModuleVector, a: AlgebraElement) -> ModuleVector:
    """Right module action (xi_j a)_j."""
    if x.descriptor != a.descriptor:
        raise DimensionError(f"descriptor mismatch: {x.descriptor} vs {a.descriptor}")
    return ModuleVector(x.descriptor, x.entries @ a.entries)


def flatten_column(x: ModuleVector) -> np.ndarray:
    """Stack the coordinates into an ``(N n) x n`` matrix."""
    n = x.descriptor.dim
    return x.entries.reshape(x.truncation * n, n)


def rank_one_from_unit(v, descriptor: AlgebraDescriptor, truncation: int) -> ModuleVector:
    """Embed a unit vector of C^(nN) as a module vector of norm one.

    Block ``j`` of ``v`` (entries ``j n .. (j+1) n - 1``) becomes the first
    column of coordinate ``j``; the other columns are zero.  Then
    <x, x> = ||v||^2 E_11, and for any block operator ``S`` the norm
    ``||S x||`` equals the Euclidean norm of the flattened ``S`` applied to
    ``v``.  This is how top singular vectors become norm-attaining module
    vectors.
    """
    n = descriptor.dim
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.shape[0] != n * truncation:
        raise DimensionError(f"expected a vector of length {n * truncation}, got {v.shape[0]}")
    nv = np.linalg.norm(v)
    if abs(nv - 1.0) > 1e-10:
        raise DomainError(f"rank_one_from_unit needs a unit vector (norm {nv!r})")
    if descriptor.commutative and n > 1:
        raise DomainError("the first-column embedding is not diagonal; use a full matrix algebra")
    arr = np.zeros((truncation, n, n), dtype=complex)
    arr[:, :, 0] = (v / nv).reshape(truncation, n)
    return ModuleVector(descriptor, arr)


def random_vector(descriptor: AlgebraDescriptor, truncation: int, rng: np.random.Generator) -> ModuleVector:
    """Standard complex Gaussian coordinates (diagonal ones for commutative A)."""
    return ModuleVector(descriptor, gaussian_entries(descriptor, (truncation,), rng))


def gaussian_entries(descriptor: AlgebraDescriptor, shape: tuple, rng: np.random.Generator) -> np.ndarray:
    n = descriptor.dim
    if descriptor.commutative:
        d = rng.standard_normal(shape + (n,)) + 1j * rng.standard_normal(shape + (n,))
        out = np.zeros(shape + (n, n), dtype=complex)
        idx = np.arange(n)
        out[..., idx, idx] = d
        return out
    return rng.standard_normal(shape + (n, n)) + 1j * rng.standard_normal(shape + (n, n))


# -- JSON ---------------------------------------------------------------------

def matrix_to_json(m: np.ndarray) -> list:
    """Row-major nested list of ``[re, im]`` pairs."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def matrix_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 2:
        # flat row-major list of n*n pairs
        n = int(round(np.sqrt(arr.shape[0])))
        if n * n != arr.shape[0]:
            raise DimensionError(f"flat matrix of {arr.shape[0]} entries is not square")
        arr = arr.reshape(n, n, 2)
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"matrix JSON must be an n x n array of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def vector_to_json(x: ModuleVector) -> list:
    return [matrix_to_json(m) for m in x.entries]


def vector_from_json(data, descriptor: AlgebraDescriptor | None = None) -> ModuleVector:
    if isinstance(data, str):
        data = json.loads(data)
    mats = [matrix_from_json(m) for m in data]
    if not mats:
        raise DimensionError("a module vector needs at least one coordinate")
    if descriptor is None:
        descriptor = AlgebraDescriptor(mats[0].shape[0])
    return ModuleVector(descriptor, np.stack(mats))

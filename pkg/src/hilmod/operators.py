"""Adjointable operators on A^N, stored as N x N block matrices over A.

``(T x)_i = sum_j t_ij xi_j``.  Flattening the blocks gives an ``(N n) x (N n)``
complex matrix whose spectral norm is the C*-norm of ``T`` in B^a(A^N).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import POWER_TOL, AlgebraDescriptor, AlgebraElement, frozen_array, spectral_norm
from .errors import ConfigError, DimensionError
from .module import ModuleVector, matrix_from_json, matrix_to_json


@dataclass(frozen=True, eq=False)
class ModuleOperator:
    """Block operator with a provenance ``tag``.

    Tags: ``generic``, ``identity``, ``theta``, ``finite_rank:<count>``,
    ``proj:<k>``, ``diagonal``.
    """

    descriptor: AlgebraDescriptor
    blocks: np.ndarray
    tag: str = "generic"

    def __post_init__(self):
        b = frozen_array(self.blocks)
        if b.ndim != 4 or b.shape[0] != b.shape[1] or b.shape[0] < 1:
            raise DimensionError(f"blocks must have shape (N, N, n, n), got {b.shape}")
        self.descriptor.check_entries(b)
        object.__setattr__(self, "blocks", b)

    @property
    def truncation(self) -> int:
        return self.blocks.shape[0]

    def block(self, i: int, j: int) -> AlgebraElement:
        """Block t_ij with 1-based indices."""
        return AlgebraElement(self.descriptor, self.blocks[i - 1, j - 1])

    def __call__(self, x: ModuleVector) -> ModuleVector:
        return apply(self, x)

    def __matmul__(self, other: ModuleOperator) -> ModuleOperator:
        return compose(self, other)

    def __add__(self, other: ModuleOperator) -> ModuleOperator:
        return lincomb([(1.0, self), (1.0, other)])

    def __sub__(self, other: ModuleOperator) -> ModuleOperator:
        return lincomb([(1.0, self), (-1.0, other)])

    def __rmul__(self, c) -> ModuleOperator:
        return lincomb([(c, self)])

    @property
    def H(self) -> ModuleOperator:
        return adjoint_op(self)

    def flatten(self) -> np.ndarray:
        N, n = self.truncation, self.descriptor.dim
        return self.blocks.transpose(0, 2, 1, 3).reshape(N * n, N * n)

    def __repr__(self):
        return f"ModuleOperator(N={self.truncation}, dim={self.descriptor.dim}, tag={self.tag!r})"


def _check_vec(T: ModuleOperator, x: ModuleVector) -> None:
    if T.descriptor != x.descriptor or T.truncation != x.truncation:
        raise DimensionError(
            f"operator on ({T.truncation}, {T.descriptor}) applied to vector on ({x.truncation}, {x.descriptor})"
        )


def _check_ops(T: ModuleOperator, S: ModuleOperator) -> None:
    if T.descriptor != S.descriptor or T.truncation != S.truncation:
        raise DimensionError("operators act on different modules")


def _unflatten(flat: np.ndarray, N: int, n: int) -> np.ndarray:
    return flat.reshape(N, n, N, n).transpose(0, 2, 1, 3)


def apply(T: ModuleOperator, x: ModuleVector) -> ModuleVector:
    _check_vec(T, x)
    N, n = T.truncation, T.descriptor.dim
    return ModuleVector(x.descriptor, (T.flatten() @ x.entries.reshape(N * n, n)).reshape(N, n, n))


def apply_batch(T: ModuleOperator, batch: np.ndarray) -> np.ndarray:
    """Apply ``T`` to a stack ``(S, N, n, n)`` of vectors."""
    N, n = T.truncation, T.descriptor.dim
    s = batch.shape[0]
    cols = batch.reshape(s, N * n, n).transpose(1, 0, 2).reshape(N * n, s * n)
    return (T.flatten() @ cols).reshape(N * n, s, n).transpose(1, 0, 2).reshape(s, N, n, n)


def adjoint_op(T: ModuleOperator) -> ModuleOperator:
    """(T^*)_ji = t_ij^*."""
    tag = T.tag if T.tag.startswith(("proj:", "identity")) else "generic"
    return ModuleOperator(T.descriptor, T.blocks.transpose(1, 0, 3, 2).conj(), tag)


def compose(T: ModuleOperator, S: ModuleOperator) -> ModuleOperator:
    _check_ops(T, S)
    return ModuleOperator(T.descriptor, _unflatten(T.flatten() @ S.flatten(), T.truncation, T.descriptor.dim))


def lincomb(terms) -> ModuleOperator:
    terms = list(terms)
    if not terms:
        raise DimensionError("lincomb needs at least one term")
    first = terms[0][1]
    acc = np.zeros(first.blocks.shape, dtype=complex)
    for c, T in terms:
        _check_ops(first, T)
        acc = acc + c * T.blocks
    return ModuleOperator(first.descriptor, acc)


def identity(descriptor: AlgebraDescriptor, truncation: int) -> ModuleOperator:
    return coordinate_projection(truncation, descriptor, truncation, tag="identity")


def zero_operator(descriptor: AlgebraDescriptor, truncation: int) -> ModuleOperator:
    n = descriptor.dim
    return ModuleOperator(descriptor, np.zeros((truncation, truncation, n, n)), "generic")


def coordinate_projection(k: int, descriptor: AlgebraDescriptor, truncation: int, tag: str | None = None) -> ModuleOperator:
    """P_k: unit blocks on the diagonal for slots 1..k, zeros elsewhere."""
    if not 0 <= k <= truncation:
        raise IndexError(f"projection index {k} outside 0..{truncation}")
    n = descriptor.dim
    b = np.zeros((truncation, truncation, n, n), dtype=complex)
    idx = np.arange(k)
    b[idx, idx] = np.eye(n)
    return ModuleOperator(descriptor, b, tag or f"proj:{k}")


def theta(y: ModuleVector, z: ModuleVector) -> ModuleOperator:
    """Theta_{y,z}: x -> z <y, x>, with blocks t_ij = zeta_i eta_j^*."""
    if y.descriptor != z.descriptor or y.truncation != z.truncation:
        raise DimensionError("theta needs y and z in the same module")
    b = np.einsum("iab,jcb->ijac", z.entries, y.entries.conj())
    return ModuleOperator(y.descriptor, b, "theta")


def finite_rank(pairs) -> ModuleOperator:
    """sum of Theta_{y,z} over ``(y, z)`` pairs (or ``(c, y, z)`` with scalar c)."""
    pairs = list(pairs)
    if not pairs:
        raise DimensionError("finite_rank needs at least one pair")
    terms = []
    for p in pairs:
        c, y, z = p if len(p) == 3 else (1.0, *p)
        terms.append((c, theta(y, z)))
    T = lincomb(terms)
    return ModuleOperator(T.descriptor, T.blocks, f"finite_rank:{len(pairs)}")


def diagonal_multiplier(a_list) -> ModuleOperator:
    """x -> (a_1 xi_1, a_2 xi_2, ...)."""
    a_list = list(a_list)
    if not a_list:
        raise DimensionError("diagonal_multiplier needs at least one element")
    desc = a_list[0].descriptor
    N, n = len(a_list), desc.dim
    b = np.zeros((N, N, n, n), dtype=complex)
    for j, a in enumerate(a_list):
        if a.descriptor != desc:
            raise DimensionError("all multipliers must share one descriptor")
        b[j, j] = a.entries
    return ModuleOperator(desc, b, "diagonal")


def operator_norm(T: ModuleOperator, tol: float = POWER_TOL) -> float:
    """C*-norm of ``T``: the largest singular value of the flattened matrix."""
    return spectral_norm(T.flatten(), tol=tol)


def tail_profile(T: ModuleOperator, ks=None, tol: float = POWER_TOL) -> list[float]:
    """k -> ||T - P_k T|| for k in ``ks`` (default 0..N).

    This is the finite surrogate of the "compact" criterion: the profile is
    non-increasing and reaches 0 at k = N for every operator.
    """
    N = T.truncation
    ks = range(N + 1) if ks is None else ks
    out = []
    for k in ks:
        if not 0 <= k <= N:
            raise IndexError(f"projection index {k} outside 0..{N}")
        b = np.array(T.blocks)
        b[:k] = 0  # (I - P_k) T zeroes the first k block rows
        out.append(spectral_norm(ModuleOperator(T.descriptor, b).flatten(), tol=tol))
    return out


def random_operator(descriptor: AlgebraDescriptor, truncation: int, rng: np.random.Generator) -> ModuleOperator:
    from .module import gaussian_entries

    return ModuleOperator(descriptor, gaussian_entries(descriptor, (truncation, truncation), rng))


# -- JSON ---------------------------------------------------------------------

def operator_to_json(T: ModuleOperator) -> dict:
    return {
        "trunc": T.truncation,
        "alg_dim": T.descriptor.dim,
        "commutative": T.descriptor.commutative,
        "blocks": [[matrix_to_json(b) for b in row] for row in T.blocks],
        "tag": T.tag,
    }


def operator_from_json(data: dict) -> ModuleOperator:
    try:
        N, n = int(data["trunc"]), int(data["alg_dim"])
        rows = data["blocks"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"operator JSON is missing a field: {exc}", field="operator") from exc
    desc = AlgebraDescriptor(n, bool(data.get("commutative", False)))
    b = np.array([[matrix_from_json(m) for m in row] for row in rows])
    if b.shape != (N, N, n, n):
        raise ConfigError(f"blocks have shape {b.shape}, expected {(N, N, n, n)}", field="operator.blocks")
    return ModuleOperator(desc, b, data.get("tag", "generic"))

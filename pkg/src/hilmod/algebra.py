"""Finite-dimensional W*-algebras: M_n(C) and its diagonal subalgebra.

Elements are immutable wrappers around complex ``(n, n)`` arrays.  All
functions are pure; randomness only enters through an explicit seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Number

import numpy as np

from .errors import DimensionError, DomainError, NumericError

POWER_TOL = 1e-10
POWER_MAX_ITER = 100_000
PARALLEL_TOL = 1e-14


def frozen_array(values, dtype=complex) -> np.ndarray:
    arr = np.array(values, dtype=dtype)  # always a private copy
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class AlgebraDescriptor:
    """Matrix size ``dim`` and whether elements are restricted to diagonals."""

    dim: int
    commutative: bool = False

    def __post_init__(self):
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 1:
            raise DomainError(f"algebra dimension must be a positive integer, got {self.dim!r}")

    def element(self, entries) -> AlgebraElement:
        return AlgebraElement(self, entries)

    def unit(self) -> AlgebraElement:
        return AlgebraElement(self, np.eye(self.dim))

    def zero(self) -> AlgebraElement:
        return AlgebraElement(self, np.zeros((self.dim, self.dim)))

    def diag(self, values) -> AlgebraElement:
        return AlgebraElement(self, np.diag(np.asarray(values, dtype=complex)))

    def check_entries(self, arr: np.ndarray) -> None:
        """Validate a stack ``(..., n, n)`` of matrices against this descriptor."""
        n = self.dim
        if arr.ndim < 2 or arr.shape[-2:] != (n, n):
            raise DimensionError(f"expected trailing shape ({n}, {n}), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DomainError("algebra elements must have finite entries")
        if self.commutative and n > 1:
            off = arr * (1 - np.eye(n))
            if np.any(off != 0):
                raise DomainError("commutative algebra elements must be diagonal")


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    descriptor: AlgebraDescriptor
    entries: np.ndarray

    def __post_init__(self):
        arr = frozen_array(self.entries)
        self.descriptor.check_entries(arr)
        if arr.ndim != 2:
            raise DimensionError(f"an algebra element is a single matrix, got shape {arr.shape}")
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.descriptor.dim

    def __add__(self, other: AlgebraElement) -> AlgebraElement:
        return add(self, other)

    def __sub__(self, other: AlgebraElement) -> AlgebraElement:
        _check_same(self, other)
        return AlgebraElement(self.descriptor, self.entries - other.entries)

    def __neg__(self) -> AlgebraElement:
        return scale(-1, self)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return multiply(self, other)
        if isinstance(other, Number):
            return scale(other, self)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Number):
            return scale(other, self)
        return NotImplemented

    @property
    def H(self) -> AlgebraElement:
        return adjoint(self)

    def allclose(self, other: AlgebraElement, atol: float = 1e-12) -> bool:
        _check_same(self, other)
        return bool(np.max(np.abs(self.entries - other.entries), initial=0.0) <= atol)

    def __repr__(self):
        return f"AlgebraElement(dim={self.dim}, entries={self.entries.tolist()})"


def _check_same(a: AlgebraElement, b: AlgebraElement) -> None:
    if a.descriptor != b.descriptor:
        raise DimensionError(f"descriptor mismatch: {a.descriptor} vs {b.descriptor}")


def add(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    _check_same(a, b)
    return AlgebraElement(a.descriptor, a.entries + b.entries)


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    _check_same(a, b)
    if a.descriptor.commutative:
        return AlgebraElement(a.descriptor, np.diag(_diag_product(np.diagonal(a.entries), np.diagonal(b.entries))))
    return AlgebraElement(a.descriptor, a.entries @ b.entries)


def _diag_product(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # separate real ufuncs so that x*y == y*x bit for bit (no fused multiply-add)
    xr, xi, yr, yi = x.real, x.imag, y.real, y.imag
    return (xr * yr - xi * yi) + 1j * (xr * yi + xi * yr)


def adjoint(a: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(a.descriptor, a.entries.conj().T)


def scale(c: complex, a: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(a.descriptor, c * a.entries)


def unit(descriptor: AlgebraDescriptor) -> AlgebraElement:
    return descriptor.unit()


def zero(descriptor: AlgebraDescriptor) -> AlgebraElement:
    return descriptor.zero()


def _as_array(a) -> np.ndarray:
    return a.entries if isinstance(a, AlgebraElement) else np.asarray(a, dtype=complex)


def power_norm(m: np.ndarray, tol: float = POWER_TOL, max_iter: int = POWER_MAX_ITER) -> float:
    """Largest singular value of ``m`` by power iteration on ``m^* m``.

    Used as the fallback when LAPACK's SVD does not converge.  Raises
    :class:`NumericError` carrying the last residual if the iteration cap is hit.
    """
    m = np.asarray(m, dtype=complex)
    if m.size == 0 or not np.any(m):
        return 0.0
    gram = m.conj().T @ m
    rng = np.random.default_rng(0)
    v = rng.standard_normal(gram.shape[0]) + 1j * rng.standard_normal(gram.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    residual = np.inf
    for _ in range(max_iter):
        w = gram @ v
        lam_new = float(np.real(np.vdot(v, w)))
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        residual = float(np.linalg.norm(w - lam_new * v))
        v = w / nw
        if abs(lam_new - lam) <= tol * max(1.0, lam_new) and residual <= np.sqrt(tol) * max(1.0, lam_new):
            return float(np.sqrt(max(lam_new, 0.0)))
        lam = lam_new
    raise NumericError(f"power iteration did not converge in {max_iter} steps", residual=residual)


def spectral_norm(m: np.ndarray, tol: float = POWER_TOL) -> float:
    """Operator 2-norm of a complex matrix (LAPACK SVD, power iteration fallback)."""
    m = np.asarray(m, dtype=complex)
    if m.size == 0:
        return 0.0
    try:
        return float(np.linalg.svd(m, compute_uv=False)[0])
    except np.linalg.LinAlgError:
        return power_norm(m, tol=tol)


def operator_norm_alg(a: AlgebraElement, tol: float = POWER_TOL) -> float:
    """C*-norm of an algebra element, i.e. its largest singular value."""
    return spectral_norm(_as_array(a), tol=tol)


def hermitian_part_check(m: np.ndarray, tol: float) -> None:
    scale_ = max(1.0, float(np.max(np.abs(m), initial=0.0)))
    if np.max(np.abs(m - m.conj().T), initial=0.0) > tol * scale_:
        raise DomainError("matrix is not Hermitian")


def top_eigenpair(a: AlgebraElement, tol: float = POWER_TOL) -> tuple[float, np.ndarray]:
    """Largest eigenvalue of a positive element together with a unit eigenvector.

    Raises
    ------
    DomainError
        If ``a`` is not Hermitian or has an eigenvalue below ``-tol``.
    NumericError
        If the returned pair misses the residual target ``tol``.
    """
    m = _as_array(a)
    hermitian_part_check(m, tol)
    herm = (m + m.conj().T) / 2
    try:
        vals, vecs = np.linalg.eigh(herm)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigendecomposition failed: {exc}") from exc
    if vals[0] < -tol * max(1.0, abs(vals[-1])):
        raise DomainError(f"matrix is not positive semidefinite (min eigenvalue {vals[0]:.3e})")
    lam = float(vals[-1])
    h = vecs[:, -1]
    h = h / np.linalg.norm(h)
    # fix the global phase so the output is reproducible across LAPACK builds
    k = int(np.argmax(np.abs(h)))
    h = h * (abs(h[k]) / h[k])
    residual = float(np.linalg.norm(m @ h - lam * h))
    if residual > tol * max(1.0, lam):
        raise NumericError("eigenpair residual above tolerance", residual=residual)
    return lam, h


def _unit_vector(v, name: str, tol: float = 1e-10) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    nv = np.linalg.norm(v)
    if not np.isfinite(nv) or abs(nv - 1.0) > tol:
        raise DomainError(f"{name} must be a unit vector (norm {nv!r})")
    return v / nv


def unitary_from_to(psi, h) -> np.ndarray:
    """Unitary matrix ``u`` with ``u @ psi == h``.

    Built as a phase times a plane rotation in span(psi, h), acting as the
    identity on the orthogonal complement.
    """
    psi = _unit_vector(psi, "psi")
    h = _unit_vector(h, "h")
    if psi.shape != h.shape:
        raise DomainError(f"psi and h differ in length: {psi.shape} vs {h.shape}")
    n = psi.shape[0]
    if np.linalg.norm(psi - h) < PARALLEL_TOL:
        return np.eye(n, dtype=complex)
    overlap = np.vdot(psi, h)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    target = h / phase  # <psi, target> is real and non-negative
    c = float(np.real(np.vdot(psi, target)))
    q = target - c * psi
    q = q - psi * np.vdot(psi, q)  # one extra Gram-Schmidt pass for near-parallel inputs
    s = float(np.linalg.norm(q))
    if s < PARALLEL_TOL:
        return phase * np.eye(n, dtype=complex)
    q = q / s
    r = np.hypot(c, s)  # keeps c^2 + s^2 == 1 to rounding
    c, s = c / r, s / r
    P = np.outer(psi, psi.conj())
    Qm = np.outer(q, q.conj())
    rot = np.eye(n, dtype=complex) + (c - 1.0) * (P + Qm) + s * (np.outer(q, psi.conj()) - np.outer(psi, q.conj()))
    return phase * rot


def unitary_element_from_to(descriptor: AlgebraDescriptor, psi, h) -> AlgebraElement:
    return AlgebraElement(descriptor, unitary_from_to(psi, h))


def random_unitary(descriptor: AlgebraDescriptor, seed) -> AlgebraElement:
    """Haar-distributed unitary from a seeded complex Gaussian matrix.

    QR with the phases of ``diag(R)`` pushed into ``Q``.  A commutative
    descriptor yields a diagonal matrix of uniform random phases.
    """
    rng = np.random.default_rng(seed)
    n = descriptor.dim
    if descriptor.commutative:
        return descriptor.diag(np.exp(2j * np.pi * rng.random(n)))
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    return AlgebraElement(descriptor, q)


def random_element(descriptor: AlgebraDescriptor, rng: np.random.Generator, scale_: float = 1.0) -> AlgebraElement:
    n = descriptor.dim
    if descriptor.commutative:
        return descriptor.diag(scale_ * (rng.standard_normal(n) + 1j * rng.standard_normal(n)))
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return AlgebraElement(descriptor, scale_ * m)


def random_positive(descriptor: AlgebraDescriptor, rng: np.random.Generator) -> AlgebraElement:
    a = random_element(descriptor, rng)
    return AlgebraElement(descriptor, a.entries.conj().T @ a.entries)


def is_unitary(u: AlgebraElement, atol: float = 1e-12) -> bool:
    m = _as_array(u)
    eye = np.eye(m.shape[0])
    return bool(
        np.max(np.abs(m.conj().T @ m - eye)) <= atol and np.max(np.abs(m @ m.conj().T - eye)) <= atol
    )

"""Compactness machinery on the truncated module.

Covers epsilon-nets and the asymmetric net distance, the state/unitary
selection for full matrix algebras, separating a point outside the unit ball
by a tau-open set, the commutative counterexample (compact but not
"compact"), and the witness sequence showing a non-"compact" operator is not
compact over B(H).

Every routine is deterministic given its inputs and seed.  Per-sample
generators are derived from ``(seed, index)`` so sample ``i`` does not depend
on how many samples are drawn or how they are spread over threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    AlgebraDescriptor,
    AlgebraElement,
    operator_norm_alg,
    spectral_norm,
    top_eigenpair,
    unitary_from_to,
)
from .checks import Check, check, identity_check, map_ordered
from .errors import (
    CompactAtHorizonError,
    ConfigError,
    DomainError,
    HorizonTooSmallError,
    PreconditionError,
    UnsupportedAlgebraError,
)
from .module import (
    ModuleVector,
    gaussian_entries,
    inner_product,
    inner_product_array,
    module_norm,
    module_norms,
    rank_one_from_unit,
    right_mul,
)
from .operators import (
    ModuleOperator,
    apply,
    apply_batch,
    coordinate_projection,
    diagonal_multiplier,
    lincomb,
    operator_norm,
    tail_profile,
)
from .states import NormalState, diagonal_state, evaluate, norm_attaining_state, vector_state
from .topology import (
    SeminormSpec,
    features_norm,
    functional_kernel,
    p_tau,
    weight_masses,
    weighted_values,
)

_CHUNK = 256


# -- sampling -----------------------------------------------------------------

def _sample_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(index)])


def sample_unit_ball(descriptor: AlgebraDescriptor, truncation: int, count: int, seed: int) -> np.ndarray:
    """``count`` module vectors of norm at most one, as a ``(count, N, n, n)`` array.

    Sample ``i`` is a complex Gaussian vector rescaled to module norm ``r``
    with ``r`` uniform on (0, 1], both drawn from the generator ``(seed, i)``.
    This is a probe distribution, not the uniform measure on the ball.
    """
    n = descriptor.dim

    def chunk(start: int) -> np.ndarray:
        stop = min(start + _CHUNK, count)
        out = np.empty((stop - start, truncation, n, n), dtype=complex)
        for i in range(start, stop):
            rng = _sample_rng(seed, i)
            g = gaussian_entries(descriptor, (truncation,), rng)
            r = 1.0 - rng.random()
            nrm = spectral_norm(g.reshape(truncation * n, n))
            out[i - start] = g * (r / nrm)
        return out

    if count <= 0:
        return np.zeros((0, truncation, n, n), dtype=complex)
    return np.concatenate(map_ordered(chunk, range(0, count, _CHUNK)))


def _as_batch(points) -> tuple[AlgebraDescriptor | None, np.ndarray]:
    if isinstance(points, np.ndarray):
        return None, points
    points = list(points)
    if not points:
        return None, np.zeros((0, 1, 1, 1), dtype=complex)
    return points[0].descriptor, np.stack([x.entries for x in points])


# -- nets -----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class NetResult:
    centers: list
    epsilon: float
    covered: bool
    assignments: dict
    center_indices: list = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.centers)


def greedy_net(points, p: SeminormSpec, epsilon: float, descriptor: AlgebraDescriptor | None = None) -> NetResult:
    """One greedy pass in input order.

    A point becomes a center iff its ``p``-distance to every existing center
    exceeds ``epsilon``; otherwise it is assigned to the nearest existing
    center (distance at most ``epsilon``).  Centers are therefore pairwise more
    than ``epsilon`` apart and every point is covered.
    """
    if not epsilon > 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    desc, batch = _as_batch(points)
    desc = desc or descriptor or p.phi.descriptor
    if batch.shape[0] == 0:
        return NetResult([], float(epsilon), True, {}, [])
    feats = p.features(batch)
    centers = np.empty((0, feats.shape[1]), dtype=complex)
    center_idx: list[int] = []
    assign: dict[int, int] = {}
    for i, f in enumerate(feats):
        if center_idx:
            d = features_norm(centers - f)
            j = int(np.argmin(d))
            if d[j] <= epsilon:
                assign[i] = j
                continue
        assign[i] = len(center_idx)
        center_idx.append(i)
        centers = np.vstack([centers, f[None]])
    return NetResult(
        [ModuleVector(desc, batch[i]) for i in center_idx], float(epsilon), True, assign, center_idx
    )


def net_distance(S, T, p: SeminormSpec) -> float:
    """d_p(S, T) = max over x in S of min over y in T of p(x - y); not symmetric."""
    _, sb = _as_batch(S)
    _, tb = _as_batch(T)
    if tb.shape[0] == 0:
        raise DomainError("net_distance needs a nonempty target set")
    if sb.shape[0] == 0:
        return 0.0
    fs, ft = p.features(sb), p.features(tb)
    worst = 0.0
    for start in range(0, fs.shape[0], _CHUNK):
        block = fs[start:start + _CHUNK]
        d = features_norm(block[:, None, :] - ft[None, :, :])
        worst = max(worst, float(d.min(axis=1).max()))
    return worst


# -- state and unitary selection ----------------------------------------------

def choose_state_unitaries(a_list, delta: float, reference=None) -> tuple[NormalState, list[AlgebraElement]]:
    """Vector state phi and unitaries u_j with phi(u_j^* a_j u_j) = ||a_j|| > delta.

    ``phi`` is the vector state at ``reference`` (default e_1) and ``u_j``
    rotates ``reference`` onto a top eigenvector of ``a_j``.  The same unitary
    serves on both sides.  Only full matrix algebras are supported: in a
    commutative algebra no single state can see infinitely many orthogonal
    projections, which is exactly why the selection fails there.
    """
    a_list = list(a_list)
    if not a_list:
        raise DomainError("need at least one element")
    desc = a_list[0].descriptor
    if desc.commutative:
        raise UnsupportedAlgebraError("state/unitary selection needs a full matrix algebra, not a commutative one")
    psi = np.zeros(desc.dim, dtype=complex)
    if reference is None:
        psi[0] = 1.0
    else:
        psi = np.asarray(reference, dtype=complex)
    phi = vector_state(psi, desc)
    us = []
    for j, a in enumerate(a_list):
        if a.descriptor != desc:
            raise DomainError("all elements must share one algebra")
        lam, h = top_eigenpair(a)
        if not lam > delta:
            raise PreconditionError(f"||a_{j + 1}|| = {lam!r} does not exceed delta = {delta!r}")
        u = AlgebraElement(desc, unitary_from_to(psi, h))
        val = evaluate(phi, u.H * a * u).real
        if val < lam - 1e-10:
            raise PreconditionError(f"selected state misses ||a_{j + 1}|| by {lam - val:.3e}")
        us.append(u)
    return phi, us


# -- separation of a point outside the unit ball --------------------------------

@dataclass(frozen=True, eq=False)
class SeparationReport:
    phi: NormalState
    epsilon: float
    violations: int
    samples: int
    outside_g: int
    pairing_violations: int
    cs_max_residual: float
    min_norm: float
    norm_lower_bound: float

    def as_tuple(self) -> tuple[NormalState, float, int]:
        return self.phi, self.epsilon, self.violations


def separate_from_ball(z: ModuleVector, samples: int, seed: int, fraction: float = 0.9) -> SeparationReport:
    """Exhibit a tau-open neighbourhood G of ``z`` missing the closed unit ball.

    phi attains ``||<z, z>||`` exactly, and G = {x : p_{phi,z}(x - z) < eps}
    with ``eps = fraction * (||z||^2 - ||z||) / sqrt(N)``.  Samples are drawn
    inside G (a uniform point of the eps-ball in the seminorm's range plus a
    kernel component of log-uniform size in [1e-3, 10]) and each one is
    checked for ``||x|| > 1`` and for the two inequalities that force it.
    """
    if not 0 < fraction < 1:
        raise DomainError(f"fraction must lie in (0, 1), got {fraction}")
    zn = module_norm(z)
    if not zn > 1:
        raise PreconditionError(f"||z|| = {zn!r} must exceed 1")
    desc, N, n = z.descriptor, z.truncation, z.descriptor.dim
    gram = inner_product(z, z)
    phi = norm_attaining_state(gram)
    eps = fraction * (zn * zn - zn) / math.sqrt(N)

    g = functional_kernel(phi.rho, z.entries)  # slot j functional: sum(g_j * w_j)
    gnorm2 = np.sum(np.abs(g) ** 2, axis=(1, 2))
    live = gnorm2 > 1e-28
    m = int(live.sum())

    def chunk(start: int) -> np.ndarray:
        stop = min(start + _CHUNK, samples)
        out = np.empty((stop - start, N, n, n), dtype=complex)
        for i in range(start, stop):
            rng = _sample_rng(seed, i)
            w = gaussian_entries(desc, (N,), rng)
            vals = np.einsum("jab,jab->j", g, w)
            w[live] -= np.conj(g[live]) * (vals[live] / gnorm2[live])[:, None, None]
            wn = spectral_norm(w.reshape(N * n, n))
            if wn > 0:
                w *= 10.0 ** rng.uniform(-3.0, 1.0) / wn
            c = rng.standard_normal(max(m, 1)) + 1j * rng.standard_normal(max(m, 1))
            c *= eps * (1.0 - 1e-9) * rng.random() ** (1.0 / (2 * max(m, 1))) / np.linalg.norm(c)
            if m:
                w[live] += np.conj(g[live]) * (c[:m] / gnorm2[live])[:, None, None]
            out[i - start] = z.entries + w
        return out

    xs = np.concatenate(map_ordered(chunk, range(0, samples, _CHUNK))) if samples > 0 else np.zeros((0, N, n, n))
    diffs = xs - z.entries[None]
    p_diff = np.sqrt(np.sum(np.abs(weighted_values(phi, z.entries, diffs)) ** 2, axis=-1))
    inside = p_diff < eps
    norms = module_norms(xs)
    violations = int(np.sum(inside & ~(norms > 1.0)))

    zx = phi.expect(inner_product_array(z.entries[None], xs))
    xx = phi.expect(inner_product_array(xs, xs)).real
    zz = evaluate(phi, gram).real
    pairing_floor = zn * zn - 2 * eps * math.sqrt(N)
    pairing_violations = int(np.sum(inside & ~(pairing_floor < np.abs(zx))))
    cs = np.abs(zx) ** 2 - zz * xx
    ub = zz * xx - (zn * zn) * norms ** 2
    cs_resid = float(max(cs.max(initial=-np.inf), ub.max(initial=-np.inf), 0.0)) if samples else 0.0
    return SeparationReport(
        phi=phi,
        epsilon=eps,
        violations=violations,
        samples=int(samples),
        outside_g=int(np.sum(~inside)),
        pairing_violations=pairing_violations,
        cs_max_residual=cs_resid,
        min_norm=float(norms[inside].min()) if inside.any() else float("nan"),
        norm_lower_bound=zn - eps * math.sqrt(N) / zn,
    )


# -- the commutative counterexample --------------------------------------------

@dataclass(frozen=True, eq=False)
class CounterexampleReport:
    weights: list
    ks: list
    norm_profile: list
    tail_bounds: list
    sampled_sup: list

    def rows(self) -> list[tuple]:
        return list(zip(self.ks, self.norm_profile, self.tail_bounds, self.sampled_sup))


def counterexample_experiment(weights, k_max: int, samples: int, seed: int) -> CounterexampleReport:
    """The diagonal multiplier by orthogonal projections over a commutative algebra.

    A is the diagonal algebra of size N = len(weights), p_j = E_jj, phi the
    diagonal state with the given weights and T x = (p_1 xi_1, ..., p_N xi_N).
    For k = 0..k_max the report holds ``||T - P_k T||`` (1 for every k < N, so
    T stays away from finite rank), the tail mass ``sum_{j>k} w_j``, and the
    largest observed ``p((T - P_k T) x)`` over seeded unit-ball vectors x and
    random admissible weights, which the tail mass bounds after squaring.
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ConfigError("weights must be a nonempty sequence", field="weights")
    if np.any(w <= 0) or not np.isfinite(w).all():
        raise ConfigError("weights must be positive", field="weights")
    if abs(math.fsum(w) - 1.0) > 1e-9:
        raise ConfigError(f"weights sum to {math.fsum(w)!r}, not 1", field="weights")
    N = w.size
    if not 0 <= k_max <= N:
        raise ConfigError(f"k_max must lie in 0..{N}", field="k_max")
    desc = AlgebraDescriptor(N, commutative=True)
    projections = [desc.diag(np.eye(N)[j]) for j in range(N)]
    T = diagonal_multiplier(projections)
    phi = diagonal_state(desc, w)
    ks = list(range(k_max + 1))
    norm_profile = tail_profile(T, ks)
    tails = [math.fsum(w[k:]) for k in ks]

    remainders = [lincomb([(1.0, T), (-1.0, coordinate_projection(k, desc, N) @ T)]) for k in ks]
    xs = sample_unit_ball(desc, N, samples, seed)

    def one(i: int) -> list[float]:
        rng = _sample_rng(seed + 1, i)
        eta = gaussian_entries(desc, (N,), rng)
        eta = eta / math.sqrt(weight_masses(phi, eta).max())  # sup phi(eta^* eta) = 1
        spec = SeminormSpec.tau(phi, eta)
        x = ModuleVector(desc, xs[i])
        return [p_tau(spec, apply(R, x)) for R in remainders]

    per_sample = map_ordered(one, range(samples))
    sup = np.max(np.array(per_sample), axis=0).tolist() if samples else [0.0] * len(ks)
    return CounterexampleReport(w.tolist(), ks, norm_profile, tails, sup)


# -- witness sequence for non-"compact" operators --------------------------------

@dataclass(frozen=True, eq=False)
class WitnessStep:
    k: int
    x: ModuleVector
    y: ModuleVector
    z: ModuleVector
    u: AlgebraElement | None
    checks: dict


@dataclass(frozen=True, eq=False)
class WitnessReport:
    delta: float
    horizon: int
    scale: float
    steps: list
    phi: NormalState
    family: list
    seminorm: SeminormSpec
    pairwise: np.ndarray
    pairwise_dominating: np.ndarray
    checks: list

    @property
    def all_checks(self) -> list[Check]:
        out = [c for s in self.steps for c in s.checks.values()]
        return out + list(self.checks)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.all_checks)


def _top_right_singular_vector(m: np.ndarray, tol: float) -> tuple[float, np.ndarray]:
    """A unit vector v with ||m v|| = ||m||, preferring early coordinates.

    When the top singular value is degenerate (e.g. for projections) the
    projection of the first standard basis vector with a non-negligible
    component in the top right singular subspace is used, so witnesses stay
    supported on leading coordinates.
    """
    _, s, vh = np.linalg.svd(m)
    sigma = float(s[0])
    top = vh[s >= sigma - tol * max(1.0, sigma)].conj().T  # columns span the subspace
    weights = np.sum(np.abs(top) ** 2, axis=1)
    i = int(np.argmax(weights > 1e-6))
    v = top @ top[i].conj()
    v = v / np.linalg.norm(v)
    k = int(np.argmax(np.abs(v) > 1e-12))
    v = v * (abs(v[k]) / v[k])
    return sigma, v


def _tail_norms(w: np.ndarray) -> np.ndarray:
    """||(I - P_k) w|| for k = 0..N."""
    N, n, _ = w.shape
    out = np.zeros(N + 1)
    for k in range(N):
        out[k] = spectral_norm(w[k:].reshape((N - k) * n, n))
    return out


def _project(w: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """Keep slots lo+1..hi (i.e. (P_hi - P_lo) w)."""
    out = np.zeros_like(w)
    out[lo:hi] = w[lo:hi]
    return out


def witness_construction(T: ModuleOperator, m: int, K: int, tol: float = 1e-10) -> WitnessReport:
    """Build a p-separated sequence in the image of the unit ball.

    ``T`` is rescaled to norm one and its compactness deficiency
    ``delta = min_{1<=k<=K} ||(I - P_k) T||`` is measured over the horizon K.
    Then, for n = 1..m: ``x_n`` is a norm-attaining vector for
    ``(I - Q_{n-1}) T``, ``y_n = T x_n``, ``Q_n = P_{k_n}`` for the least
    ``k_n`` with ``||(I - P_{k_n})(I - Q_{n-1}) y_n|| < delta^2 / 8``, and
    ``z_n = Q_n (I - Q_{n-1}) y_n``.  A vector state and unitaries u_n make
    ``phi(u_n^* <z_n, z_n> u_n) > 9 delta^2 / 64``, and the seminorm
    ``p(x) = (sum_n |phi(<z_n u_n, x>)|^2)^(1/2)`` keeps the vectors
    ``y_n u_n`` more than ``delta^2 / 64`` apart.

    Cross pairings ``||<z_a, y_b>||`` (a > b) are checked against
    ``delta^2 / 8``; the looser ``delta / 8`` is recorded beside it.  The
    dominating tau seminorm normalises each coordinate of block n separately.
    """
    desc, N, n = T.descriptor, T.truncation, T.descriptor.dim
    if desc.commutative:
        raise UnsupportedAlgebraError("the witness construction needs a full matrix algebra")
    if m < 1:
        raise DomainError("need at least one step")
    if not 1 <= K < N:
        raise PreconditionError(f"horizon K = {K} must satisfy 1 <= K < N = {N}")
    scale = operator_norm(T, tol)
    if scale <= tol:
        raise CompactAtHorizonError("T = 0 is trivially compact")
    T = ModuleOperator(desc, T.blocks / scale, T.tag)
    delta = min(tail_profile(T, range(1, K + 1), tol))
    if delta <= tol:
        raise CompactAtHorizonError(f"||(I - P_k) T|| vanishes at some k <= {K}: T is finite rank at this horizon")

    d2 = delta * delta
    steps: list[dict] = []
    k_prev = 0
    for step in range(1, m + 1):
        rest = np.array(T.blocks)
        rest[:k_prev] = 0  # (I - Q_{n-1}) T
        sigma, v = _top_right_singular_vector(ModuleOperator(desc, rest).flatten(), tol)
        if not sigma > delta / 2:
            raise HorizonTooSmallError(
                f"step {step}: ||(I - Q_{step - 1}) T|| = {sigma:.3e} <= delta/2; increase N relative to the horizon"
            )
        x = rank_one_from_unit(v, desc, N)
        y = apply(T, x)
        w = _project(y.entries, k_prev, N)
        tails = _tail_norms(w)
        below = np.nonzero(tails < d2 / 8)[0]
        if below.size == 0:
            raise HorizonTooSmallError(f"step {step}: no k <= {N} brings the tail under delta^2/8")
        k = int(below[0])
        zarr = _project(w, k_prev, k)
        z = ModuleVector(desc, zarr)
        y_norm, z_norm = module_norm(y), module_norm(z)
        residual_tail = tails[k]
        checks = {
            "x_norm": identity_check("x_norm", abs(module_norm(x) - 1.0), tol),
            "x_choice": check("x_choice", spectral_norm(_flat_col(w)), ">", delta / 2),
            "tail_after_k": check("tail_after_k", residual_tail, "<", d2 / 8),
            "tail_after_k_loose": check("tail_after_k_loose", residual_tail, "<", delta / 8),
            "z_le_y": check("z_le_y", z_norm, "<=", y_norm + tol),
            "y_le_1": check("y_le_1", y_norm, "<=", 1.0 + tol),
            "z_lower_bound": check("z_lower_bound", z_norm, ">", 3 * delta / 8),
            "z_y_pairing": identity_check(
                "z_y_pairing", float(np.max(np.abs(inner_product(z, y).entries - inner_product(z, z).entries))), tol
            ),
        }
        steps.append({"k": k, "x": x, "y": y, "z": z, "checks": checks})
        k_prev = k

    # cross pairings: for later index a > earlier index b, ||<z_a, y_b>|| <= delta^2/8
    for a in range(len(steps)):
        for b in range(a):
            val = operator_norm_alg(inner_product(steps[a]["z"], steps[b]["y"]))
            steps[a]["checks"][f"cross_pairing[{b + 1}]"] = check(f"cross_pairing[{b + 1}]", val, "<=", d2 / 8 + tol)
            steps[a]["checks"][f"cross_pairing_loose[{b + 1}]"] = check(
                f"cross_pairing_loose[{b + 1}]", val, "<", delta / 8
            )

    grams = [inner_product(s["z"], s["z"]) for s in steps]
    phi, us = choose_state_unitaries(grams, (3 * delta / 8) ** 2)
    for s, a, u in zip(steps, grams, us):
        s["u"] = u
        s["checks"]["state_on_block"] = check("state_on_block", evaluate(phi, u.H * a * u).real, ">", 9 * d2 / 64)
        s["checks"]["xu_norm"] = identity_check("xu_norm", abs(module_norm(right_mul(s["x"], u)) - 1.0), tol)

    family = [right_mul(s["z"], s["u"]) for s in steps]
    fam = np.stack([f.entries for f in family])
    kernel = functional_kernel(phi.rho, fam)

    def p_direct(vec: np.ndarray) -> float:
        vals = np.einsum("ijab,jab->i", kernel, vec)
        return math.sqrt(math.fsum(np.abs(vals) ** 2))

    omega = np.zeros((N, n, n), dtype=complex)
    lo = 0
    for s in steps:
        zu = right_mul(s["z"], s["u"]).entries
        masses = weight_masses(phi, zu[lo:s["k"]])
        live = masses > 1e-14
        block = np.zeros_like(zu[lo:s["k"]])
        block[live] = zu[lo:s["k"]][live] / np.sqrt(masses[live])[:, None, None]
        omega[lo:s["k"]] = block
        lo = s["k"]
    dominating = SeminormSpec.tau(phi, omega)

    images = [right_mul(s["y"], s["u"]) for s in steps]
    M = len(steps)
    pairwise = np.zeros((M, M))
    pairwise_dom = np.zeros((M, M))
    global_checks = []
    for a in range(M):
        for b in range(M):
            if a == b:
                continue
            diff = images[a] - images[b]
            pairwise[a, b] = p_direct(diff.entries)
            pairwise_dom[a, b] = p_tau(dominating, diff)
            if a > b:
                global_checks.append(check(f"separation[{a + 1},{b + 1}]", pairwise[a, b], ">", d2 / 64 - tol))
                global_checks.append(
                    check(f"domination[{a + 1},{b + 1}]", pairwise[a, b] ** 2, "<=", pairwise_dom[a, b] ** 2 + tol)
                )

    step_objs = [WitnessStep(s["k"], s["x"], s["y"], s["z"], s["u"], s["checks"]) for s in steps]
    return WitnessReport(
        delta=delta,
        horizon=K,
        scale=scale,
        steps=step_objs,
        phi=phi,
        family=family,
        seminorm=dominating,
        pairwise=pairwise,
        pairwise_dominating=pairwise_dom,
        checks=global_checks,
    )


def _flat_col(w: np.ndarray) -> np.ndarray:
    N, n, _ = w.shape
    return w.reshape(N * n, n)


# -- probing compactness empirically ------------------------------------------

def compactness_probe(T: ModuleOperator, p: SeminormSpec, epsilon: float, sample_sizes, seed: int, points=None) -> list[tuple[int, int]]:
    """Net sizes of ``T`` applied to growing prefixes of a sample.

    Samples come from :func:`sample_unit_ball` (so the 500-sample set is a
    prefix of the 2000-sample set) unless explicit ``points`` are given.
    Saturating net sizes are the empirical face of compactness.
    """
    if not epsilon > 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    sizes = [int(s) for s in sample_sizes]
    if points is None:
        batch = sample_unit_ball(T.descriptor, T.truncation, max(sizes, default=0), seed)
    else:
        _, batch = _as_batch(points)
    images = apply_batch(T, batch)
    out = []
    for s in sizes:
        net = greedy_net(images[:s], p, epsilon, descriptor=T.descriptor)
        out.append((s, net.size))
    return out

"""Seeded property suites run by ``hilmod verify``.

Each suite returns a list of :class:`~hilmod.checks.Check`; randomized
invariants are folded into one check per property whose value is the worst
observed violation (so the margin is how far the worst case stayed inside
the tolerance).
"""

from __future__ import annotations

import math

import numpy as np

from . import algebra as alg
from .algebra import AlgebraDescriptor
from .checks import Check, check
from .compactness import counterexample_experiment, separate_from_ball, witness_construction
from .errors import CompactAtHorizonError
from .module import basis_vector, coord_project, inner_product, module_norm, random_vector
from .operators import adjoint_op, apply, compose, operator_norm, random_operator, tail_profile, theta
from .states import evaluate, geometric_weights, random_state
from .topology import SeminormSpec, normalize_admissible, p_tau, p_tau1, p_tau2, weight_masses

SUITES = ("axioms", "chain", "separation", "counterexample", "witness")


def random_admissible(phi, N: int, rng: np.random.Generator) -> np.ndarray:
    desc = phi.descriptor
    eta = np.array(random_vector(desc, N, rng).entries)
    eta[rng.random(N) < 0.2] = 0  # some null slots
    masses = weight_masses(phi, eta)
    if masses.max() <= 1e-14:
        eta[0] = np.eye(desc.dim)
        masses = weight_masses(phi, eta)
    return eta / math.sqrt(masses.max())


def random_instance(rng: np.random.Generator, max_dim: int = 4, max_trunc: int = 16):
    n = int(rng.integers(1, max_dim + 1))
    N = int(rng.integers(1, max_trunc + 1))
    desc = AlgebraDescriptor(n, commutative=bool(rng.random() < 0.25))
    phi = random_state(desc, rng)
    x = random_vector(desc, N, rng) * float(rng.uniform(0.1, 3.0))
    y = random_vector(desc, N, rng) * float(rng.uniform(0.1, 3.0))
    eta = random_admissible(phi, N, rng)
    return desc, phi, x, y, eta


def _worst(name: str, values, tol: float) -> Check:
    return check(name, max(values, default=0.0), "<=", tol)


def chain_checks(count: int, seed: int) -> list[Check]:
    """Comparison chain tau1 <= tau <= tau2 <= norm and its companions."""
    rng = np.random.default_rng([seed, 1])
    cs, t1, t2, t2n, lower, upper = [], [], [], [], [], []
    for _ in range(count):
        desc, phi, x, y, eta = random_instance(rng)
        N = x.truncation
        spec = SeminormSpec.tau(phi, eta)
        i = int(rng.integers(N))
        xi, et = x.entry(i + 1), y.entry(i + 1)
        lhs = abs(evaluate(phi, et.H * xi)) ** 2
        cs.append(lhs - evaluate(phi, xi.H * xi).real * evaluate(phi, et.H * et).real)
        zeta = normalize_admissible(phi, y.entries)
        t1.append(p_tau1(phi, y, x) - math.sqrt(max(evaluate(phi, inner_product(y, y)).real, 0.0)) * p_tau(SeminormSpec.tau(phi, zeta), x))
        pt, ptau2 = p_tau(spec, x), p_tau2(phi, x)
        t2.append(pt**2 - ptau2**2)
        t2n.append(ptau2**2 - module_norm(x) ** 2)
        vals = np.abs(phi.expect(np.swapaxes(eta.conj(), -1, -2) @ x.entries))
        lower.append(vals.max() - pt)
        upper.append(pt - math.sqrt(N) * vals.max())
    return [
        _worst("semi_inner_cauchy_schwarz", cs, 1e-9),
        _worst("tau1<=tau", t1, 1e-9),
        _worst("tau<=tau2", t2, 1e-9),
        _worst("tau2<=norm", t2n, 1e-9),
        _worst("max<=tau", lower, 1e-10),
        _worst("tau<=sqrtN_max", upper, 1e-10),
        *density_checks(seed),
    ]


def density_checks(seed: int, N: int = 64, n: int = 2) -> list[Check]:
    rng = np.random.default_rng([seed, 2])
    desc = AlgebraDescriptor(n)
    phi = random_state(desc, rng)
    spec = SeminormSpec.tau(phi, random_admissible(phi, N, rng))
    x = random_vector(desc, N, rng)
    prof = [p_tau(spec, x - coord_project(k, x)) for k in range(N + 1)]
    rises = [prof[k + 1] - prof[k] for k in range(N)]
    return [_worst("truncation_density_monotone", rises, 1e-12), check("truncation_density_end", prof[-1], "<=", 1e-12)]


def axiom_checks(count: int, seed: int) -> list[Check]:
    rng = np.random.default_rng([seed, 3])
    d4 = AlgebraDescriptor(4)
    inv, cstar, pos, uni, rot = [], [], [], [], []
    for i in range(count):
        a, b = alg.random_element(d4, rng), alg.random_element(d4, rng)
        inv.append(float(np.max(np.abs((a * b).H.entries - (b.H * a.H).entries))))
        cstar.append(abs(alg.operator_norm_alg(a.H * a) - alg.operator_norm_alg(a) ** 2))
        pos.append(-float(np.linalg.eigvalsh((a.H * a).entries)[0]))
        u = alg.random_unitary(d4, [seed, i]).entries
        uni.append(float(np.max(np.abs(u.conj().T @ u - np.eye(4)))))
        psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        h = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        psi, h = psi / np.linalg.norm(psi), h / np.linalg.norm(h)
        v = alg.unitary_from_to(psi, h)
        rot.append(max(float(np.max(np.abs(v.conj().T @ v - np.eye(4)))), float(np.linalg.norm(v @ psi - h))))
    dc = AlgebraDescriptor(3, commutative=True)
    a, b = alg.random_element(dc, rng), alg.random_element(dc, rng)
    commute = float(np.max(np.abs((a * b).entries - (b * a).entries)))

    herm, psd, cs, tri, sem_h, sem_t, sem_neg = [], [], [], [], [], [], []
    adj, cst, th = [], [], []
    for _ in range(count):
        desc, phi, x, y, eta = random_instance(rng)
        g = inner_product(x, y).entries
        herm.append(float(np.max(np.abs(g.conj().T - inner_product(y, x).entries))))
        psd.append(-float(np.linalg.eigvalsh(inner_product(x, x).entries)[0]))
        cs.append(alg.operator_norm_alg(inner_product(x, y)) - module_norm(x) * module_norm(y))
        tri.append(module_norm(x + y) - module_norm(x) - module_norm(y))
        lam = complex(rng.standard_normal(), rng.standard_normal())
        for spec in (SeminormSpec.tau(phi, eta), SeminormSpec.tau1(phi, y), SeminormSpec.tau2(phi)):
            px = spec(x)
            sem_neg.append(-px)
            sem_h.append(abs(spec(x * lam) - abs(lam) * px))
            sem_t.append(spec(x + y) - px - spec(y))
        T = random_operator(desc, x.truncation, rng)
        w = random_vector(desc, x.truncation, rng)
        adj.append(float(np.max(np.abs(inner_product(apply(T, x), w).entries - inner_product(x, apply(adjoint_op(T), w)).entries))))
        cst.append(abs(operator_norm(compose(adjoint_op(T), T)) - operator_norm(T) ** 2) / max(1.0, operator_norm(T) ** 2))
        th.append(float(np.max(np.abs(adjoint_op(theta(x, y)).blocks - theta(y, x).blocks))))
    T = random_operator(AlgebraDescriptor(2), 12, rng)
    prof = tail_profile(T)
    rises = [prof[k + 1] - prof[k] for k in range(len(prof) - 1)]
    return [
        _worst("involution", inv, 1e-12),
        _worst("c_star_identity", cstar, 1e-8),
        _worst("positivity", pos, 1e-10),
        check("commutative_multiply", commute, "<=", 0.0),
        _worst("random_unitary", uni, 1e-12),
        _worst("unitary_from_to", rot, 1e-10),
        _worst("inner_hermitian", herm, 1e-12),
        _worst("inner_positive", psd, 1e-10),
        _worst("module_cauchy_schwarz", cs, 1e-9),
        _worst("module_triangle", tri, 1e-9),
        _worst("seminorm_nonnegative", sem_neg, 0.0),
        _worst("seminorm_homogeneous", sem_h, 1e-10),
        _worst("seminorm_triangle", sem_t, 1e-9),
        _worst("adjointable", adj, 1e-10),
        _worst("operator_c_star_identity", cst, 1e-7),
        _worst("theta_adjoint", th, 1e-12),
        _worst("tail_profile_monotone", rises, 1e-12),
        check("tail_profile_end", prof[-1], "<=", 1e-12),
    ]


def separation_checks(seed: int, samples: int = 10_000) -> list[Check]:
    d = AlgebraDescriptor(2)
    z = basis_vector(1, d.unit() * 2.0, 4)
    rep = separate_from_ball(z, samples, seed)
    rng = np.random.default_rng([seed, 4])
    zr = random_vector(d, 4, rng)
    zr = zr * (1.5 / module_norm(zr))
    rep2 = separate_from_ball(zr, samples // 4, seed + 1)
    out = []
    for tag, r in (("2e1", rep), ("random", rep2)):
        out += [
            check(f"separation[{tag}].violations", r.violations, "<=", 0),
            check(f"separation[{tag}].outside_G", r.outside_g, "<=", 0),
            check(f"separation[{tag}].pairing_violations", r.pairing_violations, "<=", 0),
            check(f"separation[{tag}].cauchy_schwarz_residual", r.cs_max_residual, "<=", 1e-9),
            check(f"separation[{tag}].min_norm", r.min_norm, ">", 1.0),
        ]
    return out


def counterexample_checks(seed: int, N: int = 16, k_max: int = 12, samples: int = 200) -> list[Check]:
    rep = counterexample_experiment(geometric_weights(N, 0.5), k_max, samples, seed)
    out = []
    for k, nrm, tail, sup in rep.rows():
        out.append(check(f"counterexample.norm[{k}]", abs(nrm - 1.0), "<=", 1e-9))
        out.append(check(f"counterexample.tail_bound[{k}]", sup**2, "<=", tail + 1e-9))
    for k in range(len(rep.ks) - 1):
        ratio = rep.tail_bounds[k + 1] / rep.tail_bounds[k]
        out.append(check(f"counterexample.tail_ratio[{k}]", abs(ratio - 0.5), "<=", 1e-12))
    return out


def witness_checks(seed: int) -> list[Check]:
    from .operators import identity

    d = AlgebraDescriptor(2)
    rep = witness_construction(identity(d, 32), 3, 24)
    out = [check("witness.delta", abs(rep.delta - 1.0), "<=", 1e-10)]
    for i, s in enumerate(rep.steps, start=1):
        out += [Check(f"witness.step{i}.{c.name}", c.value, c.relation, c.bound, c.passed, c.margin) for c in s.checks.values()]
    out += [Check(f"witness.{c.name}", c.value, c.relation, c.bound, c.passed, c.margin) for c in rep.checks]
    e1 = basis_vector(1, d.unit(), 32)
    try:
        witness_construction(theta(e1, e1), 2, 24)
        refused = 0.0
    except CompactAtHorizonError:
        refused = 1.0
    out.append(check("witness.theta_refused_as_compact", refused, ">=", 1.0))
    return out


def run_suite(name: str, seed: int, count: int = 500) -> list[Check]:
    if name == "axioms":
        return axiom_checks(count, seed)
    if name == "chain":
        return chain_checks(count * 4, seed)
    if name == "separation":
        return separation_checks(seed)
    if name == "counterexample":
        return counterexample_checks(seed)
    if name == "witness":
        return witness_checks(seed)
    if name == "all":
        return [c for s in SUITES for c in run_suite(s, seed, count)]
    raise KeyError(name)

"""Experiment configuration: JSON file < command-line flags, with range checks."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .algebra import AlgebraDescriptor
from .errors import ConfigError
from .module import ModuleVector, gaussian_entries, module_norm
from .operators import (
    ModuleOperator,
    coordinate_projection,
    diagonal_multiplier,
    identity,
    operator_from_json,
    theta,
)
from .states import geometric_weights
from .topology import SeminormSpec, spec_from_json

MAX_DIM = 64
MAX_TRUNC = 1024
MAX_SAMPLES = 10**6


@dataclass
class ExperimentConfig:
    alg_dim: int = 2
    commutative: bool = False
    trunc: int = 16
    seed: int = 42
    tol: float = 1e-10
    state: str = "uniform"
    weights: object = "geometric:0.5"
    k_max: int = 12
    steps: int = 3
    horizon: int = 24
    epsilon: float = 0.25
    samples: int = 200
    sample_sizes: list = field(default_factory=lambda: [500, 2000])
    op: str = "identity"
    z_norm: float = 2.0
    seminorm: dict | None = None
    format: str = "json"
    out: str | None = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        def need(cond: bool, name: str, msg: str):
            if not cond:
                raise ConfigError(msg, field=name)

        for name in ("alg_dim", "trunc", "seed", "k_max", "steps", "horizon", "samples"):
            v = getattr(self, name)
            need(isinstance(v, int) and not isinstance(v, bool), name, f"must be an integer, got {v!r}")
        need(1 <= self.alg_dim <= MAX_DIM, "alg_dim", f"must lie in 1..{MAX_DIM}")
        need(1 <= self.trunc <= MAX_TRUNC, "trunc", f"must lie in 1..{MAX_TRUNC}")
        need(self.seed >= 0, "seed", "must be non-negative")
        need(isinstance(self.tol, (int, float)) and 0 < self.tol < 1, "tol", "must lie in (0, 1)")
        need(self.k_max >= 0, "k_max", "must be non-negative")
        need(self.steps >= 1, "steps", "must be positive")
        need(self.horizon >= 1, "horizon", "must be positive")
        need(isinstance(self.epsilon, (int, float)) and self.epsilon > 0, "epsilon", "must be positive")
        need(0 <= self.samples <= MAX_SAMPLES, "samples", f"must lie in 0..{MAX_SAMPLES}")
        need(isinstance(self.sample_sizes, list) and len(self.sample_sizes) > 0, "sample_sizes", "must be a nonempty list")
        for s in self.sample_sizes:
            need(isinstance(s, int) and 0 < s <= MAX_SAMPLES, "sample_sizes", f"entries must lie in 1..{MAX_SAMPLES}")
        need(self.format in ("json", "csv"), "format", "must be json or csv")
        need(isinstance(self.z_norm, (int, float)) and self.z_norm > 1, "z_norm", "must exceed 1 (z lies outside the unit ball)")
        need(isinstance(self.op, str), "op", "must be a string")
        need(self.seminorm is None or isinstance(self.seminorm, dict), "seminorm", "must be an object")

    @property
    def descriptor(self) -> AlgebraDescriptor:
        return AlgebraDescriptor(self.alg_dim, self.commutative)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        known = {f.name for f in fields(cls)}
        flat = dict(data)
        # accept the nested {"algebra": {"dim", "commutative"}} and {"output": {...}} forms
        alg = flat.pop("algebra", None) or {}
        if "dim" in alg:
            flat.setdefault("alg_dim", alg["dim"])
        if "commutative" in alg:
            flat.setdefault("commutative", alg["commutative"])
        output = flat.pop("output", None) or {}
        for k in ("format", "path"):
            if k in output:
                flat.setdefault("out" if k == "path" else k, output[k])
        if "truncation" in flat:
            flat.setdefault("trunc", flat.pop("truncation"))
        unknown = set(flat) - known
        if unknown:
            raise ConfigError(f"unknown keys {sorted(unknown)}", field=sorted(unknown)[0])
        return cls(**flat)

    @classmethod
    def load(cls, path: str | Path | None, overrides: dict | None = None) -> ExperimentConfig:
        data: dict = {}
        if path:
            try:
                data = json.loads(Path(path).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read config: {exc}", field="config") from exc
            if not isinstance(data, dict):
                raise ConfigError("config file must hold a JSON object", field="config")
        base = cls.from_dict(data).to_dict()
        base.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls.from_dict(base)


def parse_weights(spec, count: int) -> np.ndarray:
    """``geometric:r``, ``uniform`` or an explicit list of ``count`` positive weights."""
    if isinstance(spec, str):
        kind, _, arg = spec.partition(":")
        if kind == "geometric":
            try:
                r = float(arg)
            except ValueError:
                raise ConfigError(f"bad geometric ratio {arg!r}", field="weights") from None
            return geometric_weights(count, r)
        if kind == "uniform":
            return np.full(count, 1.0 / count)
        try:
            spec = [float(t) for t in spec.split(",")]
        except ValueError:
            raise ConfigError(f"unknown weights preset {spec!r}", field="weights") from None
    w = np.asarray(spec, dtype=float)
    if w.shape != (count,):
        raise ConfigError(f"expected {count} weights, got {w.size}", field="weights")
    return w


def _unit_random(desc: AlgebraDescriptor, N: int, rng: np.random.Generator) -> ModuleVector:
    x = ModuleVector(desc, gaussian_entries(desc, (N,), rng))
    return ModuleVector(desc, x.entries / module_norm(x))


def build_operator(name: str, cfg: ExperimentConfig) -> ModuleOperator:
    """Named constructors: ``identity``, ``proj:k``, ``theta``, ``diagproj[:w1,w2,...]``,
    or a path to an operator JSON file."""
    desc, N = cfg.descriptor, cfg.trunc
    kind, _, arg = name.partition(":")
    if kind == "identity":
        return identity(desc, N)
    if kind == "proj":
        try:
            return coordinate_projection(int(arg), desc, N)
        except (ValueError, IndexError) as exc:
            raise ConfigError(f"bad projection {name!r}: {exc}", field="op") from None
    if kind == "theta":
        rng = np.random.default_rng([cfg.seed, 7])
        return theta(_unit_random(desc, N, rng), _unit_random(desc, N, rng))
    if kind == "diagproj":
        # p_j = E_jj (zero once j exceeds the algebra size), optionally scaled per slot
        scales = [1.0] * N
        if arg:
            try:
                scales = [float(t) for t in arg.split(",")]
            except ValueError:
                raise ConfigError(f"bad diagproj scales {arg!r}", field="op") from None
            if len(scales) != N:
                raise ConfigError(f"diagproj needs {N} scales", field="op")
        n = desc.dim
        mats = []
        for j in range(N):
            d = np.zeros(n)
            if j < n:
                d[j] = scales[j]
            mats.append(desc.diag(d))
        return diagonal_multiplier(mats)
    path = Path(name)
    if path.suffix == ".json" and path.exists():
        return operator_from_json(json.loads(path.read_text()))
    raise ConfigError(f"unknown operator {name!r}", field="op")


def build_seminorm(cfg: ExperimentConfig) -> SeminormSpec:
    data = dict(cfg.seminorm or {})
    data.setdefault("kind", "tau")
    data.setdefault("state", cfg.state)
    return spec_from_json(data, cfg.descriptor, cfg.trunc)

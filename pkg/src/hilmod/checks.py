"""Named inequality checks with margins, shared by reports and verify suites."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

_RELATIONS = {
    "<": lambda v, b: v < b,
    "<=": lambda v, b: v <= b,
    ">": lambda v, b: v > b,
    ">=": lambda v, b: v >= b,
}


@dataclass(frozen=True)
class Check:
    """``value <relation> bound``; ``margin`` is positive when the check passes."""

    name: str
    value: float
    relation: str
    bound: float
    passed: bool
    margin: float

    def to_dict(self) -> dict:
        return asdict(self)


def check(name: str, value: float, relation: str, bound: float) -> Check:
    value, bound = float(value), float(bound)
    ok = bool(_RELATIONS[relation](value, bound)) and math.isfinite(value)
    margin = bound - value if relation in ("<", "<=") else value - bound
    return Check(name, value, relation, bound, ok, margin)


def identity_check(name: str, residual: float, tol: float) -> Check:
    """An exact identity verified up to ``tol``."""
    return check(name, residual, "<=", tol)


def worker_count() -> int:
    """Thread cap from ``HILMOD_THREADS`` (unset or 0 means one per CPU)."""
    raw = os.environ.get("HILMOD_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def map_ordered(fn, items) -> list:
    """``[fn(i) for i in items]``, possibly threaded; results keep input order."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))

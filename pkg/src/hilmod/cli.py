"""``hilmod`` command line: verify suites, experiments and epsilon-nets.

Exit codes: 0 all checks passed, 1 an inequality was violated, 2 usage or
configuration error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import verify
from .algebra import AlgebraDescriptor
from .checks import Check, check
from .compactness import (
    compactness_probe,
    counterexample_experiment,
    greedy_net,
    separate_from_ball,
    witness_construction,
)
from .config import ExperimentConfig, build_operator, build_seminorm, parse_weights
from .errors import ConfigError, HilmodError, NumericError
from .module import basis_vector, matrix_to_json, vector_from_json, vector_to_json
from .topology import spec_from_json, spec_to_json

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
KINDS = ("counterexample", "witness", "probe", "separation")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(v) -> str:
    """17 significant digits: exact round trip for doubles."""
    return format(float(v), ".17g")


def _clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, np.generic):
        return _clean(v.item())
    return v


def dump_json(report: dict, timestamp: bool = True) -> str:
    report = dict(report)
    if timestamp:
        report["timestamp"] = datetime.now(timezone.utc).isoformat()
    return json.dumps(_clean(report), indent=2, sort_keys=True) + "\n"


def strip_timestamp(text: str) -> str:
    """Drop the timestamp line so two reports can be compared byte for byte."""
    return "".join(line for line in text.splitlines(keepends=True) if not line.lstrip().startswith('"timestamp"'))


def dump_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _checks_json(checks: list[Check]) -> list[dict]:
    return [c.to_dict() for c in checks]


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# -- verify -------------------------------------------------------------------

def cmd_verify(suite: str, seed: int, fmt_: str = "json", out: str | None = None, timestamp: bool = True, count: int = 500) -> int:
    if suite not in verify.SUITES + ("all",):
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(verify.SUITES + ('all',))}")
    checks = verify.run_suite(suite, seed, count)
    passed = all(c.passed for c in checks)
    if fmt_ == "csv":
        text = dump_csv(
            ["name", "value", "relation", "bound", "margin", "passed"],
            [[c.name, c.value, c.relation, c.bound, c.margin, c.passed] for c in checks],
        )
    else:
        text = dump_json({"suite": suite, "seed": seed, "passed": passed, "checks": _checks_json(checks)}, timestamp)
    _emit(text, out)
    return EXIT_OK if passed else EXIT_VIOLATION


# -- experiments --------------------------------------------------------------

def run_counterexample(cfg: ExperimentConfig) -> tuple[dict, list[str], list[list], bool]:
    # the algebra is the diagonal algebra of size trunc, so alg_dim is not used here
    N = cfg.trunc
    w = parse_weights(cfg.weights, N)
    k_max = min(cfg.k_max, N)
    rep = counterexample_experiment(w, k_max, cfg.samples, cfg.seed)
    checks = []
    for k, nrm, tail, sup in rep.rows():
        if k < N:
            checks.append(check(f"norm[{k}]", abs(nrm - 1.0), "<=", 1e-9))
        checks.append(check(f"tail_bound[{k}]", sup**2, "<=", tail + 1e-9))
    report = {
        "kind": "counterexample",
        "config": cfg.to_dict(),
        "weights": rep.weights,
        "rows": [{"k": k, "norm": a, "tail": b, "sampled_sup": c} for k, a, b, c in rep.rows()],
        "checks": _checks_json(checks),
    }
    return report, ["k", "norm", "tail", "sampled_sup"], [list(r) for r in rep.rows()], all(c.passed for c in checks)


def witness_to_json(rep) -> dict:
    steps = []
    for i, s in enumerate(rep.steps, start=1):
        steps.append(
            {
                "n": i,
                "k": s.k,
                "x": vector_to_json(s.x),
                "y": vector_to_json(s.y),
                "z": vector_to_json(s.z),
                "u": matrix_to_json(s.u.entries),
                "checks": _checks_json(list(s.checks.values())),
            }
        )
    return {
        "delta": rep.delta,
        "horizon": rep.horizon,
        "scale": rep.scale,
        "state": rep.phi.to_json(),
        "seminorm": spec_to_json(rep.seminorm),
        "steps": steps,
        "pairwise": rep.pairwise.tolist(),
        "pairwise_dominating": rep.pairwise_dominating.tolist(),
        "checks": _checks_json(rep.checks),
        "passed": rep.passed,
    }


def run_witness(cfg: ExperimentConfig):
    T = build_operator(cfg.op, cfg)
    rep = witness_construction(T, cfg.steps, cfg.horizon, cfg.tol)
    report = {"kind": "witness", "config": cfg.to_dict(), **witness_to_json(rep)}
    m = rep.pairwise.shape[0]
    rows = [[i + 1, *rep.pairwise[i].tolist()] for i in range(m)]
    return report, ["n", *[str(j + 1) for j in range(m)]], rows, rep.passed


def run_probe(cfg: ExperimentConfig):
    T = build_operator(cfg.op, cfg)
    p = build_seminorm(cfg)
    table = compactness_probe(T, p, cfg.epsilon, cfg.sample_sizes, cfg.seed)
    report = {
        "kind": "probe",
        "config": cfg.to_dict(),
        "operator": T.tag,
        "table": [{"samples": s, "net_size": k} for s, k in table],
    }
    return report, ["samples", "net_size"], [list(r) for r in table], True


def run_separation(cfg: ExperimentConfig):
    desc = cfg.descriptor
    z = basis_vector(1, desc.unit() * cfg.z_norm, cfg.trunc)
    rep = separate_from_ball(z, cfg.samples, cfg.seed)
    checks = [
        check("violations", rep.violations, "<=", 0),
        check("outside_G", rep.outside_g, "<=", 0),
        check("pairing_violations", rep.pairing_violations, "<=", 0),
        check("cauchy_schwarz_residual", rep.cs_max_residual, "<=", 1e-9),
    ]
    fields_ = {
        "epsilon": rep.epsilon,
        "samples": rep.samples,
        "violations": rep.violations,
        "outside_G": rep.outside_g,
        "pairing_violations": rep.pairing_violations,
        "cs_max_residual": rep.cs_max_residual,
        "min_norm": rep.min_norm,
        "norm_lower_bound": rep.norm_lower_bound,
    }
    report = {"kind": "separation", "config": cfg.to_dict(), "state": rep.phi.to_json(), **fields_, "checks": _checks_json(checks)}
    return report, list(fields_), [list(fields_.values())], all(c.passed for c in checks)


RUNNERS = {
    "counterexample": run_counterexample,
    "witness": run_witness,
    "probe": run_probe,
    "separation": run_separation,
}


def cmd_experiment(kind: str, cfg: ExperimentConfig, timestamp: bool = True) -> int:
    if kind not in RUNNERS:
        raise UsageError(f"unknown experiment {kind!r}; choose from {', '.join(KINDS)}")
    report, header, rows, passed = RUNNERS[kind](cfg)
    text = dump_csv(header, rows) if cfg.format == "csv" else dump_json(report, timestamp)
    _emit(text, cfg.out)
    return EXIT_OK if passed else EXIT_VIOLATION


# -- net ----------------------------------------------------------------------

def cmd_net(points_path: str, seminorm_path: str | None, epsilon: float, fmt_: str, out: str | None, state: str) -> int:
    try:
        raw = json.loads(Path(points_path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read points: {exc}", field="points") from exc
    if isinstance(raw, dict):
        desc = AlgebraDescriptor(int(raw.get("alg_dim", 1)), bool(raw.get("commutative", False)))
        raw = raw["points"]
    else:
        desc = None
    pts = [vector_from_json(p, desc) for p in raw]
    if not pts:
        raise ConfigError("no points given", field="points")
    desc, N = pts[0].descriptor, pts[0].truncation
    sn = {"kind": "tau", "state": state}
    if seminorm_path:
        try:
            sn = json.loads(Path(seminorm_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read seminorm: {exc}", field="seminorm") from exc
    p = spec_from_json(sn, desc, N)
    net = greedy_net(pts, p, epsilon)
    if fmt_ == "csv":
        text = dump_csv(["point", "center"], [[i, net.center_indices[j]] for i, j in sorted(net.assignments.items())])
    else:
        text = dump_json(
            {
                "epsilon": net.epsilon,
                "size": net.size,
                "covered": net.covered,
                "center_indices": net.center_indices,
                "assignments": {str(i): net.center_indices[j] for i, j in sorted(net.assignments.items())},
            },
            timestamp=False,
        )
    _emit(text, out)
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------

def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS, help="output path (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
    common.add_argument("--config", default=argparse.SUPPRESS, help="JSON experiment config")
    common.add_argument("--no-timestamp", action="store_true", default=argparse.SUPPRESS)

    parser = _Parser(prog="hilmod", description=__doc__, parents=[common], formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    v = sub.add_parser("verify", parents=[common], help="run a property suite")
    v.add_argument("--suite", default="all")
    v.add_argument("--count", type=int, default=500, help="random instances per invariant family")

    e = sub.add_parser("experiment", parents=[common], help="run an experiment and write its report")
    e.add_argument("kind")
    e.add_argument("--alg-dim", dest="alg_dim", type=int)
    e.add_argument("--commutative", action="store_true", default=None)
    e.add_argument("--trunc", type=int)
    e.add_argument("--state")
    e.add_argument("--weights")
    e.add_argument("--kmax", dest="k_max", type=int)
    e.add_argument("--steps", type=int)
    e.add_argument("--horizon", type=int)
    e.add_argument("--epsilon", type=float)
    e.add_argument("--samples", help="sample count, or comma separated sizes for probe")
    e.add_argument("--op")
    e.add_argument("--z-norm", dest="z_norm", type=float)

    n = sub.add_parser("net", parents=[common], help="greedy epsilon-net of a point file")
    n.add_argument("--points", required=True)
    n.add_argument("--seminorm")
    n.add_argument("--epsilon", type=float, required=True)
    n.add_argument("--state", default="uniform")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        opts = vars(args)
        seed = opts.get("seed", 42)
        timestamp = not opts.get("no_timestamp", False)
        if args.command == "verify":
            return cmd_verify(args.suite, seed, opts.get("format", "json"), opts.get("out"), timestamp, args.count)
        if args.command == "experiment":
            overrides = {k: opts.get(k) for k in (
                "alg_dim", "commutative", "trunc", "state", "weights", "k_max", "steps", "horizon", "epsilon", "op", "z_norm"
            )}
            overrides.update({k: opts[k] for k in ("seed", "tol", "format", "out") if k in opts})
            if opts.get("samples"):
                sizes = _int_list(opts["samples"])
                if args.kind == "probe":
                    overrides["sample_sizes"] = sizes
                else:
                    overrides["samples"] = sizes[0]
            cfg = ExperimentConfig.load(opts.get("config"), overrides)
            return cmd_experiment(args.kind, cfg, timestamp)
        if args.command == "net":
            return cmd_net(args.points, args.seminorm, args.epsilon, opts.get("format", "json"), opts.get("out"), args.state)
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    except (UsageError, argparse.ArgumentTypeError) as exc:
        print(f"hilmod: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"hilmod: numeric error: {exc} (residual={exc.residual})", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, HilmodError) as exc:
        print(f"hilmod: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""``fairdiv`` command line: check, solve, opt, pof, gen, report.

Exit codes: 0 success / notions hold, 1 a fairness requirement or guarantee
failed, 2 bad input, 3 an exhaustive search hit its cap.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import algorithms, envygraph, fairness, oracle
from .model import (
    Instance,
    InvalidInputError,
    ResourceLimitError,
    allocation_from_dict,
    allocation_to_dict,
    instance_from_dict,
    instance_to_dict,
    optimal_welfare,
    validate,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3
CSV_COLUMNS = ("instance_id", "n", "m", "predicate", "opt", "constrained", "ratio")
REPORT_COLUMNS = ("instance_id", "n", "m", "algorithm", "welfare", "opt", "ratio", "bound", "fair", "passed")


class InputError(Exception):
    pass


def rational(x: Optional[Fraction]) -> dict:
    if x is None:
        return {"value": "inf", "decimal": None}
    return {"value": str(x), "decimal": float(x)}


def _exact(x: Optional[Fraction]) -> str:
    return "inf" if x is None else str(x)


def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _read_instance(path: str) -> Instance:
    try:
        return instance_from_dict(_read_json(path))
    except InvalidInputError as exc:
        raise InputError(f"{path}: {exc}") from None


def _ints(text: str, count: int, spec: str) -> list[int]:
    parts = text.split(",")
    if len(parts) != count:
        raise InputError(f"generator {spec!r} needs {count} comma-separated integers")
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise InputError(f"generator {spec!r} has a non-integer argument") from None


GENERATORS = {"random": oracle.gen_random, "ordered": oracle.gen_ordered, "identical": oracle.gen_identical}


def generate(spec: str) -> Instance:
    """``lb-efk:n,k`` or ``random|ordered|identical:n,m,seed``."""
    kind, _, args = spec.partition(":")
    try:
        if kind == "lb-efk":
            return oracle.gen_lowerbound_efk(*_ints(args, 2, spec))
        if kind in GENERATORS:
            n, m, seed = _ints(args, 3, spec)
            return GENERATORS[kind](n, m, seed)
    except InvalidInputError as exc:
        raise InputError(str(exc)) from None
    raise InputError(f"unknown generator {spec!r}; use lb-efk:n,k or random|ordered|identical:n,m,seed")


def _sources(args) -> list[tuple[str, object]]:
    """(instance_id, instance-or-spec) pairs selected by INSTANCE / --gen / --sweep."""
    if (args.instance is None) == (args.gen is None):
        raise InputError("give exactly one of an instance file or --gen")
    if args.instance is not None:
        if args.sweep:
            raise InputError("--sweep needs --gen random|ordered|identical:n,m,seed")
        return [(args.instance, _read_instance(args.instance))]
    if not args.sweep:
        return [(args.gen, args.gen)]
    kind, _, rest = args.gen.partition(":")
    if kind not in GENERATORS:
        raise InputError("--sweep needs a random, ordered or identical generator")
    n, m, seed = _ints(rest, 3, args.gen)
    return [(f"{kind}:{n},{m},{s}", f"{kind}:{n},{m},{s}") for s in range(seed, seed + args.sweep)]


def _emit(args, text: str, append: bool = False) -> None:
    if getattr(args, "output", None):
        with open(args.output, "a" if append else "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_csv(args, columns, rows) -> None:
    append = bool(args.output) and Path(args.output).exists() and Path(args.output).stat().st_size > 0
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if not append:
        writer.writerow(columns)
    writer.writerows(rows)
    _emit(args, buf.getvalue(), append=True)


def _envy_dump(instance, allocation) -> dict:
    return {
        kind.value: envygraph.build(instance, allocation, kind).to_adjacency()
        for kind in envygraph.EnvyKind
    }


# --- commands ---------------------------------------------------------------------


def cmd_check(args) -> int:
    instance = _read_instance(args.instance)
    try:
        allocation = allocation_from_dict(_read_json(args.allocation))
        validate(instance, allocation, complete=True)
    except InvalidInputError as exc:
        raise InputError(f"{args.allocation}: {exc}") from None
    report = fairness.full_report(instance, allocation, epistemic_cap=args.epistemic_cap)
    required = _required(args.require)
    doc = {"report": report.to_dict(), "required": list(required)}
    if args.dump_envy:
        doc["envy_graph"] = _envy_dump(instance, allocation)
    _emit(args, json.dumps(doc, indent=2) + "\n")
    if any(report[k].holds is False for k in required):
        return EXIT_FAIL
    if any(report[k].holds is None for k in required):
        return EXIT_LIMIT
    return EXIT_OK


def _required(text: Optional[str]) -> tuple[str, ...]:
    if not text:
        return tuple(k for k in fairness.NOTIONS if k not in fairness.DIAGNOSTIC_NOTIONS)
    names = tuple(x.strip().lower() for x in text.split(",") if x.strip())
    unknown = [x for x in names if x not in fairness.NOTIONS]
    if unknown:
        raise InputError(f"unknown notion(s) {unknown}; choose from {', '.join(fairness.NOTIONS)}")
    return names


def cmd_solve(args) -> int:
    instance = _read_instance(args.instance)
    if args.alg not in algorithms.ALGORITHMS:
        raise InputError(f"unknown algorithm {args.alg!r}; valid names: {', '.join(algorithms.ALGORITHMS)}")
    try:
        rep = oracle.verify_guarantee(instance, args.alg)
    except InvalidInputError as exc:
        raise InputError(str(exc)) from None
    report = fairness.full_report(instance, rep.allocation, epistemic_cap=args.epistemic_cap)
    doc = {
        "algorithm": args.alg,
        "allocation": allocation_to_dict(rep.allocation),
        "summary": {
            "welfare": rational(rep.welfare),
            "opt": rational(rep.opt),
            "ratio": rational(rep.ratio),
            "bound": rep.bound,
            "within_bound": rep.within_bound,
            "guarantee": rep.fairness,
            "guarantee_passed": rep.passed,
            "fairness": report.flags(),
        },
    }
    if args.dump_envy:
        doc["envy_graph"] = _envy_dump(instance, rep.allocation)
    _emit(args, json.dumps(doc, indent=2) + "\n")
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_opt(args) -> int:
    instance = _read_instance(args.instance)
    pred = _predicate(args.predicate)
    value, witness = oracle.max_sw_subject_to(instance, pred, args.cap)
    doc = {
        "predicate": pred.name,
        "value": None if value is None else rational(value),
        "allocation": None if witness is None else allocation_to_dict(witness),
        "unconstrained": rational(optimal_welfare(instance)),
    }
    _emit(args, json.dumps(doc, indent=2) + "\n")
    return EXIT_OK if witness is not None else EXIT_FAIL


def _predicate(name: str):
    try:
        return oracle.predicate(name)
    except InvalidInputError as exc:
        raise InputError(str(exc)) from None


def pof_row(job) -> dict:
    instance_id, source, pred_name, cap = job
    instance = generate(source) if isinstance(source, str) else source
    res = oracle.price_of_fairness(instance, oracle.predicate(pred_name), cap)
    return {
        "instance_id": instance_id,
        "n": instance.n,
        "m": instance.m,
        "predicate": pred_name,
        "opt": res.opt_value,
        "constrained": res.constrained_value,
        "ratio": res.ratio,
        "feasible": res.feasible,
        "opt_allocation": res.opt_allocation,
        "constrained_allocation": res.constrained_allocation,
    }


def _pof_json(row: dict) -> dict:
    return {
        "instance_id": row["instance_id"],
        "predicate": row["predicate"],
        "opt_value": rational(row["opt"]),
        "constrained_value": rational(row["constrained"]),
        "ratio": rational(row["ratio"]),
        "infinite": row["ratio"] is None,
        "feasible": row["feasible"],
        "opt_allocation": allocation_to_dict(row["opt_allocation"]),
        "constrained_allocation": (
            None if row["constrained_allocation"] is None
            else allocation_to_dict(row["constrained_allocation"])
        ),
    }


def _map(fn, jobs, workers: int) -> list:
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


def cmd_pof(args) -> int:
    pred = _predicate(args.predicate)
    jobs = [(iid, src, pred.name, args.cap) for iid, src in _sources(args)]
    rows = _map(pof_row, jobs, args.jobs)
    fmt = args.format or ("csv" if args.sweep else "json")
    if fmt == "csv":
        _emit_csv(args, CSV_COLUMNS, [
            [r["instance_id"], r["n"], r["m"], r["predicate"], _exact(r["opt"]),
             _exact(r["constrained"]), _exact(r["ratio"])]
            for r in rows
        ])
    else:
        docs = [_pof_json(r) for r in rows]
        _emit(args, json.dumps(docs[0] if len(docs) == 1 else docs, indent=2) + "\n")
    return EXIT_OK


def cmd_gen(args) -> int:
    _emit(args, json.dumps(instance_to_dict(generate(args.spec)), indent=2) + "\n")
    return EXIT_OK


def report_rows(job) -> list[dict]:
    instance_id, source, names = job
    instance = generate(source) if isinstance(source, str) else source
    rows = []
    for name in names:
        if not oracle.applicable(name, instance):
            continue
        rep = oracle.verify_guarantee(instance, name)
        rows.append({
            "instance_id": instance_id, "n": instance.n, "m": instance.m, "algorithm": name,
            "welfare": rep.welfare, "opt": rep.opt, "ratio": rep.ratio, "bound": rep.bound,
            "fair": all(rep.fairness.values()), "passed": rep.passed,
        })
    return rows


def cmd_report(args) -> int:
    names = list(algorithms.ALGORITHMS) if not args.algs else [a.strip() for a in args.algs.split(",")]
    unknown = [a for a in names if a not in algorithms.ALGORITHMS]
    if unknown:
        raise InputError(f"unknown algorithm(s) {unknown}; valid names: {', '.join(algorithms.ALGORITHMS)}")
    jobs = [(iid, src, names) for iid, src in _sources(args)]
    rows = [r for batch in _map(report_rows, jobs, args.jobs) for r in batch]
    if (args.format or "json") == "csv":
        _emit_csv(args, REPORT_COLUMNS, [
            [r["instance_id"], r["n"], r["m"], r["algorithm"], _exact(r["welfare"]), _exact(r["opt"]),
             _exact(r["ratio"]), "" if r["bound"] is None else r["bound"], r["fair"], r["passed"]]
            for r in rows
        ])
    else:
        docs = [
            {**r, "welfare": rational(r["welfare"]), "opt": rational(r["opt"]), "ratio": rational(r["ratio"])}
            for r in rows
        ]
        _emit(args, json.dumps(docs, indent=2) + "\n")
    return EXIT_OK if all(r["passed"] for r in rows) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fairdiv", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="fairness report for an allocation")
    c.add_argument("instance")
    c.add_argument("allocation")
    c.add_argument("--require", help=f"comma-separated notions that must hold ({', '.join(fairness.NOTIONS)})")
    c.add_argument("--dump-envy", action="store_true", help="include both envy graphs as adjacency lists")
    c.add_argument("--epistemic-cap", type=int, default=fairness.EPISTEMIC_CAP)
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("solve", help="run one allocation algorithm")
    s.add_argument("instance")
    s.add_argument("--alg", required=True, help=", ".join(algorithms.ALGORITHMS))
    s.add_argument("--dump-envy", action="store_true")
    s.add_argument("--epistemic-cap", type=int, default=fairness.EPISTEMIC_CAP)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_solve)

    o = sub.add_parser("opt", help="best welfare subject to a fairness predicate (exhaustive)")
    o.add_argument("instance")
    o.add_argument("--predicate", default="all")
    o.add_argument("--cap", type=int, help="enumeration cap (default: FAIRDIV_ENUM_CAP or 10^7)")
    o.add_argument("-o", "--output")
    o.set_defaults(func=cmd_opt)

    for name, func, helptext in (
        ("pof", cmd_pof, "exact price of fairness"),
        ("report", cmd_report, "run algorithms and check their guarantees"),
    ):
        q = sub.add_parser(name, help=helptext)
        q.add_argument("instance", nargs="?")
        q.add_argument("--gen", help="lb-efk:n,k or random|ordered|identical:n,m,seed")
        q.add_argument("--sweep", type=int, default=0, help="number of consecutive seeds to run")
        q.add_argument("--format", choices=("json", "csv"))
        q.add_argument("--jobs", type=int, default=1)
        q.add_argument("-o", "--output", help="CSV output is appended")
        if name == "pof":
            q.add_argument("--predicate", required=True)
            q.add_argument("--cap", type=int)
        else:
            q.add_argument("--algs", help="comma-separated algorithm names (default: all applicable)")
        q.set_defaults(func=func)

    g = sub.add_parser("gen", help="write a generated instance as JSON")
    g.add_argument("spec", help="lb-efk:n,k or random|ordered|identical:n,m,seed")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, InvalidInputError) as exc:
        print(f"fairdiv: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceLimitError as exc:
        print(f"fairdiv: resource limit: {exc} (required {exc.required})", file=sys.stderr)
        return EXIT_LIMIT


if __name__ == "__main__":
    sys.exit(main())

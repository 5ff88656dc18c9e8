"""Command-line front end.

Exit codes: 0 = YES / verified, 1 = NO / rejected, 2 = usage or parse error,
3 = budget exceeded (answer unknown).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import re
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from .core import BudgetExceeded, Measure, Query, UsageError, UtilityClass, verify
from .documents import dumps_allocation, dumps_instance, loads_allocation, loads_instance
from .generators import (
    ThreePartitionInput,
    X3cInput,
    gen_folklore,
    gen_identical_3partition,
    gen_random,
    gen_shadow_extension,
    gen_x3c_2v,
    gen_x3c_kv,
    gen_x3c_kvc,
)
from .oracle import DEFAULT_MAX_OWNER_VECTORS, OracleBudget
from .solvers import AlgorithmChoice, solve

EXIT_YES, EXIT_NO, EXIT_USAGE, EXIT_UNKNOWN = 0, 1, 2, 3

ALGORITHMS = [c.value for c in AlgorithmChoice]
MEASURES = [m.value for m in Measure]
FAMILIES = ["folklore", "random-binary", "random-bivalued", "random-ternary", "random-general", "random-identical"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _default_budget() -> int:
    raw = os.environ.get("EFPA_BUDGET")
    if raw:
        try:
            return int(raw)
        except ValueError:
            raise UsageError("EFPA_BUDGET must be an integer") from None
    return DEFAULT_MAX_OWNER_VECTORS


def cmd_solve(args) -> int:
    instance = loads_instance(_read(args.input))
    budget = OracleBudget(args.budget if args.budget is not None else _default_budget())
    query = Query(instance, Measure(args.measure), args.threshold)
    try:
        result = solve(query, AlgorithmChoice(args.algorithm), budget)
    except BudgetExceeded as exc:
        if args.json:
            print(json.dumps({"answer": "unknown", "algorithm_used": args.algorithm,
                              "nodes_explored": exc.nodes_explored, "elapsed_ms": None}))
        else:
            print(f"UNKNOWN: {exc}")
        return EXIT_UNKNOWN
    if args.witness and result.is_yes:
        Path(args.witness).write_text(dumps_allocation(result.witness) + "\n", encoding="utf-8")
    if args.json:
        print(json.dumps({
            "answer": result.answer.value,
            "algorithm_used": result.stats.algorithm_used,
            "nodes_explored": result.stats.nodes_explored,
            "elapsed_ms": round(result.stats.elapsed * 1000, 3),
        }))
    else:
        print(result.answer.value.upper())
    return EXIT_YES if result.is_yes else EXIT_NO


def cmd_verify(args) -> int:
    instance = loads_instance(_read(args.input))
    allocation = loads_allocation(_read(args.allocation), instance)
    problem = verify(instance, allocation, Measure(args.measure), args.threshold)
    if problem is None:
        print("OK")
        return EXIT_YES
    print(problem)
    return EXIT_NO


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _x3c_input(args) -> X3cInput:
    if not args.sets:
        raise UsageError("--sets is required, e.g. --sets '0,1,2;3,4,5'")
    sets = [tuple(_int_list(chunk)) for chunk in args.sets.split(";") if chunk.strip()]
    if args.n is not None:
        ground = 3 * args.n
    else:
        top = max(x for s in sets for x in s) + 1
        ground = 3 * math.ceil(top / 3)
    return X3cInput(ground, sets)


def _utility_class(name: str, v: Optional[int], u: Optional[int]) -> UtilityClass:
    if name == "binary":
        return UtilityClass(UtilityClass.BINARY, 0, 1)
    if name == "bivalued":
        return UtilityClass(UtilityClass.BIVALUED, 1, 2)
    if name == "ternary":
        return UtilityClass(UtilityClass.TERNARY, v or 1, u or 2)
    if name == "general":
        return UtilityClass(UtilityClass.GENERAL)
    if name == "identical":
        return UtilityClass(UtilityClass.GENERAL, identical=True)
    raise UsageError(f"unknown class {name!r}")


def cmd_gen(args) -> int:
    g = args.gadget

    def need(name):
        value = getattr(args, name)
        if value is None:
            raise UsageError(f"--{name} is required for --gadget {g}")
        return value

    if g == "folklore":
        inst = gen_folklore(need("n"))
    elif g == "identical-3partition":
        inst = gen_identical_3partition(ThreePartitionInput(_int_list(need("numbers"))))
    elif g == "shadow":
        base = loads_instance(_read(need("base")))
        inst = gen_shadow_extension(base, args.v, args.u)
    elif g == "x3c-kv":
        inst = gen_x3c_kv(_x3c_input(args), args.v or 1, args.k if args.k is not None else 3)
    elif g == "x3c-2v":
        inst = gen_x3c_2v(_x3c_input(args), args.v or 1)
    elif g == "x3c-kvc":
        inst = gen_x3c_kvc(_x3c_input(args), args.v or 2, args.k if args.k is not None else 1,
                           args.c if args.c is not None else 1)
    else:  # random
        m = need("m")
        n = need("n")
        inst = gen_random(n, m, _utility_class(args.cls, args.v, args.u), args.seed or 0)
    text = dumps_instance(inst) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_YES


def _parse_sizes(text: str) -> list[int]:
    sizes: list[int] = []
    for part in text.split(","):
        part = part.strip()
        match = re.fullmatch(r"(\d+)\.\.(\d+)", part)
        if match:
            lo, hi = int(match.group(1)), int(match.group(2))
            sizes.extend(range(lo, hi + 1))
        elif part.isdigit():
            sizes.append(int(part))
        else:
            raise UsageError(f"bad size list {text!r}; use e.g. 2..6 or 10,20,50")
    return sizes


def _family_instance(family: str, size: int, agents: Optional[int], seed: int, v: int, u: int):
    if family == "folklore":
        return gen_folklore(size)
    n = agents if agents is not None else size
    name = family.removeprefix("random-")
    return gen_random(n, size, _utility_class(name, v, u), seed)


def _threshold(token: str, n: int, m: int) -> int:
    if token == "n":
        return n
    if token == "m":
        return m
    value = int(token)
    if value < 0:
        raise UsageError("threshold must be non-negative")
    return value


BENCH_COLUMNS = ["family", "n", "m", "t", "measure", "algorithm", "answer", "elapsed_ms", "nodes"]


def run_bench(family: str, sizes: Sequence[int], measure: str, threshold: str, timeout: float,
              algorithm: str = "auto", trials: int = 1, agents: Optional[int] = None,
              seed: int = 0, budget: Optional[int] = None, v: int = 1, u: int = 2) -> list[dict]:
    if family not in FAMILIES:
        raise UsageError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    rows = []
    for size in sizes:
        for trial in range(trials):
            inst = _family_instance(family, size, agents, seed + 1000 * size + trial, v, u)
            t = _threshold(threshold, inst.n_agents, inst.m_resources)
            limits = OracleBudget(budget or 10**18, timeout)
            query = Query(inst, Measure(measure), t)
            row = {"family": family, "n": inst.n_agents, "m": inst.m_resources, "t": t,
                   "measure": measure}
            start = time.perf_counter()
            try:
                res = solve(query, AlgorithmChoice(algorithm), limits)
            except BudgetExceeded as exc:
                row.update(algorithm=algorithm, answer="timeout" if exc.reason == "time" else "unknown",
                           elapsed_ms=round((time.perf_counter() - start) * 1000, 3),
                           nodes=exc.nodes_explored)
            else:
                row.update(algorithm=res.stats.algorithm_used, answer=res.answer.value,
                           elapsed_ms=round(res.stats.elapsed * 1000, 3), nodes=res.stats.nodes_explored)
            rows.append(row)
    return rows


def cmd_bench(args) -> int:
    rows = run_bench(args.family, _parse_sizes(args.sizes), args.measure, args.threshold,
                     args.timeout, args.algorithm, args.trials, args.agents, args.seed or 0,
                     args.budget, args.v or 1, args.u or 2)
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out != "-" else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=BENCH_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_YES


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="efpa", description="Envy-free partial allocations: solve, verify, generate, benchmark.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="decide a query and optionally emit a witness")
    p.add_argument("--input", required=True)
    p.add_argument("--measure", required=True, choices=MEASURES)
    p.add_argument("--threshold", required=True, type=_nonneg_int)
    p.add_argument("--algorithm", default="auto", choices=ALGORITHMS)
    p.add_argument("--witness")
    p.add_argument("--budget", type=_nonneg_int, help="max owner vectors for the oracle (default 10^7 or $EFPA_BUDGET)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check an allocation for envy-freeness and the threshold")
    p.add_argument("--input", required=True)
    p.add_argument("--allocation", required=True)
    p.add_argument("--measure", required=True, choices=MEASURES)
    p.add_argument("--threshold", required=True, type=_nonneg_int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="write a generated instance document")
    p.add_argument("--gadget", required=True,
                   choices=["folklore", "identical-3partition", "shadow", "x3c-kv", "x3c-2v", "x3c-kvc", "random"])
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--numbers")
    p.add_argument("--sets")
    p.add_argument("--v", type=int)
    p.add_argument("--u", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--c", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--class", dest="cls", default="binary",
                   choices=["binary", "bivalued", "ternary", "general", "identical"])
    p.add_argument("--base")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="time solver runs and write CSV rows")
    p.add_argument("--family", required=True)
    p.add_argument("--sizes", required=True)
    p.add_argument("--measure", required=True, choices=MEASURES)
    p.add_argument("--threshold", required=True, help="integer, or 'n' / 'm'")
    p.add_argument("--timeout", required=True, type=float)
    p.add_argument("--out", required=True, help="CSV path, or - for stdout")
    p.add_argument("--algorithm", default="auto", choices=ALGORITHMS)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--agents", type=int, help="fix n for random families (size sets m)")
    p.add_argument("--seed", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--v", type=int)
    p.add_argument("--u", type=int)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, or an argument error (code 2)
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"efpa: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

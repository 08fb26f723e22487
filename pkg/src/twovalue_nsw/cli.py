"""Command-line entry point.

Exit codes: 0 success, 1 usage/parse/budget error, 2 a checked property failed.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .core import Allocation, UsageError, heavy_degrees, heavy_part, utility_vector
from .fileio import (
    FormatError,
    GenSpec,
    allocation_from_report,
    dumps_instance,
    fmt,
    generate,
    load_instance,
    make_report,
    parse_rational,
    report_inconsistencies,
)
from .oracle import DEFAULT_MAX_STATES, BudgetExceeded, brute_force_heavy_profiles, brute_force_mnw
from .properties import (
    check_phase3_invariants,
    is_ef1,
    is_efx,
    is_pareto_optimal,
    phase3_terminated,
    replay_moves,
)
from .solver import Move, SolverInvariantError, approx_solve, solve

ALL_PROPS = ("ef1", "efx", "po", "leximax-heavy", "phase3")
BENCH_COLUMNS = ["instance", "n", "m", "p", "nsw_product", "phase3_move_count",
                 "wall_time_ms", "oracle_product", "match", "error"]


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _run_solver(instance):
    if instance.is_integral:
        return solve(instance)
    return approx_solve(instance)


def cmd_solve(args) -> int:
    instance = load_instance(args.instance)
    result = _run_solver(instance)
    _emit(json.dumps(make_report(instance, result), indent=2) + "\n", args.out)
    return 0


def cmd_oracle(args) -> int:
    instance = load_instance(args.instance)
    rep = brute_force_mnw(instance, max_states=args.max_states)
    first = rep.best_allocations[0] if rep.best_allocations else None
    payload = {
        "best_product": fmt(rep.best_product.product),
        "maximizer": list(first.owner) if first is not None else None,
        "maximizer_utilities": [fmt(x) for x in rep.best_utilities[0]] if rep.best_utilities else None,
        "maximizer_count": rep.maximizer_count,
        "positive_agent_count": rep.positive_agent_count,
        "state_count": rep.state_count,
        "note": rep.note,
    }
    print(json.dumps(payload, indent=2))
    return 0


def _phase3_check(instance, report, alloc) -> dict:
    if "rounded_p" in report:
        instance = instance.with_p(int(report["rounded_p"]))
    if not instance.is_integral:
        raise UsageError("phase3 check needs integral p or a report carrying rounded_p")
    moves = report.get("moves", [])
    owner = list(alloc.owner)
    for mv in reversed(moves):
        owner[mv["good"]] = mv["from_agent"]
    start = Allocation(owner)
    u0 = utility_vector(instance, start)
    order = report.get("phase3_order") or sorted(range(instance.n), key=lambda i: (u0[i], i))
    violations = []
    trace = [Move(mv["good"], mv["from_agent"], mv["to_agent"], None, None) for mv in moves]
    for step, (before, mv, after) in enumerate(replay_moves(start, trace)):
        for v in check_phase3_invariants(instance, before, mv, after, order):
            violations.append({"move": step, "violation": v})
    if not phase3_terminated(instance, alloc, order):
        violations.append({"move": None, "violation": "final state still satisfies the loop condition"})
    return {"ok": not violations, "witness": violations or None}


def cmd_check(args) -> int:
    instance = load_instance(args.instance)
    try:
        report = json.loads(Path(args.report).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{args.report}: invalid JSON") from exc
    alloc = allocation_from_report(instance, report)
    bad = report_inconsistencies(instance, report)
    if bad:
        raise FormatError(f"report fields inconsistent with assignment: {bad}")
    props = [p.strip() for p in args.props.split(",") if p.strip()]
    unknown = set(props) - set(ALL_PROPS)
    if unknown:
        raise UsageError(f"unknown properties: {sorted(unknown)}")
    results = {}
    for prop in props:
        if prop == "ef1":
            c = is_ef1(instance, alloc)
            results[prop] = {"ok": c.ok, "witness": c.witness and {"envious": c.witness[0], "envied": c.witness[1]}}
        elif prop == "efx":
            c = is_efx(instance, alloc)
            results[prop] = {"ok": c.ok, "witness": c.witness and {"envious": c.witness[0], "envied": c.witness[1]}}
            if not c.ok:
                results[prop]["flag"] = "efx-investigate"
        elif prop == "po":
            c = is_pareto_optimal(instance, alloc, max_states=args.max_states)
            results[prop] = {"ok": c.ok, "witness": None if c.ok else {"dominator": list(c.witness.owner)}}
        elif prop == "leximax-heavy":
            hp = heavy_part(instance, alloc)
            ref = brute_force_heavy_profiles(instance, max_states=args.max_states)
            got = sorted(heavy_degrees(instance, hp))
            want = list(ref[len(hp)])
            results[prop] = {"ok": got == want,
                             "witness": None if got == want else {"heavy_degrees": got, "leximax": want}}
        elif prop == "phase3":
            results[prop] = _phase3_check(instance, report, alloc)
    print(json.dumps(results, indent=2))
    return 0 if all(r["ok"] for r in results.values()) else 2


def cmd_gen(args) -> int:
    spec = GenSpec(args.n, args.m, parse_rational(args.p), args.density, args.seed)
    _emit(dumps_instance(generate(spec)), args.out)
    return 0


def bench_one(path: str, max_states: int = DEFAULT_MAX_STATES) -> dict:
    """One CSV row; failures land in the ``error`` column."""
    row = {c: "" for c in BENCH_COLUMNS}
    row["instance"] = Path(path).name
    try:
        instance = load_instance(path)
        row.update(n=instance.n, m=instance.m, p=fmt(instance.p))
        t0 = time.perf_counter()
        result = _run_solver(instance)
        row["wall_time_ms"] = f"{(time.perf_counter() - t0) * 1000:.3f}"
        inner = getattr(result, "inner", result)
        row["nsw_product"] = fmt(result.nsw.product)
        row["phase3_move_count"] = len(inner.phase3_moves)
        if instance.n ** instance.m <= max_states:
            best = brute_force_mnw(instance, max_states=max_states).best_product.product
            row["oracle_product"] = fmt(best)
            if instance.is_integral:
                ok = result.nsw.product == best
            else:
                ok = result.nsw.product >= Fraction(result.factor) ** instance.n * best
            row["match"] = "true" if ok else "false"
    except (UsageError, SolverInvariantError, OSError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def cmd_bench(args) -> int:
    files = sorted(str(p) for p in Path(args.suite).glob("*.json"))
    if args.jobs > 1 and len(files) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(bench_one, files, [args.max_states] * len(files)))
    else:
        rows = [bench_one(f, args.max_states) for f in files]
    rows.sort(key=lambda r: r["instance"])
    with open(args.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=BENCH_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    if rows and all(r["error"] for r in rows):
        return 1
    return 0


class _Parser(argparse.ArgumentParser):
    # exit code 2 is reserved for property violations
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="twovalue-nsw", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="maximize NSW (approximately for non-integral p)")
    s.add_argument("instance")
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("oracle", help="brute-force maximum NSW")
    s.add_argument("instance")
    s.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("check", help="check fairness/structure properties of a report")
    s.add_argument("instance")
    s.add_argument("report")
    s.add_argument("--props", default=",".join(ALL_PROPS))
    s.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("gen", help="generate a seeded random instance")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--p", required=True)
    s.add_argument("--density", type=float, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("bench", help="solve every instance in a directory, write CSV")
    s.add_argument("--suite", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    s.set_defaults(func=cmd_bench)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"error: {exc}; rerun with --max-states {exc.required}", file=sys.stderr)
        return 1
    except (UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

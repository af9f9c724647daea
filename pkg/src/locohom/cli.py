"""Command-line entry point.

Exit codes: 0 yes/success, 1 no, 2 usage error, 3 input error, 4 budget
exceeded.  Results go to stdout (or --json FILE), diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from .generators import (
    gen_3partition_reduction,
    gen_hprime_partition_reduction,
    gen_random_bounded_fracture,
    known_lbhom_witness,
    verify_reduction_invariants,
)
from .graphs import BudgetExceededError, Graph, GraphError, format_graph, parse_graph
from .homs import (
    LOC_BIJ,
    LOC_INJ,
    LOC_SURJ,
    brute_force_hom,
    brute_force_role,
    first_violation,
    witness_to_json,
)
from .pipeline import (
    SolveReport,
    discover_parameters,
    solve_constrained_hom,
    solve_lihom_special,
    solve_role_assignment,
)
from .structure import compute_types

EXIT_YES = 0
EXIT_NO = 1
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_BUDGET = 4


def _read_graph(path: str) -> Graph:
    try:
        return parse_graph(Path(path).read_text())
    except FileNotFoundError:
        raise GraphError(f"cannot read {path}")


def _brute_threshold() -> int:
    try:
        return int(os.environ.get("LOCOHOM_BRUTE_MAX", "10"))
    except ValueError:
        return 10


def _solve(args: argparse.Namespace) -> int:
    guest = _read_graph(args.guest)
    report: SolveReport
    if args.problem == "role":
        if args.h is None:
            raise GraphError("role assignment needs --h")
        algo = args.algo
        if algo == "auto":
            algo = "brute" if guest.n <= _brute_threshold() else "fpt"
        if algo == "brute":
            res = brute_force_role(guest, args.h)
            report = (
                SolveReport(True, witness=res[0], host=res[1], stats={"algo": "brute"})
                if res
                else SolveReport(False, stats={"algo": "brute"})
            )
        else:
            report = solve_role_assignment(guest, args.h, args.k, args.c)
    else:
        if args.host is None:
            raise GraphError(f"{args.problem} needs --host")
        host = _read_graph(args.host)
        algo = args.algo
        if algo == "auto":
            algo = "brute" if guest.n <= _brute_threshold() else "fpt"
        if args.problem in ("lbhom", "lshom"):
            mode = "B" if args.problem == "lbhom" else "S"
            if algo == "brute":
                target = LOC_BIJ if mode == "B" else LOC_SURJ
                wit = brute_force_hom(guest, host, target)
                report = SolveReport(wit is not None, witness=wit, stats={"algo": "brute"})
            else:
                report = solve_constrained_hom(
                    guest, host, mode, args.k, args.c, threads=args.threads
                )
        else:  # lihom
            if algo == "brute":
                wit = brute_force_hom(guest, host, LOC_INJ)
                report = SolveReport(wit is not None, witness=wit, stats={"algo": "brute"})
            else:
                report = solve_lihom_special(guest, host)
    payload = witness_to_json(report.answer, report.witness, report.host)
    if args.json:
        Path(args.json).write_text(payload + "\n")
    else:
        print(payload)
    print(json.dumps({"stats": report.stats}), file=sys.stderr)
    return EXIT_YES if report.answer else EXIT_NO


def _generate(args: argparse.Namespace) -> int:
    prefix = args.out_prefix
    if args.family == "3part":
        a = [int(x) for x in args.a.split(",") if x]
        guest, host = gen_3partition_reduction(a, args.b)
        Path(f"{prefix}_guest.gr").write_text(format_graph(guest))
        Path(f"{prefix}_host.gr").write_text(format_graph(host))
        if args.emit_witness:
            wit = known_lbhom_witness(a, args.b)
            if wit is not None:
                Path(f"{prefix}_witness.json").write_text(
                    witness_to_json(True, wit) + "\n"
                )
        print(f"wrote {prefix}_guest.gr and {prefix}_host.gr")
    elif args.family == "hpart":
        base = _read_graph(args.input)
        guest, host = gen_hprime_partition_reduction(base, args.variant, args.k)
        Path(f"{prefix}_guest.gr").write_text(format_graph(guest))
        Path(f"{prefix}_host.gr").write_text(format_graph(host))
        print(f"wrote {prefix}_guest.gr and {prefix}_host.gr")
    else:  # random
        g = gen_random_bounded_fracture(args.n, args.k, args.c, args.seed)
        Path(f"{prefix}.gr").write_text(format_graph(g))
        print(f"wrote {prefix}.gr")
    return EXIT_YES


def _verify(args: argparse.Namespace) -> int:
    guest = _read_graph(args.guest)
    host = _read_graph(args.host)
    try:
        data = json.loads(Path(args.mapping).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise GraphError(f"cannot read mapping: {exc}")
    if data.get("answer") != "yes" or "mapping" not in data:
        raise GraphError("mapping file does not contain a yes-witness")
    phi = [int(x) - 1 for x in data["mapping"]]
    mode = {"s": LOC_SURJ, "b": LOC_BIJ, "i": LOC_INJ}[args.mode]
    if len(phi) != guest.n or any(not (0 <= x < host.n) for x in phi):
        print("mapping is not a total map into the host", file=sys.stderr)
        return EXIT_NO
    problem = first_violation(guest, host, phi, mode)
    if problem is None:
        print("valid")
        return EXIT_YES
    print(problem, file=sys.stderr)
    return EXIT_NO


def _verify_reduction(args: argparse.Namespace) -> int:
    guest = _read_graph(args.guest)
    host = _read_graph(args.host)
    report = verify_reduction_invariants(guest, host)
    if report.passed:
        print("all reduction invariants hold")
        return EXIT_YES
    for msg in report.failures:
        print(msg, file=sys.stderr)
    return EXIT_NO


def _types(args: argparse.Namespace) -> int:
    g = _read_graph(args.graph)
    d = [int(x) - 1 for x in args.deletion.split(",") if x] if args.deletion else []
    types, counts = compute_types(g, d)
    for i, t in enumerate(types):
        print(f"# type {i} count {counts[t]}")
        sys.stdout.write(format_graph(t.rep.graph))
    return EXIT_YES


def _bench(args: argparse.Namespace) -> int:
    suite = Path(args.suite)
    if not suite.is_dir():
        raise GraphError(f"suite {args.suite} is not a directory")
    writer = csv.writer(sys.stdout)
    writer.writerow(["instance", "answer", "wall_time_s", "stats"])
    for manifest in sorted(suite.glob("*.json")):
        spec = json.loads(manifest.read_text())
        guest = parse_graph((suite / spec["guest"]).read_text())
        start = time.perf_counter()
        if spec["problem"] == "role":
            report = solve_role_assignment(guest, int(spec["h"]))
        elif spec["problem"] in ("lbhom", "lshom"):
            host = parse_graph((suite / spec["host"]).read_text())
            mode = "B" if spec["problem"] == "lbhom" else "S"
            report = solve_constrained_hom(
                guest, host, mode, spec.get("k"), spec.get("c")
            )
        else:
            host = parse_graph((suite / spec["host"]).read_text())
            report = solve_lihom_special(guest, host)
        elapsed = time.perf_counter() - start
        writer.writerow(
            [
                manifest.name,
                "yes" if report.answer else "no",
                f"{elapsed:.4f}",
                json.dumps(report.stats, sort_keys=True),
            ]
        )
    return EXIT_YES


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="locohom",
        description="Exact solvers for locally constrained graph homomorphisms",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="decide an instance")
    p_solve.add_argument("--problem", required=True, choices=["lbhom", "lshom", "lihom", "role"])
    p_solve.add_argument("--guest", required=True)
    p_solve.add_argument("--host")
    p_solve.add_argument("--h", type=int, default=None)
    p_solve.add_argument("--k", type=int, default=None)
    p_solve.add_argument("--c", type=int, default=None)
    p_solve.add_argument("--algo", choices=["auto", "fpt", "brute"], default="auto")
    p_solve.add_argument("--json", default=None, help="write the witness JSON here")
    p_solve.add_argument("--threads", type=int, default=1)
    p_solve.set_defaults(func=_solve)

    p_gen = sub.add_parser("generate", help="emit generated instances")
    gen_sub = p_gen.add_subparsers(dest="family", required=True)
    g3 = gen_sub.add_parser("3part")
    g3.add_argument("--a", required=True, help="comma separated element list")
    g3.add_argument("--b", type=int, required=True)
    g3.add_argument("--out-prefix", required=True)
    g3.add_argument("--emit-witness", action="store_true")
    g3.set_defaults(func=_generate)
    gh = gen_sub.add_parser("hpart")
    gh.add_argument("--variant", required=True, choices=["p3", "k3"])
    gh.add_argument("--input", required=True)
    gh.add_argument("--k", type=int, required=True)
    gh.add_argument("--out-prefix", required=True)
    gh.set_defaults(func=_generate)
    gr = gen_sub.add_parser("random")
    gr.add_argument("--n", type=int, required=True)
    gr.add_argument("--k", type=int, required=True)
    gr.add_argument("--c", type=int, required=True)
    gr.add_argument("--seed", type=int, required=True)
    gr.add_argument("--out-prefix", required=True)
    gr.set_defaults(func=_generate)

    p_ver = sub.add_parser("verify", help="check a witness mapping")
    p_ver.add_argument("--guest", required=True)
    p_ver.add_argument("--host", required=True)
    p_ver.add_argument("--mapping", required=True)
    p_ver.add_argument("--mode", required=True, choices=["s", "b", "i"])
    p_ver.set_defaults(func=_verify)

    p_red = sub.add_parser("verify-reduction", help="structural checks on a reduction pair")
    p_red.add_argument("--guest", required=True)
    p_red.add_argument("--host", required=True)
    p_red.set_defaults(func=_verify_reduction)

    p_types = sub.add_parser("types", help="dump component types of a graph")
    p_types.add_argument("--graph", required=True)
    p_types.add_argument("--deletion", default="", help="comma separated 1-based vertex ids")
    p_types.set_defaults(func=_types)

    p_bench = sub.add_parser("bench", help="run a directory of instance manifests")
    p_bench.add_argument("--suite", required=True)
    p_bench.set_defaults(func=_bench)
    return parser


def run_cli(argv: Sequence[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0,) else 0
    try:
        return args.func(args)
    except GraphError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))

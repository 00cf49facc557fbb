"""Command line interface.

Subcommands: `gen` writes an instance file for a layered-graph spec and
seed, `solve` runs a solver on an instance, `bench` sweeps graphs x seeds x
solvers and emits CSV.  Exit codes: 0 solved, 1 timeout, 2 infeasible,
3 usage error.
"""

from __future__ import annotations

import argparse
import sys

from .bench import (
    ADJACENT,
    SOLVER_NAMES,
    WINDOW3,
    LayeredSpec,
    generate_layered,
    identity_instance,
    random_permutation_instance,
    run_benchmark,
    solve_with,
    summarize,
    write_csv,
)
from .model import (
    Instance,
    discretize,
    format_instance,
    format_solution,
    load_instance,
    reinterpret_unit_solution,
)
from .result import INFEASIBLE, SOLVED, TIMEOUT
from .svg import render_svg
from .validation import sampled_overlap_check, validate_plans

_EXIT = {SOLVED: 0, TIMEOUT: 1, INFEASIBLE: 2}
USAGE_ERROR = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit 3 on usage errors, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _parse_sizes(text: str) -> tuple[int, ...]:
    cleaned = text.strip().strip("[]")
    try:
        sizes = tuple(int(part) for part in cleaned.split(",") if part.strip())
    except ValueError as exc:
        raise ValueError(f"bad graph spec {text!r}") from exc
    if len(sizes) < 2:
        raise ValueError(f"bad graph spec {text!r}: need at least two layers")
    return sizes


def _build_parser() -> _Parser:
    parser = _Parser(prog="mapfr", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="emit an instance file for a layered graph")
    gen.add_argument("--graph", required=True, help="layer sizes, e.g. 3,1,3")
    gen.add_argument("--connectivity", choices=[ADJACENT, WINDOW3], default=WINDOW3)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--identity", action="store_true", help="identity permutations instead of seeded random")
    gen.add_argument("--out", help="output path (default stdout)")

    solve = sub.add_parser("solve", help="solve an instance")
    solve.add_argument("instance", nargs="?", help="instance file (or use --graph/--seed)")
    solve.add_argument("--graph", help="generate a layered instance instead of reading a file")
    solve.add_argument("--connectivity", choices=[ADJACENT, WINDOW3], default=WINDOW3)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--solver", choices=list(SOLVER_NAMES), default="smtcbsr")
    solve.add_argument("--timeout", type=float, default=60.0, help="seconds")
    solve.add_argument("--discretize", action="store_true", help="treat every edge as unit duration")
    solve.add_argument("--dump-cnf", metavar="DIR", help="write one DIMACS file per SAT call")
    solve.add_argument("--svg", metavar="PATH", help="render the solution")
    solve.add_argument("--validate", choices=["def2", "sampled"], default="def2")

    bench = sub.add_parser("bench", help="run the benchmark sweep")
    bench.add_argument("--graphs", nargs="+", default=["2,2", "3,1,3", "2,3,2", "3,3,3"])
    bench.add_argument("--connectivity", choices=[ADJACENT, WINDOW3, "both"], default="both")
    bench.add_argument("--seeds", type=int, default=10, help="use seeds 0..N-1")
    bench.add_argument("--solvers", nargs="+", choices=list(SOLVER_NAMES), default=list(SOLVER_NAMES))
    bench.add_argument("--timeout", type=float, default=60.0)
    bench.add_argument("--csv", required=True, help="output CSV path")
    return parser


def _cmd_gen(args) -> int:
    spec = LayeredSpec(_parse_sizes(args.graph), connectivity=args.connectivity)
    graph = generate_layered(spec)
    instance = (
        identity_instance(graph, spec)
        if args.identity
        else random_permutation_instance(graph, spec, args.seed)
    )
    text = format_instance(instance)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _load_for_solve(args) -> Instance:
    if args.graph:
        spec = LayeredSpec(_parse_sizes(args.graph), connectivity=args.connectivity)
        return random_permutation_instance(generate_layered(spec), spec, args.seed)
    if not args.instance:
        raise ValueError("provide an instance file or --graph")
    return load_instance(args.instance)


def _cmd_solve(args) -> int:
    instance = _load_for_solve(args)
    solved_instance = discretize(instance) if args.discretize else instance
    kwargs = {}
    if args.dump_cnf and args.solver == "smtcbsr":
        from .smt_cbsr import solve_smt_cbsr

        result = solve_smt_cbsr(solved_instance, timeout=args.timeout, dump_dir=args.dump_cnf)
    else:
        result = solve_with(args.solver, solved_instance, args.timeout)
    print(f"status {result.status}", file=sys.stderr)
    for key, value in sorted(result.stats.items()):
        if key != "mu_history":
            print(f"{key} {value}", file=sys.stderr)
    if not result.solved:
        return _EXIT[result.status]
    sys.stdout.write(format_solution(result.solution))
    if args.discretize:
        continuous = reinterpret_unit_solution(instance, result.solution)
        print(f"continuous_makespan {continuous:.9f}", file=sys.stderr)
    if args.validate == "sampled":
        overlaps = sampled_overlap_check(solved_instance, result.solution, 1e-3)
        print(f"sampled_overlaps {len(overlaps)}", file=sys.stderr)
    else:
        collisions = validate_plans(solved_instance, result.solution)
        print(f"collisions {len(collisions)}", file=sys.stderr)
    if args.svg:
        render_svg(instance, result.solution, args.svg)
    return 0


def _cmd_bench(args) -> int:
    connectivities = [ADJACENT, WINDOW3] if args.connectivity == "both" else [args.connectivity]
    specs = [
        LayeredSpec(_parse_sizes(g), connectivity=c)
        for g in args.graphs
        for c in connectivities
    ]
    results = run_benchmark(specs, list(range(args.seeds)), args.solvers, args.timeout)
    write_csv(results, args.csv)
    for row in summarize(results):
        avg = "-" if row["avg_runtime_s"] is None else f"{row['avg_runtime_s']:.3f}s"
        print(
            f"{row['graph']:>22} {row['solver']:>8}: "
            f"{row['solved']}/{row['runs']} solved, avg runtime {avg}"
        )
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "solve":
            return _cmd_solve(args)
        return _cmd_bench(args)
    except (ValueError, OSError) as exc:
        print(f"mapfr: error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())

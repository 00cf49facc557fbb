"""Layered-graph benchmark generation and experiment orchestration.

A layered graph [l_1, ..., l_h] places l_i vertices at height y = i,
horizontally centered with unit spacing.  With `adjacent` connectivity
every vertex pair in consecutive layers is joined; `window3` additionally
joins pairs two layers apart, so any three consecutive layers are fully
interconnected.  Instances put one agent per first-layer vertex with
starts and goals drawn as independent seeded permutations of the first and
last layers.
"""

from __future__ import annotations

import csv
import random
import time
from dataclasses import dataclass, field

from .cbsr import solve_cbsr
from .geometry import Point2D
from .model import Agent, Graph, Instance
from .result import SOLVED, SolveResult
from .smt_cbsr import solve_smt_cbsr
from .validation import validate_plans

ADJACENT = "adjacent"
WINDOW3 = "window3"

SOLVER_NAMES = ("cbsr", "smtcbsr")


@dataclass(frozen=True)
class LayeredSpec:
    layer_sizes: tuple[int, ...]
    connectivity: str = WINDOW3
    spacing: float = 1.0
    agent_diameter: float = 0.2
    agent_velocity: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "layer_sizes", tuple(self.layer_sizes))
        if len(self.layer_sizes) < 2:
            raise ValueError("a layered graph needs at least 2 layers")
        if any(s < 1 for s in self.layer_sizes):
            raise ValueError("layer sizes must be positive")
        if self.connectivity not in (ADJACENT, WINDOW3):
            raise ValueError(f"unknown connectivity {self.connectivity!r}")

    @property
    def label(self) -> str:
        return "[" + ",".join(map(str, self.layer_sizes)) + "]-" + self.connectivity


def _layer_vertex_ids(spec: LayeredSpec) -> list[list[int]]:
    layers = []
    next_id = 0
    for size in spec.layer_sizes:
        layers.append(list(range(next_id, next_id + size)))
        next_id += size
    return layers


def generate_layered(spec: LayeredSpec) -> Graph:
    vertices: list[tuple[int, Point2D]] = []
    layers = _layer_vertex_ids(spec)
    for i, ids in enumerate(layers):
        size = len(ids)
        y = float(i + 1)
        for j, vid in enumerate(ids):
            x = (j - (size - 1) / 2.0) * spec.spacing
            vertices.append((vid, Point2D(x, y)))
    edges: list[tuple[int, int]] = []
    reach = 2 if spec.connectivity == WINDOW3 else 1
    for i in range(len(layers)):
        for d in range(1, reach + 1):
            if i + d >= len(layers):
                break
            edges.extend((u, v) for u in layers[i] for v in layers[i + d])
    return Graph(vertices, edges)


def _instance_from_permutations(
    graph: Graph, spec: LayeredSpec, starts: list[int], goals: list[int]
) -> Instance:
    agents = tuple(
        Agent(i, spec.agent_velocity, spec.agent_diameter) for i in range(len(starts))
    )
    return Instance(
        graph,
        agents,
        {i: v for i, v in enumerate(starts)},
        {i: v for i, v in enumerate(goals)},
    )


def random_permutation_instance(graph: Graph, spec: LayeredSpec, seed: int) -> Instance:
    """Fully occupied first and last layers with seeded independent random
    start and goal permutations; deterministic per seed."""
    layers = _layer_vertex_ids(spec)
    first, last = layers[0], layers[-1]
    if len(first) != len(last):
        raise ValueError("first and last layers must have equal sizes")
    rng = random.Random(seed)
    starts = first[:]
    goals = last[:]
    rng.shuffle(starts)
    rng.shuffle(goals)
    return _instance_from_permutations(graph, spec, starts, goals)


def identity_instance(graph: Graph, spec: LayeredSpec) -> Instance:
    """Agent i starts at the i-th first-layer vertex and ends at the i-th
    last-layer vertex (the easy straight-across configuration)."""
    layers = _layer_vertex_ids(spec)
    if len(layers[0]) != len(layers[-1]):
        raise ValueError("first and last layers must have equal sizes")
    return _instance_from_permutations(graph, spec, layers[0], layers[-1])


@dataclass
class BenchmarkResult:
    graph: str
    seed: int
    solver: str
    status: str
    makespan: float | None
    runtime_s: float
    iterations: int
    expanded: int


def solve_with(name: str, instance: Instance, timeout: float) -> SolveResult:
    if name == "cbsr":
        return solve_cbsr(instance, timeout=timeout)
    if name == "smtcbsr":
        return solve_smt_cbsr(instance, timeout=timeout)
    raise ValueError(f"unknown solver {name!r}")


def _counts(name: str, result: SolveResult) -> tuple[int, int]:
    # iterations: the solver's primary decision count (expanded constraint
    # tree nodes / SAT refinement iterations); expanded: CT expansions / SAT calls.
    if name == "cbsr":
        return result.stats.get("expanded", 0), result.stats.get("expanded", 0)
    return result.stats.get("iterations", 0), result.stats.get("sat_calls", 0)


def run_benchmark(
    specs: list[LayeredSpec],
    seeds: list[int],
    solvers: list[str] = list(SOLVER_NAMES),
    timeout: float = 60.0,
    *,
    revalidate: bool = True,
) -> list[BenchmarkResult]:
    """Run each solver on each (spec, seed) instance; failures are recorded,
    never raised, so a batch always completes."""
    results: list[BenchmarkResult] = []
    for spec in specs:
        graph = generate_layered(spec)
        for seed in seeds:
            instance = random_permutation_instance(graph, spec, seed)
            for name in solvers:
                t0 = time.monotonic()
                try:
                    res = solve_with(name, instance, timeout)
                    if revalidate and res.solved:
                        assert not validate_plans(instance, res.solution)
                    iterations, expanded = _counts(name, res)
                    results.append(
                        BenchmarkResult(
                            spec.label,
                            seed,
                            name,
                            res.status,
                            res.makespan,
                            res.stats.get("runtime_seconds", time.monotonic() - t0),
                            iterations,
                            expanded,
                        )
                    )
                except Exception:  # defensive: a crash must not kill the batch
                    results.append(
                        BenchmarkResult(
                            spec.label, seed, name, "error", None,
                            time.monotonic() - t0, 0, 0,
                        )
                    )
    return results


CSV_COLUMNS = ["graph", "seed", "solver", "status", "makespan", "runtime_s", "iterations", "expanded"]


def write_csv(results: list[BenchmarkResult], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_COLUMNS)
        for r in results:
            writer.writerow(
                [
                    r.graph,
                    r.seed,
                    r.solver,
                    r.status,
                    "" if r.makespan is None else f"{r.makespan:.9f}",
                    f"{r.runtime_s:.6f}",
                    r.iterations,
                    r.expanded,
                ]
            )


def summarize(results: list[BenchmarkResult]) -> list[dict]:
    """Per (graph, solver): success rate plus averages over solved runs only."""
    groups: dict[tuple[str, str], list[BenchmarkResult]] = {}
    for r in results:
        groups.setdefault((r.graph, r.solver), []).append(r)
    rows = []
    for (graph, solver), rs in sorted(groups.items()):
        solved = [r for r in rs if r.status == SOLVED]
        rows.append(
            {
                "graph": graph,
                "solver": solver,
                "runs": len(rs),
                "solved": len(solved),
                "success_rate": len(solved) / len(rs) if rs else 0.0,
                "avg_runtime_s": (
                    sum(r.runtime_s for r in solved) / len(solved) if solved else None
                ),
                "avg_iterations": (
                    sum(r.iterations for r in solved) / len(solved) if solved else None
                ),
            }
        )
    return rows

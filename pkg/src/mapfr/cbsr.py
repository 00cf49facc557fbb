"""Branching conflict-search solver.

A binary constraint tree is searched best-first by makespan.  Each node
holds per-agent optimal plans under its constraint set; when validation
finds collisions, one conflict is chosen (preferring cardinal conflicts)
and two children are generated, each forbidding one side's occupancy over
the overlap interval and replanning only that agent.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass

from .geometry import TimeInterval
from .lowlevel import Constraint, shortest_temporal_plan
from .model import Instance, Solution, TemporalPlan, individual_makespan, overall_makespan
from .result import INFEASIBLE, SOLVED, TIMEOUT, SolveResult
from .validation import Collision, CollisionSide, validate_plans

CARDINAL = "cardinal"
SEMI_CARDINAL = "semi-cardinal"
NON_CARDINAL = "non-cardinal"

_RANK = {CARDINAL: 2, SEMI_CARDINAL: 1, NON_CARDINAL: 0}


@dataclass
class CTNode:
    constraints: frozenset[Constraint]
    plans: dict[int, TemporalPlan]
    mu: float


def _side_constraint(side: CollisionSide, overlap: TimeInterval) -> Constraint:
    return Constraint(side.agent, side.from_v, side.to_v, overlap)


def _replan_both(
    instance: Instance,
    node: CTNode,
    collision: Collision,
    cache: dict,
) -> list[tuple[int, Constraint, TemporalPlan | None]]:
    overlap = collision.overlap
    out = []
    for side in (collision.first, collision.second):
        constraint = _side_constraint(side, overlap)
        key = (side.agent, constraint)
        if key not in cache:
            cache[key] = shortest_temporal_plan(
                instance, side.agent, node.constraints | {constraint}
            )
        out.append((side.agent, constraint, cache[key]))
    return out


def _category(node: CTNode, replans) -> str:
    increases = 0
    for agent_id, _, plan in replans:
        old = individual_makespan(node.plans[agent_id])
        new = individual_makespan(plan) if plan is not None else math.inf
        if new > old + 1e-9:
            increases += 1
    if increases == 2:
        return CARDINAL
    if increases == 1:
        return SEMI_CARDINAL
    return NON_CARDINAL


def classify_conflict(instance: Instance, node: CTNode, collision: Collision) -> str:
    """Cardinal iff constraining either agent strictly increases that agent's
    optimal individual makespan; semi-cardinal iff exactly one side does."""
    return _category(node, _replan_both(instance, node, collision, {}))


def solve_cbsr(instance: Instance, *, timeout: float = 60.0) -> SolveResult:
    """Makespan-optimal collision-free solution via constraint-tree search."""
    t0 = time.monotonic()
    deadline = t0 + timeout
    expanded = 0
    generated = 0

    def stats() -> dict:
        return {
            "expanded": expanded,
            "generated": generated,
            "runtime_seconds": time.monotonic() - t0,
        }

    root_plans: dict[int, TemporalPlan] = {}
    for agent_id in instance.agent_ids:
        plan = shortest_temporal_plan(instance, agent_id, frozenset())
        if plan is None:
            return SolveResult(INFEASIBLE, stats=stats())
        root_plans[agent_id] = plan
    root = CTNode(frozenset(), root_plans, overall_makespan(Solution(root_plans)))
    generated = 1

    counter = 0
    open_heap: list[tuple[float, int, CTNode]] = [(root.mu, counter, root)]
    while open_heap:
        if time.monotonic() > deadline:
            return SolveResult(TIMEOUT, stats=stats())
        _, _, node = heapq.heappop(open_heap)
        expanded += 1
        solution = Solution(node.plans)
        collisions = validate_plans(instance, solution)
        if not collisions:
            return SolveResult(SOLVED, node.mu, solution, stats())

        # Pick the conflict to branch on: most cardinal first, then earliest
        # overlap start, then lowest agent pair.  Replans computed for the
        # classification are reused for the children.
        cache: dict = {}
        best = None
        for collision in collisions:
            replans = _replan_both(instance, node, collision, cache)
            rank = _RANK[_category(node, replans)]
            key = (
                -rank,
                collision.overlap.start,
                collision.first.agent,
                collision.second.agent,
            )
            if best is None or key < best[0]:
                best = (key, collision, replans)
        assert best is not None
        _, _, replans = best
        for agent_id, constraint, plan in replans:
            if plan is None:
                continue  # this side is infeasible; prune the branch
            child_plans = dict(node.plans)
            child_plans[agent_id] = plan
            child = CTNode(
                node.constraints | {constraint},
                child_plans,
                overall_makespan(Solution(child_plans)),
            )
            counter += 1
            generated += 1
            heapq.heappush(open_heap, (child.mu, counter, child))
    return SolveResult(INFEASIBLE, stats=stats())

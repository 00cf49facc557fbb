"""Lazy SAT-refinement solver.

Instead of branching on conflicts, a single propositional formula over
lazily generated occupancy and traversal variables is refined: each
detected collision adds one disjunction forbidding the responsible pair of
actions, plus the conflict records that seed new decision variables.  The
outer loop grows the makespan bound to the earliest arrival beyond the
current horizon until the formula becomes satisfiable with a collision-free
extraction.

All times in this module live on an integer nanosecond lattice; arrivals
are computed by integer addition so identical moments always share one
decision variable regardless of floating-point summation order.
"""

from __future__ import annotations

import heapq
import os
import time
from bisect import bisect_right
from dataclasses import dataclass

from . import sat_engine
from .geometry import TimeInterval
from .lowlevel import Constraint, shortest_temporal_plan
from .model import (
    Instance,
    MapfError,
    MotionEvent,
    Solution,
    TemporalPlan,
    individual_makespan,
    overall_makespan,
    traversal_duration,
)
from .result import INFEASIBLE, SOLVED, TIMEOUT, SolveResult
from .sat_engine import SolverState, SolveTimeout
from .validation import CollisionSide, validate_plans

NANO = 1_000_000_000

VERTEX = "vertex"
EDGE = "edge"


class EncodingError(MapfError):
    """A satisfying assignment violated the intended path structure."""


def _nanos(t: float) -> int:
    return round(t * NANO)


def quantize(t: float) -> float:
    """Round to the nearest multiple of 1e-9; all registry keys and time
    comparisons in this module use canonical times."""
    return _nanos(t) / NANO


@dataclass(frozen=True)
class DecisionVar:
    kind: str  # VERTEX: agent occupies u at `time`; EDGE: starts traversing u->v
    agent: int
    u: int
    v: int
    time: float  # canonical start time
    sat_id: int


class VarRegistry:
    """Bijective map between decision-variable keys and SAT variable ids.

    The registry persists for a whole solve: ids are stable across the
    per-makespan formulas and only ever grow.
    """

    def __init__(self) -> None:
        self._by_key: dict[tuple, int] = {}
        self._by_id: dict[int, DecisionVar] = {}
        self._next_id = 1
        self._vertex_times: dict[tuple[int, int], list[int]] = {}
        self._actions_from: dict[tuple[int, int, int], list[int]] = {}
        self._arrivals_at: dict[tuple[int, int, int], list[int]] = {}
        self._action_arrival: dict[int, tuple[int, int]] = {}

    def __len__(self) -> int:
        return self._next_id - 1

    @property
    def max_id(self) -> int:
        return self._next_id - 1

    def var(self, sat_id: int) -> DecisionVar:
        return self._by_id[sat_id]

    def ensure_vertex(self, agent: int, u: int, t_n: int) -> int:
        key = (VERTEX, agent, u, u, t_n)
        sat_id = self._by_key.get(key)
        if sat_id is None:
            sat_id = self._next_id
            self._next_id += 1
            self._by_key[key] = sat_id
            self._by_id[sat_id] = DecisionVar(VERTEX, agent, u, u, t_n / NANO, sat_id)
            times = self._vertex_times.setdefault((agent, u), [])
            times.insert(bisect_right(times, t_n), t_n)
        return sat_id

    def ensure_action(self, agent: int, u: int, v: int, t_n: int, arrival_n: int) -> int:
        """Edge traversal u->v (or wait when u == v) starting at t_n.

        The arrival is frozen at creation; the key carries only the start
        time, so a wait's target never changes retroactively.
        """
        key = (EDGE, agent, u, v, t_n)
        sat_id = self._by_key.get(key)
        if sat_id is None:
            sat_id = self._next_id
            self._next_id += 1
            self._by_key[key] = sat_id
            self._by_id[sat_id] = DecisionVar(EDGE, agent, u, v, t_n / NANO, sat_id)
            self._actions_from.setdefault((agent, u, t_n), []).append(sat_id)
            self._arrivals_at.setdefault((agent, v, arrival_n), []).append(sat_id)
            self._action_arrival[sat_id] = (v, arrival_n)
        return sat_id

    def has_action(self, agent: int, u: int, v: int, t_n: int) -> bool:
        return (EDGE, agent, u, v, t_n) in self._by_key

    def lookup(self, kind: str, agent: int, u: int, v: int, t_n: int) -> int:
        return self._by_key[(kind, agent, u, v, t_n)]

    def vertex_times(self, agent: int, u: int) -> list[int]:
        return self._vertex_times.get((agent, u), [])

    def actions_from(self, agent: int, u: int, t_n: int) -> list[int]:
        return self._actions_from.get((agent, u, t_n), [])

    def arrivals_at(self, agent: int, v: int, t_n: int) -> list[int]:
        return self._arrivals_at.get((agent, v, t_n), [])

    def arrival_of(self, action_id: int) -> tuple[int, int]:
        return self._action_arrival[action_id]

    def min_vertex_time_above(self, mu: float) -> float | None:
        mu_n = _nanos(mu)
        best: int | None = None
        for (kind, _a, _u, _v, t_n) in self._by_key:
            if kind == VERTEX and t_n > mu_n and (best is None or t_n < best):
                best = t_n
        return None if best is None else best / NANO


def generate_decisions(
    instance: Instance,
    conflicts: set[Constraint],
    mu_max: float,
    registry: VarRegistry | None = None,
    agents: tuple[int, ...] | list[int] | None = None,
) -> VarRegistry:
    """Best-first generation of occupancy and traversal variables per agent.

    From each reached (vertex, time) within the horizon, every outgoing edge
    traversal spawns its action and arrival variables, and every conflict of
    the agent on that vertex or an incident edge with a later end time
    spawns the occupancy variable at that end time.  Arrivals beyond the
    horizon are retained (they drive the next makespan bound) but are not
    expanded.  Extends `registry` in place when given; an agent's section
    depends only on its own conflicts, so callers may regenerate a subset.
    """
    reg = registry if registry is not None else VarRegistry()
    mu_n = _nanos(mu_max)
    graph = instance.graph
    for agent in instance.agent_ids if agents is None else agents:
        adjacency: dict[int, list[tuple[int, int]]] = {}
        for u in graph.vertex_ids:
            ns = []
            for w in graph.neighbors(u):
                dt = traversal_duration(instance, agent, u, w)
                if dt > 0:
                    ns.append((w, _nanos(dt)))
            adjacency[u] = ns
        vertex_ends: dict[int, set[int]] = {}
        edge_ends: dict[tuple[int, int], set[int]] = {}
        for c in conflicts:
            if c.agent != agent:
                continue
            end_n = _nanos(c.interval.end)
            if c.is_vertex:
                vertex_ends.setdefault(c.from_v, set()).add(end_n)
            else:
                edge_ends.setdefault((c.from_v, c.to_v), set()).add(end_n)
        # conflict end times that can justify waiting at each vertex
        ends_at: dict[int, list[int]] = {}
        for u in graph.vertex_ids:
            ends = set(vertex_ends.get(u, ()))
            for w, _ in adjacency[u]:
                ends.update(edge_ends.get((min(u, w), max(u, w)), ()))
            if ends:
                ends_at[u] = sorted(ends)
        start = instance.start[agent]
        reg.ensure_vertex(agent, start, 0)
        heap: list[tuple[int, int]] = [(0, start)]
        expanded: set[tuple[int, int]] = set()
        while heap:
            t_n, u = heapq.heappop(heap)
            if (u, t_n) in expanded:
                continue
            expanded.add((u, t_n))
            if t_n > mu_n:
                continue  # retained as a variable, not expanded
            for w, dt_n in adjacency[u]:
                arrival_n = t_n + dt_n
                reg.ensure_action(agent, u, w, t_n, arrival_n)
                reg.ensure_vertex(agent, w, arrival_n)
                if (w, arrival_n) not in expanded:
                    heapq.heappush(heap, (arrival_n, w))
            ends = ends_at.get(u)
            if ends:
                for end_n in ends[bisect_right(ends, t_n):]:
                    reg.ensure_vertex(agent, u, end_n)
                    if (u, end_n) not in expanded:
                        heapq.heappush(heap, (end_n, u))
    return reg


def _sync_vars(state: SolverState, registry: VarRegistry) -> None:
    while state.num_vars < registry.max_id:
        sat_engine.new_variable(state)


def _encode_range(
    registry: VarRegistry,
    state: SolverState,
    instance: Instance,
    mu: float,
    watermark: int,
) -> None:
    """Emit clauses for every variable created after `watermark`.

    For each in-horizon occupancy X of agent a at (u, t):
      * start occupancy is asserted as a unit (C1, at encode time);
      * off-goal occupancies imply exactly one outgoing action: the
        registered edge traversals at t plus a wait to the next generated
        time for u within the horizon, materialized on demand (C2 + C3);
      * non-start occupancies imply some action arriving at (u, t) (C5).
    Every action implies both its arrival occupancy and its source occupancy
    (C4).  Occupancies beyond the horizon are forced false here and become
    usable when the formula is rebuilt at a larger makespan.
    """
    mu_n = _nanos(mu)
    augmenting = watermark > 0
    new_vertex_vars: list[DecisionVar] = []
    new_action_ids: list[int] = []
    for sat_id in range(watermark + 1, registry.max_id + 1):
        dv = registry.var(sat_id)
        if dv.kind == VERTEX:
            new_vertex_vars.append(dv)
        else:
            new_action_ids.append(sat_id)
    # ascending time per vertex, so waits land in the support sets of the
    # occupancies they arrive at before those are encoded
    new_vertex_vars.sort(key=lambda dv: (dv.agent, dv.u, _nanos(dv.time)))

    for dv in new_vertex_vars:
        agent, u, t_n, x = dv.agent, dv.u, _nanos(dv.time), dv.sat_id
        _sync_vars(state, registry)
        if t_n > mu_n:
            sat_engine.add_clause(state, [-x])  # beyond the horizon at this bound
            continue
        times = registry.vertex_times(agent, u)
        if augmenting:
            # A time inserted below an already-encoded occupancy leaves that
            # occupancy's frozen wait and goal clauses behind a fresh encode;
            # flag it so the caller can rebuild before trusting an UNSAT.
            if u == instance.goal[agent]:
                state.meta["stale"] = True
            idx = bisect_right(times, t_n) - 1
            while idx > 0:
                idx -= 1
                prev_n = times[idx]
                try:
                    prev_id = registry.lookup(VERTEX, agent, u, u, prev_n)
                except KeyError:  # pragma: no cover
                    break
                if prev_id <= watermark and prev_n <= mu_n:
                    if registry.has_action(agent, u, u, prev_n):
                        _, frozen_to = registry.arrival_of(
                            registry.lookup(EDGE, agent, u, u, prev_n)
                        )
                        if frozen_to > t_n:
                            state.meta["stale"] = True
                    else:
                        state.meta["stale"] = True
                    break
        if not registry.has_action(agent, u, u, t_n):
            idx = bisect_right(times, t_n)
            if idx < len(times) and times[idx] <= mu_n:
                wid = registry.ensure_action(agent, u, u, t_n, times[idx])
                new_action_ids.append(wid)
        menu = [
            a for a in registry.actions_from(agent, u, t_n)
            if registry.arrival_of(a)[1] <= mu_n
        ]
        _sync_vars(state, registry)
        if u != instance.goal[agent]:
            sat_engine.add_clause(state, [-x] + menu)  # must leave or wait (C2)
        sat_engine.add_at_most_one(state, menu)  # C3
        if u == instance.start[agent] and t_n == 0:
            sat_engine.add_clause(state, [x])  # C1
        else:
            sat_engine.add_clause(state, [-x] + registry.arrivals_at(agent, u, t_n))  # C5

    _sync_vars(state, registry)
    for action_id in sorted(new_action_ids):
        dv = registry.var(action_id)
        t_n = _nanos(dv.time)
        arrival_v, arrival_n = registry.arrival_of(action_id)
        if arrival_n > mu_n:
            # unusable at this bound; force false so extraction never follows it
            sat_engine.add_clause(state, [-action_id])
            continue
        try:
            x_src = registry.lookup(VERTEX, dv.agent, dv.u, dv.u, t_n)
            x_arr = registry.lookup(VERTEX, dv.agent, arrival_v, arrival_v, arrival_n)
        except KeyError as exc:  # pragma: no cover - generation guarantees these
            raise EncodingError(f"action {action_id} lacks endpoint variables") from exc
        if augmenting and x_arr <= watermark:
            state.meta["stale"] = True  # already-encoded support set misses this arrival
        sat_engine.add_clause(state, [-action_id, x_arr])  # C4: action implies arrival
        sat_engine.add_clause(state, [-action_id, x_src])  # taking it means being there


def encode_basic(registry: VarRegistry, instance: Instance, mu: float) -> SolverState:
    """Fresh single-agent path formula for horizon mu; no inter-agent clauses."""
    state = SolverState()
    state.meta["mu"] = mu
    state.meta["stale"] = False
    _encode_range(registry, state, instance, mu, 0)
    mu_n = _nanos(mu)
    for agent in instance.agent_ids:
        goal = instance.goal[agent]
        goal_vars = [
            registry.lookup(VERTEX, agent, goal, goal, t_n)
            for t_n in registry.vertex_times(agent, goal)
            if t_n <= mu_n
        ]
        sat_engine.add_clause(state, goal_vars)  # C6; empty means trivially UNSAT
    state.meta["watermark"] = registry.max_id
    return state


def augment_basic(
    registry: VarRegistry, state: SolverState, instance: Instance, mu: float
) -> SolverState:
    """Add clauses for variables created since the last encoding pass only;
    everything previously added remains valid (the database is monotone)."""
    watermark = state.meta["watermark"]
    _encode_range(registry, state, instance, mu, watermark)
    state.meta["watermark"] = registry.max_id
    return state


def extract_solution(
    model: dict[int, bool], registry: VarRegistry, instance: Instance
) -> Solution:
    """Walk each agent's true variables from its start, following the unique
    true outgoing action at every step until the goal arrival."""
    plans: dict[int, TemporalPlan] = {}
    for agent in instance.agent_ids:
        u = instance.start[agent]
        goal = instance.goal[agent]
        t_n = 0
        events: list[MotionEvent] = []
        for _ in range(len(registry) + 1):
            taken = [a for a in registry.actions_from(agent, u, t_n) if model.get(a)]
            if len(taken) > 1:
                raise EncodingError(f"agent {agent}: multiple actions taken at ({u}, {t_n})")
            if not taken:
                if u != goal:
                    raise EncodingError(f"agent {agent}: stranded at ({u}, {t_n})")
                break
            action = taken[0]
            v, arrival_n = registry.arrival_of(action)
            events.append(MotionEvent(u, v, TimeInterval(t_n / NANO, arrival_n / NANO)))
            u, t_n = v, arrival_n
        else:
            raise EncodingError(f"agent {agent}: extraction did not terminate")
        plans[agent] = TemporalPlan(agent, tuple(events))
    return Solution(plans)


def _side_key(side: CollisionSide) -> tuple:
    t_n = _nanos(side.interval.start)
    kind = VERTEX if side.from_v == side.to_v else EDGE
    return (kind, side.agent, side.from_v, side.to_v, t_n)


def _side_var(registry: VarRegistry, side: CollisionSide) -> int:
    kind, agent, u, v, t_n = _side_key(side)
    return registry.lookup(kind, agent, u, v, t_n)


@dataclass
class _RunState:
    conflicts: set[Constraint]
    deadline: float
    registry: VarRegistry | None = None  # registry of the most recent fixed-mu call
    # disjunctive conflict pairs live for the whole run: two specific events
    # always collide regardless of the current makespan bound, so their
    # exclusion clauses are replayed into every fresh encoding
    refinement_pairs: set[tuple[tuple, tuple]] = None  # type: ignore[assignment]
    iterations: int = 0
    sat_calls: int = 0
    reencodes: int = 0
    clauses_added: int = 0
    last_unsat_stale: bool = False
    dump_dir: str | None = None
    trace: list | None = None

    def __post_init__(self) -> None:
        if self.refinement_pairs is None:
            self.refinement_pairs = set()


def _dump_cnf(run: _RunState, state: SolverState) -> None:
    if run.dump_dir is None:
        return
    os.makedirs(run.dump_dir, exist_ok=True)
    path = os.path.join(run.dump_dir, f"formula_{run.sat_calls:04d}.cnf")
    with open(path, "w", encoding="utf-8") as f:
        f.write(sat_engine.to_dimacs(state))


def smt_cbs_fixed(
    instance: Instance,
    conflicts: set[Constraint],
    mu: float,
    run: _RunState,
) -> tuple[Solution | None, set[Constraint], float | None]:
    """Solve at a fixed makespan bound.

    Returns (solution, conflicts, None) on success or (None, conflicts,
    next_mu) when the refined formula is unsatisfiable; next_mu is the
    earliest occupancy time beyond the current bound.

    Decision variables are regenerated from scratch per call: only the
    conflict set carries over, so wait actions always chain to the next
    relevant moment as of this call's conflict knowledge.
    """
    registry = VarRegistry()
    run.registry = registry
    generate_decisions(instance, conflicts, mu, registry)
    state = encode_basic(registry, instance, mu)
    for first_key, second_key in sorted(run.refinement_pairs):
        # replay known always-colliding pairs; their variables regenerate
        # deterministically because the conflict set only grows
        try:
            y = registry.lookup(*first_key)
            z = registry.lookup(*second_key)
        except KeyError:
            continue
        sat_engine.add_clause(state, [-y, -z])
    while True:
        if time.monotonic() > run.deadline:
            raise SolveTimeout
        run.sat_calls += 1
        _dump_cnf(run, state)
        model = sat_engine.solve(state, deadline=run.deadline)
        if model is None:
            run.clauses_added += len(state.clauses)
            return None, conflicts, registry.min_vertex_time_above(mu)
        solution = extract_solution(model, registry, instance)
        collisions = validate_plans(instance, solution)
        run.iterations += 1
        if not collisions:
            run.clauses_added += len(state.clauses)
            return solution, conflicts, None
        new_clauses: list[list[int]] = []
        changed_agents: set[int] = set()
        for col in collisions:
            y = _side_var(registry, col.first)
            z = _side_var(registry, col.second)
            sat_engine.add_clause(state, [-y, -z])
            new_clauses.append([-y, -z])
            run.refinement_pairs.add((_side_key(col.first), _side_key(col.second)))
            overlap = col.overlap
            for side in (col.first, col.second):
                constraint = Constraint(side.agent, side.from_v, side.to_v, overlap)
                if constraint not in conflicts:
                    conflicts.add(constraint)
                    changed_agents.add(side.agent)
        if run.trace is not None:
            run.trace.append(
                {
                    "kind": "refinement",
                    "mu": mu,
                    "model": model,
                    "new_clauses": new_clauses,
                    "variables": len(registry),
                    "clauses": run.clauses_added + len(state.clauses),
                    "conflicts": len(conflicts),
                }
            )
        if changed_agents:
            generate_decisions(instance, conflicts, mu, registry, agents=sorted(changed_agents))
        augment_basic(registry, state, instance, mu)


def solve_smt_cbsr(
    instance: Instance,
    *,
    timeout: float = 60.0,
    dump_dir: str | None = None,
    trace: list | None = None,
) -> SolveResult:
    """Makespan-optimal solve: start at the max unconstrained plan duration
    and increase the bound to the next generated arrival time on every
    unsatisfiable round; the first satisfiable bound yields the answer."""
    t0 = time.monotonic()
    run = _RunState(
        conflicts=set(),
        deadline=t0 + timeout,
        dump_dir=dump_dir,
        trace=trace,
    )

    def stats(extra: dict | None = None) -> dict:
        out = {
            "iterations": run.iterations,
            "sat_calls": run.sat_calls,
            "reencodes": run.reencodes,
            "variables": 0 if run.registry is None else len(run.registry),
            "clauses": run.clauses_added,
            "runtime_seconds": time.monotonic() - t0,
        }
        if extra:
            out.update(extra)
        return out

    mu = 0.0
    for agent in instance.agent_ids:
        plan = shortest_temporal_plan(instance, agent, frozenset())
        if plan is None:
            return SolveResult(INFEASIBLE, stats=stats())
        mu = max(mu, individual_makespan(plan))

    mu_history = [mu]
    try:
        while True:
            known = len(run.conflicts)
            solution, _, mu_next = smt_cbs_fixed(instance, run.conflicts, mu, run)
            if solution is not None:
                return SolveResult(
                    SOLVED,
                    overall_makespan(solution),
                    solution,
                    stats({"mu_history": mu_history}),
                )
            if len(run.conflicts) > known:
                # Conflicts found during this round arrived too late for its
                # encoding's wait chaining; retry the same bound with a fresh
                # encoding before concluding it is infeasible.  The conflict
                # set is finite at a fixed bound, so this terminates.
                run.reencodes += 1
                continue
            if mu_next is None:
                return SolveResult(INFEASIBLE, stats=stats({"mu_history": mu_history}))
            if mu_next <= mu:
                raise MapfError(f"makespan bound did not increase: {mu} -> {mu_next}")
            if run.trace is not None:
                run.trace.append({"kind": "mu_advance", "mu": mu, "mu_next": mu_next})
            mu = mu_next
            mu_history.append(mu)
    except SolveTimeout:
        return SolveResult(TIMEOUT, stats=stats({"mu_history": mu_history}))

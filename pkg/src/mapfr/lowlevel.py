"""Constrained single-agent optimal temporal plan search.

States are (vertex, arrival time) pairs expanded best-first with an
admissible straight-line heuristic.  Waiting is folded into the successor
step: besides departing immediately, the agent may delay a move until the
end of a blocking edge constraint, or so that it arrives at the target
vertex exactly when a vertex constraint there expires.  Those are the only
departure times that can matter, which keeps the state space finite.

Constraint semantics:
  * an edge constraint forbids any move event on that edge whose time
    interval overlaps the constraint interval;
  * a vertex constraint forbids waiting at the vertex over an overlapping
    interval, being at the vertex at any instant inside the interval
    (arrivals and departures), and parking at the goal before it expires.
"""

from __future__ import annotations

import heapq
import math
from bisect import bisect_right
from dataclasses import dataclass

from .geometry import TimeInterval, point_distance
from .model import Instance, MotionEvent, TemporalPlan, traversal_duration

_EPS = 1e-9


@dataclass(frozen=True)
class Constraint:
    """Forbids agent occurrence on edge {from_v, to_v} (vertex if from_v == to_v)
    during the half-open interval."""

    agent: int
    from_v: int
    to_v: int
    interval: TimeInterval

    def __post_init__(self) -> None:
        if self.interval.is_empty:
            raise ValueError("constraint interval must be nonempty")
        if self.from_v > self.to_v:
            # edges are unordered; normalize for set semantics
            object.__setattr__(self, "from_v", self.to_v)
            object.__setattr__(self, "to_v", self.from_v)

    @property
    def is_vertex(self) -> bool:
        return self.from_v == self.to_v


def _overlaps_any(intervals: list[TimeInterval], start: float, end: float) -> bool:
    return any(max(iv.start, start) < min(iv.end, end) for iv in intervals)


def _instant_blocked(intervals: list[TimeInterval], t: float) -> bool:
    return any(iv.contains(t) for iv in intervals)


def _safe_bucket(ends: list[float], t: float) -> int:
    """Index of the constraint-free window containing t (per vertex).

    Two arrivals in the same window are interchangeable up to waiting, so
    dominance pruning is applied per (vertex, window) rather than per vertex;
    plain per-vertex pruning would discard re-arrivals that are the only way
    past a later vertex constraint.
    """
    return bisect_right(ends, t)


def _bfs_hops(instance: Instance, goal: int) -> dict[int, int]:
    hops = {goal: 0}
    frontier = [goal]
    while frontier:
        nxt = []
        for u in frontier:
            for w in instance.graph.neighbors(u):
                if w not in hops:
                    hops[w] = hops[u] + 1
                    nxt.append(w)
        frontier = nxt
    return hops


def default_horizon(instance: Instance, agent_id: int, constraints: set[Constraint] | frozenset[Constraint]) -> float:
    total = sum(traversal_duration(instance, agent_id, u, v) for u, v in instance.graph.edges)
    latest = max((c.interval.end for c in constraints if c.agent == agent_id), default=0.0)
    return total + latest


def shortest_temporal_plan(
    instance: Instance,
    agent_id: int,
    constraints: set[Constraint] | frozenset[Constraint],
    horizon: float | None = None,
) -> TemporalPlan | None:
    """Minimum-duration constraint-respecting plan, or None if infeasible.

    Ties in duration are broken by fewer events, then by lexicographically
    smallest vertex sequence, so results are deterministic.
    """
    graph = instance.graph
    start, goal = instance.start[agent_id], instance.goal[agent_id]
    velocity = instance.agent(agent_id).velocity

    vertex_cons: dict[int, list[TimeInterval]] = {}
    edge_cons: dict[tuple[int, int], list[TimeInterval]] = {}
    for c in constraints:
        if c.agent != agent_id:
            continue
        if c.is_vertex:
            vertex_cons.setdefault(c.from_v, []).append(c.interval)
        else:
            edge_cons.setdefault((c.from_v, c.to_v), []).append(c.interval)
    for ivs in vertex_cons.values():
        ivs.sort(key=lambda iv: (iv.start, iv.end))
    for ivs in edge_cons.values():
        ivs.sort(key=lambda iv: (iv.start, iv.end))
    vertex_ends = {v: sorted(iv.end for iv in ivs) for v, ivs in vertex_cons.items()}

    # Parking at the goal occupies it from arrival on, so arrival must not
    # precede the end of any vertex constraint there.
    goal_free_after = max((iv.end for iv in vertex_cons.get(goal, [])), default=0.0)

    if horizon is None:
        horizon = default_horizon(instance, agent_id, constraints)
    horizon = max(horizon, goal_free_after) + _EPS

    if instance.unit_timed:
        hops = _bfs_hops(instance, goal)
        heuristic = lambda v: float(hops.get(v, math.inf))
    else:
        goal_pos = graph.position(goal)
        heuristic = lambda v: point_distance(graph.position(v), goal_pos) / velocity

    h0 = heuristic(start)
    if math.isinf(h0):
        return None
    # heap entries: (f, n_events, vertex_sequence, arrival, vertex, events)
    open_heap: list[tuple] = [(h0, 0, (start,), 0.0, start, ())]
    expanded: dict[tuple[int, int], float] = {}

    while open_heap:
        f, n_events, route, t, v, events = heapq.heappop(open_heap)
        if v == goal and t >= goal_free_after - _EPS:
            return TemporalPlan(agent_id, events)
        bucket = (v, _safe_bucket(vertex_ends.get(v, []), t))
        best = expanded.get(bucket)
        if best is not None and best <= t + _EPS:
            continue
        expanded[bucket] = t

        own_vcons = vertex_cons.get(v, [])
        for w in graph.neighbors(v):
            delta = traversal_duration(instance, agent_id, v, w)
            if delta <= 0:
                continue
            ekey = (min(v, w), max(v, w))
            econs = edge_cons.get(ekey, [])
            wcons = vertex_cons.get(w, [])
            departures = {t}
            departures.update(iv.end for iv in econs if iv.end > t + _EPS)
            departures.update(iv.end - delta for iv in wcons if iv.end - delta > t + _EPS)
            hw = heuristic(w)
            if math.isinf(hw):
                continue
            for dep in sorted(departures):
                arrival = dep + delta
                if arrival > horizon:
                    break
                if dep > t + _EPS:
                    if _overlaps_any(own_vcons, t, dep) or _instant_blocked(own_vcons, dep):
                        continue
                else:
                    dep = t
                if _overlaps_any(econs, dep, arrival):
                    continue
                if _instant_blocked(wcons, arrival):
                    continue
                new_events = events
                new_route = route
                if dep > t:
                    new_events = new_events + (MotionEvent(v, v, TimeInterval(t, dep)),)
                    new_route = new_route + (v,)
                new_events = new_events + (MotionEvent(v, w, TimeInterval(dep, arrival)),)
                new_route = new_route + (w,)
                heapq.heappush(
                    open_heap,
                    (arrival + hw, len(new_events), new_route, arrival, w, new_events),
                )
    return None

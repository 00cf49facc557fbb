"""Problem instances, temporal plans and makespan accounting.

An instance is an undirected graph embedded in the plane plus disc-shaped
constant-velocity agents with start and goal vertices.  Plans are sequences
of timed traversal events; waiting is an explicit event with from == to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .geometry import Point2D, TimeInterval, point_distance

# Plan times may come from quantized arithmetic, so structural checks use a
# tolerance well above the quantization grid but far below any edge duration.
TIME_TOL = 1e-6


class MapfError(Exception):
    """Base class for errors raised by this package."""


class InvalidEdgeError(MapfError):
    """An operation referenced a vertex pair that is not an edge."""


class PlanFormatError(MapfError):
    """A temporal plan violates the well-formedness rules."""


class Graph:
    """Undirected graph with 2D-embedded vertices. Self-loops are rejected;
    waiting is an action, not an edge."""

    def __init__(self, vertices: Iterable[tuple[int, Point2D]], edges: Iterable[tuple[int, int]]):
        self._pos: dict[int, Point2D] = {}
        for vid, pos in vertices:
            if vid in self._pos:
                raise ValueError(f"duplicate vertex id {vid}")
            self._pos[vid] = pos
        edge_set: set[tuple[int, int]] = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop edge on vertex {u}")
            if u not in self._pos or v not in self._pos:
                raise ValueError(f"edge ({u}, {v}) references unknown vertex")
            edge_set.add((min(u, v), max(u, v)))
        self._edges = frozenset(edge_set)
        adj: dict[int, list[int]] = {vid: [] for vid in self._pos}
        for u, v in self._edges:
            adj[u].append(v)
            adj[v].append(u)
        self._adj = {vid: tuple(sorted(ns)) for vid, ns in adj.items()}

    @property
    def vertex_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self._pos))

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self._edges))

    def position(self, vid: int) -> Point2D:
        return self._pos[vid]

    def neighbors(self, vid: int) -> tuple[int, ...]:
        return self._adj[vid]

    def has_vertex(self, vid: int) -> bool:
        return vid in self._pos

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self._edges

    def edge_length(self, u: int, v: int) -> float:
        if not self.has_edge(u, v):
            raise InvalidEdgeError(f"({u}, {v}) is not an edge")
        return point_distance(self._pos[u], self._pos[v])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._pos == other._pos and self._edges == other._edges

    def __repr__(self) -> str:
        return f"Graph({len(self._pos)} vertices, {len(self._edges)} edges)"


@dataclass(frozen=True)
class Agent:
    id: int
    velocity: float
    diameter: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.velocity) and self.velocity > 0):
            raise ValueError(f"agent {self.id}: velocity must be positive, got {self.velocity}")
        if not (math.isfinite(self.diameter) and self.diameter > 0):
            raise ValueError(f"agent {self.id}: diameter must be positive, got {self.diameter}")


@dataclass(frozen=True)
class Instance:
    graph: Graph
    agents: tuple[Agent, ...]
    start: Mapping[int, int]
    goal: Mapping[int, int]
    unit_timed: bool = False  # set by discretize(); every move then takes 1 time unit

    def __post_init__(self) -> None:
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "start", dict(self.start))
        object.__setattr__(self, "goal", dict(self.goal))
        ids = [a.id for a in self.agents]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate agent ids")
        for mapping, name in ((self.start, "start"), (self.goal, "goal")):
            if set(mapping) != set(ids):
                raise ValueError(f"{name} configuration must cover exactly the agent set")
            for vid in mapping.values():
                if not self.graph.has_vertex(vid):
                    raise ValueError(f"{name} vertex {vid} not in graph")
            if len(set(mapping.values())) != len(mapping):
                raise ValueError(f"{name} configuration must be injective")
        by_id = {a.id: a for a in self.agents}
        object.__setattr__(self, "_by_id", by_id)

    def agent(self, agent_id: int) -> Agent:
        return self._by_id[agent_id]

    @property
    def agent_ids(self) -> tuple[int, ...]:
        return tuple(sorted(a.id for a in self.agents))


@dataclass(frozen=True)
class MotionEvent:
    """Traversal of an edge, or a wait when from_v == to_v."""

    from_v: int
    to_v: int
    interval: TimeInterval

    @property
    def is_wait(self) -> bool:
        return self.from_v == self.to_v

    @property
    def duration(self) -> float:
        return self.interval.duration


@dataclass(frozen=True)
class TemporalPlan:
    agent: int
    events: tuple[MotionEvent, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "events", tuple(self.events))


@dataclass(frozen=True)
class Solution:
    plans: Mapping[int, TemporalPlan]

    def __post_init__(self) -> None:
        object.__setattr__(self, "plans", dict(self.plans))


def traversal_duration(instance: Instance, agent_id: int, u: int, v: int) -> float:
    """Time for the agent to move from u to v; 0 when u == v (pure wait)."""
    if u == v:
        return 0.0
    if not instance.graph.has_edge(u, v):
        raise InvalidEdgeError(f"({u}, {v}) is not an edge")
    if instance.unit_timed:
        return 1.0
    return instance.graph.edge_length(u, v) / instance.agent(agent_id).velocity


def individual_makespan(plan: TemporalPlan) -> float:
    if not plan.events:
        return 0.0
    return plan.events[-1].interval.end


def overall_makespan(solution: Solution) -> float:
    if not solution.plans:
        return 0.0
    return max(individual_makespan(p) for p in solution.plans.values())


def discretize(instance: Instance) -> Instance:
    """Copy of the instance in which every edge traversal takes one time unit.

    This emulates makespan optimization of the corresponding standard
    discrete problem with the same solvers.  Idempotent.
    """
    if instance.unit_timed:
        return instance
    return replace(instance, unit_timed=True)


def check_plan(instance: Instance, plan: TemporalPlan, *, require_endpoints: bool = True) -> None:
    """Raise PlanFormatError unless the plan is well formed.

    Rules: events are contiguous in time, timestamps strictly increase,
    move durations equal edge length over velocity (or 1 when unit-timed),
    and every move uses an existing edge.  With require_endpoints the plan
    must begin at the agent's start vertex at time 0 and end at its goal.
    """
    agent_id = plan.agent
    if agent_id not in instance.start:
        raise PlanFormatError(f"plan for unknown agent {agent_id}")
    if not plan.events:
        if require_endpoints and instance.start[agent_id] != instance.goal[agent_id]:
            raise PlanFormatError(f"agent {agent_id}: empty plan but start != goal")
        return
    prev_end = None
    prev_to = None
    for i, ev in enumerate(plan.events):
        if ev.interval.duration <= 0:
            raise PlanFormatError(f"agent {agent_id}: event {i} has non-positive duration")
        if prev_end is not None:
            if abs(ev.interval.start - prev_end) > TIME_TOL:
                raise PlanFormatError(f"agent {agent_id}: gap before event {i}")
            if ev.from_v != prev_to:
                raise PlanFormatError(f"agent {agent_id}: event {i} does not start where event {i-1} ended")
        if not ev.is_wait:
            if not instance.graph.has_edge(ev.from_v, ev.to_v):
                raise PlanFormatError(f"agent {agent_id}: event {i} uses non-edge ({ev.from_v}, {ev.to_v})")
            want = traversal_duration(instance, agent_id, ev.from_v, ev.to_v)
            if abs(ev.interval.duration - want) > TIME_TOL:
                raise PlanFormatError(
                    f"agent {agent_id}: event {i} duration {ev.interval.duration} != {want}"
                )
        prev_end = ev.interval.end
        prev_to = ev.to_v
    if require_endpoints:
        first = plan.events[0]
        if abs(first.interval.start) > TIME_TOL:
            raise PlanFormatError(f"agent {agent_id}: plan must start at time 0")
        if first.from_v != instance.start[agent_id]:
            raise PlanFormatError(f"agent {agent_id}: plan starts at {first.from_v}, not the start vertex")
        if plan.events[-1].to_v != instance.goal[agent_id]:
            raise PlanFormatError(f"agent {agent_id}: plan ends off-goal at {plan.events[-1].to_v}")


def _vertex_at(plan: TemporalPlan, start_vertex: int, step: int) -> int:
    """Vertex occupied at integer time `step` by a unit-timed plan."""
    if not plan.events:
        return start_vertex
    for ev in plan.events:
        if ev.interval.start - TIME_TOL <= step < ev.interval.end - TIME_TOL:
            # Inside the event: at an integer boundary this only happens for
            # multi-step waits, where the vertex is unambiguous.
            return ev.from_v
        if abs(step - ev.interval.start) <= TIME_TOL:
            return ev.from_v
    return plan.events[-1].to_v


def reinterpret_unit_solution(instance: Instance, solution: Solution) -> float:
    """Continuous makespan of a unit-timed solution executed with true geometry.

    The discrete solution is replayed step by step: all agents perform their
    step-k action simultaneously and the step lasts as long as its slowest
    mover, so agents stay synchronized exactly as in the discrete execution.
    `instance` must be the original geometric instance.
    """
    geo = replace(instance, unit_timed=False) if instance.unit_timed else instance
    span = overall_makespan(solution)
    steps = int(round(span))
    if abs(span - steps) > TIME_TOL:
        raise PlanFormatError(f"solution makespan {span} is not unit-timed")
    total = 0.0
    for k in range(steps):
        longest = 0.0
        for agent_id, plan in solution.plans.items():
            u = _vertex_at(plan, geo.start[agent_id], k)
            v = _vertex_at(plan, geo.start[agent_id], k + 1)
            if u != v:
                longest = max(longest, traversal_duration(geo, agent_id, u, v))
        total += longest
    return total


# ---------------------------------------------------------------------------
# Text formats.
#
# Instance files are line oriented UTF-8:
#   v <id> <x> <y>
#   e <id1> <id2>
#   a <id> <velocity> <diameter> <start-vertex> <goal-vertex>
# with '#' starting a comment.  Plan output is one line per event
#   agent <id> <from> <to> <t_start> <t_end>
# with times printed to 9 decimal digits, plus a `makespan <value>` trailer.
# ---------------------------------------------------------------------------


def parse_instance(text: str) -> Instance:
    vertices: list[tuple[int, Point2D]] = []
    edges: list[tuple[int, int]] = []
    agents: list[Agent] = []
    start: dict[int, int] = {}
    goal: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "v" and len(parts) == 4:
                vertices.append((int(parts[1]), Point2D(float(parts[2]), float(parts[3]))))
            elif parts[0] == "e" and len(parts) == 3:
                edges.append((int(parts[1]), int(parts[2])))
            elif parts[0] == "a" and len(parts) == 6:
                aid = int(parts[1])
                agents.append(Agent(aid, float(parts[2]), float(parts[3])))
                start[aid] = int(parts[4])
                goal[aid] = int(parts[5])
            else:
                raise ValueError(f"unrecognized directive {parts[0]!r}")
        except (ValueError, IndexError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    return Instance(Graph(vertices, edges), tuple(agents), start, goal)


def format_instance(instance: Instance) -> str:
    lines = []
    g = instance.graph
    for vid in g.vertex_ids:
        p = g.position(vid)
        lines.append(f"v {vid} {p.x!r} {p.y!r}")
    for u, v in g.edges:
        lines.append(f"e {u} {v}")
    for agent in sorted(instance.agents, key=lambda a: a.id):
        lines.append(
            f"a {agent.id} {agent.velocity!r} {agent.diameter!r} "
            f"{instance.start[agent.id]} {instance.goal[agent.id]}"
        )
    return "\n".join(lines) + "\n"


def load_instance(path: str) -> Instance:
    with open(path, "r", encoding="utf-8") as f:
        return parse_instance(f.read())


def save_instance(instance: Instance, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(format_instance(instance))


def format_solution(solution: Solution) -> str:
    lines = []
    for agent_id in sorted(solution.plans):
        for ev in solution.plans[agent_id].events:
            lines.append(
                f"agent {agent_id} {ev.from_v} {ev.to_v} "
                f"{ev.interval.start:.9f} {ev.interval.end:.9f}"
            )
    lines.append(f"makespan {overall_makespan(solution):.9f}")
    return "\n".join(lines) + "\n"

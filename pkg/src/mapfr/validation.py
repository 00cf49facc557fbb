"""Collision detection between temporal plans.

Two events collide when the swept segments come closer than the sum of the
two agents' diameters while their time intervals overlap.  This is the
conservative test both solvers refine against; the sampled body-overlap
check below is a stricter-threshold oracle used only by tests and the CLI.
"""

from __future__ import annotations

from dataclasses import dataclass

from .geometry import (
    Point2D,
    Segment2D,
    TimeInterval,
    interval_intersection,
    intervals_overlap,
    point_distance,
    segment_distance,
)
from .model import (
    Instance,
    MotionEvent,
    Solution,
    TemporalPlan,
    check_plan,
    individual_makespan,
    overall_makespan,
)


@dataclass(frozen=True)
class CollisionSide:
    agent: int
    from_v: int
    to_v: int
    interval: TimeInterval


@dataclass(frozen=True)
class Collision:
    first: CollisionSide
    second: CollisionSide

    @property
    def overlap(self) -> TimeInterval:
        return interval_intersection(self.first.interval, self.second.interval)


def event_segment(instance: Instance, ev: MotionEvent) -> Segment2D:
    g = instance.graph
    return Segment2D(g.position(ev.from_v), g.position(ev.to_v))


def events_conflict(
    instance: Instance, a: int, ev_a: MotionEvent, b: int, ev_b: MotionEvent
) -> bool:
    """True iff the two events of distinct agents a and b collide."""
    if not intervals_overlap(ev_a.interval, ev_b.interval):
        return False
    threshold = instance.agent(a).diameter + instance.agent(b).diameter
    return segment_distance(event_segment(instance, ev_a), event_segment(instance, ev_b)) < threshold


def pad_to_makespan(instance: Instance, solution: Solution) -> Solution:
    """Append a final wait at the goal so every plan spans the overall makespan.

    Agents that finish early do not vanish; without padding a solver could
    route other agents straight through them.
    """
    span = overall_makespan(solution)
    padded: dict[int, TemporalPlan] = {}
    for agent_id, plan in solution.plans.items():
        end = individual_makespan(plan)
        if end < span:
            at = plan.events[-1].to_v if plan.events else instance.goal[agent_id]
            wait = MotionEvent(at, at, TimeInterval(end, span))
            padded[agent_id] = TemporalPlan(agent_id, plan.events + (wait,))
        else:
            padded[agent_id] = plan
    return Solution(padded)


def validate_plans(instance: Instance, solution: Solution, *, pad: bool = True) -> list[Collision]:
    """Every colliding event pair across all agent pairs; empty iff valid.

    Plans are first structurally checked (raising PlanFormatError on a
    malformed plan, which is distinct from finding collisions) and padded so
    parked agents are included.  Results are ordered by agent-index pair,
    then by earliest overlap start.
    """
    for plan in solution.plans.values():
        check_plan(instance, plan)
    checked = pad_to_makespan(instance, solution) if pad else solution
    collisions: list[Collision] = []
    ids = sorted(checked.plans)
    for i, a in enumerate(ids):
        for b in ids[i + 1:]:
            for ev_a in checked.plans[a].events:
                for ev_b in checked.plans[b].events:
                    if events_conflict(instance, a, ev_a, b, ev_b):
                        collisions.append(
                            Collision(
                                CollisionSide(a, ev_a.from_v, ev_a.to_v, ev_a.interval),
                                CollisionSide(b, ev_b.from_v, ev_b.to_v, ev_b.interval),
                            )
                        )
    collisions.sort(
        key=lambda c: (
            c.first.agent,
            c.second.agent,
            c.overlap.start,
            c.first.interval.start,
            c.second.interval.start,
        )
    )
    return collisions


def _position_at(instance: Instance, plan: TemporalPlan, start_vertex: int, t: float) -> Point2D:
    g = instance.graph
    if not plan.events:
        return g.position(start_vertex)
    first = plan.events[0]
    if t <= first.interval.start:
        return g.position(first.from_v)
    for ev in plan.events:
        if t < ev.interval.end:
            if ev.is_wait:
                return g.position(ev.from_v)
            frac = (t - ev.interval.start) / ev.interval.duration
            p, q = g.position(ev.from_v), g.position(ev.to_v)
            return Point2D(p.x + frac * (q.x - p.x), p.y + frac * (q.y - p.y))
    return g.position(plan.events[-1].to_v)


def _event_at(plan: TemporalPlan, goal_vertex: int, t: float) -> MotionEvent:
    for ev in plan.events:
        if ev.interval.start <= t < ev.interval.end:
            return ev
    end = individual_makespan(plan)
    return MotionEvent(goal_vertex, goal_vertex, TimeInterval(end, max(end, t) + 1.0))


def sampled_overlap_check(instance: Instance, solution: Solution, dt: float) -> list[Collision]:
    """Time-sampled true body-overlap test (center distance < sum of radii).

    Simulates all agents at times 0, dt, 2dt, ... up to the makespan and
    reports each agent pair at most once, at its first offending sample.
    This threshold is strictly tighter than the conservative event test, so
    anything accepted by validate_plans is accepted here too.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    span = overall_makespan(solution)
    ids = sorted(solution.plans)
    reported: set[tuple[int, int]] = set()
    collisions: list[Collision] = []
    steps = int(span / dt) + 1
    for k in range(steps + 1):
        t = min(k * dt, span)
        positions = {
            a: _position_at(instance, solution.plans[a], instance.start[a], t) for a in ids
        }
        for i, a in enumerate(ids):
            for b in ids[i + 1:]:
                if (a, b) in reported:
                    continue
                radius_sum = (instance.agent(a).diameter + instance.agent(b).diameter) / 2.0
                if point_distance(positions[a], positions[b]) < radius_sum:
                    reported.add((a, b))
                    ev_a = _event_at(solution.plans[a], instance.goal[a], t)
                    ev_b = _event_at(solution.plans[b], instance.goal[b], t)
                    collisions.append(
                        Collision(
                            CollisionSide(a, ev_a.from_v, ev_a.to_v, ev_a.interval),
                            CollisionSide(b, ev_b.from_v, ev_b.to_v, ev_b.interval),
                        )
                    )
    return collisions

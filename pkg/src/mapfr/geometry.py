"""Planar distance primitives and half-open time intervals.

Everything here is a pure function over small immutable values; these are
the building blocks for the collision model used by both solvers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Point2D:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"point coordinates must be finite, got ({self.x}, {self.y})")


@dataclass(frozen=True)
class Segment2D:
    """Line segment between two points; p == q is a legal degenerate segment."""

    p: Point2D
    q: Point2D

    @property
    def is_degenerate(self) -> bool:
        return self.p == self.q


@dataclass(frozen=True)
class TimeInterval:
    """Half-open interval [start, end); start == end denotes the empty interval."""

    start: float
    end: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.start) and math.isfinite(self.end)):
            raise ValueError(f"interval bounds must be finite, got [{self.start}, {self.end})")
        if self.start > self.end:
            raise ValueError(f"interval start {self.start} exceeds end {self.end}")

    @property
    def is_empty(self) -> bool:
        return self.start == self.end

    @property
    def duration(self) -> float:
        return self.end - self.start

    def contains(self, t: float) -> bool:
        """Membership in [start, end): closed at start, open at end."""
        return self.start <= t < self.end


def point_distance(a: Point2D, b: Point2D) -> float:
    return math.hypot(b.x - a.x, b.y - a.y)


def _point_segment_distance(p: Point2D, s: Segment2D) -> float:
    dx = s.q.x - s.p.x
    dy = s.q.y - s.p.y
    norm_sq = dx * dx + dy * dy
    if norm_sq == 0.0:
        return point_distance(p, s.p)
    t = ((p.x - s.p.x) * dx + (p.y - s.p.y) * dy) / norm_sq
    t = max(0.0, min(1.0, t))
    return math.hypot(p.x - (s.p.x + t * dx), p.y - (s.p.y + t * dy))


def _orientation(a: Point2D, b: Point2D, c: Point2D) -> float:
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def _properly_cross(s1: Segment2D, s2: Segment2D) -> bool:
    # Strict interior crossing; touching and collinear contact are covered by
    # the endpoint-to-segment distances, which are exactly zero there.
    o1 = _orientation(s1.p, s1.q, s2.p)
    o2 = _orientation(s1.p, s1.q, s2.q)
    o3 = _orientation(s2.p, s2.q, s1.p)
    o4 = _orientation(s2.p, s2.q, s1.q)
    return ((o1 > 0) != (o2 > 0)) and (o1 != 0) and (o2 != 0) \
        and ((o3 > 0) != (o4 > 0)) and (o3 != 0) and (o4 != 0)


def segment_distance(s1: Segment2D, s2: Segment2D) -> float:
    """Minimum distance between any pair of points of the two segments.

    Degenerate segments collapse to points, so this doubles as point-point
    and point-segment distance.
    """
    if _properly_cross(s1, s2):
        return 0.0
    return min(
        _point_segment_distance(s1.p, s2),
        _point_segment_distance(s1.q, s2),
        _point_segment_distance(s2.p, s1),
        _point_segment_distance(s2.q, s1),
    )


def interval_intersection(i1: TimeInterval, i2: TimeInterval) -> TimeInterval:
    """[max(starts), min(ends)), clamped to an empty interval when disjoint."""
    start = max(i1.start, i2.start)
    end = min(i1.end, i2.end)
    if end < start:
        end = start
    return TimeInterval(start, end)


def intervals_overlap(i1: TimeInterval, i2: TimeInterval) -> bool:
    return max(i1.start, i2.start) < min(i1.end, i2.end)

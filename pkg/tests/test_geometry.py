from __future__ import annotations

import math
import random

import pytest

from mapfr.geometry import (
    Point2D,
    Segment2D,
    TimeInterval,
    interval_intersection,
    intervals_overlap,
    point_distance,
    segment_distance,
)
from oracles import random_segment, sampled_segment_distance


def seg(x1, y1, x2, y2) -> Segment2D:
    return Segment2D(Point2D(x1, y1), Point2D(x2, y2))


def test_point_distance_345_triangle():
    assert point_distance(Point2D(0, 0), Point2D(3, 4)) == pytest.approx(5.0)


def test_point_distance_identity():
    assert point_distance(Point2D(1, 2), Point2D(1, 2)) == 0.0


def test_point_distance_unit_vertical():
    assert point_distance(Point2D(0, 1), Point2D(0, 2)) == pytest.approx(1.0)


def test_point_rejects_nonfinite():
    with pytest.raises(ValueError):
        Point2D(math.nan, 0.0)
    with pytest.raises(ValueError):
        Point2D(0.0, math.inf)


def test_segment_distance_parallel_unit_apart():
    assert segment_distance(seg(0, 0, 1, 0), seg(0, 1, 1, 1)) == pytest.approx(1.0)


def test_segment_distance_crossing_is_zero():
    assert segment_distance(seg(0, 0, 1, 1), seg(0, 1, 1, 0)) == 0.0


def test_segment_distance_point_to_segment():
    assert segment_distance(seg(0, 0, 0, 0), seg(1, -1, 1, 1)) == pytest.approx(1.0)


def test_segment_distance_touching_endpoint_is_zero():
    assert segment_distance(seg(0, 0, 1, 0), seg(1, 0, 2, 5)) == 0.0


def test_segment_distance_collinear_overlap_is_zero():
    assert segment_distance(seg(0, 0, 2, 0), seg(1, 0, 3, 0)) == 0.0


def test_segment_distance_degenerate_pair_equals_point_distance():
    assert segment_distance(seg(0, 0, 0, 0), seg(3, 4, 3, 4)) == pytest.approx(5.0)


def test_segment_distance_symmetric_random():
    rng = random.Random(7)
    for _ in range(500):
        s1 = random_segment(rng)
        s2 = random_segment(rng)
        assert segment_distance(s1, s2) == segment_distance(s2, s1)


def test_segment_distance_rigid_motion_invariant():
    rng = random.Random(11)
    for _ in range(300):
        s1 = random_segment(rng)
        s2 = random_segment(rng)
        theta = rng.uniform(0, 2 * math.pi)
        dx, dy = rng.uniform(-5, 5), rng.uniform(-5, 5)
        cos_t, sin_t = math.cos(theta), math.sin(theta)

        def move(p: Point2D) -> Point2D:
            return Point2D(
                cos_t * p.x - sin_t * p.y + dx,
                sin_t * p.x + cos_t * p.y + dy,
            )

        m1 = Segment2D(move(s1.p), move(s1.q))
        m2 = Segment2D(move(s2.p), move(s2.q))
        assert segment_distance(m1, m2) == pytest.approx(segment_distance(s1, s2), abs=1e-9)


def test_segment_distance_matches_sampling_oracle():
    rng = random.Random(3)
    for i in range(150):
        s1 = random_segment(rng, degenerate=i % 10 == 0)
        s2 = random_segment(rng, degenerate=i % 15 == 0)
        exact = segment_distance(s1, s2)
        sampled = sampled_segment_distance(s1, s2, n=10_000)
        # the sampled minimum can only overestimate the true minimum
        assert sampled >= exact - 1e-12
        assert sampled == pytest.approx(exact, abs=1e-4)


def test_interval_intersection_basic():
    out = interval_intersection(TimeInterval(0, 2), TimeInterval(1, 3))
    assert (out.start, out.end) == (1, 2)


def test_interval_intersection_touching_is_empty():
    out = interval_intersection(TimeInterval(0, 1), TimeInterval(1, 2))
    assert out.is_empty


def test_interval_intersection_containment():
    out = interval_intersection(TimeInterval(0, 5), TimeInterval(2, 3))
    assert (out.start, out.end) == (2, 3)


def test_interval_intersection_disjoint_clamps_to_empty():
    out = interval_intersection(TimeInterval(0, 1), TimeInterval(4, 6))
    assert out.is_empty


def test_intervals_overlap_cases():
    assert not intervals_overlap(TimeInterval(0, 1), TimeInterval(1, 2))
    assert intervals_overlap(TimeInterval(0, 2), TimeInterval(1, 3))
    assert not intervals_overlap(TimeInterval(1, 1), TimeInterval(0, 9))


def test_overlap_consistent_with_intersection_random():
    rng = random.Random(5)
    for _ in range(1000):
        a, b = sorted((rng.uniform(0, 10), rng.uniform(0, 10)))
        c, d = sorted((rng.uniform(0, 10), rng.uniform(0, 10)))
        i1, i2 = TimeInterval(a, b), TimeInterval(c, d)
        assert intervals_overlap(i1, i2) == (not interval_intersection(i1, i2).is_empty)


def test_interval_rejects_reversed_bounds():
    with pytest.raises(ValueError):
        TimeInterval(2.0, 1.0)

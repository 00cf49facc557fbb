"""Independent reference implementations used as test oracles.

These deliberately avoid the code paths they check: the segment-distance
oracle samples points, the shortest-plan oracle is a plain Dijkstra over
edge lengths, and the SAT reference is a naive DPLL.
"""

from __future__ import annotations

import heapq
import math
import random

import numpy as np
from scipy.spatial import cKDTree

from mapfr.geometry import Point2D, Segment2D


def sample_segment(seg: Segment2D, n: int) -> np.ndarray:
    ts = np.linspace(0.0, 1.0, n)
    px = seg.p.x + ts * (seg.q.x - seg.p.x)
    py = seg.p.y + ts * (seg.q.y - seg.p.y)
    return np.column_stack([px, py])


def sampled_segment_distance(s1: Segment2D, s2: Segment2D, n: int = 10_000) -> float:
    """Min pairwise distance over the n x n uniform sample grid of the two
    segments, identical to full enumeration of all n*n pairs.

    The squared distance is a convex quadratic in the two sample parameters,
    so for each sample on the first segment the minimizing sample on the
    second is one of the two grid points flanking the continuous minimizer;
    checking both gives the exact grid minimum in O(n).
    """
    w0x = s1.p.x - s2.p.x
    w0y = s1.p.y - s2.p.y
    ux = s1.q.x - s1.p.x
    uy = s1.q.y - s1.p.y
    vx = s2.q.x - s2.p.x
    vy = s2.q.y - s2.p.y
    s = np.linspace(0.0, 1.0, n)
    px = w0x + s * ux  # vector from S2 origin to each S1 sample
    py = w0y + s * uy
    vv = vx * vx + vy * vy
    if vv == 0.0:
        return float(np.sqrt(np.min(px * px + py * py)))
    t_star = (px * vx + py * vy) / vv  # continuous per-sample minimizer on S2
    j = np.floor(t_star * (n - 1))
    best = np.inf
    for cand in (j, j + 1):
        t = np.clip(cand, 0, n - 1) / (n - 1)
        dx = px - t * vx
        dy = py - t * vy
        best = min(best, float(np.min(dx * dx + dy * dy)))
    return float(np.sqrt(best))


def sampled_segment_distance_kdtree(s1: Segment2D, s2: Segment2D, n: int = 10_000) -> float:
    """Same grid minimum via nearest-neighbor queries; slow cross-check."""
    pts1 = sample_segment(s1, n)
    pts2 = sample_segment(s2, n)
    dists, _ = cKDTree(pts2).query(pts1, k=1, workers=-1)
    return float(dists.min())


def random_segment(rng: random.Random, span: float = 0.5, degenerate: bool = False) -> Segment2D:
    p = Point2D(rng.uniform(-span, span), rng.uniform(-span, span))
    if degenerate:
        return Segment2D(p, p)
    q = Point2D(rng.uniform(-span, span), rng.uniform(-span, span))
    return Segment2D(p, q)


def dijkstra_distance(graph, source: int, target: int) -> float:
    """Plain shortest-path distance over geometric edge lengths."""
    dist = {source: 0.0}
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if u == target:
            return d
        if d > dist.get(u, math.inf):
            continue
        for w in graph.neighbors(u):
            nd = d + graph.edge_length(u, w)
            if nd < dist.get(w, math.inf):
                dist[w] = nd
                heapq.heappush(heap, (nd, w))
    return math.inf


def dpll_satisfiable(num_vars: int, clauses: list[list[int]]) -> bool:
    """Reference DPLL with unit propagation; exponential, for tiny inputs."""

    def simplify(cls: list[list[int]], lit: int) -> list[list[int]] | None:
        out = []
        for clause in cls:
            if lit in clause:
                continue
            reduced = [l for l in clause if l != -lit]
            if not reduced:
                return None
            out.append(reduced)
        return out

    def rec(cls: list[list[int]]) -> bool:
        while True:
            units = [c[0] for c in cls if len(c) == 1]
            if not units:
                break
            cls = simplify(cls, units[0])
            if cls is None:
                return False
        if not cls:
            return True
        lit = cls[0][0]
        for choice in (lit, -lit):
            reduced = simplify(cls, choice)
            if reduced is not None and rec(reduced):
                return True
        return False

    return rec([list(c) for c in clauses])


def random_3cnf(rng: random.Random, num_vars: int, num_clauses: int) -> list[list[int]]:
    clauses = []
    for _ in range(num_clauses):
        vs = rng.sample(range(1, num_vars + 1), 3)
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    return clauses

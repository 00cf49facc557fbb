"""Makespan-optimal multi-agent path finding with continuous time.

Agents are constant-velocity discs moving along straight edges of a graph
embedded in the plane.  Two makespan-optimal solvers are provided: a
branching conflict-tree search (`solve_cbsr`) and a lazy SAT-refinement
solver (`solve_smt_cbsr`) backed by the embedded CDCL engine in
`sat_engine`.
"""

from .bench import (
    BenchmarkResult,
    LayeredSpec,
    generate_layered,
    identity_instance,
    random_permutation_instance,
    run_benchmark,
)
from .cbsr import classify_conflict, solve_cbsr
from .geometry import (
    Point2D,
    Segment2D,
    TimeInterval,
    interval_intersection,
    intervals_overlap,
    point_distance,
    segment_distance,
)
from .lowlevel import Constraint, shortest_temporal_plan
from .model import (
    Agent,
    Graph,
    Instance,
    InvalidEdgeError,
    MapfError,
    MotionEvent,
    PlanFormatError,
    Solution,
    TemporalPlan,
    discretize,
    format_instance,
    format_solution,
    individual_makespan,
    load_instance,
    overall_makespan,
    parse_instance,
    reinterpret_unit_solution,
    save_instance,
    traversal_duration,
)
from .result import INFEASIBLE, SOLVED, TIMEOUT, SolveResult
from .smt_cbsr import quantize, solve_smt_cbsr
from .validation import (
    Collision,
    events_conflict,
    pad_to_makespan,
    sampled_overlap_check,
    validate_plans,
)

__version__ = "0.1.0"

__all__ = [
    "Agent",
    "BenchmarkResult",
    "Collision",
    "Constraint",
    "Graph",
    "Instance",
    "InvalidEdgeError",
    "LayeredSpec",
    "MapfError",
    "MotionEvent",
    "PlanFormatError",
    "Point2D",
    "Segment2D",
    "SolveResult",
    "Solution",
    "TemporalPlan",
    "TimeInterval",
    "INFEASIBLE",
    "SOLVED",
    "TIMEOUT",
    "classify_conflict",
    "discretize",
    "events_conflict",
    "format_instance",
    "format_solution",
    "generate_layered",
    "identity_instance",
    "individual_makespan",
    "interval_intersection",
    "intervals_overlap",
    "load_instance",
    "overall_makespan",
    "pad_to_makespan",
    "parse_instance",
    "point_distance",
    "quantize",
    "random_permutation_instance",
    "reinterpret_unit_solution",
    "run_benchmark",
    "sampled_overlap_check",
    "save_instance",
    "segment_distance",
    "shortest_temporal_plan",
    "solve_cbsr",
    "solve_smt_cbsr",
    "traversal_duration",
    "validate_plans",
]

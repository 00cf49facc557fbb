from __future__ import annotations

import math

import pytest

from mapfr.bench import LayeredSpec, generate_layered, identity_instance
from mapfr.geometry import Point2D, TimeInterval
from mapfr.model import (
    Agent,
    Graph,
    Instance,
    InvalidEdgeError,
    MotionEvent,
    PlanFormatError,
    Solution,
    TemporalPlan,
    check_plan,
    discretize,
    format_instance,
    format_solution,
    individual_makespan,
    overall_makespan,
    parse_instance,
    traversal_duration,
)


@pytest.fixture
def line_instance() -> Instance:
    graph = Graph(
        [(0, Point2D(0, 0)), (1, Point2D(1, 0)), (2, Point2D(1, 1))],
        [(0, 1), (1, 2)],
    )
    return Instance(graph, (Agent(0, 1.0, 0.2),), {0: 0}, {0: 2})


def test_traversal_duration_unit_edge(line_instance):
    assert traversal_duration(line_instance, 0, 0, 1) == pytest.approx(1.0)


def test_traversal_duration_diagonal():
    graph = Graph([(0, Point2D(0, 0)), (1, Point2D(1, 1))], [(0, 1)])
    inst = Instance(graph, (Agent(0, 1.0, 0.2),), {0: 0}, {0: 1})
    assert traversal_duration(inst, 0, 0, 1) == pytest.approx(math.sqrt(2))


def test_traversal_duration_velocity_scales():
    graph = Graph([(0, Point2D(0, 0)), (1, Point2D(1, 0))], [(0, 1)])
    inst = Instance(graph, (Agent(0, 2.0, 0.2),), {0: 0}, {0: 1})
    assert traversal_duration(inst, 0, 0, 1) == pytest.approx(0.5)


def test_traversal_duration_wait_is_zero(line_instance):
    assert traversal_duration(line_instance, 0, 1, 1) == 0.0


def test_traversal_duration_unknown_edge(line_instance):
    with pytest.raises(InvalidEdgeError):
        traversal_duration(line_instance, 0, 0, 2)


def test_individual_makespan_last_event_end():
    plan = TemporalPlan(
        0,
        (
            MotionEvent(0, 1, TimeInterval(0.0, 1.0)),
            MotionEvent(1, 1, TimeInterval(1.0, 2.5)),
        ),
    )
    assert individual_makespan(plan) == 2.5


def test_individual_makespan_empty_plan():
    assert individual_makespan(TemporalPlan(0, ())) == 0.0


def test_overall_makespan_is_max():
    plans = {
        0: TemporalPlan(0, (MotionEvent(0, 1, TimeInterval(0, 2.0)),)),
        1: TemporalPlan(1, (MotionEvent(2, 3, TimeInterval(0, 3.5)),)),
        2: TemporalPlan(2, (MotionEvent(4, 5, TimeInterval(0, 1.0)),)),
    }
    assert overall_makespan(Solution(plans)) == 3.5


def test_overall_makespan_all_empty():
    assert overall_makespan(Solution({0: TemporalPlan(0, ()), 1: TemporalPlan(1, ())})) == 0.0


def test_discretize_unit_durations(line_instance):
    spec = LayeredSpec((3, 1, 3))
    inst = identity_instance(generate_layered(spec), spec)
    unit = discretize(inst)
    for u, v in unit.graph.edges:
        assert traversal_duration(unit, 0, u, v) == 1.0


def test_discretize_idempotent(line_instance):
    once = discretize(line_instance)
    assert discretize(once) == once


def test_discretize_does_not_mutate_original(line_instance):
    discretize(line_instance)
    assert not line_instance.unit_timed


def test_instance_rejects_noninjective_start():
    graph = Graph([(0, Point2D(0, 0)), (1, Point2D(1, 0))], [(0, 1)])
    agents = (Agent(0, 1.0, 0.2), Agent(1, 1.0, 0.2))
    with pytest.raises(ValueError):
        Instance(graph, agents, {0: 0, 1: 0}, {0: 0, 1: 1})


def test_graph_rejects_self_loop():
    with pytest.raises(ValueError):
        Graph([(0, Point2D(0, 0))], [(0, 0)])


def test_check_plan_accepts_wait_then_move(line_instance):
    plan = TemporalPlan(
        0,
        (
            MotionEvent(0, 0, TimeInterval(0.0, 0.5)),
            MotionEvent(0, 1, TimeInterval(0.5, 1.5)),
            MotionEvent(1, 2, TimeInterval(1.5, 2.5)),
        ),
    )
    check_plan(line_instance, plan)


def test_check_plan_rejects_gap(line_instance):
    plan = TemporalPlan(
        0,
        (
            MotionEvent(0, 1, TimeInterval(0.0, 1.0)),
            MotionEvent(1, 2, TimeInterval(1.5, 2.5)),
        ),
    )
    with pytest.raises(PlanFormatError):
        check_plan(line_instance, plan)


def test_check_plan_rejects_wrong_duration(line_instance):
    plan = TemporalPlan(
        0,
        (
            MotionEvent(0, 1, TimeInterval(0.0, 2.0)),
            MotionEvent(1, 2, TimeInterval(2.0, 3.0)),
        ),
    )
    with pytest.raises(PlanFormatError):
        check_plan(line_instance, plan)


def test_check_plan_rejects_non_edge(line_instance):
    plan = TemporalPlan(0, (MotionEvent(0, 2, TimeInterval(0.0, 1.0)),))
    with pytest.raises(PlanFormatError):
        check_plan(line_instance, plan)


def test_check_plan_rejects_teleport(line_instance):
    plan = TemporalPlan(
        0,
        (
            MotionEvent(0, 1, TimeInterval(0.0, 1.0)),
            MotionEvent(0, 1, TimeInterval(1.0, 2.0)),
        ),
    )
    with pytest.raises(PlanFormatError):
        check_plan(line_instance, plan)


def test_instance_roundtrip_through_text():
    spec = LayeredSpec((3, 1, 3), connectivity="window3")
    inst = identity_instance(generate_layered(spec), spec)
    text = format_instance(inst)
    back = parse_instance(text)
    assert back == inst
    assert format_instance(back) == text


def test_parse_instance_comments_and_errors():
    text = """
# a tiny instance
v 0 0.0 0.0
v 1 1.0 0.0   # inline comment
e 0 1
a 0 1.0 0.2 0 1
"""
    inst = parse_instance(text)
    assert inst.graph.vertex_ids == (0, 1)
    with pytest.raises(ValueError):
        parse_instance("w 0 0 0\n")


def test_format_solution_nine_decimals(line_instance):
    plan = TemporalPlan(
        0,
        (
            MotionEvent(0, 1, TimeInterval(0.0, 1.0)),
            MotionEvent(1, 2, TimeInterval(1.0, 2.0)),
        ),
    )
    text = format_solution(Solution({0: plan}))
    lines = text.strip().splitlines()
    assert lines[0] == "agent 0 0 1 0.000000000 1.000000000"
    assert lines[-1] == "makespan 2.000000000"

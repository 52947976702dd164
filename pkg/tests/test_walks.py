from fractions import Fraction

import pytest

from analysis.walks import (
    AdjacencyGreedy,
    CircuitWalk,
    Level,
    Step,
    all_steps_reversible,
    classify_hierarchy,
    distances_and_diameters,
    is_edge_walk_polytope,
    reachable_step_graph,
    replay_walk,
    replay_witness,
    walk,
)
from polytopes import families
from polytopes.polyhedron import Polyhedron, enumerate_vertices
from utils.errors import (
    BudgetExceeded,
    GCWUnsupported,
    InfeasibleDirection,
    NotIntegralPolytope,
    PointNotInPolyhedron,
    Unbounded,
)

FIG2C_DIRECTIVES = [((1, 0), 1), ((-1, 1), 1), ((1, 0), 1), ((0, -1), 1)]


def test_level_order():
    assert Level.ECW.at_least(Level.VCW)
    assert Level.ICW.at_least(Level.ICW)
    assert not Level.GCW.at_least(Level.ICW)
    assert not Level.UNKNOWN.at_least(Level.GCW)


def test_fig2c_walk():
    P = families.fig2("c")
    trace = walk(P, (0, -1), FIG2C_DIRECTIVES)
    assert trace.points == ((0, -1), (6, -1), (2, 3), (4, 3), (4, -3))
    assert [s.alpha for s in trace.steps] == [6, 4, 2, 6]
    assert trace.length == 4 and trace.start == (0, -1) and trace.end == (4, -3)
    assert replay_walk(P, trace)


def test_walk_accepts_vertex_and_circuit_records():
    P = families.fig2("c")
    start = enumerate_vertices(P)[0]
    trace = walk(P, start, FIG2C_DIRECTIVES[:1])
    assert trace.points[-1] == (6, -1)


def test_tampered_walk_does_not_replay():
    P = families.fig2("c")
    trace = walk(P, (0, -1), FIG2C_DIRECTIVES)
    first = trace.steps[0]
    bad = CircuitWalk(trace.points, (Step(first.circuit, first.orientation, Fraction(5)),) + trace.steps[1:])
    assert not replay_walk(P, bad)
    assert not replay_walk(P, CircuitWalk(trace.points[:-1], trace.steps))


def test_walk_errors():
    P = families.fig2("c")
    with pytest.raises(PointNotInPolyhedron, match="start at a vertex"):
        walk(P, (1, 0), FIG2C_DIRECTIVES)
    with pytest.raises(PointNotInPolyhedron):
        walk(P, (9, 9), FIG2C_DIRECTIVES)
    with pytest.raises(InfeasibleDirection, match="not a circuit") as info:
        walk(P, (0, -1), [((1, 2), 1)])
    assert info.value.index == 0
    with pytest.raises(InfeasibleDirection) as info:
        walk(P, (0, -1), [((1, 0), 1), ((1, 0), 1)])
    assert info.value.index == 1


def test_adjacency_greedy_follows_edges(cube):
    vertices = enumerate_vertices(cube)
    trace = walk(cube, vertices[0], AdjacencyGreedy(7))
    assert trace.length == 3
    assert trace.end == vertices[7].point
    assert all(s.alpha == 1 for s in trace.steps)


def test_adjacency_greedy_target_must_be_a_vertex_index(cube):
    start = enumerate_vertices(cube)[0]
    for target in (8, -1):
        with pytest.raises(PointNotInPolyhedron, match="not a vertex index"):
            walk(cube, start, AdjacencyGreedy(target))


def test_budget_smaller_than_vertex_set_stops_before_seeding(cube, mocker):
    steps = mocker.patch("analysis.walks.steps_from")
    with pytest.raises(BudgetExceeded) as info:
        reachable_step_graph(cube, max_points=7)
    assert info.value.partial.graph.number_of_nodes() == 0
    steps.assert_not_called()
    mocker.stopall()
    assert reachable_step_graph(cube, max_points=8).complete


def test_reachable_step_graph_of_ecw_polytope(square):
    closure = reachable_step_graph(square)
    assert closure.complete
    assert sorted(closure.points) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert len(list(closure.arcs())) == 8


def test_reachable_step_graph_budget():
    with pytest.raises(BudgetExceeded) as info:
        reachable_step_graph(families.fig2("b"), max_points=5)
    assert info.value.max_points == 5
    assert info.value.partial is not None and not info.value.partial.complete


def test_stop_on_noninteger_returns_witness():
    closure = reachable_step_graph(families.fig2("a"), stop_on_noninteger=True)
    assert closure.witness is not None
    assert any(a.denominator != 1 for a in closure.witness)
    assert replay_walk(families.fig2("a"), closure.prefix(closure.witness))


@pytest.mark.parametrize("which, level", [("a", Level.GCW), ("b", Level.ICW), ("c", Level.VCW), ("d", Level.ECW)])
def test_fig2_hierarchy(which, level):
    P = families.fig2(which)
    result = classify_hierarchy(P)
    assert result.level is level
    assert replay_witness(P, result)


def test_fig3_is_gcw():
    assert classify_hierarchy(families.fig3_polytope()).level is Level.GCW


def test_matroid_is_gcw(matroid_u34):
    assert classify_hierarchy(matroid_u34).level is Level.GCW


def test_transportation_is_icw(transportation_122):
    _, P = transportation_122
    result = classify_hierarchy(P)
    assert result.level is Level.ICW
    assert replay_witness(P, result)


def test_classify_budget_gives_unknown():
    result = classify_hierarchy(families.fig2("b"), budget=5)
    assert result.level is Level.UNKNOWN
    assert result.max_points == 5
    assert not replay_witness(families.fig2("b"), result)


def test_classify_rejects_fractional_vertices():
    P = Polyhedron.from_rows(2, B=[[-1, 0], [0, -1], [2, 2]], d=[0, 0, 1])
    with pytest.raises(NotIntegralPolytope):
        classify_hierarchy(P)


def test_classify_rejects_unbounded():
    orthant = Polyhedron.from_rows(2, B=[[-1, 0], [0, -1]], d=[0, 0])
    with pytest.raises(Unbounded):
        classify_hierarchy(orthant)


def test_edge_walk_polytope():
    assert is_edge_walk_polytope(families.fig2("d"))
    assert not is_edge_walk_polytope(families.fig2("c"))


@pytest.mark.parametrize("which, expected", [("a", False), ("b", False), ("c", True), ("d", True)])
def test_reversibility(which, expected):
    ok, failure = all_steps_reversible(families.fig2(which))
    assert ok is expected
    assert (failure is None) is expected


def test_distances(cube):
    report = distances_and_diameters(cube)
    assert report.diameter == 3
    assert report.matrix[0][7] == 3
    assert distances_and_diameters(cube, kind="circuit").diameter == 3

    octagon = distances_and_diameters(families.fig2("c"), kind="circuit")
    combinatorial = distances_and_diameters(families.fig2("c"))
    assert combinatorial.diameter == 4
    assert octagon.diameter <= combinatorial.diameter


def test_circuit_distance_rejects_gcw():
    with pytest.raises(GCWUnsupported):
        distances_and_diameters(families.fig2("a"), kind="circuit")
    with pytest.raises(ValueError, match="Unknown distance kind"):
        distances_and_diameters(families.fig2("d"), kind="euclidean")

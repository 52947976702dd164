import random
from fractions import Fraction

import pytest

from polytopes import families
from polytopes.circuits import (
    Circuit,
    circuits_rank_method,
    circuits_support_oracle,
    circuits_within_subdeterminant_bound,
    feasible_circuits_at,
    maximal_step,
    normalize_circuit,
    satisfies_rank_certificate,
    steps_from,
)
from polytopes.polyhedron import Polyhedron, edge_graph, enumerate_vertices, tight_rows
from utils.errors import (
    InfeasibleDirection,
    NotInKernel,
    NotPointed,
    PointNotInPolyhedron,
    SizeLimitExceeded,
    UnboundedDirection,
)
from utils.exactla import primitive_vector, rank, sub


def directions(P):
    return [c.g for c in circuits_rank_method(P)]


@pytest.mark.parametrize("which", ["a", "b", "c"])
def test_fig2_octagon_circuits(which):
    assert directions(families.fig2(which)) == [(0, 1), (1, -1), (1, 0), (1, 1)]


def test_fig2d_circuits():
    assert directions(families.fig2("d")) == [(0, 1), (1, 0)]


def test_fig3_contains_diagonal():
    assert (1, 1, 0) in directions(families.fig3_polytope())


def test_transportation_circuit(transportation_122):
    _, P = transportation_122
    assert (1, -1, 0, -1, 1, 0, 0, 0, 0) in directions(P)


def test_matroid_circuit(matroid_u34):
    assert (2, -1, -1, -1) in directions(matroid_u34)


def test_normalize_circuit(transportation_122):
    record = normalize_circuit((-2, 2))
    assert (record.g, record.sign) == ((1, -1), -1)
    assert record == normalize_circuit((1, -1))
    assert record.direction(record.sign) == (-1, 1)
    assert record.negated().sign == 1

    _, P = transportation_122
    with pytest.raises(NotInKernel):
        normalize_circuit((1, 0, 0, 0, 0, 0, 0, 0, 0), P)


@pytest.mark.parametrize("make", [
    lambda: families.fig2("a"),
    lambda: families.fig2("b"),
    lambda: families.fig2("c"),
    lambda: families.fig2("d"),
    families.fig3_polytope,
    lambda: families.hypercube(3),
    lambda: families.standard_simplex(3),
    lambda: families.nd_parallelotope(3, 2),
    lambda: families.partition_fixed(families.fixed_partition_spec([2, 1])),
    lambda: families.partition_bounded(families.partition_spec(2, 2, [0, 0], [2, 2])),
])
def test_rank_method_matches_support_oracle(make):
    P = make()
    assert circuits_rank_method(P) == circuits_support_oracle(P)


def test_transportation_oracle(transportation_122):
    _, P = transportation_122
    assert circuits_rank_method(P) == circuits_support_oracle(P)


def _random_system(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    while True:
        m = rng.randint(n, 8)
        B = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(m)]
        if rank(B) == n:
            break
    A = []
    if n > 1 and rng.random() < 0.3:
        A = [[rng.randint(-3, 3) for _ in range(n)]]
    return Polyhedron.from_rows(n, A=A, b=[0] * len(A), B=B, d=[rng.randint(0, 5) for _ in range(m)])


@pytest.mark.parametrize("seed", range(50))
def test_random_systems_rank_method_matches_oracle(seed):
    P = _random_system(seed)
    assert circuits_rank_method(P) == circuits_support_oracle(P)


def test_oracle_row_guard(matroid_u34):
    with pytest.raises(SizeLimitExceeded, match="at most 16"):
        circuits_support_oracle(matroid_u34)


def test_not_pointed():
    strip = Polyhedron.from_rows(2, B=[[1, 0], [-1, 0]], d=[1, 0])
    with pytest.raises(NotPointed):
        circuits_rank_method(strip)


def test_non_minimal_representation_warns(caplog):
    square = families.hypercube(2)
    padded = Polyhedron(2, B=square.B + ((Fraction(1), Fraction(1)),), d=square.d + (Fraction(7),))
    with caplog.at_level("WARNING", logger="polytopes.circuits"):
        found = circuits_rank_method(padded)
    assert (1, -1) in [c.g for c in found]
    assert "not a minimal representation" in caplog.text


def test_rank_certificate_both_orientations(cube, transportation_122):
    _, P = transportation_122
    for polytope in (cube, P, families.fig2("a")):
        for c in circuits_rank_method(polytope):
            assert satisfies_rank_certificate(polytope, c, 1)
            assert satisfies_rank_certificate(polytope, c, -1)
    assert not satisfies_rank_certificate(cube, Circuit((1, 1, 0)))


SUBDETERMINANT_FIXTURES = [
    lambda: families.fig2("a"),
    lambda: families.fig2("b"),
    lambda: families.fig2("c"),
    lambda: families.fig2("d"),
    families.fig3_polytope,
    lambda: families.hypercube(3),
    lambda: families.standard_simplex(3, 2),
    lambda: families.nd_parallelotope(3, 2),
    lambda: families.nd_parallelotope(4, 3, families.shear(4, 1, 3, [0, 1, 0, -1])),
    lambda: families.frustum(3, 4, 2),
    lambda: families.transportation(families.build_spec(families.TransportationSpec, supplies=[1, 2, 2], demands=[1, 2, 2])),
    lambda: families.transportation(families.build_spec(families.TransportationSpec, supplies=[2, 3], demands=[1, 2, 2])),
    lambda: families.matroid_polytope(families.uniform_matroid(4, 3)),
    lambda: families.matroid_polytope(families.graphic_matroid([(0, 1), (1, 2), (0, 2), (2, 3)])),
    lambda: families.partition_fixed(families.fixed_partition_spec([2, 1])),
    lambda: families.partition_fixed(families.fixed_partition_spec([2, 1, 1])),
    lambda: families.partition_bounded(families.partition_spec(3, 3, [0, 1, 0], [3, 1, 3])),
    lambda: families.partition_bounded(families.partition_spec(4, 3, [0, 0, 0], [2, 2, 2])),
] + [lambda seed=seed: families.random_simple_polytope(random.Random(seed)) for seed in range(10)] + [
    lambda seed=seed: _random_system(seed) for seed in range(50)
]


@pytest.mark.parametrize("make", SUBDETERMINANT_FIXTURES)
def test_entries_within_subdeterminant_bound(make):
    assert circuits_within_subdeterminant_bound(make())


def test_fig2a_step():
    P = families.fig2("a")
    c = normalize_circuit((1, -1), P)
    assert maximal_step(P, (1, 2), c, 1) == ((Fraction(7, 2), Fraction(-1, 2)), Fraction(5, 2))
    with pytest.raises(InfeasibleDirection, match="infeasible"):
        maximal_step(P, (1, 2), c, -1)


def test_fig3_step_reaches_half_point():
    P = families.fig3_polytope()
    c = normalize_circuit((1, 1, 0), P)
    assert maximal_step(P, (0, 0, 0), c) == ((Fraction(1, 2), Fraction(1, 2), 0), Fraction(1, 2))


def test_matroid_step(matroid_u34):
    c = normalize_circuit((2, -1, -1, -1), matroid_u34)
    y, alpha = maximal_step(matroid_u34, (0, 1, 1, 1), c)
    assert y == (1, Fraction(1, 2), Fraction(1, 2), Fraction(1, 2))
    assert alpha == Fraction(1, 2)


def test_transportation_step(transportation_122):
    _, P = transportation_122
    x = (0, 1, 0, 1, 0, 1, 0, 1, 1)
    assert x in [v.point for v in enumerate_vertices(P)]
    g = (1, -1, 0, -1, 1, 0, 0, 0, 0)
    y, alpha = maximal_step(P, x, normalize_circuit(g, P))
    assert alpha == 1
    assert y == tuple(a + b for a, b in zip(x, g))
    assert y not in [v.point for v in enumerate_vertices(P)]


def test_step_errors():
    orthant = Polyhedron.from_rows(2, B=[[-1, 0], [0, -1]], d=[0, 0])
    with pytest.raises(UnboundedDirection):
        maximal_step(orthant, (0, 0), normalize_circuit((1, 0), orthant))
    with pytest.raises(PointNotInPolyhedron):
        maximal_step(orthant, (-1, 0), normalize_circuit((1, 0), orthant))
    with pytest.raises(PointNotInPolyhedron):
        feasible_circuits_at(orthant, (-1, -1))


def test_feasible_circuits_at_square_corner(square):
    moves = feasible_circuits_at(square, (0, 0))
    assert sorted((c.g, o) for c, o in moves) == [((0, 1), 1), ((1, 0), 1)]
    interior = feasible_circuits_at(square, (Fraction(1, 2), Fraction(1, 2)))
    assert len(interior) == 4


def test_steps_from_vertex_of_square(square):
    landings = sorted(y for _, _, y, _ in steps_from(square, (0, 0), circuits_rank_method(square)))
    assert landings == [(0, 1), (1, 0)]


INVARIANT_POLYTOPES = [
    lambda: families.fig2("a"),
    lambda: families.fig2("c"),
    families.fig3_polytope,
    lambda: families.hypercube(3),
    lambda: families.frustum(3, 3, 1),
    lambda: families.partition_fixed(families.fixed_partition_spec([2, 1])),
    lambda: families.matroid_polytope(families.uniform_matroid(4, 3)),
]


@pytest.mark.parametrize("make", INVARIANT_POLYTOPES)
def test_edge_directions_are_circuits(make):
    P = make()
    circuits = {c.g for c in circuits_rank_method(P)}
    circuits |= {tuple(-a for a in g) for g in circuits}
    vertices = enumerate_vertices(P)
    for i, j in edge_graph(P).edges:
        assert primitive_vector(sub(vertices[j].point, vertices[i].point)) in circuits


@pytest.mark.parametrize("make", INVARIANT_POLYTOPES)
def test_maximal_steps_make_a_new_row_tight(make):
    P = make()
    circuits = circuits_rank_method(P)
    for v in enumerate_vertices(P):
        for circuit, orientation, y, alpha in steps_from(P, v.point, circuits):
            assert alpha > 0
            assert tight_rows(P, y) - v.tight_rows
            y_again, _ = maximal_step(P, y, circuit, -orientation)
            assert tight_rows(P, y_again) - tight_rows(P, y)

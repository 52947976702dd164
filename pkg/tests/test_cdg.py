import pytest
from batteries import cluster_sizes, marked_slow, partition_specs

from analysis.cdg import (
    Clustering,
    Status,
    build_cdg,
    pp_bounded_circuit_test,
    pp_bounded_edge_test,
    pp_fixed_edge_test,
    status_of,
    transfer_vectors,
)
from polytopes import families
from polytopes.circuits import circuits_rank_method
from polytopes.polyhedron import are_adjacent, edge_graph, enumerate_vertices
from utils.errors import DegenerateInput, InfeasibleClustering


def diff(spec, y1, y2):
    return [int(b - a) for a, b in zip(Clustering(y1, spec.k).vector(), Clustering(y2, spec.k).vector())]


def test_status_of():
    assert status_of(0, 1, 2) is Status.FREE
    assert status_of(0, 2, 2) is Status.SATURATED
    assert status_of(1, 1, 2) is Status.DEPLETED
    assert status_of(1, 1, 1) is Status.FIXED


def test_clustering_vector_round_trip():
    spec = families.partition_spec(3, 2, [0, 0], [3, 3])
    y = Clustering((1, 0, 1), 2)
    assert y.vector() == (0, 1, 0, 1, 0, 1)
    assert Clustering.from_vector(spec, y.vector()) == y
    assert y.sizes() == (1, 2)
    with pytest.raises(InfeasibleClustering):
        Clustering.from_vector(spec, (1, 1, 0, 1, 0, 1))


def test_two_disjoint_cycles_are_not_an_edge():
    spec = families.fixed_partition_spec([1] * 6)
    y1 = Clustering((0, 1, 2, 3, 4, 5), 6)
    y2 = Clustering((1, 2, 3, 0, 5, 4), 6)
    cdg = build_cdg(spec, y1, y2)
    assert cdg.edges == [(0, 1, 0), (1, 2, 1), (2, 3, 2), (3, 0, 3), (4, 5, 4), (5, 4, 5)]
    assert set(cdg.statuses) == {Status.FIXED}
    assert not pp_fixed_edge_test(spec, y1, y2)


def test_identical_clusterings():
    spec = families.partition_spec(2, 2, [0, 0], [2, 2])
    y = Clustering((0, 1), 2)
    assert build_cdg(spec, y, y).edges == []
    with pytest.raises(DegenerateInput):
        pp_bounded_edge_test(spec, y, y)


def test_infeasible_clustering():
    spec = families.partition_spec(2, 2, [1, 0], [2, 2])
    with pytest.raises(InfeasibleClustering, match="bounds"):
        build_cdg(spec, Clustering((1, 1), 2), Clustering((0, 1), 2))
    with pytest.raises(InfeasibleClustering, match="out of range"):
        build_cdg(spec, Clustering((0, 2), 2), Clustering((0, 1), 2))


def test_path_with_free_interior_is_not_an_edge():
    spec = families.partition_spec(3, 3, [0, 0, 0], [3, 3, 3])
    assert not pp_bounded_edge_test(spec, Clustering((0, 1, 2), 3), Clustering((1, 2, 2), 3))


def test_path_with_fixed_interior_is_an_edge():
    spec = families.partition_spec(3, 3, [0, 1, 0], [3, 1, 3])
    assert pp_bounded_edge_test(spec, Clustering((0, 1, 2), 3), Clustering((1, 2, 2), 3))


def test_cycle_with_two_free_nodes_is_not_an_edge():
    spec = families.partition_spec(2, 2, [0, 0], [2, 2])
    assert not pp_bounded_edge_test(spec, Clustering((0, 1), 2), Clustering((1, 0), 2))


def test_cycle_with_one_free_node_is_an_edge():
    spec = families.partition_spec(2, 2, [1, 0], [1, 2])
    assert pp_bounded_edge_test(spec, Clustering((0, 1), 2), Clustering((1, 0), 2))


def test_single_transfer_is_an_edge():
    spec = families.partition_spec(2, 2, [0, 0], [2, 2])
    assert pp_bounded_edge_test(spec, Clustering((0, 1), 2), Clustering((0, 0), 2))


def test_fixed_edge_test():
    spec = families.fixed_partition_spec([2, 2])
    y1 = Clustering((0, 0, 1, 1), 2)
    assert pp_fixed_edge_test(spec, y1, Clustering((1, 0, 0, 1), 2))
    assert not pp_fixed_edge_test(spec, y1, Clustering((1, 1, 0, 0), 2))
    rotation = families.fixed_partition_spec([1, 1, 1])
    assert pp_fixed_edge_test(rotation, Clustering((0, 1, 2), 3), Clustering((1, 2, 0), 3))
    with pytest.raises(InfeasibleClustering):
        pp_fixed_edge_test(families.partition_spec(2, 2, [0, 0], [2, 2]), Clustering((0, 1), 2), Clustering((1, 0), 2))


def test_circuit_test_examples():
    swap = families.partition_spec(2, 2, [0, 0], [2, 2])
    assert pp_bounded_circuit_test(swap, diff(swap, (0, 1), (1, 0)))
    two_swaps = families.partition_spec(4, 2, [0, 0], [4, 4])
    assert not pp_bounded_circuit_test(two_swaps, diff(two_swaps, (0, 1, 0, 1), (1, 0, 1, 0)))
    path = families.partition_spec(2, 3, [0, 0, 0], [2, 2, 2])
    assert pp_bounded_circuit_test(path, diff(path, (0, 1), (1, 2)))
    assert not pp_bounded_circuit_test(path, [0] * 6)
    assert not pp_bounded_circuit_test(path, [2, -2, 0, 0, 0, 0])
    assert not pp_bounded_circuit_test(path, [1, 0, 0, 0, 0, 0])


def edge_pairs(P):
    return {frozenset(e) for e in edge_graph(P).edges}


@pytest.mark.parametrize("n_items, k, lower, upper", marked_slow(partition_specs(), lambda case: case[0] * case[1] >= 15))
def test_edge_test_matches_geometry(n_items, k, lower, upper):
    spec = families.partition_spec(n_items, k, lower, upper)
    P = families.partition_bounded(spec)
    clusterings = [Clustering.from_vector(spec, v.point) for v in enumerate_vertices(P)]
    edges = edge_pairs(P)
    for i in range(len(clusterings)):
        for j in range(i + 1, len(clusterings)):
            expected = frozenset((i, j)) in edges
            assert pp_bounded_edge_test(spec, clusterings[i], clusterings[j]) == expected
            assert pp_bounded_edge_test(spec, clusterings[j], clusterings[i]) == expected


@pytest.mark.parametrize("kappa", cluster_sizes())
def test_fixed_edge_test_matches_geometry(kappa):
    spec = families.fixed_partition_spec(kappa)
    P = families.partition_fixed(spec)
    clusterings = [Clustering.from_vector(spec, v.point) for v in enumerate_vertices(P)]
    edges = edge_pairs(P)
    for i in range(len(clusterings)):
        for j in range(i + 1, len(clusterings)):
            assert pp_fixed_edge_test(spec, clusterings[i], clusterings[j]) == (frozenset((i, j)) in edges)


def test_edge_pairs_agree_with_are_adjacent():
    spec = families.partition_spec(3, 2, [1, 0], [2, 3])
    P = families.partition_bounded(spec)
    vertices = enumerate_vertices(P)
    edges = edge_pairs(P)
    for i in range(len(vertices)):
        for j in range(i + 1, len(vertices)):
            assert are_adjacent(P, vertices[i], vertices[j]) == (frozenset((i, j)) in edges)


@pytest.mark.parametrize("n_items, k, lower, upper", marked_slow(
    partition_specs(max_items=4), lambda case: case[0] * case[1] >= 12,
))
def test_circuit_test_matches_rank_method(n_items, k, lower, upper):
    spec = families.partition_spec(n_items, k, lower, upper)
    expected = [c.g for c in circuits_rank_method(families.partition_bounded(spec))]
    assert transfer_vectors(spec) == expected
    assert all(pp_bounded_circuit_test(spec, g) for g in expected)


@pytest.mark.parametrize("kappa", cluster_sizes())
def test_fixed_circuits_are_cycles(kappa):
    spec = families.fixed_partition_spec(kappa)
    expected = [c.g for c in circuits_rank_method(families.partition_fixed(spec))]
    assert transfer_vectors(spec, kinds=("cycle",)) == expected

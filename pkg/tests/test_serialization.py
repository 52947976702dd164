from fractions import Fraction

import pytest

from analysis.cdg import Clustering, build_cdg
from analysis.ecw import recognize_nd_parallelotope
from analysis.walks import HierarchyLevel, Level
from polytopes import families
from utils import serialization
from utils.errors import InfeasibleClustering, InvalidSpec, ParseError, ShapeError


def test_polyhedron_from_dict_reads_fractions():
    P = serialization.polyhedron_from_dict({"n": 1, "B": [[1], ["-1"]], "d": ["1/2", 0], "name": "half"})
    assert P.d == (Fraction(1, 2), Fraction(0))
    assert P.name == "half"
    assert serialization.polyhedron_to_dict(P)["d"] == ["1/2", "0"]


def test_polyhedron_round_trip(square):
    again = serialization.polyhedron_from_dict(serialization.polyhedron_to_dict(square))
    assert again == square


def test_polyhedron_from_dict_errors():
    with pytest.raises(InvalidSpec, match="'n'"):
        serialization.polyhedron_from_dict({"B": [[1]]})
    with pytest.raises(InvalidSpec):
        serialization.polyhedron_from_dict({"n": -1})
    with pytest.raises(ShapeError):
        serialization.polyhedron_from_dict({"n": 2, "B": [[1, 0], [1]], "d": [1, 1]})
    with pytest.raises(ShapeError):
        serialization.polyhedron_from_dict({"n": 2, "B": [1, 0], "d": [1]})


def test_loads_rejects_bad_json():
    with pytest.raises(ParseError, match="Invalid JSON"):
        serialization.loads("{not json")


def test_dumps_is_canonical():
    text = serialization.dumps({"b": 1, "a": [1, 2]})
    assert text == serialization.dumps({"a": [1, 2], "b": 1})
    assert text.index('"a"') < text.index('"b"')
    assert text.endswith("\n")


def test_hierarchy_to_dict():
    result = HierarchyLevel(Level.GCW, witness_point=(Fraction(1, 2), Fraction(0)))
    assert serialization.hierarchy_to_dict(result) == {"level": "GCW", "witness": {"point": ["1/2", "0"]}}
    unknown = HierarchyLevel(Level.UNKNOWN, max_points=5)
    assert serialization.hierarchy_to_dict(unknown) == {"level": "UNKNOWN", "witness": {"max_points": 5}}


def test_clustering_from_dict():
    spec = families.partition_spec(2, 2, [1, 0], [2, 2])
    y = serialization.clustering_from_dict({"assignment": {"0": 0, "1": 1}}, spec)
    assert y == Clustering((0, 1), 2)
    assert serialization.clustering_to_dict(y) == {"k": 2, "assignment": {"0": 0, "1": 1}}
    with pytest.raises(InvalidSpec, match="every item"):
        serialization.clustering_from_dict({"assignment": {"0": 0}}, spec)
    with pytest.raises(InfeasibleClustering):
        serialization.clustering_from_dict({"assignment": {"0": 1, "1": 1}}, spec)


def test_cdg_to_dict():
    spec = families.partition_spec(2, 2, [0, 0], [2, 2])
    cdg = build_cdg(spec, Clustering((0, 1), 2), Clustering((0, 0), 2))
    assert serialization.cdg_to_dict(cdg) == {
        "nodes": [{"cluster": 0, "status": "free"}, {"cluster": 1, "status": "free"}],
        "edges": [{"from": 1, "to": 0, "item": 1}],
    }


def test_recognition_to_dict(cube):
    payload = serialization.recognition_to_dict(recognize_nd_parallelotope(cube))
    assert payload["is_ndp"] and payload["d"] == 3
    assert len(payload["certificate"]) == 8
    rejected = serialization.recognition_to_dict(recognize_nd_parallelotope(families.fig2("c")))
    assert rejected["is_ndp"] is False and "reason" in rejected
